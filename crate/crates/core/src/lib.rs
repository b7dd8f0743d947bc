//! Multi-period planning of battery electric bus fleets and their charging
//! infrastructure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod config;
pub mod costs;
pub mod emissions;
pub mod energy;
pub mod milp;
pub mod model;
pub mod network;
pub mod scheduler;
pub mod sweep;
