//! LP-relaxation branch-and-bound over [`SparseMip`](crate::model::SparseMip)
//! with an in-house bounded-variable primal and dual simplex.

mod bnb;
mod lp;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bnb::{solve_mip, MipLimits, MipStatus, NodeRecord, SolveOptions, SolveReport};
pub use lp::{solve_lp, solve_lp_with_bounds, LpSolution, LpStatus};

/// Every numerical tolerance used by the solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Primal feasibility of rows and bounds.
    pub feasibility: f64,
    /// Reduced-cost optimality, relative to the largest objective coefficient.
    pub optimality: f64,
    /// Smallest usable pivot magnitude.
    pub pivot: f64,
    /// Distance to the nearest integer accepted as integral.
    pub integrality: f64,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: usize,
    /// Pivots between recomputations of primal values and reduced costs.
    pub refresh_every: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            feasibility: 1e-7,
            optimality: 1e-9,
            pivot: 1e-9,
            integrality: 1e-6,
            bland_after: 1000,
            refresh_every: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("the model is infeasible")]
    Infeasible,
    #[error("the model is unbounded")]
    Unbounded,
    #[error("simplex iteration limit reached")]
    IterationLimit,
    #[error("limits reached before any feasible solution was found")]
    NoFeasibleSolutionFound,
    #[error("could not start the worker pool: {0}")]
    ThreadPool(String),
}
