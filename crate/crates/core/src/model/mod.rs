//! The fleet transformation model: problem data, variable layout, sparse MIP
//! assembly, plan pricing and validation, and MPS exchange.

mod build;
pub mod mps;
mod plan;
mod sparse;
mod start;
mod vars;

use std::collections::BTreeMap;

use thiserror::Error;

pub use build::{build_mip, build_model, RowFamily, TransformationModel};
pub use plan::{
    annual_nox, price_plan, validate_plan, Assignment, CostBreakdown, PeriodCosts, PeriodSummary,
    PlanReport, PlanReportError, TransformationPlan, PLAN_TOLERANCE,
};
pub use sparse::{Column, Row, Sense, SparseMip, Violation};
pub use start::iceb_start;
pub use vars::VariableCatalog;

use crate::catalog::{BusKind, BusTypeCatalog};
use crate::config::{ConfigError, ScenarioConfig};
use crate::costs::{decayed_battery_price, depreciated_value, discount_factor, CostError};
use crate::energy::{ncb_feasible, simulate_profile, SequenceProfile};
use crate::network::Network;
use crate::scheduler::VehicleSchedule;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("the planning horizon has no periods")]
    NoPeriods,
    #[error("the vehicle schedule has no trip sequences")]
    EmptySchedule,
    #[error("no bus type can be purchased")]
    NoPurchasableTypes,
    #[error("opportunity charging bus types must share one consumption rate")]
    NonUniformOcbRates,
    #[error("plan has {got} values but the model has {expected} columns")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Everything the model needs, derived once from network, schedule and
/// configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanningProblem {
    pub config: ScenarioConfig,
    /// Purchasable types under the configured scenario.
    pub types: BusTypeCatalog,
    /// Candidate opportunity charging stations.
    pub stations: Vec<String>,
    pub profiles: Vec<SequenceProfile>,
    /// Type holding the initial fleet (ICEB kept for the full lifetime).
    pub initial_type: usize,
    /// Loaded and empty consumption shared by all opportunity charging types.
    pub ocb_rates: (f64, f64),
}

impl PlanningProblem {
    pub fn new(
        network: &Network,
        schedule: &VehicleSchedule,
        config: &ScenarioConfig,
    ) -> Result<Self, ModelError> {
        let profiles = SequenceProfile::for_schedule(schedule, network);
        let stations = network
            .candidate_stations()
            .into_iter()
            .map(String::from)
            .collect();
        Self::from_profiles(profiles, stations, config)
    }

    pub fn from_profiles(
        profiles: Vec<SequenceProfile>,
        stations: Vec<String>,
        config: &ScenarioConfig,
    ) -> Result<Self, ModelError> {
        config.validate()?;
        if config.horizon_years == 0 {
            return Err(ModelError::NoPeriods);
        }
        if profiles.is_empty() {
            return Err(ModelError::EmptySchedule);
        }
        let types = BusTypeCatalog::for_scenario(config)?;
        if types.is_empty() {
            return Err(ModelError::NoPurchasableTypes);
        }
        let initial_type = types
            .full_life_iceb(config.bus_lifetime_years)
            .ok_or(ModelError::NoPurchasableTypes)?;
        let mut ocb = types.types.iter().filter(|t| t.kind == BusKind::Ocb);
        let ocb_rates = match ocb.next() {
            Some(first) => {
                let rates = (first.consumption_loaded, first.consumption_empty);
                if ocb.any(|t| (t.consumption_loaded, t.consumption_empty) != rates) {
                    return Err(ModelError::NonUniformOcbRates);
                }
                rates
            }
            None => crate::energy::beb_rates(config),
        };
        Ok(Self {
            config: config.clone(),
            types,
            stations,
            profiles,
            initial_type,
            ocb_rates,
        })
    }

    pub fn periods(&self) -> u32 {
        self.config.horizon_years
    }

    pub fn num_sequences(&self) -> usize {
        self.profiles.len()
    }

    pub fn discount(&self, t: i64) -> f64 {
        discount_factor(self.config.discount_rate, t)
    }

    pub fn station_index(&self) -> BTreeMap<&str, usize> {
        self.stations
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect()
    }

    /// Revenue when a bus of type `k` leaves the fleet after its holding period.
    pub fn sale_revenue(&self, k: usize) -> f64 {
        let t = &self.types.types[k];
        depreciated_value(
            t.purchase_cost,
            self.config.salvage_value(),
            t.holding_period_years as f64,
            self.config.bus_lifetime_years as f64,
        )
    }

    /// Whether a bus of type `k` bought in period `t` is still held after the
    /// horizon.
    pub fn held_at_end(&self, k: usize, t: u32) -> bool {
        t + self.types.types[k].holding_period_years > self.periods()
    }

    /// Depreciated value after the horizon of a bus bought in period `t`.
    pub fn end_value(&self, k: usize, t: u32) -> f64 {
        let bt = &self.types.types[k];
        depreciated_value(
            bt.purchase_cost,
            self.config.salvage_value(),
            (self.periods() + 1 - t) as f64,
            self.config.bus_lifetime_years as f64,
        )
    }

    pub fn battery_price(&self, k: usize, t: u32) -> f64 {
        decayed_battery_price(
            self.types.types[k].battery_cost_per_kwh_initial,
            self.config.battery_price_reduction_per_year,
            t,
        )
    }

    /// Periods within the horizon in which a bus of type `k` bought in `t`
    /// receives a battery: at purchase and after every battery lifetime while
    /// the bus is still held.
    pub fn battery_installs(&self, k: usize, t: u32) -> Vec<u32> {
        let bt = &self.types.types[k];
        if !bt.kind.is_battery() {
            return Vec::new();
        }
        let life = self.config.battery_lifetime_years;
        (0..)
            .map(|j| j * life)
            .take_while(|&offset| offset < bt.holding_period_years)
            .map(|offset| t + offset)
            .take_while(|&p| p <= self.periods())
            .collect()
    }

    pub fn battery_cost(&self, k: usize, t: u32) -> f64 {
        self.battery_price(k, t) * self.types.types[k].battery_capacity_kwh
    }

    /// Residual value after the horizon of the battery in a bus bought in `t`.
    pub fn battery_end_value(&self, k: usize, t: u32) -> f64 {
        if !self.held_at_end(k, t) {
            return 0.0;
        }
        match self.battery_installs(k, t).last() {
            Some(&last) => {
                let life = self.config.battery_lifetime_years as f64;
                let age = (self.periods() + 1 - last) as f64;
                self.battery_cost(k, last) * (1.0 - age / life).max(0.0)
            }
            None => 0.0,
        }
    }

    /// Daily operating cost of sequence `s` on type `k`, scaled to a year.
    pub fn operating_costs(&self, s: usize, k: usize) -> (f64, f64) {
        let bt = &self.types.types[k];
        let p = &self.profiles[s];
        let eta = self.config.annual_operating_days;
        let km = p.service_km() + p.deadhead_km();
        let maintenance = eta * bt.maintenance_cost_per_km * km;
        let energy = eta
            * bt.energy_price_per_unit
            * p.consumption(bt.consumption_loaded, bt.consumption_empty);
        (maintenance, energy)
    }

    /// Energy needed by sequence `s` at the rates of type `k`.
    pub fn consumption(&self, s: usize, k: usize) -> f64 {
        let bt = &self.types.types[k];
        self.profiles[s].consumption(bt.consumption_loaded, bt.consumption_empty)
    }

    /// Whether type `k` can operate sequence `s` under the most favourable
    /// infrastructure (every candidate station equipped).
    pub fn can_operate(&self, s: usize, k: usize) -> bool {
        let bt = &self.types.types[k];
        let profile = &self.profiles[s];
        match bt.kind {
            BusKind::Iceb => true,
            BusKind::Ncb => ncb_feasible(profile, bt, &self.config).unwrap_or(false),
            BusKind::Ocb => {
                simulate_profile(
                    profile,
                    bt.consumption_loaded,
                    bt.consumption_empty,
                    bt.usable_capacity(self.config.usable_soc_fraction),
                    self.config.charging_power_kw,
                    |leg| leg.chargeable,
                )
                .feasible
            }
        }
    }

    /// Purchase period of an initial cohort of the given age; non-positive.
    pub fn cohort_purchase_period(&self, age_years: u32) -> i64 {
        1 - age_years as i64
    }

    /// Period in which an initial cohort reaches the end of its life and is sold.
    pub fn cohort_retirement(&self, age_years: u32) -> i64 {
        self.cohort_purchase_period(age_years) + self.config.bus_lifetime_years as i64
    }

    pub fn initial_fleet_size(&self) -> u32 {
        self.config.initial_fleet_size()
    }

    /// Initial buses sold at the end of their life in period `t`.
    pub fn initial_retirements(&self, t: u32) -> u32 {
        self.config
            .initial_fleet
            .iter()
            .filter(|c| self.cohort_retirement(c.age_years) == t as i64)
            .map(|c| c.count)
            .sum()
    }

    /// Value of the initial fleet at the start of the horizon.
    pub fn initial_fleet_value(&self) -> f64 {
        let bt = &self.types.types[self.initial_type];
        self.config
            .initial_fleet
            .iter()
            .map(|c| {
                c.count as f64
                    * depreciated_value(
                        bt.purchase_cost,
                        self.config.salvage_value(),
                        c.age_years as f64,
                        self.config.bus_lifetime_years as f64,
                    )
            })
            .sum()
    }

    /// Value after the horizon of the initial buses still held then.
    pub fn initial_end_value(&self) -> f64 {
        let bt = &self.types.types[self.initial_type];
        let n = self.periods() as i64;
        self.config
            .initial_fleet
            .iter()
            .filter(|c| self.cohort_retirement(c.age_years) > n)
            .map(|c| {
                let age = n + 1 - self.cohort_purchase_period(c.age_years);
                c.count as f64
                    * depreciated_value(
                        bt.purchase_cost,
                        self.config.salvage_value(),
                        age as f64,
                        self.config.bus_lifetime_years as f64,
                    )
            })
            .sum()
    }

    pub fn ocf_costs(&self) -> Result<(f64, f64), CostError> {
        Ok((self.config.ocf_cost()?, self.config.ocf_maintenance()?))
    }

    pub fn ncf_costs(&self) -> (f64, f64) {
        (self.config.ncf_cost, self.config.ncf_maintenance())
    }
}
