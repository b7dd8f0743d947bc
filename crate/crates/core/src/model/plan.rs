//! Solved transformation plans: accessors, itemized pricing, row validation
//! and emissions.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{ModelError, PlanningProblem, SparseMip, VariableCatalog, Violation};
use crate::catalog::BusKind;
use crate::emissions::{fleet_nox_tonnes, EmissionStandard, EmissionsError, Pairing};

/// Absolute tolerance for row feasibility of a plan.
pub const PLAN_TOLERANCE: f64 = 1e-6;

/// Decision values over the full variable catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformationPlan {
    pub vars: VariableCatalog,
    pub values: Vec<f64>,
}

impl TransformationPlan {
    pub fn new(vars: VariableCatalog, values: Vec<f64>) -> Result<Self, ModelError> {
        if values.len() != vars.len() {
            return Err(ModelError::DimensionMismatch {
                expected: vars.len(),
                got: values.len(),
            });
        }
        Ok(Self { vars, values })
    }

    fn count(&self, col: usize) -> u32 {
        self.values[col].round().max(0.0) as u32
    }

    pub fn stock(&self, k: usize, t: u32) -> u32 {
        self.count(self.vars.stock(k, t))
    }

    pub fn purchases(&self, k: usize, t: u32) -> u32 {
        self.count(self.vars.purchase(k, t))
    }

    pub fn depot_chargers(&self, t: u32) -> u32 {
        self.count(self.vars.depot_chargers(t))
    }

    pub fn station_equipped(&self, i: usize, t: u32) -> bool {
        self.values[self.vars.station_charger(i, t)] > 0.5
    }

    pub fn equipped_stations(&self, t: u32) -> Vec<usize> {
        (0..self.vars.stations)
            .filter(|&i| self.station_equipped(i, t))
            .collect()
    }

    /// Type serving sequence `s` in period `t`.
    pub fn assigned_type(&self, s: usize, t: u32) -> Option<usize> {
        (0..self.vars.types).find(|&k| self.values[self.vars.assign(s, k, t)] > 0.5)
    }

    /// First period in which station `i` is equipped.
    pub fn install_period(&self, i: usize) -> Option<u32> {
        self.vars.periods().find(|&t| self.station_equipped(i, t))
    }
}

/// Undiscounted cash flows of one period.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PeriodCosts {
    pub period: u32,
    pub discount_factor: f64,
    pub bus_purchase: f64,
    pub battery_purchase: f64,
    pub bus_sold: f64,
    pub infra_install: f64,
    pub infra_maint: f64,
    pub oper_maint: f64,
    pub oper_energy: f64,
}

impl PeriodCosts {
    pub fn net(&self) -> f64 {
        self.bus_purchase + self.battery_purchase - self.bus_sold
            + self.infra_install
            + self.infra_maint
            + self.oper_maint
            + self.oper_energy
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CostBreakdown {
    /// Value of the initial fleet at the start of the horizon.
    pub initial_fleet: f64,
    pub periods: Vec<PeriodCosts>,
    /// Residual bus value after the horizon, undiscounted.
    pub final_bus_salvage: f64,
    /// Residual battery value after the horizon, undiscounted.
    pub final_battery_salvage: f64,
    pub final_discount_factor: f64,
    pub tco: f64,
}

impl CostBreakdown {
    /// Recomputes the discounted total from the items.
    pub fn discounted_total(&self) -> f64 {
        self.initial_fleet
            + self
                .periods
                .iter()
                .map(|p| p.discount_factor * p.net())
                .sum::<f64>()
            - self.final_discount_factor * (self.final_bus_salvage + self.final_battery_salvage)
    }
}

/// Prices a plan period by period from its raw decisions.
pub fn price_plan(
    plan: &TransformationPlan,
    problem: &PlanningProblem,
) -> Result<CostBreakdown, ModelError> {
    let vars = &plan.vars;
    let expected_types = problem.types.len();
    if vars.types != expected_types
        || vars.sequences != problem.num_sequences()
        || vars.periods != problem.periods()
        || vars.stations != problem.stations.len()
    {
        return Err(ModelError::DimensionMismatch {
            expected: expected_types * problem.num_sequences() * problem.periods() as usize,
            got: vars.types * vars.sequences * vars.periods as usize,
        });
    }
    let n = problem.periods();
    let v = |col: usize| plan.values[col];
    let cfg = &problem.config;
    let (ocf_cost, ocf_maint) = problem.ocf_costs()?;
    let (ncf_cost, ncf_maint) = problem.ncf_costs();
    let life = cfg.battery_lifetime_years;

    let mut periods = Vec::with_capacity(n as usize);
    for t in 1..=n {
        let mut pc = PeriodCosts {
            period: t,
            discount_factor: problem.discount(t as i64),
            ..PeriodCosts::default()
        };
        for (k, bt) in problem.types.types.iter().enumerate() {
            pc.bus_purchase += bt.purchase_cost * v(vars.purchase(k, t));
            if bt.kind.is_battery() {
                // New buses and replacements for batteries bought `j` lifetimes ago.
                let mut batteries = 0.0;
                let mut offset = 0;
                while offset < bt.holding_period_years && offset < t {
                    batteries += v(vars.purchase(k, t - offset));
                    offset += life;
                }
                pc.battery_purchase += batteries * problem.battery_cost(k, t);
            }
            if t > bt.holding_period_years {
                let bought = t - bt.holding_period_years;
                pc.bus_sold += problem.sale_revenue(k) * v(vars.purchase(k, bought));
            }
        }
        pc.bus_sold +=
            problem.initial_retirements(t) as f64 * problem.sale_revenue(problem.initial_type);

        let prev = |col: Option<usize>| col.map_or(0.0, v);
        for i in 0..problem.stations.len() {
            let y = v(vars.station_charger(i, t));
            let before = prev((t > 1).then(|| vars.station_charger(i, t - 1)));
            pc.infra_install += ocf_cost * (y - before);
            pc.infra_maint += ocf_maint * y;
        }
        let a = v(vars.depot_chargers(t));
        let before = prev((t > 1).then(|| vars.depot_chargers(t - 1)));
        pc.infra_install += ncf_cost * (a - before);
        pc.infra_maint += ncf_maint * a;

        for s in 0..problem.num_sequences() {
            for k in 0..problem.types.len() {
                let x = v(vars.assign(s, k, t));
                if x != 0.0 {
                    let (maint, energy) = problem.operating_costs(s, k);
                    pc.oper_maint += maint * x;
                    pc.oper_energy += energy * x;
                }
            }
        }
        periods.push(pc);
    }

    let mut final_bus_salvage = problem.initial_end_value();
    let mut final_battery_salvage = 0.0;
    for k in 0..problem.types.len() {
        for t in 1..=n {
            if problem.held_at_end(k, t) {
                let count = v(vars.purchase(k, t));
                final_bus_salvage += problem.end_value(k, t) * count;
                final_battery_salvage += problem.battery_end_value(k, t) * count;
            }
        }
    }

    let mut breakdown = CostBreakdown {
        initial_fleet: problem.initial_fleet_value(),
        periods,
        final_bus_salvage,
        final_battery_salvage,
        final_discount_factor: problem.discount(n as i64 + 1),
        tco: 0.0,
    };
    breakdown.tco = breakdown.discounted_total();
    Ok(breakdown)
}

/// Rows, bounds and integrality violated by the plan beyond 1e-6.
pub fn validate_plan(plan: &TransformationPlan, mip: &SparseMip) -> Vec<Violation> {
    if plan.values.len() != mip.num_columns() {
        return vec![Violation::Bound {
            column: plan.values.len().min(mip.num_columns()),
            name: "dimension".into(),
            amount: f64::INFINITY,
        }];
    }
    mip.violations(&plan.values, PLAN_TOLERANCE)
}

/// Annual NOx of the ICEBs operating in period `t`, in tonnes.
///
/// Initial buses keep their emission class until they retire; ICEBs bought
/// during the horizon meet the newest standard.
pub fn annual_nox(
    plan: &TransformationPlan,
    problem: &PlanningProblem,
    t: u32,
    pairing: Pairing,
) -> Result<f64, EmissionsError> {
    if t == 0 || t > problem.periods() {
        return Err(EmissionsError::PeriodOutOfRange(t));
    }
    let mut inventory: BTreeMap<EmissionStandard, usize> = BTreeMap::new();
    for cohort in &problem.config.initial_fleet {
        if problem.cohort_retirement(cohort.age_years) > t as i64 {
            *inventory.entry(cohort.emission_class).or_default() += cohort.count as usize;
        }
    }
    let mut stock = 0usize;
    for (k, bt) in problem.types.types.iter().enumerate() {
        if bt.kind != BusKind::Iceb {
            continue;
        }
        stock += plan.stock(k, t) as usize;
        let class = bt.emission_class.unwrap_or(EmissionStandard::EuVi);
        for bought in 1..=t {
            if bought + bt.holding_period_years > t {
                *inventory.entry(class).or_default() += plan.purchases(k, bought) as usize;
            }
        }
    }
    let available: usize = inventory.values().sum();
    if stock > available {
        return Err(EmissionsError::InventoryMismatch {
            period: t,
            required: stock,
            available,
        });
    }
    let km: Vec<f64> = (0..problem.num_sequences())
        .filter(|&s| {
            plan.assigned_type(s, t)
                .is_some_and(|k| problem.types.types[k].kind == BusKind::Iceb)
        })
        .map(|s| problem.profiles[s].service_km() + problem.profiles[s].deadhead_km())
        .collect();
    let inventory: Vec<(EmissionStandard, usize)> = inventory.into_iter().collect();
    fleet_nox_tonnes(
        &inventory,
        &km,
        problem.config.annual_operating_days,
        pairing,
        t,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodSummary {
    pub period: u32,
    /// Buses held per type id (types with zero stock omitted).
    pub fleet: BTreeMap<String, u32>,
    pub purchases: BTreeMap<String, u32>,
    pub depot_chargers: u32,
    pub equipped_stations: Vec<String>,
    pub nox_t_per_year: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub sequence: usize,
    pub period: u32,
    pub bus_type: String,
}

/// Serializable view of a plan (plan.json).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub tco: f64,
    pub costs: CostBreakdown,
    pub periods: Vec<PeriodSummary>,
    pub assignments: Vec<Assignment>,
    /// Non-zero decision values by column name.
    pub values: BTreeMap<String, f64>,
}

impl PlanReport {
    pub fn new(
        plan: &TransformationPlan,
        problem: &PlanningProblem,
        pairing: Pairing,
    ) -> Result<Self, PlanReportError> {
        let costs = price_plan(plan, problem)?;
        let ids = |k: usize| problem.types.types[k].id.clone();
        let mut periods = Vec::new();
        let mut assignments = Vec::new();
        for t in plan.vars.periods() {
            let nonzero = |f: &dyn Fn(usize) -> u32| -> BTreeMap<String, u32> {
                (0..problem.types.len())
                    .filter_map(|k| Some((ids(k), f(k))).filter(|(_, c)| *c > 0))
                    .collect()
            };
            periods.push(PeriodSummary {
                period: t,
                fleet: nonzero(&|k| plan.stock(k, t)),
                purchases: nonzero(&|k| plan.purchases(k, t)),
                depot_chargers: plan.depot_chargers(t),
                equipped_stations: plan
                    .equipped_stations(t)
                    .into_iter()
                    .map(|i| problem.stations[i].clone())
                    .collect(),
                nox_t_per_year: annual_nox(plan, problem, t, pairing)?,
            });
            for s in 0..problem.num_sequences() {
                if let Some(k) = plan.assigned_type(s, t) {
                    assignments.push(Assignment {
                        sequence: s,
                        period: t,
                        bus_type: ids(k),
                    });
                }
            }
        }
        let values = plan
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > 1e-9)
            .map(|(c, v)| (plan.vars.name(c), *v))
            .collect();
        Ok(Self {
            tco: costs.tco,
            costs,
            periods,
            assignments,
            values,
        })
    }

    /// Station ids equipped in any period.
    pub fn equipped_stations(&self) -> BTreeSet<&str> {
        self.periods
            .iter()
            .flat_map(|p| p.equipped_stations.iter().map(String::as_str))
            .collect()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PlanReportError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Emissions(#[from] EmissionsError),
}
