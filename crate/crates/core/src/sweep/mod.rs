//! Solving single scenarios and sweeping scenario × charging power × battery
//! price reduction grids.

mod report;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use report::{emit_reports, ReportError};

use crate::catalog::BusKind;
use crate::config::{Scenario, ScenarioConfig};
use crate::emissions::Pairing;
use crate::milp::{solve_mip, MipLimits, MipStatus, SolveError, SolveOptions, SolveReport};
use crate::model::{
    build_mip, iceb_start, price_plan, CostBreakdown, ModelError, PlanReport, PlanReportError,
    PlanningProblem, TransformationModel, TransformationPlan,
};
use crate::network::Network;
use crate::scheduler::VehicleSchedule;

#[derive(Debug, Error)]
pub enum PlanningError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Report(#[from] PlanReportError),
}

/// A solved model with its priced plan.
#[derive(Debug, Clone)]
pub struct SolvedPlan {
    pub plan: TransformationPlan,
    pub report: SolveReport,
    pub costs: CostBreakdown,
}

/// Solves a built model, starting from the all-ICEB plan.
pub fn solve_model(
    model: &TransformationModel,
    limits: MipLimits,
) -> Result<SolvedPlan, PlanningError> {
    let options = SolveOptions {
        limits,
        start: Some(iceb_start(model)),
        ..SolveOptions::default()
    };
    let report = solve_mip(&model.mip, &options)?;
    let plan = TransformationPlan::new(model.vars.clone(), report.values.clone())?;
    let costs = price_plan(&plan, &model.problem)?;
    Ok(SolvedPlan { plan, report, costs })
}

#[derive(Debug, Error, PartialEq)]
pub enum SweepError {
    #[error("sweep grid `{0}` is empty")]
    EmptyGrid(&'static str),
    #[error("sweep grid `{0}` is not strictly increasing")]
    UnsortedGrid(&'static str),
    #[error("scenario `{0}` listed twice")]
    DuplicateScenario(Scenario),
    #[error("invalid range `{0}`; expected start:stop:step")]
    InvalidRange(String),
}

/// Parses `start:stop:step` (inclusive) or a comma-separated list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, SweepError> {
    let bad = || SweepError::InvalidRange(text.to_string());
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if !(step > 0.0) || stop < start {
                return Err(bad());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=count).map(|i| start + i as f64 * step).collect())
        }
        [list] => list
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
            .collect(),
        _ => Err(bad()),
    }
}

/// One point of the experiment grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub scenario: Scenario,
    pub power_kw: f64,
    /// Annual battery price reduction in percent.
    pub reduction_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub scenarios: Vec<Scenario>,
    pub powers_kw: Vec<f64>,
    pub reductions_pct: Vec<f64>,
    pub base: ScenarioConfig,
    pub limits: MipLimits,
    pub pairing: Pairing,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.scenarios.is_empty() {
            return Err(SweepError::EmptyGrid("scenarios"));
        }
        for (i, s) in self.scenarios.iter().enumerate() {
            if self.scenarios[..i].contains(s) {
                return Err(SweepError::DuplicateScenario(*s));
            }
        }
        for (name, grid) in [("powers", &self.powers_kw), ("battery-reductions", &self.reductions_pct)] {
            if grid.is_empty() {
                return Err(SweepError::EmptyGrid(name));
            }
            if grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(SweepError::UnsortedGrid(name));
            }
        }
        Ok(())
    }

    /// Cells in output order: scenario, then power, then reduction.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &scenario in &self.scenarios {
            for &power_kw in &self.powers_kw {
                for &reduction_pct in &self.reductions_pct {
                    cells.push(Cell {
                        scenario,
                        power_kw,
                        reduction_pct,
                    });
                }
            }
        }
        cells
    }

    pub fn config_for(&self, cell: &Cell) -> ScenarioConfig {
        let mut config = self.base.clone();
        config.scenario = cell.scenario;
        config.charging_power_kw = cell.power_kw;
        config.battery_price_reduction_per_year = cell.reduction_pct / 100.0;
        config
    }

    /// Bus count columns of the results table.
    pub fn count_columns(&self) -> Vec<String> {
        let caps = &self.base.beb.battery_capacities_kwh;
        std::iter::once("iceb".to_string())
            .chain(caps.iter().map(|q| format!("ocb_{q}")))
            .chain(caps.iter().map(|q| format!("ncb_{q}")))
            .collect()
    }
}

/// A solved cell.
#[derive(Debug, Clone)]
pub struct CellSolution {
    pub problem: PlanningProblem,
    pub solved: SolvedPlan,
    pub report: PlanReport,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub cell: Cell,
    /// Bus counts in the final period, aligned with [`SweepSpec::count_columns`].
    pub counts: Vec<u32>,
    pub ncf: u32,
    pub ocf: u32,
    pub tco: Option<f64>,
    pub nox_t_per_year: Option<f64>,
    pub gap: Option<f64>,
    pub status: String,
    pub solution: Option<CellSolution>,
}

impl SweepRow {
    /// Whether the cell was solved to the requested gap.
    pub fn at_gap(&self) -> bool {
        self.solution
            .as_ref()
            .is_some_and(|s| s.solved.report.at_gap())
    }

    fn failed(cell: Cell, columns: usize, reason: impl std::fmt::Display) -> Self {
        Self {
            cell,
            counts: vec![0; columns],
            ncf: 0,
            ocf: 0,
            tco: None,
            nox_t_per_year: None,
            gap: None,
            status: format!("failed: {reason}"),
            solution: None,
        }
    }
}

fn status_label(status: MipStatus) -> &'static str {
    match status {
        MipStatus::Optimal => "optimal",
        MipStatus::TimeLimit => "time_limit",
        MipStatus::NodeLimit => "node_limit",
    }
}

fn solve_cell(
    spec: &SweepSpec,
    cell: Cell,
    network: &Network,
    schedule: &VehicleSchedule,
    columns: &[String],
) -> SweepRow {
    let config = spec.config_for(&cell);
    let attempt = || -> Result<CellSolution, PlanningError> {
        let model = build_mip(network, schedule, &config)?;
        let solved = solve_model(&model, spec.limits)?;
        let report = PlanReport::new(&solved.plan, &model.problem, spec.pairing)?;
        Ok(CellSolution {
            problem: model.problem,
            solved,
            report,
        })
    };
    let solution = match attempt() {
        Ok(s) => s,
        Err(e) => {
            log::warn!("cell {} r={} b={} failed: {e}", cell.scenario, cell.power_kw, cell.reduction_pct);
            return SweepRow::failed(cell, columns.len(), e);
        }
    };
    let problem = &solution.problem;
    let plan = &solution.solved.plan;
    let n = problem.periods();
    let mut counts = vec![0; columns.len()];
    for (k, bt) in problem.types.types.iter().enumerate() {
        let column = match bt.kind {
            BusKind::Iceb => "iceb".to_string(),
            BusKind::Ocb => format!("ocb_{}", bt.battery_capacity_kwh),
            BusKind::Ncb => format!("ncb_{}", bt.battery_capacity_kwh),
        };
        if let Some(c) = columns.iter().position(|name| *name == column) {
            counts[c] += plan.stock(k, n);
        }
    }
    let last = solution.report.periods.last();
    SweepRow {
        cell,
        counts,
        ncf: plan.depot_chargers(n),
        ocf: plan.equipped_stations(n).len() as u32,
        tco: Some(solution.solved.costs.tco),
        nox_t_per_year: last.map(|p| p.nox_t_per_year),
        gap: Some(solution.solved.report.gap),
        status: status_label(solution.solved.report.status).to_string(),
        solution: Some(solution),
    }
}

/// Solves every cell of the grid. Cells run in parallel; rows come back in
/// [`SweepSpec::cells`] order and failures are recorded per row.
pub fn run_sweep(
    spec: &SweepSpec,
    network: &Network,
    schedule: &VehicleSchedule,
) -> Result<Vec<SweepRow>, SweepError> {
    spec.validate()?;
    let columns = spec.count_columns();
    Ok(spec
        .cells()
        .into_par_iter()
        .map(|cell| solve_cell(spec, cell, network, schedule, &columns))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_ranges() {
        assert_eq!(parse_grid("50:350:50").unwrap(), vec![50.0, 100.0, 150.0, 200.0, 250.0, 300.0, 350.0]);
        assert_eq!(parse_grid("0:12.5:2.5").unwrap().len(), 6);
        assert_eq!(parse_grid("50, 150").unwrap(), vec![50.0, 150.0]);
        assert!(parse_grid("5:1:1").is_err());
        assert!(parse_grid("1:2:0").is_err());
        assert!(parse_grid("a").is_err());
    }

    fn spec() -> SweepSpec {
        SweepSpec {
            scenarios: vec![Scenario::Ic, Scenario::All],
            powers_kw: vec![50.0, 150.0],
            reductions_pct: vec![0.0],
            base: ScenarioConfig::reference(2, Scenario::All, 50.0, 0.0),
            limits: MipLimits::default(),
            pairing: Pairing::default(),
        }
    }

    #[test]
    fn cells_follow_spec_order() {
        let cells = spec().cells();
        assert_eq!(cells.len(), 4);
        assert_eq!(cells[0].scenario, Scenario::Ic);
        assert_eq!(cells[1].power_kw, 150.0);
        assert_eq!(cells[3].scenario, Scenario::All);
    }

    #[test]
    fn validation() {
        let mut s = spec();
        assert!(s.validate().is_ok());
        s.powers_kw = vec![150.0, 50.0];
        assert_eq!(s.validate(), Err(SweepError::UnsortedGrid("powers")));
        s.powers_kw.clear();
        assert_eq!(s.validate(), Err(SweepError::EmptyGrid("powers")));
        let mut s = spec();
        s.scenarios.push(Scenario::Ic);
        assert_eq!(s.validate(), Err(SweepError::DuplicateScenario(Scenario::Ic)));
    }

    #[test]
    fn reduction_is_converted_to_fraction() {
        let s = spec();
        let c = s.config_for(&Cell {
            scenario: Scenario::Oc,
            power_kw: 150.0,
            reduction_pct: 2.5,
        });
        assert_eq!(c.battery_price_reduction_per_year, 0.025);
        assert_eq!(c.charging_power_kw, 150.0);
        assert_eq!(c.scenario, Scenario::Oc);
        assert_eq!(s.count_columns(), ["iceb", "ocb_100", "ocb_200", "ocb_300", "ocb_400", "ncb_100", "ncb_200", "ncb_300", "ncb_400"]);
    }
}
