//! Assembly of the sparse MIP from problem data.

use serde::{Deserialize, Serialize};

use super::{ModelError, PlanningProblem, Sense, SparseMip, VariableCatalog};
use crate::catalog::BusKind;
use crate::config::{DepotCouplingMode, ScenarioConfig};
use crate::network::Network;
use crate::scheduler::VehicleSchedule;

/// Constraint families, identified by row-name prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RowFamily {
    /// Stock balance per type and period.
    Stock,
    /// Depot chargers are never removed.
    DepotMonotone,
    /// Station chargers are never removed.
    StationMonotone,
    /// Every sequence is served by exactly one type.
    Assign,
    /// Enough buses of each type for their sequences.
    Cover,
    /// Night charging range limit.
    NcbRange,
    /// Capacity delimiter tied to the assigned opportunity charging type.
    ThetaLink,
    /// State of charge before the first trip.
    SocInit,
    /// State of charge propagation along the sequence.
    SocPropagation,
    /// Recharge limited by dwell time and an installed facility.
    RechargeTime,
    /// Recharge limited by free battery capacity.
    RechargeRoom,
    /// Optional depot charger per battery bus.
    DepotCoupling,
}

impl RowFamily {
    pub const ALL: [RowFamily; 12] = [
        RowFamily::Stock,
        RowFamily::DepotMonotone,
        RowFamily::StationMonotone,
        RowFamily::Assign,
        RowFamily::Cover,
        RowFamily::NcbRange,
        RowFamily::ThetaLink,
        RowFamily::SocInit,
        RowFamily::SocPropagation,
        RowFamily::RechargeTime,
        RowFamily::RechargeRoom,
        RowFamily::DepotCoupling,
    ];

    pub fn prefix(self) -> &'static str {
        match self {
            RowFamily::Stock => "stock_",
            RowFamily::DepotMonotone => "depot_mono_",
            RowFamily::StationMonotone => "station_mono_",
            RowFamily::Assign => "assign_",
            RowFamily::Cover => "cover_",
            RowFamily::NcbRange => "ncb_range_",
            RowFamily::ThetaLink => "theta_link_",
            RowFamily::SocInit => "soc_init_",
            RowFamily::SocPropagation => "soc_prop_",
            RowFamily::RechargeTime => "recharge_time_",
            RowFamily::RechargeRoom => "recharge_room_",
            RowFamily::DepotCoupling => "depot_couple_",
        }
    }

    pub fn of(row_name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| row_name.starts_with(f.prefix()))
    }
}

/// A built model: problem data, column layout and the sparse MIP.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformationModel {
    pub problem: PlanningProblem,
    pub vars: VariableCatalog,
    pub mip: SparseMip,
}

/// Builds the transformation MIP for a network, its schedule and a scenario.
pub fn build_mip(
    network: &Network,
    schedule: &VehicleSchedule,
    config: &ScenarioConfig,
) -> Result<TransformationModel, ModelError> {
    build_model(PlanningProblem::new(network, schedule, config)?)
}

pub fn build_model(problem: PlanningProblem) -> Result<TransformationModel, ModelError> {
    let n = problem.periods();
    let num_types = problem.types.len();
    let num_seq = problem.num_sequences();
    let vars = VariableCatalog::new(
        n,
        num_types,
        problem.stations.len(),
        problem.profiles.iter().map(|p| p.legs.len()).collect(),
    );
    let cfg = &problem.config;
    let mu = cfg.usable_soc_fraction;
    let ocb_types: Vec<usize> = (0..num_types)
        .filter(|&k| problem.types.types[k].kind == BusKind::Ocb)
        .collect();
    // Energy columns only matter for opportunity charging buses.
    let energy_cap = ocb_types
        .iter()
        .map(|&k| problem.types.types[k].usable_capacity(mu))
        .fold(0.0, f64::max);
    let d = |t: u32| problem.discount(t as i64);
    let (ocf_cost, ocf_maint) = problem.ocf_costs()?;
    let (ncf_cost, ncf_maint) = problem.ncf_costs();
    let initial = problem.initial_fleet_size() as f64;
    let seq_bound = num_seq as f64;
    let stock_bound = initial + seq_bound * n as f64;
    let charger_bound = {
        let bebs = problem.types.types.iter().filter(|t| t.kind.is_battery()).count();
        (seq_bound * n as f64 * bebs as f64).max(1.0)
    };

    let mut objective = vec![0.0; vars.len()];
    let lower = vec![0.0; vars.len()];
    let mut upper = vec![0.0; vars.len()];

    for k in 0..num_types {
        for t in 1..=n {
            upper[vars.stock(k, t)] = stock_bound;
            let p = vars.purchase(k, t);
            upper[p] = seq_bound;
            let bt = &problem.types.types[k];
            let mut c = bt.purchase_cost * d(t);
            for install in problem.battery_installs(k, t) {
                c += problem.battery_cost(k, install) * d(install);
            }
            let sold = t + bt.holding_period_years;
            if sold <= n {
                c -= problem.sale_revenue(k) * d(sold);
            }
            if problem.held_at_end(k, t) {
                c -= (problem.end_value(k, t) + problem.battery_end_value(k, t)) * d(n + 1);
            }
            objective[p] = c;
        }
    }
    let install_coef = |cost: f64, maint: f64, t: u32| {
        let mut c = (cost + maint) * d(t);
        if t < n {
            c -= cost * d(t + 1);
        }
        c
    };
    for t in 1..=n {
        let a = vars.depot_chargers(t);
        upper[a] = charger_bound;
        objective[a] = install_coef(ncf_cost, ncf_maint, t);
        for i in 0..problem.stations.len() {
            let y = vars.station_charger(i, t);
            upper[y] = 1.0;
            objective[y] = install_coef(ocf_cost, ocf_maint, t);
        }
    }
    for s in 0..num_seq {
        for k in 0..num_types {
            let allowed = problem.can_operate(s, k);
            let (maint, energy) = problem.operating_costs(s, k);
            for t in 1..=n {
                let x = vars.assign(s, k, t);
                upper[x] = if allowed { 1.0 } else { 0.0 };
                objective[x] = (maint + energy) * d(t);
            }
        }
        let profile = &problem.profiles[s];
        for t in 1..=n {
            upper[vars.capacity(s, t)] = energy_cap;
            for p in 0..=profile.legs.len() {
                upper[vars.soc(s, p, t)] = energy_cap;
            }
            for (p, leg) in profile.legs.iter().enumerate() {
                let open = leg.chargeable && leg.dwell_h > 0.0;
                upper[vars.recharge(s, p, t)] = if open { energy_cap } else { 0.0 };
            }
        }
    }

    let mut mip = SparseMip::new("fleet_transformation");
    for col in 0..vars.len() {
        mip.add_column(vars.name(col), lower[col], upper[col], vars.is_integer(col), objective[col]);
    }

    // Initial fleet value, sales of initial buses and their residual value.
    let mut constant = problem.initial_fleet_value();
    let retire_revenue = problem.sale_revenue(problem.initial_type);
    for t in 1..=n {
        constant -= problem.initial_retirements(t) as f64 * retire_revenue * d(t);
    }
    constant -= problem.initial_end_value() * d(n + 1);
    mip.objective_constant = constant;

    for k in 0..num_types {
        let h = problem.types.types[k].holding_period_years;
        let opening = if k == problem.initial_type { initial } else { 0.0 };
        for t in 1..=n {
            let mut coefs = vec![(vars.stock(k, t), 1.0), (vars.purchase(k, t), -1.0)];
            let mut rhs = 0.0;
            if t > 1 {
                coefs.push((vars.stock(k, t - 1), -1.0));
            } else {
                rhs += opening;
            }
            if t > h {
                coefs.push((vars.purchase(k, t - h), 1.0));
            }
            if k == problem.initial_type {
                rhs -= problem.initial_retirements(t) as f64;
            }
            mip.add_row(format!("stock_k{k}_t{t}"), coefs, Sense::Eq, rhs);
        }
    }
    for t in 2..=n {
        mip.add_row(
            format!("depot_mono_t{t}"),
            [(vars.depot_chargers(t), 1.0), (vars.depot_chargers(t - 1), -1.0)],
            Sense::Ge,
            0.0,
        );
        for i in 0..problem.stations.len() {
            mip.add_row(
                format!("station_mono_i{i}_t{t}"),
                [(vars.station_charger(i, t), 1.0), (vars.station_charger(i, t - 1), -1.0)],
                Sense::Ge,
                0.0,
            );
        }
    }
    for t in 1..=n {
        for s in 0..num_seq {
            mip.add_row(
                format!("assign_s{s}_t{t}"),
                (0..num_types).map(|k| (vars.assign(s, k, t), 1.0)),
                Sense::Eq,
                1.0,
            );
        }
        for k in 0..num_types {
            let mut coefs = vec![(vars.stock(k, t), 1.0)];
            coefs.extend((0..num_seq).map(|s| (vars.assign(s, k, t), -1.0)));
            mip.add_row(format!("cover_k{k}_t{t}"), coefs, Sense::Ge, 0.0);
        }
    }
    let stations = problem.station_index();
    let (loaded, empty) = problem.ocb_rates;
    for s in 0..num_seq {
        let profile = &problem.profiles[s];
        for t in 1..=n {
            for k in 0..num_types {
                let bt = &problem.types.types[k];
                if bt.kind == BusKind::Ncb {
                    mip.add_row(
                        format!("ncb_range_s{s}_k{k}_t{t}"),
                        [(vars.assign(s, k, t), problem.consumption(s, k))],
                        Sense::Le,
                        bt.usable_capacity(mu),
                    );
                }
            }
            // Consumption is scaled by the opportunity charging share so the
            // energy block vanishes for other bus types.
            let theta = vars.capacity(s, t);
            let ocb_share = |coef: f64| -> Vec<(usize, f64)> {
                ocb_types.iter().map(|&k| (vars.assign(s, k, t), coef)).collect()
            };
            let mut coefs = vec![(theta, 1.0)];
            coefs.extend(ocb_types.iter().map(|&k| {
                (vars.assign(s, k, t), -problem.types.types[k].usable_capacity(mu))
            }));
            mip.add_row(format!("theta_link_s{s}_t{t}"), coefs, Sense::Le, 0.0);
            let mut coefs = vec![(vars.soc(s, 0, t), 1.0), (theta, -1.0)];
            coefs.extend(ocb_share(profile.pull_out_km * empty));
            mip.add_row(format!("soc_init_s{s}_t{t}"), coefs, Sense::Le, 0.0);
            for (p, leg) in profile.legs.iter().enumerate() {
                let mut coefs = vec![
                    (vars.soc(s, p + 1, t), 1.0),
                    (vars.soc(s, p, t), -1.0),
                    (vars.recharge(s, p, t), -1.0),
                ];
                coefs.extend(ocb_share(leg.service_km * loaded + leg.deadhead_after_km * empty));
                mip.add_row(format!("soc_prop_s{s}_p{p}_t{t}"), coefs, Sense::Le, 0.0);
            }
            for (p, leg) in profile.legs.iter().enumerate() {
                if !(leg.chargeable && leg.dwell_h > 0.0) {
                    continue;
                }
                let i = stations[leg.station.as_str()];
                mip.add_row(
                    format!("recharge_time_s{s}_p{p}_t{t}"),
                    [
                        (vars.recharge(s, p, t), 1.0),
                        (vars.station_charger(i, t), -(cfg.charging_power_kw * leg.dwell_h).min(energy_cap)),
                    ],
                    Sense::Le,
                    0.0,
                );
            }
            for p in 0..profile.legs.len() {
                mip.add_row(
                    format!("recharge_room_s{s}_p{p}_t{t}"),
                    [(vars.recharge(s, p, t), 1.0), (vars.soc(s, p, t), 1.0), (theta, -1.0)],
                    Sense::Le,
                    0.0,
                );
            }
        }
    }
    if cfg.depot_coupling_mode == DepotCouplingMode::PerBeb {
        for t in 1..=n {
            let mut coefs = vec![(vars.depot_chargers(t), 1.0)];
            for k in 0..num_types {
                if problem.types.types[k].kind.is_battery() {
                    coefs.push((vars.stock(k, t), -1.0));
                }
            }
            mip.add_row(format!("depot_couple_t{t}"), coefs, Sense::Ge, 0.0);
        }
    }

    Ok(TransformationModel { problem, vars, mip })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Scenario;
    use crate::energy::{Leg, SequenceProfile};

    fn profile(km: f64) -> SequenceProfile {
        SequenceProfile {
            pull_out_km: 2.0,
            legs: vec![
                Leg {
                    label: "A".into(),
                    station: "S".into(),
                    chargeable: true,
                    dwell_h: 0.0,
                    service_km: km,
                    deadhead_after_km: 0.0,
                },
                Leg {
                    label: "B".into(),
                    station: "S".into(),
                    chargeable: true,
                    dwell_h: 0.25,
                    service_km: km,
                    deadhead_after_km: 2.0,
                },
            ],
        }
    }

    fn model(scenario: Scenario, km: f64, coupling: DepotCouplingMode) -> TransformationModel {
        let mut cfg = ScenarioConfig::reference(2, scenario, 350.0, 0.025);
        cfg.bus_lifetime_years = 3;
        cfg.battery_lifetime_years = 2;
        cfg.depot_coupling_mode = coupling;
        let problem =
            PlanningProblem::from_profiles(vec![profile(km)], vec!["S".into()], &cfg).unwrap();
        build_model(problem).unwrap()
    }

    fn count(m: &TransformationModel, family: RowFamily) -> usize {
        m.mip.rows.iter().filter(|r| RowFamily::of(&r.name) == Some(family)).count()
    }

    #[test]
    fn row_families_have_expected_sizes() {
        let m = model(Scenario::All, 10.0, DepotCouplingMode::None);
        let k = m.problem.types.len();
        assert_eq!(k, 3 + 4 + 4);
        assert_eq!(count(&m, RowFamily::Stock), k * 2);
        assert_eq!(count(&m, RowFamily::DepotMonotone), 1);
        assert_eq!(count(&m, RowFamily::StationMonotone), 1);
        assert_eq!(count(&m, RowFamily::Assign), 2);
        assert_eq!(count(&m, RowFamily::Cover), k * 2);
        assert_eq!(count(&m, RowFamily::NcbRange), 4 * 2);
        assert_eq!(count(&m, RowFamily::ThetaLink), 2);
        assert_eq!(count(&m, RowFamily::SocInit), 2);
        assert_eq!(count(&m, RowFamily::SocPropagation), 4);
        assert_eq!(count(&m, RowFamily::RechargeTime), 2);
        assert_eq!(count(&m, RowFamily::RechargeRoom), 4);
        assert_eq!(count(&m, RowFamily::DepotCoupling), 0);
        assert!(m.mip.is_well_formed());
        assert_eq!(m.mip.num_columns(), m.vars.len());
        let m = model(Scenario::All, 10.0, DepotCouplingMode::PerBeb);
        assert_eq!(count(&m, RowFamily::DepotCoupling), 2);
    }

    #[test]
    fn long_sequences_fix_night_buses_out() {
        let m = model(Scenario::Nc, 500.0, DepotCouplingMode::None);
        for k in 0..m.problem.types.len() {
            let fixed = m.mip.columns[m.vars.assign(0, k, 1)].upper == 0.0;
            assert_eq!(fixed, m.problem.types.types[k].kind == BusKind::Ncb);
        }
    }

    #[test]
    fn objective_pieces() {
        let m = model(Scenario::Ic, 10.0, DepotCouplingMode::None);
        let p = &m.problem;
        let d = |t: i64| p.discount(t);
        // One-year ICEB bought in period 1 and sold in period 2.
        let k = p.types.index_of("ICEB-h1").unwrap();
        let expected = 330_000.0 * d(1) - p.sale_revenue(k) * d(2);
        assert!((m.mip.columns[m.vars.purchase(k, 1)].objective - expected).abs() < 1e-6);
        // Bought in the last period: valued after the horizon.
        let expected = 330_000.0 * d(2) - p.end_value(k, 2) * d(3);
        assert!((m.mip.columns[m.vars.purchase(k, 2)].objective - expected).abs() < 1e-6);
        let y1 = m.mip.columns[m.vars.station_charger(0, 1)].objective;
        assert!((y1 - (134_250.0 * 1.01 * d(1) - 134_250.0 * d(2))).abs() < 1e-6);
    }

    #[test]
    fn recharge_only_after_a_dwell() {
        let m = model(Scenario::Oc, 10.0, DepotCouplingMode::None);
        assert_eq!(m.mip.columns[m.vars.recharge(0, 0, 1)].upper, 0.0);
        assert!(m.mip.columns[m.vars.recharge(0, 1, 1)].upper > 0.0);
    }
}
