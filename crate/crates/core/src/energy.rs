//! State-of-charge simulation of battery buses over trip sequences.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{BusKind, BusType};
use crate::config::ScenarioConfig;
use crate::network::Network;
use crate::scheduler::{TripSequence, VehicleSchedule};

/// Slack below zero still counted as a non-negative state of charge, kWh.
pub const SOC_TOLERANCE: f64 = 1e-9;
/// Resolution of the minimum-capacity search, kWh.
pub const CAPACITY_RESOLUTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnergyError {
    #[error("bus type `{0}` has no battery")]
    NotABev(String),
    #[error("bus type `{0}` is not a night charging bus")]
    NotAnNcb(String),
}

/// One service trip of a sequence together with the waiting time before it and
/// the empty run after it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leg {
    pub label: String,
    pub station: String,
    /// Whether the start station is a candidate charging location.
    pub chargeable: bool,
    /// Usable charging time before the trip, hours; zero for the first trip.
    pub dwell_h: f64,
    pub service_km: f64,
    /// Empty run to the next trip, or to the depot after the last trip.
    pub deadhead_after_km: f64,
}

/// Distances and dwell times of a trip sequence, independent of bus type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceProfile {
    pub pull_out_km: f64,
    pub legs: Vec<Leg>,
}

impl SequenceProfile {
    pub fn new(sequence: &TripSequence, network: &Network) -> Self {
        let candidates: BTreeSet<&str> = network.candidate_stations().into_iter().collect();
        let trips: Vec<_> = sequence
            .trips
            .iter()
            .map(|l| network.trip(l).expect("sequence trips belong to the network"))
            .collect();
        let pull_out_km = trips.first().map_or(0.0, |t| network.pull_out(t).distance_km);
        let legs = trips
            .iter()
            .enumerate()
            .map(|(p, trip)| {
                let dwell_h = if p == 0 {
                    0.0
                } else {
                    let prev = trips[p - 1];
                    let leg = network.connection(prev, trip);
                    ((trip.depart_min - prev.end_min) as f64 - leg.time_min).max(0.0) / 60.0
                };
                let deadhead_after_km = match trips.get(p + 1) {
                    Some(next) => network.connection(trip, next).distance_km,
                    None => network.pull_in(trip).distance_km,
                };
                Leg {
                    label: trip.label.clone(),
                    station: trip.start_station.clone(),
                    chargeable: candidates.contains(trip.start_station.as_str()),
                    dwell_h,
                    service_km: trip.distance_km,
                    deadhead_after_km,
                }
            })
            .collect();
        Self { pull_out_km, legs }
    }

    pub fn for_schedule(schedule: &VehicleSchedule, network: &Network) -> Vec<Self> {
        schedule.sequences.iter().map(|s| Self::new(s, network)).collect()
    }

    pub fn service_km(&self) -> f64 {
        self.legs.iter().map(|l| l.service_km).sum()
    }

    pub fn deadhead_km(&self) -> f64 {
        self.pull_out_km + self.legs.iter().map(|l| l.deadhead_after_km).sum::<f64>()
    }

    /// Energy for the whole day at the given per-km rates.
    pub fn consumption(&self, loaded: f64, empty: f64) -> f64 {
        loaded * self.service_km() + empty * self.deadhead_km()
    }

    pub fn max_dwell_h(&self) -> f64 {
        self.legs.iter().map(|l| l.dwell_h).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocRecord {
    pub label: String,
    /// Usable energy on arrival at the start station, kWh.
    pub soc_before: f64,
    pub charged: f64,
    pub soc_after_trip: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocTrace {
    pub records: Vec<SocRecord>,
    /// Usable energy on return to the depot.
    pub final_soc: f64,
    pub feasible: bool,
}

/// Greedy simulation: leave the depot full, recharge as much as time and
/// headroom allow at every equipped start station, and fail if the state of
/// charge ever drops below zero.
pub fn simulate_profile(
    profile: &SequenceProfile,
    loaded: f64,
    empty: f64,
    usable_capacity: f64,
    power_kw: f64,
    equipped: impl Fn(&Leg) -> bool,
) -> SocTrace {
    let mut q = usable_capacity - profile.pull_out_km * empty;
    let mut feasible = q >= -SOC_TOLERANCE;
    let mut records = Vec::with_capacity(profile.legs.len());
    for leg in &profile.legs {
        let charged = if leg.dwell_h > 0.0 && equipped(leg) {
            (power_kw * leg.dwell_h).min(usable_capacity - q).max(0.0)
        } else {
            0.0
        };
        let soc_after_trip = q + charged - leg.service_km * loaded;
        records.push(SocRecord {
            label: leg.label.clone(),
            soc_before: q,
            charged,
            soc_after_trip,
        });
        q = soc_after_trip - leg.deadhead_after_km * empty;
        feasible &= q >= -SOC_TOLERANCE;
    }
    SocTrace {
        records,
        final_soc: q,
        feasible,
    }
}

/// Simulates `bus_type` on a sequence with charging facilities at `equipped`.
pub fn simulate_sequence(
    profile: &SequenceProfile,
    bus_type: &BusType,
    equipped: &BTreeSet<String>,
    charging_power_kw: f64,
    config: &ScenarioConfig,
) -> Result<SocTrace, EnergyError> {
    if !bus_type.kind.is_battery() {
        return Err(EnergyError::NotABev(bus_type.id.clone()));
    }
    // Night charging buses have no opportunity charging.
    let power = if bus_type.kind == BusKind::Ocb {
        charging_power_kw
    } else {
        0.0
    };
    Ok(simulate_profile(
        profile,
        bus_type.consumption_loaded,
        bus_type.consumption_empty,
        bus_type.usable_capacity(config.usable_soc_fraction),
        power,
        |leg| equipped.contains(&leg.station),
    ))
}

/// Whether a night charging bus covers the whole day on one charge.
pub fn ncb_feasible(
    profile: &SequenceProfile,
    bus_type: &BusType,
    config: &ScenarioConfig,
) -> Result<bool, EnergyError> {
    if bus_type.kind != BusKind::Ncb {
        return Err(EnergyError::NotAnNcb(bus_type.id.clone()));
    }
    let need = profile.consumption(bus_type.consumption_loaded, bus_type.consumption_empty);
    Ok(need <= bus_type.usable_capacity(config.usable_soc_fraction) + SOC_TOLERANCE)
}

/// Per-km battery bus consumption (loaded, empty) from the configuration.
pub fn beb_rates(config: &ScenarioConfig) -> (f64, f64) {
    let loaded = config.beb.consumption_kwh_per_km;
    (loaded, loaded * config.empty_consumption_fraction)
}

/// Smallest gross battery capacity, to [`CAPACITY_RESOLUTION`], that operates
/// the sequence with a charging facility at every candidate station.
pub fn min_battery_capacity(
    profile: &SequenceProfile,
    charging_power_kw: f64,
    config: &ScenarioConfig,
) -> f64 {
    let (loaded, empty) = beb_rates(config);
    let mu = config.usable_soc_fraction;
    let feasible = |q: f64| {
        simulate_profile(profile, loaded, empty, mu * q, charging_power_kw, |leg| leg.chargeable)
            .feasible
    };
    let mut hi = profile.consumption(loaded, empty) / mu;
    if hi <= 0.0 {
        return 0.0;
    }
    let mut lo = 0.0;
    while hi - lo > CAPACITY_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityRow {
    pub power_kw: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub share_pct: f64,
}

/// Quantile by linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Distribution of minimum capacities per charging power and the share of
/// sequences a bus with gross capacity `q_max` can operate.
pub fn feasibility_study(
    profiles: &[SequenceProfile],
    config: &ScenarioConfig,
    power_grid: &[f64],
    q_max: f64,
) -> Vec<FeasibilityRow> {
    power_grid
        .iter()
        .map(|&power| {
            let mut caps: Vec<f64> = profiles
                .par_iter()
                .map(|p| min_battery_capacity(p, power, config))
                .collect();
            caps.sort_by(f64::total_cmp);
            let ok = caps.iter().filter(|&&c| c <= q_max).count();
            let share_pct = if caps.is_empty() {
                0.0
            } else {
                100.0 * ok as f64 / caps.len() as f64
            };
            FeasibilityRow {
                power_kw: power,
                min: quantile(&caps, 0.0),
                q1: quantile(&caps, 0.25),
                median: quantile(&caps, 0.5),
                q3: quantile(&caps, 0.75),
                max: quantile(&caps, 1.0),
                share_pct,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::BusTypeCatalog;
    use crate::config::Scenario;

    fn leg(label: &str, dwell_h: f64, km: f64) -> Leg {
        Leg {
            label: label.into(),
            station: "S1".into(),
            chargeable: true,
            dwell_h,
            service_km: km,
            deadhead_after_km: 0.0,
        }
    }

    fn config() -> ScenarioConfig {
        ScenarioConfig::reference(1, Scenario::All, 350.0, 0.0)
    }

    fn bus(kind: BusKind, q: f64) -> BusType {
        let cat = BusTypeCatalog::from_config(&config()).unwrap();
        let mut t = cat.types.into_iter().find(|t| t.kind == kind).unwrap();
        t.battery_capacity_kwh = q;
        t
    }

    fn equipped() -> BTreeSet<String> {
        ["S1".to_string()].into_iter().collect()
    }

    #[test]
    fn single_trip_examples() {
        let p = SequenceProfile { pull_out_km: 0.0, legs: vec![leg("T", 0.0, 10.0)] };
        let tr = simulate_sequence(&p, &bus(BusKind::Ocb, 100.0), &BTreeSet::new(), 350.0, &config())
            .unwrap();
        assert!(tr.feasible);
        assert!((tr.final_soc - 59.4).abs() < 1e-9);
        let tr = simulate_sequence(&p, &bus(BusKind::Ocb, 25.0), &BTreeSet::new(), 350.0, &config())
            .unwrap();
        assert!(!tr.feasible);
        assert!((min_battery_capacity(&p, 350.0, &config()) - 25.75).abs() < 1e-9);
    }

    #[test]
    fn recharge_between_two_trips() {
        let p = SequenceProfile {
            pull_out_km: 0.0,
            legs: vec![leg("A", 0.0, 10.0), leg("B", 10.0 / 60.0, 10.0)],
        };
        let tr = simulate_sequence(&p, &bus(BusKind::Ocb, 30.0 / 0.8), &equipped(), 350.0, &config())
            .unwrap();
        assert!(tr.feasible);
        assert!((tr.records[1].charged - 20.6).abs() < 1e-9);
        let q = min_battery_capacity(&p, 350.0, &config());
        assert!((25.75 - 1e-9..=25.75 + CAPACITY_RESOLUTION).contains(&q), "{q}");
    }

    #[test]
    fn night_buses_never_recharge() {
        let p = SequenceProfile {
            pull_out_km: 0.0,
            legs: vec![leg("A", 0.0, 10.0), leg("B", 1.0, 10.0)],
        };
        let tr = simulate_sequence(&p, &bus(BusKind::Ncb, 30.0), &equipped(), 350.0, &config())
            .unwrap();
        assert!(tr.records.iter().all(|r| r.charged == 0.0));
        assert!(!tr.feasible);
        assert!(matches!(
            simulate_sequence(&p, &bus(BusKind::Iceb, 0.0), &equipped(), 350.0, &config()),
            Err(EnergyError::NotABev(_))
        ));
    }

    #[test]
    fn ncb_boundary() {
        let cfg = config();
        let profile = |kwh: f64| SequenceProfile {
            pull_out_km: 0.0,
            legs: vec![leg("A", 0.0, kwh / 2.06)],
        };
        let ncb = bus(BusKind::Ncb, 100.0);
        assert!(ncb_feasible(&profile(79.9), &ncb, &cfg).unwrap());
        assert!(!ncb_feasible(&profile(80.1), &ncb, &cfg).unwrap());
        let empty = SequenceProfile { pull_out_km: 0.0, legs: vec![] };
        assert!(ncb_feasible(&empty, &ncb, &cfg).unwrap());
        assert!(ncb_feasible(&empty, &bus(BusKind::Ocb, 100.0), &cfg).is_err());
        assert_eq!(min_battery_capacity(&empty, 350.0, &cfg), 0.0);
    }

    #[test]
    fn pull_out_counts_against_first_trip() {
        let mut p = SequenceProfile { pull_out_km: 4.0, legs: vec![leg("A", 0.0, 10.0)] };
        p.legs[0].deadhead_after_km = 4.0;
        let tr = simulate_profile(&p, 2.0, 1.5, 40.0, 0.0, |_| false);
        assert_eq!(tr.records[0].soc_before, 34.0);
        assert_eq!(tr.final_soc, 8.0);
        assert!(tr.feasible);
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.25), 1.75);
        assert_eq!(quantile(&v, 1.0), 4.0);
    }

    #[test]
    fn study_shares() {
        let cfg = config();
        let profiles = vec![
            SequenceProfile { pull_out_km: 0.0, legs: vec![leg("A", 0.0, 10.0)] },
            SequenceProfile { pull_out_km: 0.0, legs: vec![leg("B", 0.0, 20.0)] },
        ];
        let rows = feasibility_study(&profiles, &cfg, &[50.0, 350.0], 10.0);
        assert!(rows.iter().all(|r| r.share_pct == 0.0));
        let rows = feasibility_study(&profiles, &cfg, &[50.0], 1000.0);
        assert_eq!(rows[0].share_pct, 100.0);
        assert!((rows[0].max - 51.5).abs() < 1e-9);
    }
}
