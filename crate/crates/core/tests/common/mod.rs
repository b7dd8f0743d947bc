//! Random instances and brute-force oracles shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use fleetplan::catalog::BusKind;
use fleetplan::config::{InitialCohort, Scenario, ScenarioConfig};
use fleetplan::emissions::EmissionStandard;
use fleetplan::energy::{ncb_feasible, simulate_profile, Leg, SequenceProfile};
use fleetplan::model::{price_plan, PlanningProblem, TransformationPlan, VariableCatalog};
use fleetplan::network::{DeadheadLeg, DeadheadMatrix, Network, Station, Trip, DEPOT};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

// ---------------------------------------------------------------------------
// Transformation model instances

/// Base data of a random planning instance; combine with a scenario to get a
/// problem.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub seed: u64,
    pub config: ScenarioConfig,
    pub stations: Vec<String>,
    pub profiles: Vec<SequenceProfile>,
}

impl RandomInstance {
    pub fn problem(&self, scenario: Scenario) -> PlanningProblem {
        let mut config = self.config.clone();
        config.scenario = scenario;
        PlanningProblem::from_profiles(self.profiles.clone(), self.stations.clone(), &config)
            .expect("random instances are valid")
    }
}

/// At most 4 sequences, 3 periods and 3 candidate stations, one battery
/// capacity per battery bus kind.
pub fn random_instance(seed: u64) -> RandomInstance {
    let mut rng = rng(seed);
    let periods = rng.gen_range(1..=3);
    let sequences = rng.gen_range(1..=4);
    let station_count = rng.gen_range(1..=3);
    let power = [50.0, 150.0, 250.0, 350.0][rng.gen_range(0..4)];
    let reduction = [0.0, 0.025, 0.1][rng.gen_range(0..3)];

    let mut config = ScenarioConfig::reference(periods, Scenario::All, power, reduction);
    config.bus_lifetime_years = rng.gen_range(2..=3);
    config.battery_lifetime_years = rng.gen_range(1..=2);
    config.beb.battery_capacities_kwh = vec![[150.0, 250.0, 350.0][rng.gen_range(0..3)]];
    // Wide cost ranges so that every bus kind and charging station gets chosen
    // in some instances.
    config.beb.purchase_cost = rng.gen_range(100_000.0..350_000.0);
    config.iceb.purchase_cost = rng.gen_range(250_000.0..400_000.0);
    config.iceb.fuel_price_per_l = rng.gen_range(1.0..8.0);
    let scale = rng.gen_range(0.05..1.0);
    for anchor in &mut config.ocf_cost_anchor_points {
        anchor.1 *= scale;
    }
    for _ in 0..rng.gen_range(0..=2) {
        config.initial_fleet.push(InitialCohort {
            emission_class: EmissionStandard::ALL[rng.gen_range(0..3)],
            age_years: rng.gen_range(1..=config.bus_lifetime_years),
            count: rng.gen_range(0..=sequences as u32),
        });
    }

    let stations: Vec<String> = (1..=station_count).map(|i| format!("S{i}")).collect();
    let profiles = (0..sequences)
        .map(|_| {
            let legs = (0..rng.gen_range(1..=4))
                .map(|p| Leg {
                    label: format!("L{p}"),
                    station: stations[rng.gen_range(0..station_count)].clone(),
                    chargeable: true,
                    dwell_h: if p == 0 { 0.0 } else { rng.gen_range(0.0..0.4) },
                    service_km: rng.gen_range(5.0..35.0),
                    deadhead_after_km: rng.gen_range(0.0..6.0),
                })
                .collect();
            SequenceProfile {
                pull_out_km: rng.gen_range(0.0..6.0),
                legs,
            }
        })
        .collect();
    RandomInstance {
        seed,
        config,
        stations,
        profiles,
    }
}

/// Objective contribution of single columns, taken from the plan pricing,
/// which is affine in the decisions.
struct Pricing {
    base: f64,
    vars: VariableCatalog,
    unit: HashMap<usize, f64>,
}

impl Pricing {
    fn new(problem: &PlanningProblem) -> Self {
        let vars = VariableCatalog::new(
            problem.periods(),
            problem.types.len(),
            problem.stations.len(),
            problem.profiles.iter().map(|p| p.legs.len()).collect(),
        );
        let price = |values: Vec<f64>| {
            let plan = TransformationPlan::new(vars.clone(), values).unwrap();
            price_plan(&plan, problem).unwrap().tco
        };
        let base = price(vec![0.0; vars.len()]);
        let mut columns = Vec::new();
        for t in vars.periods() {
            for k in 0..vars.types {
                columns.push(vars.purchase(k, t));
                for s in 0..vars.sequences {
                    columns.push(vars.assign(s, k, t));
                }
            }
            for i in 0..vars.stations {
                columns.push(vars.station_charger(i, t));
            }
        }
        let unit = columns
            .into_iter()
            .map(|c| {
                let mut v = vec![0.0; vars.len()];
                v[c] = 1.0;
                (c, price(v) - base)
            })
            .collect();
        Self { base, vars, unit }
    }

    fn coef(&self, col: usize) -> f64 {
        self.unit[&col]
    }
}

/// Whether type `k` can run sequence `s` with charging at `equipped`.
fn operable(problem: &PlanningProblem, s: usize, k: usize, equipped: &BTreeSet<&str>) -> bool {
    let bt = &problem.types.types[k];
    let profile = &problem.profiles[s];
    match bt.kind {
        BusKind::Iceb => true,
        BusKind::Ncb => ncb_feasible(profile, bt, &problem.config).unwrap(),
        BusKind::Ocb => {
            simulate_profile(
                profile,
                bt.consumption_loaded,
                bt.consumption_empty,
                bt.usable_capacity(problem.config.usable_soc_fraction),
                problem.config.charging_power_kw,
                |leg| leg.chargeable && equipped.contains(leg.station.as_str()),
            )
            .feasible
        }
    }
}

/// Calls `f` with every vector in `0..base` of length `len`.
fn for_each_vector(len: usize, base: usize, mut f: impl FnMut(&[usize])) {
    let mut v = vec![0; len];
    loop {
        f(&v);
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            v[i] += 1;
            if v[i] < base {
                break;
            }
            v[i] = 0;
            i += 1;
        }
    }
}

/// Exhaustive optimum of a small transformation problem.
///
/// Enumerates station installation periods, the type serving each sequence in
/// each period and the purchase periods of every type; operability comes from
/// the greedy state-of-charge check and costs from the plan pricing. Depot
/// chargers stay at zero, which is optimal without depot coupling.
pub fn oracle_optimum(problem: &PlanningProblem) -> f64 {
    let pricing = Pricing::new(problem);
    let vars = &pricing.vars;
    let n = problem.periods() as usize;
    let types = problem.types.len();
    let seqs = problem.num_sequences();
    let stations = problem.stations.len();
    let radix = seqs + 1;

    // Cheapest purchase plan per type and demand vector (demand coded base `radix`).
    let codes = radix.pow(n as u32);
    let mut fleet = vec![vec![f64::INFINITY; codes]; types];
    let survivors: Vec<u32> = (1..=n as u32)
        .map(|t| {
            problem.initial_fleet_size() - (1..=t).map(|u| problem.initial_retirements(u)).sum::<u32>()
        })
        .collect();
    for (k, costs) in fleet.iter_mut().enumerate() {
        let h = problem.types.types[k].holding_period_years as usize;
        for_each_vector(n, seqs + 1, |p| {
            let cost: f64 = (0..n)
                .map(|t| pricing.coef(vars.purchase(k, t as u32 + 1)) * p[t] as f64)
                .sum();
            let stock: Vec<usize> = (0..n)
                .map(|t| {
                    let bought: usize = (0..=t).filter(|&u| u + h > t).map(|u| p[u]).sum();
                    let initial = if k == problem.initial_type { survivors[t] as usize } else { 0 };
                    bought + initial
                })
                .collect();
            // Every demand vector dominated by the stock is served.
            for_each_vector(n, radix, |d| {
                if d.iter().zip(&stock).all(|(d, s)| d <= s) {
                    let code = d.iter().rev().fold(0, |acc, &x| acc * radix + x);
                    if cost < costs[code] {
                        costs[code] = cost;
                    }
                }
            });
        });
    }

    let mut best = f64::INFINITY;
    // Install period per station: 1..=n, or n + 1 for never.
    for_each_vector(stations, n + 1, |install| {
        let mut infra = 0.0;
        for (i, &first) in install.iter().enumerate() {
            for t in first + 1..=n {
                infra += pricing.coef(vars.station_charger(i, t as u32));
            }
        }
        // Cheapest operation per period and per vector of type counts.
        let mut per_period: Vec<HashMap<Vec<usize>, f64>> = Vec::with_capacity(n);
        for t in 1..=n {
            let equipped: BTreeSet<&str> = (0..stations)
                .filter(|&i| install[i] < t)
                .map(|i| problem.stations[i].as_str())
                .collect();
            let allowed: Vec<Vec<usize>> = (0..seqs)
                .map(|s| (0..types).filter(|&k| operable(problem, s, k, &equipped)).collect())
                .collect();
            let mut table: HashMap<Vec<usize>, f64> = HashMap::new();
            for_each_vector(seqs, types, |choice| {
                if !(0..seqs).all(|s| allowed[s].contains(&choice[s])) {
                    return;
                }
                let mut counts = vec![0; types];
                let mut cost = 0.0;
                for (s, &k) in choice.iter().enumerate() {
                    counts[k] += 1;
                    cost += pricing.coef(vars.assign(s, k, t as u32));
                }
                let e = table.entry(counts).or_insert(f64::INFINITY);
                if cost < *e {
                    *e = cost;
                }
            });
            per_period.push(table);
        }
        let tables: Vec<Vec<(&Vec<usize>, &f64)>> =
            per_period.iter().map(|t| t.iter().collect()).collect();
        if tables.iter().any(|t| t.is_empty()) {
            return;
        }
        for_each_mixed(&tables.iter().map(Vec::len).collect::<Vec<_>>(), |pick| {
            let mut cost = infra;
            for (t, &j) in pick.iter().enumerate() {
                cost += tables[t][j].1;
            }
            for k in 0..types {
                let code = (0..n).rev().fold(0, |acc, t| acc * radix + tables[t][pick[t]].0[k]);
                cost += fleet[k][code];
            }
            if cost < best {
                best = cost;
            }
        });
    });
    pricing.base + best
}

fn for_each_mixed(bases: &[usize], mut f: impl FnMut(&[usize])) {
    let mut v = vec![0; bases.len()];
    loop {
        f(&v);
        let mut i = 0;
        loop {
            if i == bases.len() {
                return;
            }
            v[i] += 1;
            if v[i] < bases[i] {
                break;
            }
            v[i] = 0;
            i += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Timetables

/// A random network with up to `max_trips` trips on three stations.
pub fn random_network(seed: u64, max_trips: usize) -> Network {
    let mut rng = rng(seed);
    let ids = [DEPOT, "S1", "S2", "S3"];
    let mut deadheads = DeadheadMatrix::new();
    for a in ids {
        for b in ids {
            if a != b {
                let time_min = rng.gen_range(2.0..25.0_f64).round();
                deadheads.insert(
                    a,
                    b,
                    DeadheadLeg {
                        distance_km: time_min * 0.4,
                        time_min,
                    },
                );
            }
        }
    }
    let count = rng.gen_range(1..=max_trips);
    let trips: Vec<Trip> = (0..count)
        .map(|i| {
            let start = rng.gen_range(1..4);
            let mut end = rng.gen_range(1..4);
            if end == start && rng.gen_bool(0.5) {
                end = end % 3 + 1;
            }
            let depart = rng.gen_range(0..240);
            Trip {
                label: format!("T{}", i + 1),
                start_station: ids[start].into(),
                end_station: ids[end].into(),
                depart_min: depart,
                end_min: depart + rng.gen_range(10..60),
                distance_km: rng.gen_range(3.0..20.0_f64).round(),
            }
        })
        .collect();
    let starts: BTreeSet<String> = trips.iter().map(|t| t.start_station.clone()).collect();
    let stations = ids
        .iter()
        .map(|&id| Station {
            id: id.into(),
            is_candidate_ocf: starts.contains(id),
            is_depot: id == DEPOT,
        })
        .collect();
    Network::new(stations, trips, deadheads).unwrap()
}

/// Whether trip `j` can follow trip `i` on the same bus.
pub fn compatible(network: &Network, i: &Trip, j: &Trip) -> bool {
    let leg = network.deadheads().get(&i.end_station, &j.start_station).unwrap();
    (i.end_min as f64) + leg.time_min < j.depart_min as f64
}

/// Fewest buses over all partitions of the trips into time-feasible chains.
pub fn min_fleet_by_partition(network: &Network) -> usize {
    let mut trips: Vec<&Trip> = network.trips().iter().collect();
    trips.sort_by_key(|t| t.depart_min);
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut best = usize::MAX;
    partition(network, &trips, 0, &mut blocks, &mut best);
    best
}

fn partition(
    network: &Network,
    trips: &[&Trip],
    next: usize,
    blocks: &mut Vec<Vec<usize>>,
    best: &mut usize,
) {
    if blocks.len() >= *best {
        return;
    }
    if next == trips.len() {
        *best = blocks.len();
        return;
    }
    // Trips are added in departure order, so a block stays feasible iff its
    // last trip connects to the new one.
    for b in 0..blocks.len() {
        let last = *blocks[b].last().unwrap();
        if compatible(network, trips[last], trips[next]) {
            blocks[b].push(next);
            partition(network, trips, next + 1, blocks, best);
            blocks[b].pop();
        }
    }
    blocks.push(vec![next]);
    partition(network, trips, next + 1, blocks, best);
    blocks.pop();
}

// ---------------------------------------------------------------------------
// Charging

/// Energy quantum of the exhaustive charging search, kWh.
pub const CHARGE_STEP: f64 = 0.5;

/// A random sequence with at most `max_legs` trips whose energies are
/// multiples of [`CHARGE_STEP`] at 1 kWh/km and 60 kW.
pub fn random_charging_case(seed: u64, max_legs: usize) -> (SequenceProfile, f64) {
    let mut rng = rng(seed);
    let half = |rng: &mut ChaCha8Rng, lo: u32, hi: u32| rng.gen_range(lo..=hi) as f64 * CHARGE_STEP;
    let legs = (0..rng.gen_range(1..=max_legs))
        .map(|p| Leg {
            label: format!("L{p}"),
            station: if rng.gen_bool(0.7) { "S1".into() } else { "S2".into() },
            chargeable: rng.gen_bool(0.8),
            // Minutes at 60 kW equal kWh.
            dwell_h: if p == 0 { 0.0 } else { half(&mut rng, 0, 30) / 60.0 },
            service_km: half(&mut rng, 2, 40),
            deadhead_after_km: half(&mut rng, 0, 8),
        })
        .collect();
    let profile = SequenceProfile {
        pull_out_km: half(&mut rng, 0, 8),
        legs,
    };
    let capacity = half(&mut rng, 4, 80);
    (profile, capacity)
}

/// Exhaustive search over recharge amounts in steps of [`CHARGE_STEP`]:
/// whether any choice keeps the state of charge within `[0, capacity]`.
pub fn feasible_by_enumeration(
    profile: &SequenceProfile,
    capacity: f64,
    power_kw: f64,
    equipped: impl Fn(&Leg) -> bool,
) -> bool {
    let units = |e: f64| (e / CHARGE_STEP).round() as i64;
    let cap = units(capacity);
    let start = cap - units(profile.pull_out_km);
    if start < 0 {
        return false;
    }
    let mut reachable: BTreeSet<i64> = [start].into_iter().collect();
    for leg in &profile.legs {
        let max_charge = if leg.dwell_h > 0.0 && equipped(leg) {
            units(power_kw * leg.dwell_h)
        } else {
            0
        };
        let mut next = BTreeSet::new();
        for &q in &reachable {
            for w in 0..=max_charge {
                let charged = q + w;
                if charged > cap {
                    break;
                }
                let after = charged - units(leg.service_km) - units(leg.deadhead_after_km);
                if after >= 0 {
                    next.insert(after);
                }
            }
        }
        if next.is_empty() {
            return false;
        }
        reachable = next;
    }
    true
}
