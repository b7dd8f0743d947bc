mod common;

use common::{feasible_by_enumeration, fixture, random_charging_case};
use fleetplan::catalog::{BusKind, BusTypeCatalog};
use fleetplan::energy::{
    feasibility_study, min_battery_capacity, simulate_profile, simulate_sequence, SequenceProfile,
    CAPACITY_RESOLUTION,
};
use fleetplan::network::load_network;
use fleetplan::scheduler::build_schedule;
use proptest::prelude::*;

fn desk_profiles() -> (Vec<SequenceProfile>, fleetplan::config::ScenarioConfig) {
    let data = load_network(fixture("desk")).unwrap();
    let schedule = build_schedule(&data.network);
    (SequenceProfile::for_schedule(&schedule, &data.network), data.config)
}

#[test]
fn desk_feasible_share_grows_with_power() {
    let (profiles, config) = desk_profiles();
    let powers = [50.0, 150.0, 250.0, 350.0, 450.0];
    for q_max in [100.0, 150.0, 200.0] {
        let rows = feasibility_study(&profiles, &config, &powers, q_max);
        for pair in rows.windows(2) {
            assert!(pair[0].share_pct <= pair[1].share_pct, "{q_max}: {rows:?}");
            assert!(pair[0].median >= pair[1].median - 1e-9);
        }
        for r in &rows {
            assert!(r.min <= r.q1 && r.q1 <= r.median && r.median <= r.q3 && r.q3 <= r.max);
        }
    }
}

#[test]
fn minimum_capacity_is_tight() {
    let (profiles, config) = desk_profiles();
    let (loaded, empty) = (config.beb.consumption_kwh_per_km, config.beb.consumption_kwh_per_km * 0.75);
    let mu = config.usable_soc_fraction;
    for power in [50.0, 150.0, 350.0] {
        for p in &profiles {
            let q = min_battery_capacity(p, power, &config);
            let run = |cap: f64| simulate_profile(p, loaded, empty, mu * cap, power, |l| l.chargeable).feasible;
            assert!(run(q), "{power} kW, {q} kWh");
            assert!(!run(q - CAPACITY_RESOLUTION - 1e-6), "{power} kW, {q} kWh");
        }
    }
}

#[test]
fn night_buses_ignore_station_chargers() {
    let (profiles, config) = desk_profiles();
    let catalog = BusTypeCatalog::from_config(&config).unwrap();
    let ncb = catalog.types.iter().find(|t| t.kind == BusKind::Ncb).unwrap();
    let ocb = catalog.types.iter().find(|t| t.kind == BusKind::Ocb && t.battery_capacity_kwh == ncb.battery_capacity_kwh).unwrap();
    let all = profiles[0].legs.iter().map(|l| l.station.clone()).collect();
    let night = simulate_sequence(&profiles[0], ncb, &all, 350.0, &config).unwrap();
    assert!(night.records.iter().all(|r| r.charged == 0.0));
    let opportunity = simulate_sequence(&profiles[0], ocb, &all, 350.0, &config).unwrap();
    assert!(opportunity.final_soc >= night.final_soc);
    let iceb = catalog.types.iter().find(|t| t.kind == BusKind::Iceb).unwrap();
    assert!(simulate_sequence(&profiles[0], iceb, &all, 350.0, &config).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn greedy_matches_exhaustive_charging(seed in any::<u64>()) {
        let (profile, capacity) = random_charging_case(seed, 4);
        let greedy = simulate_profile(&profile, 1.0, 1.0, capacity, 60.0, |l| l.chargeable).feasible;
        prop_assert_eq!(greedy, feasible_by_enumeration(&profile, capacity, 60.0, |l| l.chargeable));
    }

    #[test]
    fn more_capacity_or_power_never_hurts(seed in any::<u64>(), extra in 0.0f64..50.0, boost in 0.0f64..100.0) {
        let (profile, capacity) = random_charging_case(seed, 6);
        let base = simulate_profile(&profile, 1.0, 1.0, capacity, 60.0, |l| l.chargeable).feasible;
        let bigger = simulate_profile(&profile, 1.0, 1.0, capacity + extra, 60.0, |l| l.chargeable).feasible;
        let faster = simulate_profile(&profile, 1.0, 1.0, capacity, 60.0 + boost, |l| l.chargeable).feasible;
        prop_assert!(!base || bigger);
        prop_assert!(!base || faster);
    }

    #[test]
    fn soc_stays_within_capacity(seed in any::<u64>()) {
        let (profile, capacity) = random_charging_case(seed, 6);
        let trace = simulate_profile(&profile, 1.0, 1.0, capacity, 60.0, |l| l.chargeable);
        for r in &trace.records {
            prop_assert!(r.charged >= 0.0);
            prop_assert!(r.soc_before + r.charged <= capacity + 1e-9);
        }
    }
}
