mod common;

use common::{fixture, random_instance};
use fleetplan::config::Scenario;
use fleetplan::model::mps::{canonical, read_mps, write_mps, MpsError};
use fleetplan::model::{build_mip, build_model};
use fleetplan::network::load_network;
use fleetplan::scheduler::build_schedule;

#[test]
fn desk_model_round_trips() {
    let data = load_network(fixture("desk")).unwrap();
    let schedule = build_schedule(&data.network);
    for scenario in Scenario::ALL {
        let mut config = data.config.clone();
        config.scenario = scenario;
        let model = build_mip(&data.network, &schedule, &config).unwrap();
        let text = write_mps(&model.mip);
        let back = read_mps(&text).unwrap();
        assert_eq!(canonical(&back), canonical(&model.mip), "{scenario}");
        assert_eq!(write_mps(&back), text, "{scenario}");
    }
}

#[test]
fn random_models_round_trip() {
    for seed in 0..10 {
        let model = build_model(random_instance(seed).problem(Scenario::All)).unwrap();
        let back = read_mps(&write_mps(&model.mip)).unwrap();
        assert_eq!(canonical(&back), canonical(&model.mip), "seed {seed}");
    }
}

#[test]
fn truncated_file_is_rejected() {
    let data = load_network(fixture("toy3")).unwrap();
    let schedule = build_schedule(&data.network);
    let model = build_mip(&data.network, &schedule, &data.config).unwrap();
    let text = write_mps(&model.mip);
    let cut = &text[..text.find("ENDATA").unwrap()];
    assert!(matches!(read_mps(cut), Err(MpsError::MissingEnd)));
}
