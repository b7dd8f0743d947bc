//! Physical bus network: stations, timetabled trips and deadhead legs.

mod io;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use io::{load_network, read_fleet_csv, write_network, Dataset};

use crate::config::ConfigError;

/// Reserved identifier for the depot in deadhead tables and schedule arcs.
pub const DEPOT: &str = "DEPOT";

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("no station is flagged as depot")]
    MissingDepot,
    #[error("more than one depot station: `{0}` and `{1}`")]
    MultipleDepots(String, String),
    #[error("duplicate station id `{0}`")]
    DuplicateStation(String),
    #[error("duplicate trip label `{0}`")]
    DuplicateTripLabel(String),
    #[error("`{0}` is reserved and cannot be used as a trip label or station id")]
    ReservedId(String),
    #[error("{record}: unknown station `{station}`")]
    UnknownStation { record: String, station: String },
    #[error("trip `{0}`: departure must precede arrival")]
    InvalidTripTimes(String),
    #[error("trip `{0}` starts or ends at the depot")]
    DepotTrip(String),
    #[error("{record}: negative or non-finite value in `{field}`")]
    NegativeValue { record: String, field: &'static str },
    #[error("station `{0}` is a charging candidate but no trip starts there")]
    InvalidCandidate(String),
    #[error("deadhead {from} -> {to}: a station to itself must have zero distance and time")]
    InconsistentDeadhead { from: String, to: String },
    #[error("deadhead matrix has no entry {from} -> {to}")]
    IncompleteDeadheadMatrix { from: String, to: String },
    #[error("{file}: missing required column `{column}`")]
    MissingColumn { file: String, column: String },
    #[error("{file}: {source}")]
    Csv {
        file: String,
        #[source]
        source: csv::Error,
    },
    #[error("{file}: {source}")]
    Json {
        file: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Station {
    pub id: String,
    pub is_candidate_ocf: bool,
    pub is_depot: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trip {
    pub label: String,
    pub start_station: String,
    pub end_station: String,
    /// Minutes from the start of the operating day.
    pub depart_min: i64,
    pub end_min: i64,
    pub distance_km: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DeadheadLeg {
    pub distance_km: f64,
    pub time_min: f64,
}

/// Station-to-station deadhead legs. Keys use real station ids; the depot is
/// stored under its station id and addressed as [`DEPOT`] in files.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DeadheadMatrix {
    legs: BTreeMap<(String, String), DeadheadLeg>,
}

impl DeadheadMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, from: impl Into<String>, to: impl Into<String>, leg: DeadheadLeg) {
        self.legs.insert((from.into(), to.into()), leg);
    }

    /// Leg between two stations; identical stations are always a zero leg.
    pub fn get(&self, from: &str, to: &str) -> Option<DeadheadLeg> {
        if from == to {
            return Some(DeadheadLeg::default());
        }
        self.legs.get(&(from.to_string(), to.to_string())).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, DeadheadLeg)> {
        self.legs
            .iter()
            .map(|((f, t), leg)| (f.as_str(), t.as_str(), *leg))
    }

    pub fn len(&self) -> usize {
        self.legs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.legs.is_empty()
    }
}

/// A validated network. Construct with [`Network::new`] or [`load_network`].
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    stations: Vec<Station>,
    trips: Vec<Trip>,
    deadheads: DeadheadMatrix,
    depot: String,
    trip_index: BTreeMap<String, usize>,
}

impl Network {
    pub fn new(
        stations: Vec<Station>,
        trips: Vec<Trip>,
        deadheads: DeadheadMatrix,
    ) -> Result<Self, NetworkError> {
        let mut ids = BTreeSet::new();
        let mut depot: Option<&str> = None;
        for s in &stations {
            if s.id == DEPOT && !s.is_depot {
                return Err(NetworkError::ReservedId(s.id.clone()));
            }
            if !ids.insert(s.id.as_str()) {
                return Err(NetworkError::DuplicateStation(s.id.clone()));
            }
            if s.is_depot {
                if let Some(first) = depot {
                    return Err(NetworkError::MultipleDepots(first.to_string(), s.id.clone()));
                }
                depot = Some(&s.id);
            }
        }
        let depot = depot.ok_or(NetworkError::MissingDepot)?.to_string();

        let mut trip_index = BTreeMap::new();
        let mut start_stations = BTreeSet::new();
        for (i, t) in trips.iter().enumerate() {
            let record = format!("trip `{}`", t.label);
            if t.label == DEPOT {
                return Err(NetworkError::ReservedId(t.label.clone()));
            }
            if trip_index.insert(t.label.clone(), i).is_some() {
                return Err(NetworkError::DuplicateTripLabel(t.label.clone()));
            }
            for station in [&t.start_station, &t.end_station] {
                if !ids.contains(station.as_str()) {
                    return Err(NetworkError::UnknownStation {
                        record: record.clone(),
                        station: station.clone(),
                    });
                }
                if *station == depot {
                    return Err(NetworkError::DepotTrip(t.label.clone()));
                }
            }
            if !(t.distance_km >= 0.0 && t.distance_km.is_finite()) {
                return Err(NetworkError::NegativeValue {
                    record,
                    field: "distance_km",
                });
            }
            if t.depart_min >= t.end_min {
                return Err(NetworkError::InvalidTripTimes(t.label.clone()));
            }
            start_stations.insert(t.start_station.as_str());
        }
        for s in &stations {
            if s.is_candidate_ocf && !start_stations.contains(s.id.as_str()) {
                return Err(NetworkError::InvalidCandidate(s.id.clone()));
            }
        }

        for (from, to, leg) in deadheads.iter() {
            let record = format!("deadhead {from} -> {to}");
            for station in [from, to] {
                if !ids.contains(station) {
                    return Err(NetworkError::UnknownStation {
                        record: record.clone(),
                        station: station.to_string(),
                    });
                }
            }
            if !(leg.distance_km >= 0.0 && leg.distance_km.is_finite()) {
                return Err(NetworkError::NegativeValue {
                    record,
                    field: "distance_km",
                });
            }
            if !(leg.time_min >= 0.0 && leg.time_min.is_finite()) {
                return Err(NetworkError::NegativeValue {
                    record,
                    field: "time_min",
                });
            }
            if from == to && (leg.distance_km != 0.0 || leg.time_min != 0.0) {
                return Err(NetworkError::InconsistentDeadhead {
                    from: from.to_string(),
                    to: to.to_string(),
                });
            }
        }

        let network = Self {
            stations,
            trips,
            deadheads,
            depot,
            trip_index,
        };
        network.check_deadhead_coverage()?;
        Ok(network)
    }

    /// Every leg a schedule can use must be present: depot legs of every trip and
    /// every end-station -> start-station pair of trips `i`, `j` with
    /// `end(i) < depart(j)`.
    fn check_deadhead_coverage(&self) -> Result<(), NetworkError> {
        let missing = |from: &str, to: &str| NetworkError::IncompleteDeadheadMatrix {
            from: self.file_id(from).to_string(),
            to: self.file_id(to).to_string(),
        };
        for t in &self.trips {
            self.deadheads
                .get(&self.depot, &t.start_station)
                .ok_or_else(|| missing(&self.depot, &t.start_station))?;
            self.deadheads
                .get(&t.end_station, &self.depot)
                .ok_or_else(|| missing(&t.end_station, &self.depot))?;
        }
        let mut by_depart: Vec<&Trip> = self.trips.iter().collect();
        by_depart.sort_by_key(|t| t.depart_min);
        let mut checked = BTreeSet::new();
        for i in &self.trips {
            let later = by_depart.partition_point(|t| t.depart_min <= i.end_min);
            for j in &by_depart[later..] {
                let key = (i.end_station.as_str(), j.start_station.as_str());
                if checked.insert(key) && self.deadheads.get(key.0, key.1).is_none() {
                    return Err(missing(key.0, key.1));
                }
            }
        }
        Ok(())
    }

    /// Station id as written in files (the depot becomes [`DEPOT`]).
    pub fn file_id<'a>(&self, station: &'a str) -> &'a str {
        if station == self.depot {
            DEPOT
        } else {
            station
        }
    }

    pub fn stations(&self) -> &[Station] {
        &self.stations
    }

    pub fn trips(&self) -> &[Trip] {
        &self.trips
    }

    pub fn deadheads(&self) -> &DeadheadMatrix {
        &self.deadheads
    }

    pub fn depot(&self) -> &str {
        &self.depot
    }

    pub fn trip(&self, label: &str) -> Option<&Trip> {
        self.trip_index.get(label).map(|&i| &self.trips[i])
    }

    pub fn trip_position(&self, label: &str) -> Option<usize> {
        self.trip_index.get(label).copied()
    }

    /// Candidate opportunity charging locations, in file order.
    pub fn candidate_stations(&self) -> Vec<&str> {
        self.stations
            .iter()
            .filter(|s| s.is_candidate_ocf)
            .map(|s| s.id.as_str())
            .collect()
    }

    /// Deadhead from the end of trip `from` to the start of trip `to`.
    pub fn connection(&self, from: &Trip, to: &Trip) -> DeadheadLeg {
        self.deadheads
            .get(&from.end_station, &to.start_station)
            .expect("coverage checked on construction")
    }

    pub fn pull_out(&self, trip: &Trip) -> DeadheadLeg {
        self.deadheads
            .get(&self.depot, &trip.start_station)
            .expect("coverage checked on construction")
    }

    pub fn pull_in(&self, trip: &Trip) -> DeadheadLeg {
        self.deadheads
            .get(&trip.end_station, &self.depot)
            .expect("coverage checked on construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn station(id: &str, candidate: bool, depot: bool) -> Station {
        Station {
            id: id.into(),
            is_candidate_ocf: candidate,
            is_depot: depot,
        }
    }

    fn trip(label: &str, from: &str, to: &str, dep: i64, end: i64, km: f64) -> Trip {
        Trip {
            label: label.into(),
            start_station: from.into(),
            end_station: to.into(),
            depart_min: dep,
            end_min: end,
            distance_km: km,
        }
    }

    fn full_matrix(ids: &[&str]) -> DeadheadMatrix {
        let mut m = DeadheadMatrix::new();
        for a in ids {
            for b in ids {
                if a != b {
                    m.insert(*a, *b, DeadheadLeg { distance_km: 2.0, time_min: 5.0 });
                }
            }
        }
        m
    }

    #[test]
    fn minimal_network() {
        let net = Network::new(
            vec![station("D", false, true), station("S1", true, false), station("S2", false, false)],
            vec![trip("T1", "S1", "S2", 0, 30, 10.0)],
            full_matrix(&["D", "S1", "S2"]),
        )
        .unwrap();
        assert_eq!(net.trips().len(), 1);
        assert_eq!(net.candidate_stations(), vec!["S1"]);
        assert_eq!(net.depot(), "D");
        assert_eq!(net.file_id("D"), DEPOT);
    }

    #[test]
    fn rejects_missing_and_multiple_depots() {
        let err = Network::new(vec![station("S1", false, false)], vec![], DeadheadMatrix::new());
        assert!(matches!(err, Err(NetworkError::MissingDepot)));
        let err = Network::new(
            vec![station("A", false, true), station("B", false, true)],
            vec![],
            DeadheadMatrix::new(),
        );
        assert!(matches!(err, Err(NetworkError::MultipleDepots(..))));
    }

    #[test]
    fn rejects_duplicate_labels_and_bad_values() {
        let st = vec![station("D", false, true), station("S1", false, false)];
        let m = full_matrix(&["D", "S1"]);
        let err = Network::new(
            st.clone(),
            vec![trip("T7", "S1", "S1", 0, 10, 1.0), trip("T7", "S1", "S1", 20, 30, 1.0)],
            m.clone(),
        );
        assert!(matches!(err, Err(NetworkError::DuplicateTripLabel(l)) if l == "T7"));
        let err = Network::new(st.clone(), vec![trip("T1", "S1", "S1", 0, 10, -1.0)], m.clone());
        assert!(matches!(err, Err(NetworkError::NegativeValue { .. })));
        let err = Network::new(st.clone(), vec![trip("T1", "S1", "S1", 10, 10, 1.0)], m.clone());
        assert!(matches!(err, Err(NetworkError::InvalidTripTimes(_))));
        let err = Network::new(st, vec![trip("T1", "S1", "X", 0, 10, 1.0)], m);
        assert!(matches!(err, Err(NetworkError::UnknownStation { .. })));
    }

    #[test]
    fn candidate_must_start_a_trip() {
        let err = Network::new(
            vec![station("D", false, true), station("S1", false, false), station("S2", true, false)],
            vec![trip("T1", "S1", "S2", 0, 30, 10.0)],
            full_matrix(&["D", "S1", "S2"]),
        );
        assert!(matches!(err, Err(NetworkError::InvalidCandidate(s)) if s == "S2"));
    }

    #[test]
    fn incomplete_matrix_names_the_pair() {
        let mut m = DeadheadMatrix::new();
        m.insert("D", "S1", DeadheadLeg::default());
        m.insert("S2", "D", DeadheadLeg::default());
        m.insert("D", "S2", DeadheadLeg::default());
        m.insert("S1", "D", DeadheadLeg::default());
        // T1 ends at S2 before T2 departs from S1: S2 -> S1 is required.
        let err = Network::new(
            vec![station("D", false, true), station("S1", false, false), station("S2", false, false)],
            vec![trip("T1", "S1", "S2", 0, 30, 10.0), trip("T2", "S1", "S2", 40, 60, 10.0)],
            m,
        );
        match err {
            Err(NetworkError::IncompleteDeadheadMatrix { from, to }) => {
                assert_eq!((from.as_str(), to.as_str()), ("S2", "S1"))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn self_leg_must_be_zero() {
        let mut m = full_matrix(&["D", "S1"]);
        m.insert("S1", "S1", DeadheadLeg { distance_km: 1.0, time_min: 0.0 });
        let err = Network::new(
            vec![station("D", false, true), station("S1", false, false)],
            vec![trip("T1", "S1", "S1", 0, 10, 1.0)],
            m,
        );
        assert!(matches!(err, Err(NetworkError::InconsistentDeadhead { .. })));
    }
}
