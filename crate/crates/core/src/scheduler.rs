//! Concurrent vehicle scheduling: trips are visited in departure order and each
//! is appended to the best-suited bus that can still reach it, or to a new bus.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{Network, DEPOT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripSequence {
    pub sequence_id: usize,
    /// Trip labels in operating order; the index is the trip position.
    pub trips: Vec<String>,
    /// Consecutive pairs including the depot pull-out and pull-in arcs.
    pub arcs: Vec<(String, String)>,
    pub service_km: f64,
    /// Empty kilometres including both depot legs.
    pub deadhead_km: f64,
}

impl TripSequence {
    pub fn total_km(&self) -> f64 {
        self.service_km + self.deadhead_km
    }

    /// Builds a sequence from ordered trip labels, deriving arcs and distances.
    pub fn from_trips(
        sequence_id: usize,
        trips: Vec<String>,
        network: &Network,
    ) -> Result<Self, ScheduleError> {
        let resolved = trips
            .iter()
            .map(|l| network.trip(l).ok_or_else(|| ScheduleError::UnknownTrip(l.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let (first, last) = match (resolved.first(), resolved.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(ScheduleError::EmptySequence(sequence_id)),
        };
        let mut arcs = vec![(DEPOT.to_string(), first.label.clone())];
        let mut deadhead_km = network.pull_out(first).distance_km;
        for pair in resolved.windows(2) {
            arcs.push((pair[0].label.clone(), pair[1].label.clone()));
            deadhead_km += network.connection(pair[0], pair[1]).distance_km;
        }
        arcs.push((last.label.clone(), DEPOT.to_string()));
        deadhead_km += network.pull_in(last).distance_km;
        Ok(Self {
            sequence_id,
            service_km: resolved.iter().map(|t| t.distance_km).sum(),
            deadhead_km,
            trips,
            arcs,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VehicleSchedule {
    pub sequences: Vec<TripSequence>,
}

impl VehicleSchedule {
    pub fn fleet_size(&self) -> usize {
        self.sequences.len()
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serializes") + "\n"
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<(), ScheduleError> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|source| ScheduleError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    /// Reads a schedule.json and checks it against `network`.
    pub fn read_json(path: impl AsRef<Path>, network: &Network) -> Result<Self, ScheduleError> {
        let path = path.as_ref();
        let file = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|source| ScheduleError::Io {
            path: file.clone(),
            source,
        })?;
        let schedule: Self =
            serde_json::from_str(&text).map_err(|source| ScheduleError::Json { file, source })?;
        let violations = validate_schedule(&schedule, network);
        if violations.is_empty() {
            Ok(schedule)
        } else {
            Err(ScheduleError::Invalid(violations))
        }
    }
}

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("unknown trip `{0}`")]
    UnknownTrip(String),
    #[error("sequence {0} has no trips")]
    EmptySequence(usize),
    #[error("schedule is inconsistent with the network: {}", summarize(.0))]
    Invalid(Vec<ScheduleViolation>),
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
}

fn summarize(v: &[ScheduleViolation]) -> String {
    let mut s = v.iter().take(3).map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
    if v.len() > 3 {
        s.push_str(&format!(" and {} more", v.len() - 3));
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleViolation {
    UncoveredTrip(String),
    DuplicatedTrip(String),
    UnknownTrip(String),
    EmptySequence(usize),
    InfeasibleConnection {
        sequence: usize,
        from: String,
        to: String,
    },
    ArcMismatch(usize),
    DistanceMismatch(usize),
}

struct Bus {
    trips: Vec<usize>,
    covered_km: f64,
}

/// Builds a vehicle schedule with the concurrent scheduler.
///
/// Trip `j` may follow trip `i` iff `end(i) + time(i, j) < depart(j)`. Among
/// feasible buses the one with the shortest deadhead time wins, then the one
/// whose last trip ends latest, then the one with the fewest kilometres so
/// far, then the lowest bus index.
pub fn build_schedule(network: &Network) -> VehicleSchedule {
    let trips = network.trips();
    let mut order: Vec<usize> = (0..trips.len()).collect();
    order.sort_by_key(|&i| trips[i].depart_min);

    let mut buses: Vec<Bus> = Vec::new();
    for &j in &order {
        let next = &trips[j];
        let mut best: Option<(usize, f64)> = None;
        for (b, bus) in buses.iter().enumerate() {
            let last = &trips[*bus.trips.last().expect("buses are never empty")];
            let leg = network.connection(last, next);
            if !((last.end_min as f64) + leg.time_min < next.depart_min as f64) {
                continue;
            }
            let better = match best {
                None => true,
                Some((c, time)) => {
                    let current = &trips[*buses[c].trips.last().expect("non-empty")];
                    leg.time_min
                        .total_cmp(&time)
                        .then(current.end_min.cmp(&last.end_min))
                        .then(bus.covered_km.total_cmp(&buses[c].covered_km))
                        .is_lt()
                }
            };
            if better {
                best = Some((b, leg.time_min));
            }
        }
        match best {
            Some((b, _)) => {
                let last = &trips[*buses[b].trips.last().expect("non-empty")];
                let added = network.connection(last, next).distance_km + next.distance_km;
                buses[b].trips.push(j);
                buses[b].covered_km += added;
            }
            None => buses.push(Bus {
                trips: vec![j],
                covered_km: next.distance_km,
            }),
        }
    }

    let sequences = buses
        .into_iter()
        .enumerate()
        .map(|(s, bus)| {
            let labels = bus.trips.iter().map(|&i| trips[i].label.clone()).collect();
            TripSequence::from_trips(s, labels, network).expect("labels come from the network")
        })
        .collect();
    VehicleSchedule { sequences }
}

/// Checks coverage, time feasibility, arcs and distances of every sequence.
pub fn validate_schedule(schedule: &VehicleSchedule, network: &Network) -> Vec<ScheduleViolation> {
    let mut violations = Vec::new();
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for seq in &schedule.sequences {
        let id = seq.sequence_id;
        if seq.trips.is_empty() {
            violations.push(ScheduleViolation::EmptySequence(id));
            continue;
        }
        let mut known = true;
        for label in &seq.trips {
            if network.trip(label).is_none() {
                violations.push(ScheduleViolation::UnknownTrip(label.clone()));
                known = false;
            }
            let count = seen.entry(label.as_str()).or_insert(0);
            *count += 1;
            if *count == 2 {
                violations.push(ScheduleViolation::DuplicatedTrip(label.clone()));
            }
        }
        if !known {
            continue;
        }
        for pair in seq.trips.windows(2) {
            let (a, b) = (network.trip(&pair[0]).unwrap(), network.trip(&pair[1]).unwrap());
            let leg = network.connection(a, b);
            if !((a.end_min as f64) + leg.time_min < b.depart_min as f64) {
                violations.push(ScheduleViolation::InfeasibleConnection {
                    sequence: id,
                    from: a.label.clone(),
                    to: b.label.clone(),
                });
            }
        }
        let expected = TripSequence::from_trips(id, seq.trips.clone(), network)
            .expect("trips are known and non-empty");
        if expected.arcs != seq.arcs {
            violations.push(ScheduleViolation::ArcMismatch(id));
        }
        if (expected.service_km - seq.service_km).abs() > 1e-6
            || (expected.deadhead_km - seq.deadhead_km).abs() > 1e-6
        {
            violations.push(ScheduleViolation::DistanceMismatch(id));
        }
    }
    for t in network.trips() {
        if !seen.contains_key(t.label.as_str()) {
            violations.push(ScheduleViolation::UncoveredTrip(t.label.clone()));
        }
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{DeadheadLeg, DeadheadMatrix, Station, Trip};

    fn trip(label: &str, from: &str, to: &str, dep: i64, end: i64) -> Trip {
        Trip {
            label: label.into(),
            start_station: from.into(),
            end_station: to.into(),
            depart_min: dep,
            end_min: end,
            distance_km: 10.0,
        }
    }

    fn network(trips: Vec<Trip>, between: DeadheadLeg) -> Network {
        let ids = ["D", "S1", "S2"];
        let mut m = DeadheadMatrix::new();
        for a in ids {
            for b in ids {
                if a != b {
                    let leg = if a == "D" || b == "D" {
                        DeadheadLeg { distance_km: 3.0, time_min: 5.0 }
                    } else {
                        between
                    };
                    m.insert(a, b, leg);
                }
            }
        }
        let stations = ids
            .iter()
            .map(|&id| Station {
                id: id.into(),
                is_candidate_ocf: false,
                is_depot: id == "D",
            })
            .collect();
        Network::new(stations, trips, m).unwrap()
    }

    fn labels(s: &VehicleSchedule) -> Vec<Vec<&str>> {
        s.sequences
            .iter()
            .map(|q| q.trips.iter().map(String::as_str).collect())
            .collect()
    }

    #[test]
    fn hand_traced_three_trips() {
        let net = network(
            vec![
                trip("T1", "S1", "S2", 0, 30),
                trip("T3", "S1", "S2", 20, 50),
                trip("T2", "S2", "S1", 40, 70),
            ],
            DeadheadLeg::default(),
        );
        let s = build_schedule(&net);
        assert_eq!(labels(&s), vec![vec!["T1", "T2"], vec!["T3"]]);
        assert!(validate_schedule(&s, &net).is_empty());
        let first = &s.sequences[0];
        assert_eq!(
            first.arcs,
            vec![
                ("DEPOT".to_string(), "T1".to_string()),
                ("T1".to_string(), "T2".to_string()),
                ("T2".to_string(), "DEPOT".to_string()),
            ]
        );
        assert_eq!(first.service_km, 20.0);
        assert_eq!(first.deadhead_km, 6.0);
    }

    #[test]
    fn single_trip_and_overlap() {
        let net = network(vec![trip("A", "S1", "S2", 0, 10)], DeadheadLeg::default());
        assert_eq!(build_schedule(&net).fleet_size(), 1);
        let net = network(
            vec![trip("A", "S1", "S2", 0, 10), trip("B", "S1", "S2", 5, 15)],
            DeadheadLeg::default(),
        );
        assert_eq!(build_schedule(&net).fleet_size(), 2);
    }

    #[test]
    fn strict_feasibility_test() {
        // 10 + 0 < 10 fails, so back-to-back trips need two buses.
        let net = network(
            vec![trip("A", "S1", "S2", 0, 10), trip("B", "S2", "S1", 10, 20)],
            DeadheadLeg::default(),
        );
        assert_eq!(build_schedule(&net).fleet_size(), 2);
    }

    #[test]
    fn prefers_shortest_deadhead_then_latest_end() {
        let net = network(
            vec![
                trip("A", "S1", "S2", 0, 10),
                trip("B", "S1", "S1", 1, 12),
                trip("C", "S2", "S1", 100, 110),
            ],
            DeadheadLeg { distance_km: 1.0, time_min: 4.0 },
        );
        // A ends at S2 (no deadhead to C), B ends at S1 (4 min deadhead).
        let s = build_schedule(&net);
        assert_eq!(labels(&s), vec![vec!["A", "C"], vec!["B"]]);

        let net = network(
            vec![
                trip("A", "S1", "S2", 0, 10),
                trip("B", "S1", "S2", 1, 12),
                trip("C", "S2", "S1", 100, 110),
            ],
            DeadheadLeg { distance_km: 1.0, time_min: 4.0 },
        );
        let s = build_schedule(&net);
        assert_eq!(labels(&s), vec![vec!["A"], vec!["B", "C"]]);
    }

    #[test]
    fn violations_are_reported() {
        let net = network(
            vec![
                trip("T1", "S1", "S2", 0, 30),
                trip("T3", "S1", "S2", 20, 50),
                trip("T2", "S2", "S1", 40, 70),
            ],
            DeadheadLeg::default(),
        );
        let good = build_schedule(&net);

        let mut missing = good.clone();
        missing.sequences.remove(1);
        assert_eq!(
            validate_schedule(&missing, &net),
            vec![ScheduleViolation::UncoveredTrip("T3".into())]
        );

        let mut dup = good.clone();
        dup.sequences[1] = TripSequence::from_trips(1, vec!["T3".into(), "T2".into()], &net).unwrap();
        let v = validate_schedule(&dup, &net);
        assert!(v.contains(&ScheduleViolation::DuplicatedTrip("T2".into())));
        assert!(v.contains(&ScheduleViolation::InfeasibleConnection {
            sequence: 1,
            from: "T3".into(),
            to: "T2".into()
        }));

        let mut bad_km = good;
        bad_km.sequences[0].deadhead_km += 1.0;
        assert_eq!(
            validate_schedule(&bad_km, &net),
            vec![ScheduleViolation::DistanceMismatch(0)]
        );
    }

    #[test]
    fn json_shape() {
        let net = network(vec![trip("A", "S1", "S2", 0, 10)], DeadheadLeg::default());
        let json: serde_json::Value = serde_json::from_str(&build_schedule(&net).to_json()).unwrap();
        let first = &json[0];
        assert_eq!(first["sequence_id"], 0);
        assert_eq!(first["trips"][0], "A");
        assert_eq!(first["arcs"][0][0], "DEPOT");
        assert_eq!(first["service_km"], 10.0);
    }
}
