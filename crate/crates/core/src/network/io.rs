//! CSV/JSON file set: stations.csv, trips.csv, deadheads.csv, fleet.csv and
//! scenario.json.

use std::collections::HashMap;
use std::fs::{self, File};
use std::path::Path;

use log::warn;

use super::{DeadheadLeg, DeadheadMatrix, Network, NetworkError, Station, Trip, DEPOT};
use crate::config::{InitialCohort, ScenarioConfig};
use crate::emissions::EmissionStandard;

/// A loaded data directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub network: Network,
    pub config: ScenarioConfig,
}

struct Table {
    file: String,
    columns: HashMap<String, usize>,
    rows: Vec<csv::StringRecord>,
}

impl Table {
    fn read(path: &Path, required: &[&str]) -> Result<Self, NetworkError> {
        let file = path.display().to_string();
        let csv_err = |source| NetworkError::Csv {
            file: file.clone(),
            source,
        };
        let handle = File::open(path).map_err(|source| NetworkError::Io {
            path: file.clone(),
            source,
        })?;
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(handle);
        let headers = reader.headers().map_err(csv_err)?.clone();
        let columns: HashMap<String, usize> = headers
            .iter()
            .enumerate()
            .map(|(i, h)| (h.to_string(), i))
            .collect();
        for col in required {
            if !columns.contains_key(*col) {
                return Err(NetworkError::MissingColumn {
                    file,
                    column: col.to_string(),
                });
            }
        }
        for h in headers.iter() {
            if !required.contains(&h) {
                warn!("{file}: ignoring unknown column `{h}`");
            }
        }
        let rows = reader
            .records()
            .collect::<Result<Vec<_>, _>>()
            .map_err(csv_err)?;
        Ok(Self {
            file,
            columns,
            rows,
        })
    }

    fn get<'r>(&self, row: &'r csv::StringRecord, col: &str) -> &'r str {
        row.get(self.columns[col]).unwrap_or("")
    }

    fn bad(&self, line: usize, field: &str, value: &str) -> NetworkError {
        NetworkError::Csv {
            file: self.file.clone(),
            source: csv::Error::from(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("record {}: cannot parse `{value}` as {field}", line + 1),
            )),
        }
    }

    fn parse<T: std::str::FromStr>(
        &self,
        line: usize,
        row: &csv::StringRecord,
        col: &str,
    ) -> Result<T, NetworkError> {
        let v = self.get(row, col);
        v.parse().map_err(|_| self.bad(line, col, v))
    }

    fn flag(&self, line: usize, row: &csv::StringRecord, col: &str) -> Result<bool, NetworkError> {
        match self.get(row, col).to_ascii_lowercase().as_str() {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" | "" => Ok(false),
            v => Err(self.bad(line, col, v)),
        }
    }
}

fn read_stations(path: &Path) -> Result<Vec<Station>, NetworkError> {
    let table = Table::read(path, &["id", "is_candidate_ocf", "is_depot"])?;
    table
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            Ok(Station {
                id: table.get(row, "id").to_string(),
                is_candidate_ocf: table.flag(i, row, "is_candidate_ocf")?,
                is_depot: table.flag(i, row, "is_depot")?,
            })
        })
        .collect()
}

fn read_trips(path: &Path) -> Result<Vec<Trip>, NetworkError> {
    let table = Table::read(
        path,
        &["label", "start_station", "end_station", "depart_min", "end_min", "distance_km"],
    )?;
    table
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            Ok(Trip {
                label: table.get(row, "label").to_string(),
                start_station: table.get(row, "start_station").to_string(),
                end_station: table.get(row, "end_station").to_string(),
                depart_min: table.parse(i, row, "depart_min")?,
                end_min: table.parse(i, row, "end_min")?,
                distance_km: table.parse(i, row, "distance_km")?,
            })
        })
        .collect()
}

fn read_deadheads(path: &Path, depot: &str) -> Result<DeadheadMatrix, NetworkError> {
    let table = Table::read(path, &["from", "to", "distance_km", "time_min"])?;
    let resolve = |id: &str| if id == DEPOT { depot.to_string() } else { id.to_string() };
    let mut matrix = DeadheadMatrix::new();
    for (i, row) in table.rows.iter().enumerate() {
        matrix.insert(
            resolve(table.get(row, "from")),
            resolve(table.get(row, "to")),
            DeadheadLeg {
                distance_km: table.parse(i, row, "distance_km")?,
                time_min: table.parse(i, row, "time_min")?,
            },
        );
    }
    Ok(matrix)
}

/// Reads the initial ICEB fleet (emission_class, age_years, count).
pub fn read_fleet_csv(path: &Path) -> Result<Vec<InitialCohort>, NetworkError> {
    let table = Table::read(path, &["emission_class", "age_years", "count"])?;
    table
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let class = table.get(row, "emission_class");
            Ok(InitialCohort {
                emission_class: class
                    .parse::<EmissionStandard>()
                    .map_err(|_| table.bad(i, "emission_class", class))?,
                age_years: table.parse(i, row, "age_years")?,
                count: table.parse(i, row, "count")?,
            })
        })
        .collect()
}

fn read_scenario(path: &Path) -> Result<ScenarioConfig, NetworkError> {
    let file = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| NetworkError::Io {
        path: file.clone(),
        source,
    })?;
    let config: ScenarioConfig =
        serde_json::from_str(&text).map_err(|source| NetworkError::Json { file: file.clone(), source })?;
    for key in config.unknown_fields.keys() {
        warn!("{file}: ignoring unknown field `{key}`");
    }
    Ok(config)
}

/// Loads and validates a data directory.
pub fn load_network(dir: impl AsRef<Path>) -> Result<Dataset, NetworkError> {
    let dir = dir.as_ref();
    let stations = read_stations(&dir.join("stations.csv"))?;
    let depot = match stations.iter().find(|s| s.is_depot) {
        Some(s) => s.id.clone(),
        None => return Err(NetworkError::MissingDepot),
    };
    let trips = read_trips(&dir.join("trips.csv"))?;
    let deadheads = read_deadheads(&dir.join("deadheads.csv"), &depot)?;
    let network = Network::new(stations, trips, deadheads)?;
    let mut config = read_scenario(&dir.join("scenario.json"))?;
    config.initial_fleet = read_fleet_csv(&dir.join("fleet.csv"))?;
    config.validate()?;
    Ok(Dataset { network, config })
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> NetworkError + '_ {
    move |source| NetworkError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>, NetworkError> {
    let file = File::create(path).map_err(io_err(path))?;
    Ok(csv::Writer::from_writer(file))
}

fn write_rows<I, R>(path: &Path, header: &[&str], rows: I) -> Result<(), NetworkError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let csv_err = |source| NetworkError::Csv {
        file: path.display().to_string(),
        source,
    };
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>()).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}

/// Writes a data directory that [`load_network`] reads back to the same
/// network and configuration.
pub fn write_network(
    dir: impl AsRef<Path>,
    network: &Network,
    config: &ScenarioConfig,
) -> Result<(), NetworkError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_rows(
        &dir.join("stations.csv"),
        &["id", "is_candidate_ocf", "is_depot"],
        network.stations().iter().map(|s| {
            [s.id.clone(), s.is_candidate_ocf.to_string(), s.is_depot.to_string()]
        }),
    )?;
    write_rows(
        &dir.join("trips.csv"),
        &["label", "start_station", "end_station", "depart_min", "end_min", "distance_km"],
        network.trips().iter().map(|t| {
            [
                t.label.clone(),
                t.start_station.clone(),
                t.end_station.clone(),
                t.depart_min.to_string(),
                t.end_min.to_string(),
                t.distance_km.to_string(),
            ]
        }),
    )?;
    write_rows(
        &dir.join("deadheads.csv"),
        &["from", "to", "distance_km", "time_min"],
        network.deadheads().iter().map(|(from, to, leg)| {
            [
                network.file_id(from).to_string(),
                network.file_id(to).to_string(),
                leg.distance_km.to_string(),
                leg.time_min.to_string(),
            ]
        }),
    )?;
    write_rows(
        &dir.join("fleet.csv"),
        &["emission_class", "age_years", "count"],
        config.initial_fleet.iter().map(|c| {
            [
                c.emission_class.name().to_string(),
                c.age_years.to_string(),
                c.count.to_string(),
            ]
        }),
    )?;
    let path = dir.join("scenario.json");
    let json = serde_json::to_string_pretty(config).map_err(|source| NetworkError::Json {
        file: path.display().to_string(),
        source,
    })?;
    fs::write(&path, json + "\n").map_err(io_err(&path))
}
