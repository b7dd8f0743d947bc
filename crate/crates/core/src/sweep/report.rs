//! CSV tables of a sweep.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::SweepRow;
use crate::network::DEPOT;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("no sweep rows to report")]
    NoRows,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

fn opt(value: Option<f64>, decimals: usize) -> String {
    value.map_or_else(String::new, |v| fixed(v, decimals))
}

/// Fixed-point text without a sign on values that round to zero.
fn fixed(value: f64, decimals: usize) -> String {
    let text = format!("{value:.decimals$}");
    match text.strip_prefix('-') {
        Some(rest) if rest.chars().all(|c| c == '0' || c == '.') => rest.to_string(),
        _ => text,
    }
}

fn cell_fields(row: &SweepRow) -> [String; 3] {
    [
        row.cell.scenario.to_string(),
        row.cell.power_kw.to_string(),
        row.cell.reduction_pct.to_string(),
    ]
}

fn writer(dir: &Path, name: &str, header: &[&str]) -> Result<(csv::Writer<fs::File>, PathBuf), ReportError> {
    let path = dir.join(name);
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(header)?;
    Ok((w, path))
}

/// Writes results.csv, emissions.csv, fleet_timeline.csv, chargers.csv and
/// assignment.csv into `out_dir` and returns their paths.
///
/// `count_columns` names the bus count columns of the rows.
pub fn emit_reports(
    rows: &[SweepRow],
    count_columns: &[String],
    out_dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>, ReportError> {
    if rows.is_empty() {
        return Err(ReportError::NoRows);
    }
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();

    let mut header = vec!["scenario", "r_kw", "b_pct"];
    header.extend(count_columns.iter().map(String::as_str));
    header.extend(["ncf", "ocf", "tco_eur", "nox_t_per_year", "gap", "status"]);
    let (mut w, path) = writer(dir, "results.csv", &header)?;
    for row in rows {
        let mut record: Vec<String> = cell_fields(row).into();
        record.extend(row.counts.iter().map(u32::to_string));
        record.extend([
            row.ncf.to_string(),
            row.ocf.to_string(),
            opt(row.tco, 2),
            opt(row.nox_t_per_year, 2),
            row.gap.map_or_else(String::new, |g| format!("{g:.3e}")),
            row.status.clone(),
        ]);
        w.write_record(&record)?;
    }
    w.flush()?;
    paths.push(path);

    let (mut w, path) = writer(dir, "emissions.csv", &["scenario", "r_kw", "b_pct", "t", "nox_t_per_year"])?;
    for row in rows {
        let Some(sol) = &row.solution else { continue };
        for p in &sol.report.periods {
            let mut record: Vec<String> = cell_fields(row).into();
            record.extend([p.period.to_string(), fixed(p.nox_t_per_year, 2)]);
            w.write_record(&record)?;
        }
    }
    w.flush()?;
    paths.push(path);

    let (mut w, path) = writer(dir, "fleet_timeline.csv", &["scenario", "r_kw", "b_pct", "period", "type", "count"])?;
    for row in rows {
        let Some(sol) = &row.solution else { continue };
        for p in &sol.report.periods {
            for (id, count) in &p.fleet {
                let mut record: Vec<String> = cell_fields(row).into();
                record.extend([p.period.to_string(), id.clone(), count.to_string()]);
                w.write_record(&record)?;
            }
        }
    }
    w.flush()?;
    paths.push(path);

    let (mut w, path) = writer(dir, "chargers.csv", &["scenario", "r_kw", "b_pct", "station", "install_period", "count"])?;
    for row in rows {
        let Some(sol) = &row.solution else { continue };
        let plan = &sol.solved.plan;
        for (i, station) in sol.problem.stations.iter().enumerate() {
            if let Some(t) = plan.install_period(i) {
                let mut record: Vec<String> = cell_fields(row).into();
                record.extend([station.clone(), t.to_string(), "1".to_string()]);
                w.write_record(&record)?;
            }
        }
        let mut before = 0;
        for t in plan.vars.periods() {
            let now = plan.depot_chargers(t);
            if now > before {
                let mut record: Vec<String> = cell_fields(row).into();
                record.extend([DEPOT.to_string(), t.to_string(), (now - before).to_string()]);
                w.write_record(&record)?;
            }
            before = now;
        }
    }
    w.flush()?;
    paths.push(path);

    let (mut w, path) = writer(
        dir,
        "assignment.csv",
        &["scenario", "r_kw", "b_pct", "sequence", "period", "type", "energy_kwh", "max_dwell_min"],
    )?;
    for row in rows {
        let Some(sol) = &row.solution else { continue };
        let problem = &sol.problem;
        for t in sol.solved.plan.vars.periods() {
            for (s, profile) in problem.profiles.iter().enumerate() {
                let Some(k) = sol.solved.plan.assigned_type(s, t) else { continue };
                let bt = &problem.types.types[k];
                let energy = bt
                    .kind
                    .is_battery()
                    .then(|| profile.consumption(bt.consumption_loaded, bt.consumption_empty));
                let mut record: Vec<String> = cell_fields(row).into();
                record.extend([
                    s.to_string(),
                    t.to_string(),
                    bt.id.clone(),
                    opt(energy, 3),
                    fixed(profile.max_dwell_h() * 60.0, 1),
                ]);
                w.write_record(&record)?;
            }
        }
    }
    w.flush()?;
    paths.push(path);
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_zero_has_no_sign() {
        assert_eq!(fixed(-0.0001, 2), "0.00");
        assert_eq!(fixed(-0.0, 1), "0.0");
        assert_eq!(fixed(-0.5, 1), "-0.5");
        assert_eq!(fixed(12.345, 2), "12.35");
    }
}
