use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use fleetplan::config::Scenario;
use fleetplan::emissions::Pairing;
use fleetplan::energy::{feasibility_study, SequenceProfile};
use fleetplan::milp::MipLimits;
use fleetplan::model::{build_mip, mps::write_mps, validate_plan, PlanReport};
use fleetplan::network::{load_network, Dataset};
use fleetplan::scheduler::{build_schedule, validate_schedule, VehicleSchedule};
use fleetplan::sweep::{emit_reports, parse_grid, run_sweep, solve_model, SweepSpec};

#[derive(Parser)]
#[command(name = "fleetplan", version, about = "Battery electric bus fleet transformation planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a vehicle schedule from the timetable.
    Schedule {
        #[command(flatten)]
        input: Input,
        /// Output file; prints to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimum battery capacities and feasible share per charging power.
    Feasibility {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "50:450:100")]
        powers: String,
        /// Gross battery capacity the share is computed for, kWh.
        #[arg(long)]
        q_max: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the transformation model in MPS format.
    ExportMps {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        cell: CellArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one scenario and write plan.json and report.json.
    Solve {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        cell: CellArgs,
        #[command(flatten)]
        limits: LimitArgs,
        #[arg(long)]
        export_mps: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Solve every scenario × power × battery price reduction cell.
    Sweep {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "all,ic,nc,oc")]
        scenarios: String,
        #[arg(long, default_value = "50:350:50")]
        powers: String,
        /// Annual battery price reductions in percent.
        #[arg(long, default_value = "0:12.5:2.5")]
        battery_reductions: String,
        #[command(flatten)]
        limits: LimitArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Input {
    /// Directory with stations.csv, trips.csv, deadheads.csv, fleet.csv and scenario.json.
    data: PathBuf,
    /// Use a schedule file instead of building one.
    #[arg(long)]
    schedule: Option<PathBuf>,
}

#[derive(Args)]
struct CellArgs {
    #[arg(long)]
    scenario: Option<Scenario>,
    #[arg(long)]
    power: Option<f64>,
    /// Annual battery price reduction in percent.
    #[arg(long)]
    battery_reduction: Option<f64>,
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long)]
    time_limit_s: Option<f64>,
    #[arg(long)]
    node_limit: Option<usize>,
    #[arg(long, default_value_t = 1e-6)]
    gap: f64,
    #[arg(long)]
    threads: Option<usize>,
    /// Run the cleanest surplus diesel buses instead of the dirtiest.
    #[arg(long)]
    best_case_emissions: bool,
}

impl LimitArgs {
    fn limits(&self) -> MipLimits {
        MipLimits {
            time_limit_s: self.time_limit_s,
            node_limit: self.node_limit,
            gap: self.gap,
            threads: self.threads,
        }
    }

    fn pairing(&self) -> Pairing {
        if self.best_case_emissions {
            Pairing::BestCase
        } else {
            Pairing::WorstCase
        }
    }
}

fn load(input: &Input) -> Result<(Dataset, VehicleSchedule)> {
    let data = load_network(&input.data)
        .with_context(|| format!("loading {}", input.data.display()))?;
    let schedule = match &input.schedule {
        Some(path) => VehicleSchedule::read_json(path, &data.network)
            .with_context(|| format!("reading {}", path.display()))?,
        None => build_schedule(&data.network),
    };
    let violations = validate_schedule(&schedule, &data.network);
    if !violations.is_empty() {
        bail!("invalid schedule: {violations:?}");
    }
    info!("{} trips on {} buses", data.network.trips().len(), schedule.fleet_size());
    Ok((data, schedule))
}

fn apply(cell: &CellArgs, data: &mut Dataset) {
    let config = &mut data.config;
    if let Some(s) = cell.scenario {
        config.scenario = s;
    }
    if let Some(r) = cell.power {
        config.charging_power_kw = r;
    }
    if let Some(b) = cell.battery_reduction {
        config.battery_price_reduction_per_year = b / 100.0;
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Schedule { input, out } => {
            let (_, schedule) = load(&input)?;
            match out {
                Some(path) => write(&path, &schedule.to_json())?,
                None => println!("{}", schedule.to_json()),
            }
        }
        Command::Feasibility {
            input,
            powers,
            q_max,
            out,
        } => {
            let (data, schedule) = load(&input)?;
            let grid = parse_grid(&powers)?;
            let q_max = q_max.unwrap_or_else(|| {
                data.config
                    .beb
                    .battery_capacities_kwh
                    .iter()
                    .copied()
                    .fold(0.0, f64::max)
            });
            let profiles = SequenceProfile::for_schedule(&schedule, &data.network);
            let rows = feasibility_study(&profiles, &data.config, &grid, q_max);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["power_kw", "min", "q1", "median", "q3", "max", "share_pct"])?;
            for r in rows {
                w.write_record(
                    [r.power_kw, r.min, r.q1, r.median, r.q3, r.max, r.share_pct]
                        .iter()
                        .map(|v| format!("{v:.1}")),
                )?;
            }
            let text = String::from_utf8(w.into_inner()?)?;
            match out {
                Some(path) => write(&path, &text)?,
                None => print!("{text}"),
            }
        }
        Command::ExportMps { input, cell, out } => {
            let (mut data, schedule) = load(&input)?;
            apply(&cell, &mut data);
            let model = build_mip(&data.network, &schedule, &data.config)?;
            write(&out, &write_mps(&model.mip))?;
            info!("{} columns, {} rows", model.mip.num_columns(), model.mip.num_rows());
        }
        Command::Solve {
            input,
            cell,
            limits,
            export_mps,
            out,
        } => {
            let (mut data, schedule) = load(&input)?;
            apply(&cell, &mut data);
            let model = build_mip(&data.network, &schedule, &data.config)?;
            info!("{} columns, {} rows", model.mip.num_columns(), model.mip.num_rows());
            if let Some(path) = &export_mps {
                write(path, &write_mps(&model.mip))?;
            }
            let solved = solve_model(&model, limits.limits())?;
            let violations = validate_plan(&solved.plan, &model.mip);
            if !violations.is_empty() {
                bail!("solver plan violates the model: {violations:?}");
            }
            let plan = PlanReport::new(&solved.plan, &model.problem, limits.pairing())?;
            write(&out.join("plan.json"), &serde_json::to_string_pretty(&plan)?)?;
            write(&out.join("report.json"), &serde_json::to_string_pretty(&solved.report)?)?;
            println!(
                "tco {:.2} eur, gap {:.2e}, {} nodes, {:.2}s",
                solved.costs.tco, solved.report.gap, solved.report.nodes, solved.report.wall_time_s
            );
            if !solved.report.at_gap() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Sweep {
            input,
            scenarios,
            powers,
            battery_reductions,
            limits,
            out,
        } => {
            let (data, schedule) = load(&input)?;
            let scenarios = scenarios
                .split(',')
                .map(|s| s.parse::<Scenario>())
                .collect::<Result<Vec<_>, _>>()?;
            let spec = SweepSpec {
                scenarios,
                powers_kw: parse_grid(&powers)?,
                reductions_pct: parse_grid(&battery_reductions)?,
                base: data.config.clone(),
                limits: limits.limits(),
                pairing: limits.pairing(),
            };
            let rows = run_sweep(&spec, &data.network, &schedule)?;
            emit_reports(&rows, &spec.count_columns(), &out)?;
            let unsolved = rows.iter().filter(|r| !r.at_gap()).count();
            println!("{} cells, {} not at gap", rows.len(), unsolved);
            if unsolved > 0 {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
