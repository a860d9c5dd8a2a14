use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mprk_euler::Scheme;
use mprk_harness::config::{ConfigError, Settings};
use mprk_harness::io::{self, Snapshot};
use mprk_harness::run::{self as runner, RunError};
use mprk_harness::scenario::ScenarioKind;
use mprk_harness::study::{self, StudyError};

/// Finite-volume solver for the (reactive) Euler equations with explicit and
/// modified Patankar time integrators.
#[derive(Debug, Parser)]
#[command(name = "mprk-euler", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario and write snapshots plus summary.json.
    Run {
        #[command(flatten)]
        settings: SettingsArgs,
        /// Also write the cell-averaged exact solution (Riemann scenarios).
        #[arg(long)]
        exact: bool,
    },
    /// Self-convergence study on the smooth scenario.
    Eoc {
        /// Schemes to study; all eight when omitted.
        #[arg(long, value_delimiter = ',')]
        scheme: Vec<Scheme>,
        /// Doubling sequence of cell counts.
        #[arg(long, value_delimiter = ',', default_value = "160,320,640,1280")]
        cells: Vec<usize>,
        #[arg(long, default_value_t = 0.5)]
        cfl: f64,
        /// Write eoc.json into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest stable CFL number on a two-significant-digit grid.
    Cfl {
        #[command(flatten)]
        settings: SettingsArgs,
        /// Upper end of the search range.
        #[arg(long, default_value_t = 1.0)]
        cmax: f64,
    },
}

#[derive(Debug, Args)]
struct SettingsArgs {
    /// key = value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<ScenarioKind>,
    #[arg(long)]
    scheme: Option<Scheme>,
    /// Expected order of the scheme (1 or 2); a mismatch is an error.
    #[arg(long)]
    order: Option<u32>,
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    safety: Option<f64>,
    /// Final time; defaults to the scenario's.
    #[arg(long)]
    tend: Option<f64>,
    /// Reaction-rate multiplier of the reactive scenario.
    #[arg(long)]
    delta: Option<f64>,
    /// Specific gas constant of the reactive mixture.
    #[arg(long)]
    gas_constant: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Snapshot every this many steps (0: initial and final state only).
    #[arg(long)]
    snapshots: Option<usize>,
    #[arg(long)]
    max_steps: Option<usize>,
}

impl SettingsArgs {
    fn resolve(&self) -> Result<Settings, ConfigError> {
        let file = match &self.config {
            Some(path) => Settings::read(path)?,
            None => Settings::default(),
        };
        Ok(file.merge(Settings {
            scenario: self.scenario,
            scheme: self.scheme,
            order: self.order,
            cells: self.cells,
            cfl: self.cfl,
            safety: self.safety,
            t_end: self.tend,
            delta: self.delta,
            gas_constant: self.gas_constant,
            output: self.out.clone(),
            snapshot_every: self.snapshots,
            max_steps: self.max_steps,
        }))
    }
}

/// Process exit codes.
mod exit {
    pub const NUMERICAL: u8 = 1;
    pub const POSITIVITY: u8 = 2;
    pub const CONFIG: u8 = 3;
    pub const IO: u8 = 4;
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(e: impl ToString) -> Self {
        Failure { code: exit::CONFIG, message: e.to_string() }
    }

    fn settings(e: ConfigError) -> Self {
        let code = if matches!(e, ConfigError::Read { .. }) { exit::IO } else { exit::CONFIG };
        Failure { code, message: e.to_string() }
    }

    fn io(e: impl ToString) -> Self {
        Failure { code: exit::IO, message: e.to_string() }
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        let code = match &e {
            RunError::Config(_) => exit::CONFIG,
            RunError::Io(_) => exit::IO,
            _ if e.is_positivity_failure() => exit::POSITIVITY,
            RunError::Failed(_) => exit::NUMERICAL,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<StudyError> for Failure {
    fn from(e: StudyError) -> Self {
        match e {
            StudyError::Run { cells, source } => {
                let inner = Failure::from(source);
                Failure { code: inner.code, message: format!("{cells} cells: {}", inner.message) }
            }
            e @ StudyError::NotDoubling(_) => Failure::config(e),
            other => Failure { code: exit::NUMERICAL, message: other.to_string() },
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage errors share the configuration exit code
            let code = if e.use_stderr() { exit::CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run { settings, exact } => run(&settings, exact),
        Command::Eoc { scheme, cells, cfl, out } => eoc(&scheme, &cells, cfl, out.as_deref()),
        Command::Cfl { settings, cmax } => cfl(&settings, cmax),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(args: &SettingsArgs, exact: bool) -> Result<(), Failure> {
    let settings = args.resolve().map_err(Failure::settings)?;
    let mut config = settings.run_config().map_err(Failure::config)?;
    let dir = config.output.get_or_insert_with(|| PathBuf::from("out")).clone();
    let (outcome, summary) = runner::run(&config)?;
    println!(
        "{} {} N={}: {} steps to t = {:e}, dt in [{:e}, {:e}], min p = {:e}, {:.2} s",
        summary.scenario,
        summary.scheme,
        summary.cells,
        summary.steps,
        summary.time,
        summary.dt_min,
        summary.dt_max,
        summary.min_pressure,
        summary.wall_time_s
    );
    if exact {
        let scenario = &config.scenario;
        let report = study::compare_exact(scenario, &outcome.grid, &outcome.field)
            .map_err(|e| Failure::config(format!("exact solution: {e}")))?;
        let solution = study::exact_solution(scenario).map_err(Failure::from)?;
        let gas = scenario.ideal_gas();
        let averages = mprk_harness::scenario::cell_averages(&outcome.grid, |x| {
            let p = solution.sample_at(x, scenario.x0, scenario.t_end);
            [p.rho, p.u, p.p, p.p / (gas.gamma - 1.0) + 0.5 * p.rho * p.u * p.u]
        });
        let rows = averages
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let mut row = vec![outcome.grid.center(i)];
                row.extend_from_slice(v);
                row
            })
            .collect();
        let snap = Snapshot {
            metadata: vec![
                ("scenario".into(), scenario.kind.name().into()),
                ("cells".into(), config.cells.to_string()),
                ("time".into(), scenario.t_end.to_string()),
                ("source".into(), "exact".into()),
            ],
            columns: ["x", "rho", "u", "p", "rhoE"].map(String::from).to_vec(),
            rows,
        };
        io::write_snapshot(&dir.join("exact.csv"), &snap).map_err(Failure::io)?;
        println!("L1 density error vs exact: {:e} (L2 {:e})", report.density_l1, report.density_l2);
    }
    Ok(())
}

fn eoc(schemes: &[Scheme], cells: &[usize], cfl: f64, out: Option<&Path>) -> Result<(), Failure> {
    if !(cfl > 0.0 && cfl.is_finite()) {
        return Err(Failure::config(format!("cfl must be positive, got {cfl}")));
    }
    let schemes = if schemes.is_empty() { Scheme::ALL.to_vec() } else { schemes.to_vec() };
    let scenario = mprk_harness::scenario::Scenario::new(ScenarioKind::Smooth);
    let mut tables = Vec::new();
    for scheme in schemes {
        let table = study::eoc_study(&scenario, scheme, cells, cfl)?;
        println!("{scheme}");
        println!("{:>6} {:>12} {:>7} {:>12} {:>7}", "N", "L1", "EOC", "L2", "EOC");
        let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |e| format!("{e:.3}"));
        for r in &table.rows {
            println!("{:>6} {:>12.4e} {:>7} {:>12.4e} {:>7}", r.cells, r.l1, fmt(r.eoc_l1), r.l2, fmt(r.eoc_l2));
        }
        tables.push(table);
    }
    if let Some(dir) = out {
        io::write_json(&dir.join("eoc.json"), &tables).map_err(Failure::io)?;
    }
    Ok(())
}

fn cfl(args: &SettingsArgs, cmax: f64) -> Result<(), Failure> {
    let settings = args.resolve().map_err(Failure::settings)?;
    if !(cmax > 0.0 && cmax.is_finite()) {
        return Err(Failure::config(format!("cmax must be positive, got {cmax}")));
    }
    // the search varies the CFL number itself
    let base = Settings { cfl: Some(cmax), ..settings.clone() }.run_config().map_err(Failure::config)?;
    let search = study::cfl_search(&base.scenario, base.scheme, base.cells, cmax, base.safety);
    println!(
        "{} {} N={} safety={}: max stable CFL {} (grid spacing {}{})",
        base.scenario.kind,
        base.scheme,
        base.cells,
        base.safety,
        search.cfl,
        search.resolution,
        if search.monotone { "" } else { ", NOT monotone" }
    );
    if let Some(dir) = &settings.output {
        io::write_json(&dir.join("cfl.json"), &search).map_err(Failure::io)?;
    }
    Ok(())
}
