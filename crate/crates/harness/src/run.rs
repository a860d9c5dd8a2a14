//! Single simulation runs with snapshot and summary output.

use std::path::{Path, PathBuf};
use std::time::Instant;

use mprk_euler::models::{GasModel, MultiState, SingleState};
use mprk_euler::spatial::{Grid, GridError};
use mprk_euler::{RunFailure, RunOptions, RunStats, Scheme, StepError, Stepper};
use thiserror::Error;

use crate::io::{self, FailureInfo, RunSummary, Snapshot};
use crate::scenario::Scenario;

/// Cell averages of either model.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Single(Vec<SingleState>),
    Multi(Vec<MultiState>),
}

impl Field {
    pub fn len(&self) -> usize {
        match self {
            Field::Single(c) => c.len(),
            Field::Multi(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Total density of every cell.
    pub fn density(&self) -> Vec<f64> {
        match self {
            Field::Single(c) => c.iter().map(|u| u[0]).collect(),
            Field::Multi(c) => c.iter().map(|u| u[0] + u[1] + u[2]).collect(),
        }
    }

    fn snapshot_columns(&self) -> Vec<String> {
        let names: &[&str] = match self {
            Field::Single(_) => &["x", "rho", "u", "p", "rhoE"],
            Field::Multi(_) => &["x", "rho1", "rho2", "rho3", "u", "p", "rhoE"],
        };
        names.iter().map(|s| s.to_string()).collect()
    }
}

fn primitive_rows<M: GasModel<N>, const N: usize>(model: &M, grid: &Grid, cells: &[[f64; N]]) -> Vec<Vec<f64>> {
    cells
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let mut row = vec![grid.center(i)];
            row.extend_from_slice(&u[..M::SPECIES]);
            row.push(model.velocity(u));
            row.push(model.pressure(u).unwrap_or(f64::NAN));
            row.push(u[M::ENERGY]);
            row
        })
        .collect()
}

/// Inputs of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub scheme: Scheme,
    pub cells: usize,
    pub cfl: f64,
    pub safety: f64,
    pub max_steps: Option<usize>,
    /// Output directory; nothing is written when `None`.
    pub output: Option<PathBuf>,
    /// Write a snapshot every this many steps; 0 writes only the initial
    /// and final states.
    pub snapshot_every: usize,
}

impl RunConfig {
    pub fn new(scenario: Scenario, scheme: Scheme, cells: usize, cfl: f64) -> Self {
        Self { scenario, scheme, cells, cfl, safety: 1.0, max_steps: None, output: None, snapshot_every: 0 }
    }

    pub fn with_safety(mut self, safety: f64) -> Self {
        self.safety = safety;
        self
    }

    pub fn options(&self) -> RunOptions {
        RunOptions { cfl: self.cfl, safety: self.safety, t_end: self.scenario.t_end, max_steps: self.max_steps }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Totals {
    pub steps: usize,
    pub time: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub min_pressure: f64,
}

impl<const N: usize> From<RunStats<N>> for Totals {
    fn from(s: RunStats<N>) -> Self {
        Totals {
            steps: s.steps,
            time: s.time,
            dt_min: if s.steps == 0 { 0.0 } else { s.dt_min },
            dt_max: s.dt_max,
            min_pressure: s.min_pressure,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub grid: Grid,
    pub field: Field,
    pub totals: Totals,
    pub wall_time: f64,
}

/// Aborted run with the last accepted state.
#[derive(Debug, Clone, PartialEq)]
pub struct Failed {
    pub step: usize,
    pub time: f64,
    pub error: StepError,
    pub field: Field,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("run failed at step {} (t = {:e}): {}", .0.step, .0.time, .0.error)]
    Failed(Box<Failed>),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}

impl From<GridError> for RunError {
    fn from(e: GridError) -> Self {
        RunError::Config(e.to_string())
    }
}

impl RunError {
    pub fn failure(&self) -> Option<&Failed> {
        match self {
            RunError::Failed(f) => Some(f),
            _ => None,
        }
    }

    pub fn is_positivity_failure(&self) -> bool {
        self.failure().is_some_and(|f| f.error.is_positivity_failure())
    }
}

fn validate_config(config: &RunConfig) -> Result<(), RunError> {
    for (name, v) in [("cfl", config.cfl), ("safety", config.safety)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(RunError::Config(format!("{name} must be positive, got {v}")));
        }
    }
    if !(config.scenario.t_end >= 0.0) {
        return Err(RunError::Config(format!("t_end must be non-negative, got {}", config.scenario.t_end)));
    }
    Ok(())
}

/// Integrate a scenario. No files are written.
pub fn simulate(config: &RunConfig) -> Result<RunOutcome, RunError> {
    simulate_with(config, |_, _, _| Ok(()))
}

/// Integrate a scenario and hand every accepted state to `observer`.
/// The first observer error aborts the run.
pub fn simulate_with<F>(config: &RunConfig, mut observer: F) -> Result<RunOutcome, RunError>
where
    F: FnMut(usize, f64, &dyn Fn() -> (Vec<String>, Vec<Vec<f64>>)) -> std::io::Result<()>,
{
    validate_config(config)?;
    let scenario = &config.scenario;
    let grid = scenario.grid(config.cells)?;
    let start = Instant::now();
    let mut io_error = None;
    macro_rules! integrate {
        ($model:expr, $cells:expr, $wrap:path) => {{
            let model = $model;
            let cells = $cells;
            let columns = $wrap(Vec::new()).snapshot_columns();
            let initial_p = cells.iter().filter_map(|u| model.pressure(u).ok()).fold(f64::INFINITY, f64::min);
            let stepper = Stepper::new(&model, &grid, scenario.boundary, config.scheme);
            let result = stepper.advance(cells, 0.0, &config.options(), |step, t, cells| {
                if io_error.is_none() {
                    let rows = || (columns.clone(), primitive_rows(&model, &grid, cells));
                    if let Err(e) = observer(step, t, &rows) {
                        io_error = Some(e);
                    }
                }
            });
            match result {
                Ok((cells, stats)) => {
                    let mut totals = Totals::from(stats);
                    totals.min_pressure = totals.min_pressure.min(initial_p);
                    Ok((grid, $wrap(cells), totals))
                }
                Err(RunFailure { step, time, error, cells }) => {
                    Err(RunError::Failed(Box::new(Failed { step, time, error, field: $wrap(cells) })))
                }
            }
        }};
    }
    let result = if scenario.is_multi() {
        integrate!(scenario.mixture(), scenario.multi_cells(&grid), Field::Multi)
    } else {
        integrate!(scenario.ideal_gas(), scenario.single_cells(&grid), Field::Single)
    };
    if let Some(e) = io_error {
        return Err(RunError::Io(e));
    }
    let (grid, field, totals) = result?;
    Ok(RunOutcome { grid, field, totals, wall_time: start.elapsed().as_secs_f64() })
}

fn snapshot_name(step: usize) -> String {
    format!("snapshot_{step:06}.csv")
}

fn metadata(config: &RunConfig, step: usize, time: f64) -> Vec<(String, String)> {
    let s = &config.scenario;
    [
        ("scenario", s.kind.name().to_string()),
        ("scheme", config.scheme.name().to_string()),
        ("order", config.scheme.order().to_string()),
        ("cells", config.cells.to_string()),
        ("domain", format!("{:e}:{:e}", s.a, s.b)),
        ("cfl", format!("{:e}", config.cfl)),
        ("safety", format!("{:e}", config.safety)),
        ("delta", format!("{:e}", s.delta)),
        ("step", step.to_string()),
        ("time", format!("{time:.16e}")),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

/// Run with output: snapshots and `summary.json` are written into
/// `config.output`. The summary is written for failed runs as well.
pub fn run(config: &RunConfig) -> Result<(RunOutcome, RunSummary), RunError> {
    let Some(dir) = config.output.clone() else {
        return Err(RunError::Config("run needs an output directory".into()));
    };
    let mut written: Vec<String> = Vec::new();
    let mut last: Option<(usize, f64, Snapshot)> = None;
    let every = config.snapshot_every;
    let result = simulate_with(config, |step, t, rows| {
        let (columns, rows) = rows();
        let snap = Snapshot { metadata: metadata(config, step, t), columns, rows };
        if step == 0 || (every > 0 && step % every == 0) {
            let name = snapshot_name(step);
            io::write_snapshot(&dir.join(&name), &snap)?;
            written.push(name);
            last = None;
        } else {
            last = Some((step, t, snap));
        }
        Ok(())
    });
    // the final state is always written
    if let Some((step, _, snap)) = last.take() {
        let name = snapshot_name(step);
        io::write_snapshot(&dir.join(&name), &snap)?;
        written.push(name);
    }
    let mut summary = RunSummary {
        scenario: config.scenario.kind.name().to_string(),
        scheme: config.scheme.name().to_string(),
        order: config.scheme.order(),
        cells: config.cells,
        cfl: config.cfl,
        safety: config.safety,
        t_end: config.scenario.t_end,
        completed: false,
        steps: 0,
        time: 0.0,
        dt_min: 0.0,
        dt_max: 0.0,
        min_pressure: 0.0,
        wall_time_s: 0.0,
        snapshots: written,
        failure: None,
    };
    match result {
        Ok(outcome) => {
            summary.completed = true;
            summary.steps = outcome.totals.steps;
            summary.time = outcome.totals.time;
            summary.dt_min = outcome.totals.dt_min;
            summary.dt_max = outcome.totals.dt_max;
            summary.min_pressure = outcome.totals.min_pressure;
            summary.wall_time_s = outcome.wall_time;
            write_summary(&dir, &summary)?;
            Ok((outcome, summary))
        }
        Err(RunError::Failed(f)) => {
            summary.steps = f.step.saturating_sub(1);
            summary.time = f.time;
            summary.failure = Some(FailureInfo {
                step: f.step,
                time: f.time,
                positivity: f.error.is_positivity_failure(),
                message: f.error.to_string(),
            });
            write_summary(&dir, &summary)?;
            Err(RunError::Failed(f))
        }
        Err(e) => Err(e),
    }
}

fn write_summary(dir: &Path, summary: &RunSummary) -> std::io::Result<()> {
    io::write_json(&dir.join("summary.json"), summary)
}
