//! Error norms, grid-convergence studies, stable-CFL search and comparison
//! with a reference solution.

use mprk_euler::riemann::{self, RiemannError, RiemannSolution};
use mprk_euler::spatial::Grid;
use mprk_euler::Scheme;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::run::{simulate, Field, RunConfig, RunError};
use crate::scenario::{cell_averages, Scenario};

/// `L1 = Δx Σ|e_i|`, `L2 = (Δx Σ e_i²)^{1/2}`.
pub fn norms(error: &[f64], dx: f64) -> (f64, f64) {
    let l1 = dx * error.iter().map(|e| e.abs()).sum::<f64>();
    let l2 = (dx * error.iter().map(|e| e * e).sum::<f64>()).sqrt();
    (l1, l2)
}

/// Average pairs of fine cells onto the coarse grid.
pub fn restrict_pairs(fine: &[f64]) -> Vec<f64> {
    fine.chunks_exact(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// `log2(e_coarse / e_fine)`.
pub fn eoc(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EocRow {
    pub cells: usize,
    pub l1: f64,
    pub l2: f64,
    /// `log2(e_N / e_2N)` against the next row; `None` on the last row.
    pub eoc_l1: Option<f64>,
    pub eoc_l2: Option<f64>,
}

/// Density errors of one scheme against its own solution on twice as many cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EocTable {
    pub scheme: String,
    pub cfl: f64,
    pub rows: Vec<EocRow>,
}

impl EocTable {
    pub fn row(&self, cells: usize) -> Option<&EocRow> {
        self.rows.iter().find(|r| r.cells == cells)
    }
}

#[derive(Debug, Error)]
pub enum StudyError {
    #[error("run with {cells} cells failed: {source}")]
    Run {
        cells: usize,
        #[source]
        source: RunError,
    },
    #[error("cell counts must double: {0:?}")]
    NotDoubling(Vec<usize>),
    #[error(transparent)]
    Riemann(#[from] RiemannError),
}

/// Self-convergence study on the cell counts `cells` (each the double of
/// the previous one). All runs execute in parallel.
pub fn eoc_study(scenario: &Scenario, scheme: Scheme, cells: &[usize], cfl: f64) -> Result<EocTable, StudyError> {
    if cells.is_empty() || cells.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(StudyError::NotDoubling(cells.to_vec()));
    }
    let mut all: Vec<usize> = cells.to_vec();
    all.push(2 * cells[cells.len() - 1]);
    let densities = all
        .par_iter()
        .map(|&n| {
            simulate(&RunConfig::new(*scenario, scheme, n, cfl))
                .map(|o| o.field.density())
                .map_err(|source| StudyError::Run { cells: n, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows: Vec<EocRow> = cells
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let reference = restrict_pairs(&densities[k + 1]);
            let err: Vec<f64> = densities[k].iter().zip(&reference).map(|(a, b)| a - b).collect();
            let (l1, l2) = norms(&err, (scenario.b - scenario.a) / n as f64);
            EocRow { cells: n, l1, l2, eoc_l1: None, eoc_l2: None }
        })
        .collect();
    for k in 1..rows.len() {
        let (l1, l2) = (rows[k].l1, rows[k].l2);
        rows[k - 1].eoc_l1 = Some(eoc(rows[k - 1].l1, l1));
        rows[k - 1].eoc_l2 = Some(eoc(rows[k - 1].l2, l2));
    }
    Ok(EocTable { scheme: scheme.name().to_string(), cfl, rows })
}

/// One evaluated point of a CFL search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CflEvaluation {
    pub cfl: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CflSearch {
    pub scheme: String,
    pub cells: usize,
    /// Largest stable grid value, 0 when none is.
    pub cfl: f64,
    /// Spacing of the search grid at the result.
    pub resolution: f64,
    pub evaluations: Vec<CflEvaluation>,
    /// False if a stable value was found above an unstable one.
    pub monotone: bool,
}

/// Smallest CFL value considered by [`cfl_search`].
pub const CFL_FLOOR: f64 = 1e-3;

/// Round to two significant digits so grid values print exactly.
fn tidy(v: f64) -> f64 {
    let scale = 10f64.powi(1 - v.log10().floor() as i32);
    (v * scale).round() / scale
}

/// Whether the run of `scenario` with `scheme` at `cfl` keeps every
/// positivity check up to the final time. Non-positivity errors count as
/// unstable as well.
pub fn is_stable(scenario: &Scenario, scheme: Scheme, cells: usize, cfl: f64, safety: f64) -> bool {
    simulate(&RunConfig::new(*scenario, scheme, cells, cfl).with_safety(safety)).is_ok()
}

/// Largest stable CFL of `scheme` on the two-significant-digit grid in
/// `[CFL_FLOOR, c_max]`; see [`search_grid`].
pub fn cfl_search(scenario: &Scenario, scheme: Scheme, cells: usize, c_max: f64, safety: f64) -> CflSearch {
    let (cfl, resolution, evaluations, monotone) =
        search_grid(c_max, |cfl| is_stable(scenario, scheme, cells, cfl, safety));
    CflSearch { scheme: scheme.name().to_string(), cells, cfl, resolution, evaluations, monotone }
}

/// Grid search for the largest stable value in `[CFL_FLOOR, c_max]`.
///
/// Decades are scanned from the top with one significant digit
/// (`c_max, 0.9, ..., 0.1, 0.09, ...`) until a stable value `d·10^e` is
/// found; the second digit is then refined between `d·10^e` and the next
/// larger one-digit value. Candidates of one pass run in parallel.
/// Returns `(value, resolution, evaluations, monotone)`.
pub fn search_grid(c_max: f64, stable: impl Fn(f64) -> bool + Sync) -> (f64, f64, Vec<CflEvaluation>, bool) {
    let eval = |values: &[f64]| -> Vec<CflEvaluation> {
        values.par_iter().map(|&cfl| CflEvaluation { cfl, stable: stable(cfl) }).collect()
    };
    let mut evaluations: Vec<CflEvaluation> = Vec::new();
    let mut found: Option<(f64, f64)> = None;
    let mut decade = 10f64.powi(c_max.log10().floor() as i32);
    let mut upper = c_max;
    let mut first = true;
    while decade >= CFL_FLOOR * (1.0 - 1e-9) {
        let mut values: Vec<f64> =
            (1..=9).rev().map(|d| tidy(d as f64 * decade)).filter(|&v| v < upper * (1.0 - 1e-12)).collect();
        if first {
            values.insert(0, c_max);
            first = false;
        }
        let pass = eval(&values);
        evaluations.extend(&pass);
        if let Some(hit) = pass.iter().find(|e| e.stable) {
            let next = values.iter().copied().filter(|&v| v > hit.cfl).fold(f64::INFINITY, f64::min);
            found = Some((hit.cfl, next.min(upper)));
            break;
        }
        upper = decade;
        decade /= 10.0;
    }
    let mut result = 0.0;
    let mut resolution = CFL_FLOOR;
    if let Some((low, high)) = found {
        result = low;
        let step = 10f64.powi(low.log10().floor() as i32) / 10.0;
        resolution = step;
        let refine: Vec<f64> =
            (1..=9).map(|k| tidy(low + k as f64 * step)).filter(|&v| v < high * (1.0 - 1e-12) && v <= c_max).collect();
        let pass = eval(&refine);
        for e in &pass {
            if e.stable {
                result = e.cfl;
            } else {
                break;
            }
        }
        evaluations.extend(pass);
    }
    evaluations.sort_by(|a, b| a.cfl.total_cmp(&b.cfl));
    let first_fail = evaluations.iter().find(|e| !e.stable).map(|e| e.cfl);
    let monotone = first_fail.is_none_or(|f| evaluations.iter().all(|e| !(e.stable && e.cfl > f)));
    (result, resolution, evaluations, monotone)
}

/// Cell-average errors of every conservative component and of the total
/// density against a reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub density_l1: f64,
    pub density_l2: f64,
    /// `(L1, L2)` per conservative component.
    pub components: Vec<(f64, f64)>,
}

/// Compare single-gas cell averages with a pointwise conservative sampler,
/// averaged over every cell with five-point Gauss quadrature.
pub fn compare_reference(grid: &Grid, cells: &[[f64; 3]], sampler: impl Fn(f64) -> [f64; 3]) -> ErrorReport {
    let reference = cell_averages(grid, sampler);
    let dx = grid.dx();
    let components = (0..3)
        .map(|c| {
            let e: Vec<f64> = cells.iter().zip(&reference).map(|(u, r)| u[c] - r[c]).collect();
            norms(&e, dx)
        })
        .collect::<Vec<_>>();
    ErrorReport { density_l1: components[0].0, density_l2: components[0].1, components }
}

/// Exact solution of a single-gas Riemann scenario.
pub fn exact_solution(scenario: &Scenario) -> Result<RiemannSolution, StudyError> {
    let (left, right) = scenario.riemann.ok_or(StudyError::Riemann(RiemannError::InvalidState))?;
    Ok(riemann::solve(mprk_euler::models::GAMMA_AIR, left, right)?)
}

/// Errors of a single-gas Riemann-problem field against the exact solution
/// at the scenario's final time.
pub fn compare_exact(scenario: &Scenario, grid: &Grid, field: &Field) -> Result<ErrorReport, StudyError> {
    let Field::Single(cells) = field else {
        return Err(StudyError::Riemann(RiemannError::InvalidState));
    };
    let exact = exact_solution(scenario)?;
    let gas = scenario.ideal_gas();
    Ok(compare_reference(grid, cells, |x| {
        let p = exact.sample_at(x, scenario.x0, scenario.t_end);
        [p.rho, p.rho * p.u, p.p / (gas.gamma - 1.0) + 0.5 * p.rho * p.u * p.u]
    }))
}

/// Least-squares slope of `log e` against `log h`.
pub fn log_slope(cells: &[usize], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = cells.iter().map(|&n| -(n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}
