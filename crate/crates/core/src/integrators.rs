//! Explicit Runge–Kutta schemes and their modified Patankar (MP)
//! counterparts on top of the LLF semi-discretization.
//!
//! All eight schemes share one stage loop over a Butcher tableau. They
//! differ in which components are advanced linearly-implicitly:
//!
//! | treatment          | MP components        | momentum / energy           |
//! |--------------------|----------------------|-----------------------------|
//! | `Explicit`         | none                 | explicit                    |
//! | `Densities`        | densities            | explicit                    |
//! | `DensitiesEnergy`  | densities and energy | momentum explicit           |
//! | `FluxBalanced`     | densities            | weighted by the MP ratios   |

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::banded::SolveError;
use crate::models::{GasModel, ModelError, SourceSplit};
use crate::pdrs::{solve_coupled_mp, solve_mp, AuxTerms, MpSolveError, PdrsError, PdrsTerms};
use crate::spatial::{max_wave_speed, Boundary, Grid, InterfaceError, InterfaceFluxes, Reconstruction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    ForwardEuler,
    MpeRhoE,
    Mpe,
    MpeS,
    Heun,
    MpHeunRhoE,
    MpHeun,
    MpHeunS,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Treatment {
    Explicit,
    Densities,
    DensitiesEnergy,
    FluxBalanced,
}

/// State that supplies the Patankar-weight denominators of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Denominator {
    /// The state at the beginning of the step.
    Initial,
    /// Stage value `k` (0-based; stage 0 is the initial state).
    Stage(usize),
}

/// Explicit Butcher tableau with the denominator choice of every MP solve.
#[derive(Debug, Clone, PartialEq)]
pub struct MprkTableau {
    /// Strictly lower triangular stage coefficients; row `k` has `k` entries.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    /// Denominator of stage `k`, `k >= 1`; entry 0 is unused.
    pub stage_denominators: Vec<Denominator>,
    pub final_denominator: Denominator,
}

impl MprkTableau {
    pub fn euler() -> Self {
        Self {
            a: vec![vec![]],
            b: vec![1.0],
            stage_denominators: vec![Denominator::Initial],
            final_denominator: Denominator::Initial,
        }
    }

    /// Heun's method; the MP variant divides by the initial state in the
    /// second stage and by the second stage in the update.
    pub fn heun() -> Self {
        Self {
            a: vec![vec![], vec![1.0]],
            b: vec![0.5, 0.5],
            stage_denominators: vec![Denominator::Initial, Denominator::Initial],
            final_denominator: Denominator::Stage(1),
        }
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }
}

impl Scheme {
    pub const ALL: [Scheme; 8] = [
        Scheme::ForwardEuler,
        Scheme::MpeRhoE,
        Scheme::Mpe,
        Scheme::MpeS,
        Scheme::Heun,
        Scheme::MpHeunRhoE,
        Scheme::MpHeun,
        Scheme::MpHeunS,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::ForwardEuler => "FE",
            Scheme::MpeRhoE => "MPE-rhoE",
            Scheme::Mpe => "MPE",
            Scheme::MpeS => "MPE-s",
            Scheme::Heun => "Heun",
            Scheme::MpHeunRhoE => "MPHeun-rhoE",
            Scheme::MpHeun => "MPHeun",
            Scheme::MpHeunS => "MPHeun-s",
        }
    }

    pub fn order(self) -> u32 {
        match self {
            Scheme::ForwardEuler | Scheme::MpeRhoE | Scheme::Mpe | Scheme::MpeS => 1,
            _ => 2,
        }
    }

    pub fn treatment(self) -> Treatment {
        match self {
            Scheme::ForwardEuler | Scheme::Heun => Treatment::Explicit,
            Scheme::Mpe | Scheme::MpHeun => Treatment::Densities,
            Scheme::MpeRhoE | Scheme::MpHeunRhoE => Treatment::DensitiesEnergy,
            Scheme::MpeS | Scheme::MpHeunS => Treatment::FluxBalanced,
        }
    }

    pub fn is_patankar(self) -> bool {
        self.treatment() != Treatment::Explicit
    }

    pub fn tableau(self) -> MprkTableau {
        if self.order() == 1 {
            MprkTableau::euler()
        } else {
            MprkTableau::heun()
        }
    }

    /// First-order schemes use cell averages, second-order ones minmod.
    pub fn reconstruction(self) -> Reconstruction {
        if self.order() == 1 {
            Reconstruction::Constant
        } else {
            Reconstruction::Minmod
        }
    }

    /// Scheme of the same treatment with the given order.
    pub fn with_order(self, order: u32) -> Option<Scheme> {
        let t = self.treatment();
        Scheme::ALL.into_iter().find(|s| s.treatment() == t && s.order() == order)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown scheme `{0}`")]
pub struct UnknownScheme(pub String);

impl FromStr for Scheme {
    type Err = UnknownScheme;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace(['_', ' '], "-").replace("ρ", "rho");
        let scheme = match key.as_str() {
            "fe" | "euler" => Scheme::ForwardEuler,
            "mpe-rhoe" => Scheme::MpeRhoE,
            "mpe" => Scheme::Mpe,
            "mpe-s" => Scheme::MpeS,
            "heun" => Scheme::Heun,
            "mpheun-rhoe" => Scheme::MpHeunRhoE,
            "mpheun" => Scheme::MpHeun,
            "mpheun-s" => Scheme::MpHeunS,
            _ => return Err(UnknownScheme(s.to_string())),
        };
        Ok(scheme)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error("non-positive density {value:e} of species {species} in cell {cell}")]
    NegativeDensity { cell: usize, species: usize, value: f64 },
    #[error("non-positive pressure {value:e} in cell {cell}")]
    NegativePressure { cell: usize, value: f64 },
    #[error("non-finite state in cell {cell}")]
    NonFinite { cell: usize },
    #[error("MP component {component} has non-positive input {value:e} in cell {cell}")]
    NonPositiveMpInput { cell: usize, component: usize, value: f64 },
    #[error("stage {stage}: {source}")]
    Flux {
        stage: usize,
        #[source]
        source: InterfaceError,
    },
    #[error("source term in cell {cell}: {source}")]
    Source {
        cell: usize,
        #[source]
        source: ModelError,
    },
    #[error("Patankar system: {0}")]
    Pdrs(#[from] PdrsError),
    #[error("linear solve: {0}")]
    Solve(#[from] SolveError),
    #[error("invalid time step {0:e}")]
    InvalidTimeStep(f64),
}

impl From<MpSolveError> for StepError {
    fn from(e: MpSolveError) -> Self {
        match e {
            MpSolveError::Assembly(e) => StepError::Pdrs(e),
            MpSolveError::Solve(e) => StepError::Solve(e),
        }
    }
}

impl StepError {
    /// True for failures caused by a loss of positivity or stability of the
    /// computed state, as opposed to misuse of the API.
    pub fn is_positivity_failure(&self) -> bool {
        !matches!(self, StepError::InvalidTimeStep(_) | StepError::Pdrs(PdrsError::Length { .. }))
    }

    pub fn is_negative_density(&self) -> bool {
        match self {
            StepError::NegativeDensity { .. } => true,
            StepError::Flux { source, .. } => matches!(source.source, ModelError::NonPositiveDensity { .. }),
            StepError::Source { source, .. } => matches!(source, ModelError::NonPositiveDensity { .. }),
            _ => false,
        }
    }
}

/// Diagnostics of an accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport<const N: usize> {
    pub dt: f64,
    /// Largest LLF wave speed of the first stage.
    pub alpha_max: f64,
    /// Minimum of every conservative component over the grid.
    pub min_components: [f64; N],
    pub min_pressure: f64,
}

impl<const N: usize> StepReport<N> {
    pub fn component_positive(&self, c: usize) -> bool {
        self.min_components[c] > 0.0
    }
}

struct StageRates<const N: usize> {
    fluxes: InterfaceFluxes<N>,
    source: Option<Vec<SourceSplit>>,
}

/// One scheme applied to one semi-discretization.
#[derive(Debug, Clone)]
pub struct Stepper<'m, M> {
    pub model: &'m M,
    pub dx: f64,
    pub boundary: Boundary,
    pub scheme: Scheme,
    tableau: MprkTableau,
}

impl<'m, M> Stepper<'m, M> {
    pub fn new(model: &'m M, grid: &Grid, boundary: Boundary, scheme: Scheme) -> Self {
        Self { model, dx: grid.dx(), boundary, scheme, tableau: scheme.tableau() }
    }

    pub fn tableau(&self) -> &MprkTableau {
        &self.tableau
    }

    /// `Δt = cfl · safety · Δx / max α` over the LLF wave speeds of the cell
    /// averages.
    pub fn stable_dt<const N: usize>(&self, cells: &[[f64; N]], cfl: f64, safety: f64) -> Result<f64, StepError>
    where
        M: GasModel<N>,
    {
        let alpha =
            max_wave_speed(self.model, cells, self.boundary).map_err(|source| StepError::Flux { stage: 0, source })?;
        let dt = cfl * safety * self.dx / alpha;
        if dt > 0.0 && dt.is_finite() {
            Ok(dt)
        } else {
            Err(StepError::InvalidTimeStep(dt))
        }
    }

    /// Advance `cells` by `dt`. The input is never modified.
    pub fn step<const N: usize>(&self, cells: &[[f64; N]], dt: f64) -> Result<(Vec<[f64; N]>, StepReport<N>), StepError>
    where
        M: GasModel<N>,
    {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(StepError::InvalidTimeStep(dt));
        }
        let tab = &self.tableau;
        let mut states: Vec<Vec<[f64; N]>> = vec![cells.to_vec()];
        let mut rates: Vec<StageRates<N>> = Vec::with_capacity(tab.stages());
        rates.push(self.rates(cells, 0)?);
        for k in 1..tab.stages() {
            let next = self.combine(cells, &states, &rates, &tab.a[k], tab.stage_denominators[k], dt)?;
            self.validate(&next)?;
            rates.push(self.rates(&next, k)?);
            states.push(next);
        }
        let out = self.combine(cells, &states, &rates, &tab.b, tab.final_denominator, dt)?;
        let (min_components, min_pressure) = self.validate(&out)?;
        let report = StepReport { dt, alpha_max: rates[0].fluxes.alpha_max(), min_components, min_pressure };
        Ok((out, report))
    }

    fn rates<const N: usize>(&self, cells: &[[f64; N]], stage: usize) -> Result<StageRates<N>, StepError>
    where
        M: GasModel<N>,
    {
        let fluxes = InterfaceFluxes::evaluate(self.model, cells, self.boundary, self.scheme.reconstruction())
            .map_err(|source| StepError::Flux { stage, source })?;
        let source = if self.model.has_source() {
            let s = cells
                .iter()
                .enumerate()
                .map(|(cell, u)| {
                    self.model
                        .source(u)
                        .map(Option::unwrap_or_default)
                        .map_err(|source| StepError::Source { cell, source })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Some(s)
        } else {
            None
        };
        Ok(StageRates { fluxes, source })
    }

    /// Minimum of every component and of the pressure. Densities of the
    /// whole grid are checked before any pressure, so a density failure is
    /// never masked by a pressure failure elsewhere.
    fn validate<const N: usize>(&self, cells: &[[f64; N]]) -> Result<([f64; N], f64), StepError>
    where
        M: GasModel<N>,
    {
        for (cell, u) in cells.iter().enumerate() {
            if u.iter().any(|v| !v.is_finite()) {
                return Err(StepError::NonFinite { cell });
            }
            if let Some(species) = (0..M::SPECIES).find(|&k| !(u[k] >= 0.0)) {
                return Err(StepError::NegativeDensity { cell, species, value: u[species] });
            }
        }
        let mut mins = [f64::INFINITY; N];
        let mut min_p = f64::INFINITY;
        for (cell, u) in cells.iter().enumerate() {
            let p = self.model.pressure(u).map_err(|source| StepError::Source { cell, source })?;
            if !(p > 0.0) {
                return Err(StepError::NegativePressure { cell, value: p });
            }
            for (m, v) in mins.iter_mut().zip(u) {
                *m = m.min(*v);
            }
            min_p = min_p.min(p);
        }
        Ok((mins, min_p))
    }

    /// `base + Δt Σ_ν coefs[ν] L(u^ν)` with the MP components solved
    /// linearly-implicitly against the chosen denominator state.
    fn combine<const N: usize>(
        &self,
        base: &[[f64; N]],
        states: &[Vec<[f64; N]>],
        rates: &[StageRates<N>],
        coefs: &[f64],
        denominator: Denominator,
        dt: f64,
    ) -> Result<Vec<[f64; N]>, StepError>
    where
        M: GasModel<N>,
    {
        let n = base.len();
        let lambda = dt / self.dx;
        let species = M::SPECIES;
        let treatment = self.scheme.treatment();
        let rates = &rates[..coefs.len()];
        let mp: Vec<usize> = match treatment {
            Treatment::Explicit => vec![],
            Treatment::Densities | Treatment::FluxBalanced => (0..species).collect(),
            Treatment::DensitiesEnergy => (0..species).chain([M::ENERGY]).collect(),
        };
        let balanced = treatment == Treatment::FluxBalanced;
        let source = combined_source(rates, coefs, n);
        let mut out = base.to_vec();

        for c in 0..N {
            if mp.contains(&c) || (balanced && c >= species) {
                continue;
            }
            for (i, cell) in out.iter_mut().enumerate() {
                let mut flux_diff = 0.0;
                for (r, &a) in rates.iter().zip(coefs) {
                    flux_diff += a * (r.fluxes.fluxes[i].flux[c] - r.fluxes.fluxes[i + 1].flux[c]);
                }
                cell[c] += lambda * flux_diff;
                if let Some(s) = &source {
                    if c < 2 {
                        cell[c] += dt * s[i].net()[c];
                    }
                }
            }
        }
        if mp.is_empty() {
            return Ok(out);
        }

        let sigma_state: &[[f64; N]] = match denominator {
            Denominator::Initial => base,
            Denominator::Stage(k) => &states[k],
        };
        for &c in &mp {
            for (cell, (u, s)) in base.iter().zip(sigma_state).enumerate() {
                for value in [u[c], s[c]] {
                    if !(value >= 0.0) {
                        return Err(StepError::NonPositiveMpInput { cell, component: c, value });
                    }
                }
            }
        }
        let column = |state: &[[f64; N]], c: usize| -> Vec<f64> { state.iter().map(|u| u[c]).collect() };
        let combined_terms = |c: usize| -> PdrsTerms {
            let mut terms = PdrsTerms::zeros(n, self.boundary);
            for (r, &a) in rates.iter().zip(coefs) {
                terms.scaled_add(a, &PdrsTerms::from_fluxes(&r.fluxes.component(c), self.boundary));
            }
            terms
        };

        let mut remaining: &[usize] = &mp;
        if let Some(s) = &source {
            let terms = [combined_terms(0), combined_terms(1)];
            let sigma = [column(sigma_state, 0), column(sigma_state, 1)];
            let b = [column(base, 0), column(base, 1)];
            let x = solve_coupled_mp([&terms[0], &terms[1]], [&sigma[0], &sigma[1]], [&b[0], &b[1]], lambda, dt, s)?;
            for (cell, x) in out.iter_mut().zip(x) {
                cell[0] = x[0];
                cell[1] = x[1];
            }
            remaining = &mp[2..];
        }
        for &c in remaining {
            let x = solve_mp(&combined_terms(c), &column(sigma_state, c), &column(base, c), lambda)?;
            for (cell, x) in out.iter_mut().zip(x) {
                cell[c] = x;
            }
        }

        if balanced {
            let weights: Vec<Vec<f64>> = (0..species)
                .map(|k| out.iter().zip(sigma_state).map(|(u, s)| flux_weight(u[k], s[k])).collect())
                .collect();
            for (part, c) in [(0, M::MOMENTUM), (1, M::ENERGY)] {
                let mut aux = AuxTerms::zeros(species, n, self.boundary);
                for (r, &a) in rates.iter().zip(coefs) {
                    let weighted: Vec<Vec<f64>> = (0..species)
                        .map(|k| r.fluxes.fluxes.iter().map(|f| f.split.weighted[k][part]).collect())
                        .collect();
                    let density: Vec<Vec<f64>> = (0..species).map(|k| r.fluxes.component(k)).collect();
                    let unweighted = r.fluxes.fluxes.iter().map(|f| f.split.unweighted[part]).collect();
                    aux.scaled_add(a, &AuxTerms::assemble(&weighted, &density, unweighted, self.boundary));
                }
                for (cell, delta) in out.iter_mut().zip(aux.weighted_balance(&weights)) {
                    cell[c] += lambda * delta;
                }
            }
        }
        Ok(out)
    }
}

fn combined_source<const N: usize>(rates: &[StageRates<N>], coefs: &[f64], n: usize) -> Option<Vec<SourceSplit>> {
    let first = rates.first()?.source.as_ref()?;
    let mut total = vec![SourceSplit::default(); n.max(first.len())];
    for (r, &a) in rates.iter().zip(coefs) {
        if let Some(s) = &r.source {
            for (t, si) in total.iter_mut().zip(s) {
                t.scaled_add(a, si);
            }
        }
    }
    Some(total)
}

/// Stopping rule and step-size control of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub cfl: f64,
    pub safety: f64,
    pub t_end: f64,
    /// Stop after this many steps even if `t_end` is not reached.
    pub max_steps: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunStats<const N: usize> {
    pub steps: usize,
    pub time: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub min_pressure: f64,
    pub min_components: [f64; N],
}

/// A run aborted by a failed step; `cells` is the last accepted state.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("step {step} at t = {time:e} failed: {error}")]
pub struct RunFailure<const N: usize> {
    pub step: usize,
    pub time: f64,
    #[source]
    pub error: StepError,
    pub cells: Vec<[f64; N]>,
}

impl<'m, M> Stepper<'m, M> {
    /// Integrate from `t0` with adaptive `Δt`, clipped to land on `t_end`.
    /// `observer` sees every accepted state, starting with the initial one.
    pub fn advance<const N: usize, F>(
        &self,
        cells: Vec<[f64; N]>,
        t0: f64,
        options: &RunOptions,
        mut observer: F,
    ) -> Result<(Vec<[f64; N]>, RunStats<N>), RunFailure<N>>
    where
        M: GasModel<N>,
        F: FnMut(usize, f64, &[[f64; N]]),
    {
        let mut stats = RunStats {
            steps: 0,
            time: t0,
            dt_min: f64::INFINITY,
            dt_max: 0.0,
            min_pressure: f64::INFINITY,
            min_components: [f64::INFINITY; N],
        };
        let mut cells = cells;
        observer(0, t0, &cells);
        let mut t = t0;
        while t < options.t_end && options.max_steps.is_none_or(|m| stats.steps < m) {
            let fail = |error: StepError, cells: &[[f64; N]]| RunFailure {
                step: stats.steps + 1,
                time: t,
                error,
                cells: cells.to_vec(),
            };
            let mut dt = self.stable_dt(&cells, options.cfl, options.safety).map_err(|e| fail(e, &cells))?;
            let remaining = options.t_end - t;
            let last = dt >= remaining * (1.0 - 1e-12);
            if last {
                dt = remaining;
            }
            let (next, report) = self.step(&cells, dt).map_err(|e| fail(e, &cells))?;
            cells = next;
            t = if last { options.t_end } else { t + dt };
            stats.steps += 1;
            stats.time = t;
            stats.dt_min = stats.dt_min.min(dt);
            stats.dt_max = stats.dt_max.max(dt);
            stats.min_pressure = stats.min_pressure.min(report.min_pressure);
            for (m, v) in stats.min_components.iter_mut().zip(report.min_components) {
                *m = m.min(v);
            }
            observer(stats.steps, t, &cells);
        }
        Ok((cells, stats))
    }
}

/// Patankar weight of a flux-balanced update. Everything it multiplies
/// leaves the cell, so for an empty cell the value is immaterial.
fn flux_weight(new: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        1.0
    } else {
        new / sigma
    }
}
