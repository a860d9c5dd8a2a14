//! Test problems, their initial data and the models they run on.

use std::fmt;
use std::str::FromStr;

use mprk_euler::models::{GasModel, IdealGas, MultiState, ReactionConstants, ReactiveMixture, SingleState};
use mprk_euler::riemann::Primitive;
use mprk_euler::spatial::{Boundary, Grid};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    Smooth,
    Reactive,
    Contact,
    Vacuum,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 4] =
        [ScenarioKind::Smooth, ScenarioKind::Reactive, ScenarioKind::Contact, ScenarioKind::Vacuum];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Smooth => "smooth",
            ScenarioKind::Reactive => "reactive",
            ScenarioKind::Contact => "contact",
            ScenarioKind::Vacuum => "vacuum",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown scenario `{0}`")]
pub struct UnknownScenario(pub String);

impl FromStr for ScenarioKind {
    type Err = UnknownScenario;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownScenario(s.to_string()))
    }
}

/// Primitive left state `(rho1, rho2, rho3, u, p)` of the reactive shock tube.
pub const REACTIVE_LEFT: [f64; 5] = [5.251896311257205e-5, 3.748071704863518e-5, 2.962489471973072e-4, 0.0, 1e3];
/// Primitive right state of the reactive shock tube.
pub const REACTIVE_RIGHT: [f64; 5] = [8.341661837019181e-8, 9.45418692098664e-11, 2.748909430004963e-7, 0.0, 1.0];

/// Default reaction-rate scaling of the reactive scenario.
pub const REACTIVE_DELTA: f64 = 1e4;

/// A complete problem definition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub a: f64,
    pub b: f64,
    pub boundary: Boundary,
    pub t_end: f64,
    /// Reaction-rate scaling; only used by the reactive scenario.
    pub delta: f64,
    /// Specific gas constant of the reactive mixture.
    pub gas_constant: f64,
    /// Primitive `(rho, u, p)` states of the single-gas Riemann problems.
    pub riemann: Option<(Primitive, Primitive)>,
    /// Position of the initial discontinuity.
    pub x0: f64,
}

impl Scenario {
    pub fn new(kind: ScenarioKind) -> Self {
        let base = Scenario {
            kind,
            a: -1.0,
            b: 1.0,
            boundary: Boundary::Neumann,
            t_end: 0.03,
            delta: 0.0,
            gas_constant: ReactionConstants::default().gas_constant,
            riemann: None,
            x0: 0.0,
        };
        match kind {
            ScenarioKind::Smooth => Scenario { a: 0.0, b: 1.0, ..base },
            ScenarioKind::Reactive => Scenario { t_end: 1e-4, delta: REACTIVE_DELTA, ..base },
            ScenarioKind::Contact => Scenario {
                t_end: 0.01,
                riemann: Some((Primitive::new(1.0, 20.0, 3.0), Primitive::new(1e-6, 20.0, 3.0))),
                ..base
            },
            ScenarioKind::Vacuum => {
                Scenario { riemann: Some((Primitive::new(1.0, -20.0, 0.4), Primitive::new(1.0, 20.0, 0.4))), ..base }
            }
        }
    }

    /// Vacuum problem with a lighter right state.
    pub fn vacuum_with_right_density(rho: f64) -> Self {
        let mut s = Scenario::new(ScenarioKind::Vacuum);
        if let Some((_, right)) = s.riemann.as_mut() {
            right.rho = rho;
        }
        s
    }

    pub fn is_multi(&self) -> bool {
        self.kind == ScenarioKind::Reactive
    }

    pub fn grid(&self, cells: usize) -> Result<Grid, mprk_euler::spatial::GridError> {
        Grid::new(self.a, self.b, cells)
    }

    pub fn ideal_gas(&self) -> IdealGas {
        IdealGas::default()
    }

    pub fn mixture(&self) -> ReactiveMixture {
        ReactiveMixture::new(ReactionConstants::default().with_delta(self.delta).with_gas_constant(self.gas_constant))
    }

    /// Primitive `(rho, u, p)` of a single-gas scenario at `x`.
    pub fn single_primitive(&self, x: f64) -> Primitive {
        match (self.kind, self.riemann) {
            (_, Some((left, right))) => {
                if x < self.x0 {
                    left
                } else {
                    right
                }
            }
            _ => {
                let c = (0.5 * std::f64::consts::PI * x).cos();
                Primitive::new(1.0, 1.0, 1.0 + c.powi(4))
            }
        }
    }

    /// Cell averages of the conservative single-gas state.
    pub fn single_cells(&self, grid: &Grid) -> Vec<SingleState> {
        let gas = self.ideal_gas();
        cell_averages(grid, |x| {
            let p = self.single_primitive(x);
            gas.conservative(p.rho, p.u, p.p)
        })
    }

    /// Cell averages of the conservative reactive state.
    pub fn multi_cells(&self, grid: &Grid) -> Vec<MultiState> {
        let mix = self.mixture();
        let left = reactive_state(&mix, &REACTIVE_LEFT);
        let right = reactive_state(&mix, &REACTIVE_RIGHT);
        cell_averages(grid, |x| if x < self.x0 { left } else { right })
    }
}

fn reactive_state(mix: &ReactiveMixture, prim: &[f64; 5]) -> MultiState {
    mix.conservative([prim[0], prim[1], prim[2]], prim[3], prim[4])
}

const GAUSS_NODES: [f64; 5] =
    [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
const GAUSS_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Five-point Gauss–Legendre average of `f` over every cell.
pub fn cell_averages<const N: usize>(grid: &Grid, f: impl Fn(f64) -> [f64; N]) -> Vec<[f64; N]> {
    let h = 0.5 * grid.dx();
    (0..grid.cells)
        .map(|i| {
            let xc = grid.center(i);
            let samples = GAUSS_NODES.map(|xi| f(xc + h * xi));
            // exact for cells away from discontinuities of piecewise constant data
            if samples.iter().all(|v| *v == samples[0]) {
                return samples[0];
            }
            let mut avg = [0.0; N];
            for (v, w) in samples.iter().zip(GAUSS_WEIGHTS) {
                for c in 0..N {
                    avg[c] += 0.5 * w * v[c];
                }
            }
            avg
        })
        .collect()
}

/// Check that the cell averages are admissible states of the model.
pub fn admissible<M: GasModel<N>, const N: usize>(model: &M, cells: &[[f64; N]]) -> bool {
    cells.iter().all(|u| model.pressure(u).is_ok_and(|p| p > 0.0))
}
