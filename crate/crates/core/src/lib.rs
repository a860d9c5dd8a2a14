//! Finite-volume solver for the one-dimensional Euler equations of a single
//! ideal gas and of a reacting three-species mixture, with explicit and
//! modified Patankar Runge–Kutta time integration.
//!
//! ```
//! use mprk_euler::{Boundary, Grid, IdealGas, RunOptions, Scheme, Stepper};
//!
//! let gas = IdealGas::default();
//! let grid = Grid::new(0.0, 1.0, 50).unwrap();
//! let cells = vec![gas.conservative(1.0, 0.5, 1.0); 50];
//! let stepper = Stepper::new(&gas, &grid, Boundary::Periodic, Scheme::MpHeun);
//! let opts = RunOptions { cfl: 0.5, safety: 1.0, t_end: 0.1, max_steps: None };
//! let (out, stats) = stepper.advance(cells, 0.0, &opts, |_, _, _| {}).unwrap();
//! assert_eq!(stats.time, 0.1);
//! assert!((out[7][0] - 1.0).abs() < 1e-12);
//! ```

pub mod banded;
pub mod integrators;
pub mod models;
pub mod pdrs;
pub mod riemann;
pub mod spatial;

pub use integrators::{
    Denominator, MprkTableau, RunFailure, RunOptions, RunStats, Scheme, StepError, StepReport, Stepper, Treatment,
};
pub use models::{
    GasModel, IdealGas, ModelError, MultiState, PrimState, ReactionConstants, ReactiveMixture, SingleState, SourceSplit,
};
pub use spatial::{Boundary, Grid, Reconstruction};
