//! Reproduction harness for the `mprk-euler` solver: scenario catalog,
//! single runs with CSV output, convergence studies, stable-CFL search and
//! comparison with the exact Riemann solution.

pub mod config;
pub mod io;
pub mod run;
pub mod scenario;
pub mod study;
