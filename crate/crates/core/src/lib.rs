//! Runge-Kutta-Chebyshev integrators for stiff ODEs.
//!
//! - [`chebyshev`]: Chebyshev recurrences and RKC coefficients of orders 1 and 2
//! - [`rkc`]: single-rate RKC step and fixed-step driver
//! - [`arkc`]: additive multirate RKC with linearly interpolated ghost values
//! - [`stability`]: iteration matrices and stability-domain scans
//! - [`heat`]: locally refined heat equation and time-convergence study

pub mod arkc;
pub mod chebyshev;
pub mod error;
pub mod heat;
pub mod rkc;
pub mod stability;

pub use arkc::{arkc_integrate, arkc_step, arkc_step_with, ArkcStepState, LinearSplit, SplitSystem};
pub use chebyshev::{build_coefficients, cheb_eval, select_stage_count, ChebEval, Order, RkcCoefficients};
pub use error::{Error, Result};
pub use rkc::{integrate, rkc_step, FnSystem, OdeSystem, StepRecord, Trajectory};
