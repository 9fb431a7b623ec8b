//! Numerical laboratory for an SIR reaction-diffusion system with a random
//! diffusion coefficient and a random transmission rate, both driven by a
//! two-sided Wiener path through the Wiener shift.
//!
//! The crate is split along the model's structure:
//!
//! * [`randomness`]: Wiener paths and shifts, the Ornstein-Uhlenbeck driver,
//!   the clamped transmission trace, the random diffusion field and the
//!   time-mean estimator of the transmission rate.
//! * [`spatial`]: Dirichlet grids in one and two dimensions, the conservative
//!   divergence-form operator, a conjugate-gradient solver and the first
//!   Dirichlet eigenpair of the discrete Laplacian.
//! * [`dynamics`]: IMEX time stepping of the S/I/R system and of the total
//!   population equation.
//! * [`asymptotics`]: the disease-free pullback solution, pullback attractor
//!   samples, threshold reports, the Gronwall envelope, the persistence
//!   functional and box-counting dimension.
//! * [`harness`]: JSON scenarios, the ensemble runner and result export.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too; index loops
// read closer to the banded formulas than iterator chains.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod asymptotics;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod randomness;
pub mod spatial;

pub use error::{Error, Result};
