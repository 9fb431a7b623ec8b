//! Finite-difference discretization of `div(a ∇·)` on an interval or
//! rectangle with Dirichlet boundary, linear solvers, and the principal
//! Dirichlet eigenpair.

mod band;
mod cg;
mod eigen;
mod grid;
mod operator;

pub use band::BandCholesky;
pub use cg::{conjugate_gradient, CgConfig, CgStats};
pub use eigen::{
    continuum_lambda1, first_eigenpair, first_eigenpair_with, EigenConfig, Eigenpair, SpectralData,
};
pub use grid::{build_grid, Grid};
pub use operator::{
    assemble_diffusion, assemble_diffusion_at, laplacian, DiffusionOperator, ImplicitSystem, Negated,
    SymmetricOperator,
};
