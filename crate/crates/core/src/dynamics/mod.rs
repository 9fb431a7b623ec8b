//! Time integration of the spatial SIR system and of the decoupled linear
//! equation for the total population.

mod incidence;
mod integrator;
mod params;
mod solver;
mod state;

pub use incidence::incidence;
pub use integrator::{Integrator, LinearRun, SimOptions, StepStats, Trajectory, TrajectoryRow};
pub use params::ModelParams;
pub use solver::{stationary_total_population, SolverConfig, SolverKind};
pub use state::{StateField, EMPTY_POPULATION};

/// Default step: implicit diffusion allows ten times the explicit limit
/// `h²/(4a₁)`; the explicit coupling needs `dt ≤ 1/(2γ_max + 1)`, taken with a
/// factor 0.1.
pub fn default_dt(h_min: f64, a1: f64, gamma_max: f64) -> f64 {
    (10.0 * h_min * h_min / (4.0 * a1)).min(0.1 / (2.0 * gamma_max + 1.0))
}
