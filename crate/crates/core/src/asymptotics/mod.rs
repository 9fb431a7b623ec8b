//! Long-time objects: the disease-free solution, pullback attractor samples,
//! threshold verdicts, the infected-class envelope, the persistence functional
//! and box-counting dimension.

mod attractor;
mod boxdim;
mod disease_free;
mod envelope;
mod threshold;

pub use attractor::{
    attractor_seeds, diameter, project_state, pullback_attractor_sample, semi_distance, AttractorSample,
};
pub use boxdim::{box_counting_dimension, dyadic_schedule, BoxDimension};
pub use disease_free::{disease_free_at_tick, disease_free_invariance_residual, disease_free_solution, DiseaseFree};
pub use envelope::{
    gronwall_envelope_check, growth_epsilon, persistence_functional, w_growth_check, EnvelopeReport, GrowthReport,
    PersistenceReport,
};
pub use threshold::{threshold_report, ThresholdReport, Verdict};

/// Radius `1 + ‖Λ‖₂/(λ₀ + d)` of the absorbing ball for the total population.
pub fn absorbing_radius(lambda_norm: f64, lambda0: f64, d: f64) -> f64 {
    1.0 + lambda_norm / (lambda0 + d)
}
