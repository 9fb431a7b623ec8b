//! The metric dynamical system driving the model: seeded two-sided Wiener
//! paths with the Wiener shift, the OU perturbation of the transmission rate,
//! the random diffusion coefficient and the time-mean estimator.

mod diffusion;
mod ou;
mod path;
mod transmission;

pub use diffusion::{DiffusionField, Profile};
pub use ou::{ou_trace, OuTrace};
pub use path::{
    sample_wiener_path, sample_wiener_path_capped, GridSeries, NoisePath, DEFAULT_MAX_SAMPLES,
};
pub use transmission::{
    geometric_horizons, mean_value_m, transmission_trace, MeanValueEstimate, TransmissionProcess,
};

#[allow(unused_imports)]
pub(crate) use path::{snap_to_grid, trapezoid};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Everything needed to sample one noise realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub seed: u64,
    pub dt: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub kappa: f64,
    pub sigma: f64,
    pub phi0: f64,
    pub gamma0: f64,
    pub gamma_max: f64,
    pub a0: f64,
    pub a1: f64,
    pub profile: Profile,
}

/// One realization `ω` with every derived trace, shifted together.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomEnvironment {
    pub path: NoisePath,
    pub phi: OuTrace,
    pub gamma: TransmissionProcess,
    pub field: DiffusionField,
}

impl RandomEnvironment {
    pub fn sample(spec: &NoiseSpec) -> Result<Self> {
        let path = sample_wiener_path(spec.seed, spec.t_lo, spec.t_hi, spec.dt)?;
        Self::from_path(path, spec)
    }

    /// Derives the OU, transmission and diffusion traces from a given path;
    /// the seed and window in `spec` are ignored.
    pub fn from_path(path: NoisePath, spec: &NoiseSpec) -> Result<Self> {
        let phi = ou_trace(&path, spec.kappa, spec.sigma, spec.phi0)?;
        let gamma = transmission_trace(&phi.series, spec.gamma0, spec.gamma_max)?;
        let field = DiffusionField::new(spec.a0, spec.a1, spec.profile, &phi.series)?;
        Ok(Self {
            path,
            phi,
            gamma,
            field,
        })
    }

    pub fn dt(&self) -> f64 {
        self.path.dt()
    }

    pub fn window(&self) -> (f64, f64) {
        self.path.window()
    }

    pub fn tick_of(&self, t: f64) -> Result<i64> {
        self.path.tick_of(t)
    }

    /// `θ_s ω` applied to the path and every trace.
    pub fn shift(&self, s: f64) -> Result<Self> {
        self.shift_ticks(self.path.tick_of(s)?)
    }

    pub fn shift_ticks(&self, ticks: i64) -> Result<Self> {
        Ok(Self {
            path: self.path.shift_ticks(ticks)?,
            phi: self.phi.shift_ticks(ticks)?,
            gamma: self.gamma.shift_ticks(ticks)?,
            field: self.field.shift_ticks(ticks)?,
        })
    }
}
