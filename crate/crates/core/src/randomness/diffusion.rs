use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::path::GridSeries;

/// Smooth spatial profile `ρ(x)` of the diffusion coefficient. Every profile
/// takes values in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// `ρ ≡ 1`: the coefficient is random in time but constant in space.
    #[default]
    Uniform,
    /// `ρ = 0.5 + 0.4 Π sin(π x_i / L_i)`.
    Bump,
    /// `ρ = 0.25 + 0.5 x_0 / L_0`.
    Ramp,
}

impl Profile {
    pub fn eval(self, x: &[f64], lengths: &[f64]) -> f64 {
        match self {
            Profile::Uniform => 1.0,
            Profile::Bump => {
                let prod: f64 = x
                    .iter()
                    .zip(lengths)
                    .map(|(&xi, &li)| (PI * xi / li).sin())
                    .product();
                0.5 + 0.4 * prod
            }
            Profile::Ramp => 0.25 + 0.5 * x[0] / lengths[0],
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Uniform => "uniform",
            Profile::Bump => "bump",
            Profile::Ramp => "ramp",
        })
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Profile::Uniform),
            "bump" => Ok(Profile::Bump),
            "ramp" => Ok(Profile::Ramp),
            other => Err(Error::param("profile", format!("unknown profile `{other}`"))),
        }
    }
}

/// Logistic squashing into `(0, 1)`; the argument is limited so the result
/// never rounds to an endpoint.
pub(crate) fn squash(z: f64) -> f64 {
    1.0 / (1.0 + (-z.clamp(-30.0, 30.0)).exp())
}

/// Random diffusion coefficient
/// `a(θ_t ω, x) = a₀ + (a₁ − a₀) · s(Φ(θ_t ω)) · ρ(x)`, with `s` the logistic
/// function. With `a₀ = a₁` the coefficient is the constant `a₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionField {
    pub a0: f64,
    pub a1: f64,
    pub profile: Profile,
    /// `s(Φ(θ_t ω)) ∈ (0, 1)` on the noise grid.
    pub driver: GridSeries,
}

impl DiffusionField {
    pub fn new(a0: f64, a1: f64, profile: Profile, phi: &GridSeries) -> Result<Self> {
        if !(a0 > 0.0) || !a0.is_finite() {
            return Err(Error::param("a0", format!("must be positive, got {a0}")));
        }
        if !(a1 >= a0) || !a1.is_finite() {
            return Err(Error::param("a1", format!("must be at least a0 = {a0}, got {a1}")));
        }
        let driver = phi.with_values(phi.raw().iter().map(|&p| squash(p)).collect())?;
        Ok(Self {
            a0,
            a1,
            profile,
            driver,
        })
    }

    pub fn is_constant(&self) -> bool {
        self.a0 == self.a1
    }

    /// Coefficient at noise tick `tick` and physical point `x`.
    pub fn coefficient(&self, tick: i64, x: &[f64], lengths: &[f64]) -> f64 {
        if self.is_constant() {
            return self.a0;
        }
        self.a0 + (self.a1 - self.a0) * self.driver.at(tick) * self.profile.eval(x, lengths)
    }

    pub fn shift_ticks(&self, ticks: i64) -> Result<Self> {
        Ok(Self {
            driver: self.driver.shift_ticks(ticks)?,
            ..self.clone()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randomness::{ou_trace, sample_wiener_path};

    #[test]
    fn stays_strictly_inside_bounds() {
        let path = sample_wiener_path(11, -20.0, 20.0, 0.01).unwrap();
        let phi = ou_trace(&path, 0.5, 3.0, 0.0).unwrap();
        let lengths = [1.0, 2.0];
        for profile in [Profile::Uniform, Profile::Bump, Profile::Ramp] {
            let field = DiffusionField::new(0.5, 1.5, profile, &phi.series).unwrap();
            let (lo, hi) = path.tick_range();
            for k in (lo..=hi).step_by(7) {
                for x in [[0.0, 0.0], [0.3, 1.1], [1.0, 2.0], [0.5, 1.0]] {
                    let a = field.coefficient(k, &x, &lengths);
                    assert!(a > 0.5 && a < 1.5, "{profile}: a={a}");
                }
            }
        }
    }

    #[test]
    fn time_increments_are_controlled_by_the_driver() {
        // |Δa| ≤ (a₁ − a₀)/4 · |ΔΦ| with |ΔΦ| ≤ κ dt |Φ| + σ √dt |ξ|
        let dt = 0.001;
        let (kappa, sigma) = (1.0, 0.8);
        let path = sample_wiener_path(2, -1.0, 50.0, dt).unwrap();
        let phi = ou_trace(&path, kappa, sigma, 0.0).unwrap();
        let field = DiffusionField::new(0.4, 2.0, Profile::Bump, &phi.series).unwrap();
        let lengths = [1.0];
        let x = [0.37];
        let (lo, hi) = path.tick_range();
        let w = path.base().raw();
        let phis = phi.series.raw();
        let mut worst_ratio: f64 = 0.0;
        for k in lo..hi {
            let da = (field.coefficient(k + 1, &x, &lengths) - field.coefficient(k, &x, &lengths)).abs();
            let j = (k - lo) as usize;
            let xi = (w[j + 1] - w[j]) / dt.sqrt();
            let bound = 0.25 * (2.0 - 0.4) * (kappa * dt * phis[j].abs() + sigma * dt.sqrt() * xi.abs());
            assert!(da <= bound + 1e-15, "k={k}: {da} > {bound}");
            worst_ratio = worst_ratio.max(da / dt.sqrt());
        }
        // Hölder-1/2 modulus stays bounded at the sampling resolution
        assert!(worst_ratio < 0.25 * 1.6 * (kappa * 10.0 * dt.sqrt() + sigma * 6.0));
    }

    #[test]
    fn constant_field() {
        let path = sample_wiener_path(2, -1.0, 1.0, 0.1).unwrap();
        let phi = ou_trace(&path, 1.0, 1.0, 0.0).unwrap();
        let field = DiffusionField::new(1.0, 1.0, Profile::Bump, &phi.series).unwrap();
        assert!(field.is_constant());
        assert_eq!(field.coefficient(3, &[0.2], &[1.0]), 1.0);
    }

    #[test]
    fn rejects_bad_bounds() {
        let path = sample_wiener_path(2, -1.0, 1.0, 0.1).unwrap();
        assert!(DiffusionField::new(0.0, 1.0, Profile::Uniform, path.base()).is_err());
        assert!(DiffusionField::new(1.0, 0.5, Profile::Uniform, path.base()).is_err());
    }

    #[test]
    fn profile_names_round_trip() {
        for p in [Profile::Uniform, Profile::Bump, Profile::Ramp] {
            assert_eq!(p.to_string().parse::<Profile>().unwrap(), p);
        }
        assert!("wavy".parse::<Profile>().is_err());
    }
}
