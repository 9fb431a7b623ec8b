use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spatial::Grid;

/// Demographic and epidemiological rates. `lambda` is a spatially constant
/// recruitment rate broadcast over the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub lambda: f64,
    pub d: f64,
    pub b: f64,
    pub c: f64,
}

impl ModelParams {
    pub fn new(lambda: f64, d: f64, b: f64, c: f64) -> Result<Self> {
        let p = Self { lambda, d, b, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d > 0.0) || !self.d.is_finite() {
            return Err(Error::param("d", format!("d must be positive, got {}", self.d)));
        }
        for (name, v) in [("lambda", self.lambda), ("b", self.b), ("c", self.c)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::param(name, format!("{name} must be non-negative, got {v}")));
            }
        }
        Ok(())
    }

    /// `α = d + b + c`.
    pub fn alpha(&self) -> f64 {
        self.d + self.b + self.c
    }

    pub fn lambda_field(&self, grid: &Grid) -> Vec<f64> {
        vec![self.lambda; grid.len()]
    }

    /// Discrete `‖Λ‖₂`.
    pub fn lambda_norm(&self, grid: &Grid) -> f64 {
        self.lambda * (grid.cell_volume() * grid.len() as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_and_validation() {
        let p = ModelParams::new(1.0, 0.1, 0.05, 0.2).unwrap();
        assert!((p.alpha() - 0.35).abs() < 1e-15);
        let err = ModelParams::new(1.0, 0.0, 0.0, 0.0).unwrap_err();
        assert!(err.to_string().contains("d must be positive"));
        assert!(ModelParams::new(-1.0, 0.1, 0.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, 0.1, 0.0, f64::NAN).is_err());
    }
}
