use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::band::BandCholesky;
use super::grid::Grid;
use super::operator::laplacian;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    /// Smallest eigenvalue `λ₁ʰ` of `−Δʰ`.
    pub lambda1: f64,
    /// Positive eigenvector with unit discrete `L²` norm.
    pub v1: Vec<f64>,
    /// `‖−Δʰ v₁ − λ₁ʰ v₁‖` at termination.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 500,
        }
    }
}

/// Spectral constants derived from the principal eigenpair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub lambda1: f64,
    pub v1: Vec<f64>,
    /// `a₀ λ₁ʰ`, the coercivity constant of `−A`.
    pub lambda0: f64,
}

impl SpectralData {
    pub fn new(pair: &Eigenpair, a0: f64) -> Self {
        Self {
            lambda1: pair.lambda1,
            v1: pair.v1.clone(),
            lambda0: a0 * pair.lambda1,
        }
    }
}

/// Continuum value `π² Σ 1/L_i²`.
pub fn continuum_lambda1(grid: &Grid) -> f64 {
    PI * PI * grid.lengths().iter().map(|l| 1.0 / (l * l)).sum::<f64>()
}

pub fn first_eigenpair(grid: &Grid) -> Result<Eigenpair> {
    first_eigenpair_with(grid, &EigenConfig::default())
}

/// Inverse iteration on `−Δʰ` with a banded Cholesky inner solve.
pub fn first_eigenpair_with(grid: &Grid, cfg: &EigenConfig) -> Result<Eigenpair> {
    let lap = laplacian(grid);
    let n = grid.len();
    let factor = BandCholesky::factor(n, lap.bandwidth(), |i, j| -lap.entry(i, j))?;

    let normalize = |v: &mut Vec<f64>| {
        let norm = grid.norm(v);
        v.iter_mut().for_each(|x| *x /= norm);
    };
    // start from a positive smooth vector so the principal mode dominates
    let mut v = grid.sample(|x| {
        x.iter()
            .zip(grid.lengths())
            .map(|(&xi, &l)| (xi * (l - xi)).max(0.0))
            .product()
    });
    normalize(&mut v);

    let mut residual = f64::INFINITY;
    for it in 1..=cfg.max_iter {
        factor.solve_in_place(&mut v);
        normalize(&mut v);
        let lv: Vec<f64> = lap.apply(&v).into_iter().map(|x| -x).collect();
        let lambda = grid.dot(&v, &lv);
        let r: Vec<f64> = lv.iter().zip(&v).map(|(a, b)| a - lambda * b).collect();
        residual = grid.norm(&r);
        if residual <= cfg.tol {
            if v.iter().sum::<f64>() < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            if let Some((p, &val)) = v.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
                return Err(Error::NegativeInput {
                    field: "v1",
                    index: p,
                    value: val,
                });
            }
            return Ok(Eigenpair {
                lambda1: lambda,
                v1: v,
                residual,
                iterations: it,
            });
        }
    }
    Err(Error::EigenNotConverged {
        iterations: cfg.max_iter,
        residual,
    })
}
