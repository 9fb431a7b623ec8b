use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDimension {
    /// Least-squares slope of `log N_ε` against `log(1/ε)`.
    pub slope: f64,
    /// Root-mean-square deviation of the fit.
    pub residual: f64,
    pub eps: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Box-counting estimate over an explicit `ε` schedule.
pub fn box_counting_dimension(points: &[Vec<f64>], eps: &[f64]) -> Result<BoxDimension> {
    if points.is_empty() {
        return Err(Error::param("points", "point cloud is empty"));
    }
    if eps.len() < 3 {
        return Err(Error::param("eps", format!("need at least 3 box sizes, got {}", eps.len())));
    }
    if let Some(&e) = eps.iter().find(|&&e| !(e > 0.0)) {
        return Err(Error::param("eps", format!("box sizes must be positive, got {e}")));
    }
    let counts: Vec<usize> = eps
        .iter()
        .map(|&e| {
            points
                .iter()
                .map(|p| p.iter().map(|&x| (x / e).floor() as i64).collect::<Vec<_>>())
                .collect::<HashSet<_>>()
                .len()
        })
        .collect();
    let xs: Vec<f64> = eps.iter().map(|e| (1.0 / e).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&n| (n as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let icept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - icept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(BoxDimension {
        slope,
        residual,
        eps: eps.to_vec(),
        counts,
    })
}

/// `2^{-k}` for `k` in `lo..=hi`.
pub fn dyadic_schedule(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| f64::powi(2.0, -k)).collect()
}
