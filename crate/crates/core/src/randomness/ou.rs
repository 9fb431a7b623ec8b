use crate::error::{Error, Result};

use super::path::{GridSeries, NoisePath};

/// Ornstein-Uhlenbeck samples driven by the increments of a [`NoisePath`].
#[derive(Debug, Clone, PartialEq)]
pub struct OuTrace {
    pub kappa: f64,
    pub sigma: f64,
    pub phi0: f64,
    pub series: GridSeries,
}

/// Exact-discretization OU recursion over the whole sampled grid of `path`:
///
/// `Φ[j+1] = e^{−κ dt} Φ[j] + σ √((1 − e^{−2κ dt}) / (2κ)) ξ[j]`,
///
/// with `ξ[j] = (W[j+1] − W[j]) / √dt` and `Φ` equal to `phi0` at the first
/// sample of the window. The result inherits the path's shift, so
/// `Φ(θ_s ω)` at tick `k` is the absolute sample at `s + k·dt`.
pub fn ou_trace(path: &NoisePath, kappa: f64, sigma: f64, phi0: f64) -> Result<OuTrace> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::param("kappa", format!("must be positive, got {kappa}")));
    }
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::param("sigma", format!("must be non-negative, got {sigma}")));
    }
    let dt = path.dt();
    let w = path.base().raw();
    let decay = (-kappa * dt).exp();
    let spread = sigma * ((1.0 - (-2.0 * kappa * dt).exp()) / (2.0 * kappa)).sqrt();
    let inv_sqrt_dt = 1.0 / dt.sqrt();

    let mut phi = Vec::with_capacity(w.len());
    let mut current = phi0;
    phi.push(current);
    for pair in w.windows(2) {
        let xi = (pair[1] - pair[0]) * inv_sqrt_dt;
        current = decay * current + spread * xi;
        phi.push(current);
    }
    Ok(OuTrace {
        kappa,
        sigma,
        phi0,
        series: path.series_with(phi)?,
    })
}

impl OuTrace {
    pub fn shift_ticks(&self, ticks: i64) -> Result<Self> {
        Ok(Self {
            series: self.series.shift_ticks(ticks)?,
            ..self.clone()
        })
    }

    /// Stationary variance `σ² / (2κ)`.
    pub fn stationary_variance(&self) -> f64 {
        self.sigma * self.sigma / (2.0 * self.kappa)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randomness::path::sample_wiener_path;

    #[test]
    fn noiseless_relaxation_is_exponential() {
        let path = sample_wiener_path(1, -1.0, 5.0, 0.01).unwrap();
        let ou = ou_trace(&path, 1.0, 0.0, 1.0).unwrap();
        for (j, &phi) in ou.series.raw().iter().enumerate() {
            let t = j as f64 * 0.01;
            assert!((phi - (-t).exp()).abs() < 1e-12, "j={j}");
        }
    }

    #[test]
    fn rejects_non_positive_kappa() {
        let path = sample_wiener_path(1, -1.0, 1.0, 0.1).unwrap();
        assert!(matches!(
            ou_trace(&path, 0.0, 1.0, 0.0),
            Err(Error::InvalidParameter { name: "kappa", .. })
        ));
        assert!(ou_trace(&path, -1.0, 1.0, 0.0).is_err());
        assert!(ou_trace(&path, 1.0, -0.1, 0.0).is_err());
    }

    #[test]
    fn deterministic_given_path() {
        let path = sample_wiener_path(5, -3.0, 3.0, 0.01).unwrap();
        let a = ou_trace(&path, 2.0, 0.3, 0.0).unwrap();
        let b = ou_trace(&path, 2.0, 0.3, 0.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn shares_the_path_shift() {
        let path = sample_wiener_path(5, -3.0, 3.0, 0.01).unwrap();
        let shifted = path.shift(1.0).unwrap();
        let a = ou_trace(&path, 2.0, 0.3, 0.0).unwrap();
        let b = ou_trace(&shifted, 2.0, 0.3, 0.0).unwrap();
        for k in -50..50 {
            assert_eq!(b.series.at(k), a.series.at(k + 100));
        }
    }
}
