use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::path::{snap_to_grid, GridSeries};

/// Transmission rate `γ(θ_t ω) = clamp(γ₀ + Φ(θ_t ω), 0, γ_max)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionProcess {
    pub gamma0: f64,
    pub gamma_max: f64,
    pub trace: GridSeries,
    /// Fraction of samples where either clamp was active.
    pub clamp_fraction: f64,
}

pub fn transmission_trace(phi: &GridSeries, gamma0: f64, gamma_max: f64) -> Result<TransmissionProcess> {
    if !(gamma0 >= 0.0) || !gamma0.is_finite() {
        return Err(Error::param("gamma0", format!("must be non-negative, got {gamma0}")));
    }
    if !(gamma_max >= gamma0) || !gamma_max.is_finite() {
        return Err(Error::param(
            "gamma_max",
            format!("must be at least gamma0 = {gamma0}, got {gamma_max}"),
        ));
    }
    let mut clamped = 0usize;
    let values: Vec<f64> = phi
        .raw()
        .iter()
        .map(|&p| {
            let g = gamma0 + p;
            if g < 0.0 || g > gamma_max {
                clamped += 1;
            }
            g.clamp(0.0, gamma_max)
        })
        .collect();
    let n = values.len().max(1);
    Ok(TransmissionProcess {
        gamma0,
        gamma_max,
        trace: phi.with_values(values)?,
        clamp_fraction: clamped as f64 / n as f64,
    })
}

impl TransmissionProcess {
    pub fn at(&self, tick: i64) -> f64 {
        self.trace.at(tick)
    }

    pub fn shift_ticks(&self, ticks: i64) -> Result<Self> {
        Ok(Self {
            trace: self.trace.shift_ticks(ticks)?,
            ..self.clone()
        })
    }

    /// `∫ γ(θ_r ω) dr` between two ticks by the trapezoid rule.
    pub fn integral(&self, lo: i64, hi: i64) -> Result<f64> {
        self.trace.integrate(lo, hi).ok_or_else(|| {
            let (wlo, whi) = self.trace.window();
            Error::OutsideWindow {
                t: hi as f64 * self.trace.dt(),
                lo: wlo,
                hi: whi,
            }
        })
    }
}

/// Finite-horizon estimate of the time-mean value of a transmission trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanValueEstimate {
    /// Sup of running averages over windows longer than the last horizon.
    pub value: f64,
    pub horizons: Vec<f64>,
    /// One sup per horizon, so stagnation or drift is visible.
    pub sups: Vec<f64>,
}

/// `n₀·2^k` for `k = 0..count`.
pub fn geometric_horizons(n0: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| n0 * f64::powi(2.0, k as i32)).collect()
}

/// Running averages `(1/T) ∫_{t0}^{t0+T} γ` for every grid `T > 0` up to the
/// end of the trace, then for each horizon `n` the sup over `T > n`.
pub fn mean_value_m(gamma: &TransmissionProcess, t0: f64, horizons: &[f64]) -> Result<MeanValueEstimate> {
    if horizons.is_empty() {
        return Err(Error::param("horizons", "at least one horizon is required"));
    }
    if horizons[0] <= 0.0 || horizons.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("horizons", "must be positive and strictly increasing"));
    }
    let trace = &gamma.trace;
    let dt = trace.dt();
    let start = trace.tick_of(t0)?;
    let (_, end) = trace.tick_range();
    let span = (end - start) as f64 * dt;
    let last = *horizons.last().unwrap();
    if last >= span {
        return Err(Error::param(
            "horizons",
            format!("horizon {last} exceeds the available trace length {span}"),
        ));
    }

    let samples = trace.slice(start, end).expect("range checked above");
    let mut averages = Vec::with_capacity(samples.len() - 1);
    let mut integral = 0.0;
    for (k, pair) in samples.windows(2).enumerate() {
        integral += 0.5 * dt * (pair[0] + pair[1]);
        averages.push(integral / ((k + 1) as f64 * dt));
    }

    let mut sups = Vec::with_capacity(horizons.len());
    for &n in horizons {
        // first index with T = (k+1)·dt strictly beyond n
        let k_n = snap_to_grid(n, dt).map(|k| k as usize).unwrap_or_else(|_| (n / dt).floor() as usize);
        let sup = averages[k_n..]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        sups.push(sup);
    }
    Ok(MeanValueEstimate {
        value: *sups.last().unwrap(),
        horizons: horizons.to_vec(),
        sups,
    })
}
