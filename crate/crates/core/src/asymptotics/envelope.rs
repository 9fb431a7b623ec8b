use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::randomness::TransmissionProcess;

/// Cumulative `∫_{t_0}^{t_k} γ` at every recorded tick.
fn cumulative_gamma(ticks: &[i64], gamma: &TransmissionProcess) -> Result<Vec<f64>> {
    let mut acc = Vec::with_capacity(ticks.len());
    let mut total = 0.0;
    acc.push(0.0);
    for w in ticks.windows(2) {
        total += gamma
            .integral(w[0], w[1])
            .map_err(|_| Error::MissingData(format!("γ samples between ticks {} and {}", w[0], w[1])))?;
        acc.push(total);
    }
    if let Some(&k) = ticks.first() {
        if gamma.trace.get(k).is_none() {
            return Err(Error::MissingData(format!("γ sample at tick {k}")));
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    /// `min_t [envelope(t) − ‖I(t)‖₂]`; non-negative means the bound holds.
    pub min_margin: f64,
    /// The same margin divided by `‖I₀‖₂` (zero when `I₀ = 0`).
    pub min_margin_relative: f64,
    pub worst_t: f64,
    pub norm_i0: f64,
}

/// Checks `‖I(t)‖₂ ≤ exp(−(λ₀ + α)(t − t₀) + ∫ γ) ‖I(t₀)‖₂` at every
/// recorded time.
pub fn gronwall_envelope_check(
    traj: &Trajectory,
    gamma: &TransmissionProcess,
    lambda0: f64,
    alpha: f64,
) -> Result<EnvelopeReport> {
    let rows = &traj.rows;
    let first = rows.first().ok_or_else(|| Error::MissingData("empty trajectory".into()))?;
    let int_gamma = cumulative_gamma(&traj.ticks, gamma)?;
    let i0 = first.norm_i;
    let mut min_margin = f64::INFINITY;
    let mut worst_t = first.t;
    for (row, ig) in rows.iter().zip(&int_gamma) {
        let env = (-(lambda0 + alpha) * (row.t - first.t) + ig).exp() * i0;
        let margin = env - row.norm_i;
        if margin < min_margin {
            min_margin = margin;
            worst_t = row.t;
        }
    }
    Ok(EnvelopeReport {
        min_margin,
        min_margin_relative: if i0 > 0.0 { min_margin / i0 } else { 0.0 },
        worst_t,
        norm_i0: i0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceReport {
    pub t: Vec<f64>,
    pub w: Vec<f64>,
    /// `min ∫ I dx` over the second half of the run.
    pub tail_min_int_i: f64,
    pub delta: f64,
    pub persistent: bool,
}

/// The series `w(t) = (I(t), v₁)` and the tail statistic of `∫ I dx`.
pub fn persistence_functional(traj: &Trajectory, delta: f64) -> Result<PersistenceReport> {
    let rows = &traj.rows;
    let (first, last) = match (rows.first(), rows.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::MissingData("empty trajectory".into())),
    };
    if rows.iter().any(|r| r.w.is_nan()) {
        return Err(Error::MissingData("trajectory was recorded without the eigenvector".into()));
    }
    let half = first.t + 0.5 * (last.t - first.t);
    let tail_min_int_i = rows
        .iter()
        .filter(|r| r.t >= half)
        .map(|r| r.int_i)
        .fold(f64::INFINITY, f64::min);
    Ok(PersistenceReport {
        t: rows.iter().map(|r| r.t).collect(),
        w: rows.iter().map(|r| r.w).collect(),
        tail_min_int_i,
        delta,
        persistent: tail_min_int_i > delta,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub eps: f64,
    /// Maximal recorded stretches `[τ, t]` on which `max (I+R)/N ≤ ε`.
    pub intervals: Vec<(f64, f64)>,
    /// Start of the final stretch if it reaches the end of the run.
    pub tau0: Option<f64>,
    /// Smallest `w(t) / bound(t)` over all checked points.
    pub min_ratio: f64,
    pub checked: usize,
    pub holds: bool,
}

/// `ε = ½ (m − λ₁a₁ − α) / m`.
pub fn growth_epsilon(m: f64, lambda1: f64, a1: f64, alpha: f64) -> f64 {
    0.5 * (m - lambda1 * a1 - alpha) / m
}

/// On every stretch where the infected-plus-recovered fraction stays below
/// `eps`, checks `w(t) ≥ exp(−(α + λ₁a₁)(t − τ) + (1 − ε) ∫_τ^t γ) w(τ)` up to
/// relative `slack`.
pub fn w_growth_check(
    traj: &Trajectory,
    gamma: &TransmissionProcess,
    lambda1: f64,
    a1: f64,
    alpha: f64,
    eps: f64,
    slack: f64,
) -> Result<GrowthReport> {
    let rows = &traj.rows;
    if rows.iter().any(|r| r.w.is_nan()) {
        return Err(Error::MissingData("trajectory was recorded without the eigenvector".into()));
    }
    let int_gamma = cumulative_gamma(&traj.ticks, gamma)?;
    let mut intervals = Vec::new();
    let mut min_ratio = f64::INFINITY;
    let mut checked = 0;
    let mut k = 0;
    while k < rows.len() {
        if rows[k].ratio_ir_over_n > eps || !(rows[k].w > 0.0) {
            k += 1;
            continue;
        }
        let start = k;
        while k + 1 < rows.len() && rows[k + 1].ratio_ir_over_n <= eps {
            k += 1;
            let dt = rows[k].t - rows[start].t;
            let growth = -(alpha + lambda1 * a1) * dt + (1.0 - eps) * (int_gamma[k] - int_gamma[start]);
            let bound = growth.exp() * rows[start].w;
            min_ratio = min_ratio.min(rows[k].w / bound);
            checked += 1;
        }
        intervals.push((rows[start].t, rows[k].t));
        k += 1;
    }
    let tau0 = intervals
        .last()
        .filter(|(_, end)| Some(*end) == rows.last().map(|r| r.t))
        .map(|(start, _)| *start);
    Ok(GrowthReport {
        eps,
        intervals,
        tau0,
        min_ratio,
        checked,
        holds: checked == 0 || min_ratio >= 1.0 - slack,
    })
}
