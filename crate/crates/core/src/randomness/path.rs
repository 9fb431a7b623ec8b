use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Largest number of samples a single path may hold unless a caller asks
/// for a different cap.
pub const DEFAULT_MAX_SAMPLES: usize = 50_000_000;

/// Relative slack used when snapping a time onto the sampling grid.
const GRID_SNAP: f64 = 1e-9;

/// Values sampled on a uniform time grid that is shared with a [`NoisePath`].
///
/// Samples live on an absolute index range; `origin` is the index of the
/// unshifted time zero and `anchor` the current shift in grid steps. A shift
/// only moves the anchor, so every series derived from the same path shifts
/// with it by pure integer arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSeries {
    dt: f64,
    origin: usize,
    anchor: i64,
    values: Arc<[f64]>,
}

impl GridSeries {
    pub(crate) fn new(dt: f64, origin: usize, anchor: i64, values: Arc<[f64]>) -> Self {
        Self {
            dt,
            origin,
            anchor,
            values,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of stored samples.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Raw samples on the absolute grid, first entry at the window start.
    pub fn raw(&self) -> &[f64] {
        &self.values
    }

    pub fn anchor(&self) -> i64 {
        self.anchor
    }

    /// Lowest and highest tick reachable from the current anchor.
    pub fn tick_range(&self) -> (i64, i64) {
        let lo = -(self.origin as i64) - self.anchor;
        let hi = self.values.len() as i64 - 1 - self.origin as i64 - self.anchor;
        (lo, hi)
    }

    pub fn window(&self) -> (f64, f64) {
        let (lo, hi) = self.tick_range();
        (lo as f64 * self.dt, hi as f64 * self.dt)
    }

    fn absolute(&self, tick: i64) -> Option<usize> {
        let idx = self.origin as i64 + self.anchor + tick;
        if idx < 0 || idx >= self.values.len() as i64 {
            None
        } else {
            Some(idx as usize)
        }
    }

    /// Value at `tick` grid steps from the (shifted) origin.
    ///
    /// Panics when the tick lies outside the sampled window; use
    /// [`GridSeries::get`] for a checked lookup.
    pub fn at(&self, tick: i64) -> f64 {
        match self.absolute(tick) {
            Some(i) => self.values[i],
            None => panic!("tick {tick} outside series window {:?}", self.tick_range()),
        }
    }

    pub fn get(&self, tick: i64) -> Option<f64> {
        self.absolute(tick).map(|i| self.values[i])
    }

    /// Converts a time to a grid tick, rejecting off-grid or out-of-window times.
    pub fn tick_of(&self, t: f64) -> Result<i64> {
        let tick = snap_to_grid(t, self.dt)?;
        let (lo, hi) = self.tick_range();
        if tick < lo || tick > hi {
            let (wlo, whi) = self.window();
            return Err(Error::OutsideWindow { t, lo: wlo, hi: whi });
        }
        Ok(tick)
    }

    pub fn shift_ticks(&self, ticks: i64) -> Result<Self> {
        let (lo, hi) = self.tick_range();
        if ticks < lo || ticks > hi {
            let (wlo, whi) = self.window();
            return Err(Error::OutsideWindow {
                t: ticks as f64 * self.dt,
                lo: wlo,
                hi: whi,
            });
        }
        Ok(Self {
            anchor: self.anchor + ticks,
            ..self.clone()
        })
    }

    /// A new series on the same grid and anchor with different values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                got: values.len(),
            });
        }
        Ok(Self {
            values: values.into(),
            ..self.clone()
        })
    }

    /// Samples over `[lo, hi]` ticks, inclusive.
    pub fn slice(&self, lo: i64, hi: i64) -> Option<&[f64]> {
        let a = self.absolute(lo)?;
        let b = self.absolute(hi)?;
        (a <= b).then(|| &self.values[a..=b])
    }

    /// Trapezoidal integral of the series between two ticks (`lo <= hi`).
    pub fn integrate(&self, lo: i64, hi: i64) -> Option<f64> {
        let s = self.slice(lo, hi)?;
        Some(trapezoid(s, self.dt))
    }
}

pub(crate) fn trapezoid(samples: &[f64], dt: f64) -> f64 {
    if samples.len() < 2 {
        return 0.0;
    }
    let inner: f64 = samples[1..samples.len() - 1].iter().sum();
    dt * (0.5 * (samples[0] + samples[samples.len() - 1]) + inner)
}

pub(crate) fn snap_to_grid(t: f64, dt: f64) -> Result<i64> {
    let k = (t / dt).round();
    if (k * dt - t).abs() > GRID_SNAP * t.abs().max(dt) {
        return Err(Error::OffGrid { t, dt });
    }
    Ok(k as i64)
}

/// A sampled two-sided Wiener trajectory together with its current shift.
///
/// Evaluating the shifted path at tick `k` gives `ω(s + k·dt) − ω(s)`, where
/// `s` is the accumulated shift, so the value at tick zero is always exactly
/// zero.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    seed: u64,
    series: GridSeries,
}

/// Samples a Wiener path on `[t_lo, t_hi]` with step `dt`, anchored at
/// `ω(0) = 0`.
///
/// Forward and backward halves come from two independent ChaCha streams of
/// the same seed, so enlarging the window never changes samples already
/// drawn.
pub fn sample_wiener_path(seed: u64, t_lo: f64, t_hi: f64, dt: f64) -> Result<NoisePath> {
    sample_wiener_path_capped(seed, t_lo, t_hi, dt, DEFAULT_MAX_SAMPLES)
}

pub fn sample_wiener_path_capped(
    seed: u64,
    t_lo: f64,
    t_hi: f64,
    dt: f64,
    max_samples: usize,
) -> Result<NoisePath> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::param("dt", format!("must be positive, got {dt}")));
    }
    if !(t_lo < 0.0 && t_hi > 0.0) {
        return Err(Error::param(
            "window",
            format!("need t_lo < 0 < t_hi, got [{t_lo}, {t_hi}]"),
        ));
    }
    let n_neg = steps_covering(-t_lo, dt);
    let n_pos = steps_covering(t_hi, dt);
    let total = n_neg.saturating_add(n_pos).saturating_add(1);
    if total > max_samples {
        return Err(Error::MemoryCap {
            requested: total,
            cap: max_samples,
        });
    }

    let scale = dt.sqrt();
    let mut values = vec![0.0; total];

    let mut forward = ChaCha8Rng::seed_from_u64(seed);
    forward.set_stream(0);
    for k in 1..=n_pos {
        let xi: f64 = StandardNormal.sample(&mut forward);
        values[n_neg + k] = values[n_neg + k - 1] + scale * xi;
    }

    let mut backward = ChaCha8Rng::seed_from_u64(seed);
    backward.set_stream(1);
    for k in 1..=n_neg {
        let xi: f64 = StandardNormal.sample(&mut backward);
        values[n_neg - k] = values[n_neg - k + 1] + scale * xi;
    }

    Ok(NoisePath {
        seed,
        series: GridSeries::new(dt, n_neg, 0, values.into()),
    })
}

fn steps_covering(span: f64, dt: f64) -> usize {
    let raw = span / dt;
    let k = raw.round();
    if (raw - k).abs() <= GRID_SNAP * raw.max(1.0) {
        k as usize
    } else {
        raw.ceil() as usize
    }
}

impl NoisePath {
    /// Builds a path from explicit samples, e.g. a synthetic test trajectory.
    /// `origin` is the index of time zero, where the sample must be zero.
    pub fn from_samples(dt: f64, origin: usize, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::param("dt", format!("must be positive, got {dt}")));
        }
        match values.get(origin) {
            Some(0.0) => {}
            Some(&v) => {
                return Err(Error::param(
                    "values",
                    format!("sample at t = 0 must be 0, got {v}"),
                ))
            }
            None => {
                return Err(Error::param(
                    "origin",
                    format!("index {origin} beyond {} samples", values.len()),
                ))
            }
        }
        Ok(Self {
            seed: 0,
            series: GridSeries::new(dt, origin, 0, values.into()),
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dt(&self) -> f64 {
        self.series.dt
    }

    /// Accumulated shift in grid steps.
    pub fn anchor(&self) -> i64 {
        self.series.anchor
    }

    pub fn window(&self) -> (f64, f64) {
        self.series.window()
    }

    pub fn tick_range(&self) -> (i64, i64) {
        self.series.tick_range()
    }

    pub fn tick_of(&self, t: f64) -> Result<i64> {
        self.series.tick_of(t)
    }

    /// `(θ_s ω)(k·dt) = ω(s + k·dt) − ω(s)`.
    pub fn value(&self, tick: i64) -> f64 {
        self.series.at(tick) - self.series.at(0)
    }

    pub fn value_at(&self, t: f64) -> Result<f64> {
        Ok(self.value(self.tick_of(t)?))
    }

    /// Underlying absolute samples (unshifted, `ω(0) = 0` at the origin).
    pub fn base(&self) -> &GridSeries {
        &self.series
    }

    /// Wiener shift by `s`, which must be a grid multiple inside the window.
    pub fn shift(&self, s: f64) -> Result<Self> {
        let ticks = self.tick_of(s)?;
        self.shift_ticks(ticks)
    }

    pub fn shift_ticks(&self, ticks: i64) -> Result<Self> {
        Ok(Self {
            seed: self.seed,
            series: self.series.shift_ticks(ticks)?,
        })
    }

    /// Shifted path values on every reachable tick, lowest first.
    pub fn trace(&self) -> Vec<f64> {
        let (lo, hi) = self.tick_range();
        (lo..=hi).map(|k| self.value(k)).collect()
    }

    /// Attaches new values to this path's grid and anchor.
    pub fn series_with(&self, values: Vec<f64>) -> Result<GridSeries> {
        self.series.with_values(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchored_at_zero() {
        let p = sample_wiener_path(1, -10.0, 10.0, 0.01).unwrap();
        assert_eq!(p.value_at(0.0).unwrap(), 0.0);
        assert_eq!(p.window(), (-10.0, 10.0));
        assert_eq!(p.base().len(), 2001);
    }

    #[test]
    fn shift_evaluates_to_zero_at_origin() {
        let p = sample_wiener_path(1, -10.0, 10.0, 0.01).unwrap();
        let q = p.shift(2.0).unwrap();
        assert_eq!(q.value(0), 0.0);
        assert_eq!(q.window(), (-12.0, 8.0));
        assert_eq!(q.value(5), p.value(205) - p.value(200));
    }

    #[test]
    fn zero_shift_is_identity() {
        let p = sample_wiener_path(3, -1.0, 1.0, 0.01).unwrap();
        assert_eq!(p.shift(0.0).unwrap(), p);
    }

    #[test]
    fn shift_composition_is_exact() {
        let p = sample_wiener_path(4, -5.0, 5.0, 0.01).unwrap();
        let twice = p.shift(1.0).unwrap().shift(1.0).unwrap();
        let once = p.shift(2.0).unwrap();
        assert_eq!(twice.trace(), once.trace());
        assert_eq!(twice, once);
    }

    #[test]
    fn linear_path_is_shift_invariant() {
        let dt = 0.5;
        let values: Vec<f64> = (-10..=10).map(|k| k as f64 * dt).collect();
        let p = NoisePath::from_samples(dt, 10, values).unwrap();
        let q = p.shift(3.0).unwrap();
        for k in -16..=4 {
            assert_eq!(q.value(k), k as f64 * dt);
        }
    }

    #[test]
    fn deterministic_and_prefix_consistent() {
        let a = sample_wiener_path(9, -2.0, 2.0, 0.01).unwrap();
        let b = sample_wiener_path(9, -2.0, 2.0, 0.01).unwrap();
        assert_eq!(a.trace(), b.trace());
        let wide = sample_wiener_path(9, -4.0, 4.0, 0.01).unwrap();
        for k in -200..=200 {
            assert_eq!(a.value(k), wide.value(k));
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            sample_wiener_path(1, -1.0, 1.0, 0.0),
            Err(Error::InvalidParameter { name: "dt", .. })
        ));
        assert!(matches!(
            sample_wiener_path(1, -1.0, 1.0, -0.1),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(matches!(
            sample_wiener_path(1, 0.5, 1.0, 0.1),
            Err(Error::InvalidParameter { name: "window", .. })
        ));
        assert!(matches!(
            sample_wiener_path_capped(1, -100.0, 100.0, 0.01, 1000),
            Err(Error::MemoryCap { .. })
        ));
    }

    #[test]
    fn shift_outside_window_fails() {
        let p = sample_wiener_path(1, -1.0, 1.0, 0.1).unwrap();
        assert!(matches!(p.shift(1.5), Err(Error::OutsideWindow { .. })));
        assert!(matches!(p.shift(0.05), Err(Error::OffGrid { .. })));
    }

    #[test]
    fn trapezoid_of_linear_is_exact() {
        let s: Vec<f64> = (0..=10).map(|k| k as f64 * 0.1).collect();
        assert!((trapezoid(&s, 0.1) - 0.5).abs() < 1e-15);
    }
}
