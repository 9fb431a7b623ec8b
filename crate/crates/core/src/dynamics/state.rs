use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spatial::Grid;

/// Threshold below which the total population counts as empty.
pub const EMPTY_POPULATION: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateField {
    pub s: Vec<f64>,
    pub i: Vec<f64>,
    pub r: Vec<f64>,
    /// Position on the noise grid.
    pub tick: i64,
    pub t: f64,
}

impl StateField {
    pub fn new(s: Vec<f64>, i: Vec<f64>, r: Vec<f64>) -> Result<Self> {
        if i.len() != s.len() || r.len() != s.len() {
            return Err(Error::DimensionMismatch {
                expected: s.len(),
                got: if i.len() != s.len() { i.len() } else { r.len() },
            });
        }
        let state = Self {
            s,
            i,
            r,
            tick: 0,
            t: 0.0,
        };
        state.check_non_negative()?;
        Ok(state)
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            s: vec![0.0; len],
            i: vec![0.0; len],
            r: vec![0.0; len],
            tick: 0,
            t: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn check_non_negative(&self) -> Result<()> {
        for (field, u) in [("S", &self.s), ("I", &self.i), ("R", &self.r)] {
            if let Some((index, &value)) = u.iter().enumerate().find(|(_, &v)| !(v >= 0.0)) {
                return Err(Error::NegativeInput { field, index, value });
            }
        }
        Ok(())
    }

    /// `N = S + I + R`.
    pub fn total(&self) -> Vec<f64> {
        self.s
            .iter()
            .zip(&self.i)
            .zip(&self.r)
            .map(|((s, i), r)| s + i + r)
            .collect()
    }

    /// Norm in `X = (L²)³`.
    pub fn norm_x(&self, grid: &Grid) -> f64 {
        (grid.dot(&self.s, &self.s) + grid.dot(&self.i, &self.i) + grid.dot(&self.r, &self.r)).sqrt()
    }

    /// `‖self − other‖_X`.
    pub fn distance(&self, other: &Self, grid: &Grid) -> f64 {
        let sq = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
        (grid.cell_volume() * (sq(&self.s, &other.s) + sq(&self.i, &other.i) + sq(&self.r, &other.r))).sqrt()
    }

    /// `max_x (I + R) / N` over points with a non-empty population.
    pub fn max_infected_ratio(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for ((s, i), r) in self.s.iter().zip(&self.i).zip(&self.r) {
            let n = s + i + r;
            if n >= EMPTY_POPULATION {
                worst = worst.max((i + r) / n);
            }
        }
        worst
    }

    /// Same fields with a different time label.
    pub fn at_tick(mut self, tick: i64, dt: f64) -> Self {
        self.tick = tick;
        self.t = tick as f64 * dt;
        self
    }
}
