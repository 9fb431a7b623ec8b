use rayon::prelude::*;

use crate::dynamics::{Integrator, SimOptions, StateField};
use crate::error::{Error, Result};
use crate::spatial::Grid;

/// Point clouds `φ(T, θ_{−T} ω) D` observed at time 0 for a list of
/// pullback times.
#[derive(Debug, Clone, PartialEq)]
pub struct AttractorSample {
    pub noise_seed: u64,
    pub t_list: Vec<f64>,
    pub clouds: Vec<Vec<StateField>>,
    pub diameters: Vec<f64>,
    /// `dist(cloud_{k+1}, cloud_k)`, one entry per consecutive pair.
    pub semi_distances: Vec<f64>,
    /// Largest `‖S + I + R‖₂` per cloud.
    pub max_total_norm: Vec<f64>,
    /// Largest `‖(S + I + R) − N*(0, ω)‖₂` per cloud, when `N*` is given.
    pub slab_residuals: Vec<f64>,
}

/// Hausdorff semi-distance `max_{a ∈ A} min_{b ∈ B} ‖a − b‖_X`.
pub fn semi_distance(a: &[StateField], b: &[StateField], grid: &Grid) -> f64 {
    a.iter()
        .map(|p| b.iter().map(|q| p.distance(q, grid)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

pub fn diameter(cloud: &[StateField], grid: &Grid) -> f64 {
    let mut d: f64 = 0.0;
    for (k, p) in cloud.iter().enumerate() {
        for q in &cloud[k + 1..] {
            d = d.max(p.distance(q, grid));
        }
    }
    d
}

/// Projection onto `(‖S‖₂, ‖I‖₂, ‖R‖₂, w, (S, v₁))`.
pub fn project_state(grid: &Grid, u: &StateField, v1: &[f64]) -> Vec<f64> {
    vec![
        grid.norm(&u.s),
        grid.norm(&u.i),
        grid.norm(&u.r),
        grid.dot(&u.i, v1),
        grid.dot(&u.s, v1),
    ]
}

/// Spatially uniform seeds with `‖S + I + R‖₂ ≤ radius`: the three pure
/// corners plus a Latin-hypercube spread of `extra` mixed compositions.
pub fn attractor_seeds(grid: &Grid, radius: f64, extra: usize) -> Vec<StateField> {
    let unit = 1.0 / (grid.cell_volume() * grid.len() as f64).sqrt();
    let mut fractions = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let m = extra.max(1);
    for j in 0..extra {
        let level = |perm: usize| ((perm % m) as f64 + 0.5) / m as f64;
        let mut f = [level(j), level(3 * j + 1), level(5 * j + 2)];
        let sum: f64 = f.iter().sum();
        if sum > 1.0 {
            f.iter_mut().for_each(|x| *x /= sum);
        }
        fractions.push(f);
    }
    let len = grid.len();
    fractions
        .into_iter()
        .map(|[s, i, r]| StateField {
            s: vec![radius * unit * s; len],
            i: vec![radius * unit * i; len],
            r: vec![radius * unit * r; len],
            tick: 0,
            t: 0.0,
        })
        .collect()
}

/// Evolves every seed from `−T` to `0` for each `T` in `t_list`; runs are
/// independent and distributed over the rayon pool.
pub fn pullback_attractor_sample(
    integ: &Integrator<'_>,
    seeds: &[StateField],
    t_list: &[f64],
    nstar0: Option<&[f64]>,
) -> Result<AttractorSample> {
    if seeds.is_empty() {
        return Err(Error::param("seeds", "at least one seed is required"));
    }
    if t_list.is_empty() || t_list[0] < 0.0 || t_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("t_list", "must be non-negative and strictly increasing"));
    }
    let env = integ.env();
    let mut starts = Vec::with_capacity(t_list.len());
    for &t in t_list {
        starts.push(env.tick_of(-t)?);
    }
    let jobs: Vec<(usize, usize)> = (0..t_list.len())
        .flat_map(|a| (0..seeds.len()).map(move |b| (a, b)))
        .collect();
    let opts = SimOptions::every(usize::MAX);
    let finals: Vec<StateField> = jobs
        .par_iter()
        .map(|&(a, b)| {
            integ
                .simulate_ticks(&seeds[b], starts[a], 0, &opts)
                .map(|traj| traj.final_state)
        })
        .collect::<Result<_>>()?;
    let grid = integ.grid();
    let clouds: Vec<Vec<StateField>> = finals.chunks(seeds.len()).map(|c| c.to_vec()).collect();
    let diameters = clouds.iter().map(|c| diameter(c, grid)).collect();
    let semi_distances = clouds
        .windows(2)
        .map(|w| semi_distance(&w[1], &w[0], grid))
        .collect();
    let max_total_norm = clouds
        .iter()
        .map(|c| c.iter().map(|u| grid.norm(&u.total())).fold(0.0, f64::max))
        .collect();
    let slab_residuals = match nstar0 {
        Some(n) => clouds
            .iter()
            .map(|c| {
                c.iter()
                    .map(|u| {
                        let d: Vec<f64> = u.total().iter().zip(n).map(|(a, b)| a - b).collect();
                        grid.norm(&d)
                    })
                    .fold(0.0, f64::max)
            })
            .collect(),
        None => Vec::new(),
    };
    Ok(AttractorSample {
        noise_seed: env.path.seed(),
        t_list: t_list.to_vec(),
        clouds,
        diameters,
        semi_distances,
        max_total_norm,
        slab_residuals,
    })
}
