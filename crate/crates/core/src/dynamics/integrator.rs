use std::borrow::Cow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::randomness::{snap_to_grid, RandomEnvironment};
use crate::spatial::Grid;

use super::incidence::incidence_unchecked;
use super::params::ModelParams;
use super::solver::{SolverConfig, StepOps};
use super::state::StateField;

/// Scalars recorded along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub norm_s: f64,
    pub norm_i: f64,
    pub norm_r: f64,
    pub norm_n: f64,
    pub int_i: f64,
    pub w: f64,
    pub ratio_ir_over_n: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub rows: Vec<TrajectoryRow>,
    /// Noise tick of every row.
    pub ticks: Vec<i64>,
    pub snapshots: Vec<StateField>,
    pub final_state: StateField,
    /// `‖(S+I+R) − N_lin‖₂ / ‖N_lin‖₂` per row when the linear total is
    /// co-integrated, empty otherwise.
    pub sum_defect: Vec<f64>,
    /// Largest per-step ratio of clamped mass to the state norm.
    pub max_clamp_ratio: f64,
    pub steps: usize,
    pub solver_iterations: usize,
}

/// Run of the linear total-population equation.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRun {
    pub ticks: Vec<i64>,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub final_n: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimOptions {
    /// Record scalars every this many steps (and always at both ends).
    pub record_every: usize,
    pub snapshot_times: Vec<f64>,
    /// Co-integrate the linear `N` equation and record the sum defect.
    pub track_total: bool,
}

impl SimOptions {
    pub fn every(record_every: usize) -> Self {
        Self {
            record_every,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepStats {
    /// `‖negative part‖_X` removed by clamping.
    pub clamp_mass: f64,
    pub iterations: usize,
}

/// IMEX Euler integrator for one noise realization.
///
/// Per step from tick `k` to `k + stride`, with `A` frozen at the end tick and
/// `γ` at the start:
///
/// ```text
/// (1 + dt α) I' − dt A I' = I + dt γ f
/// (1 + dt d) R' − dt A R' = R + dt c I'
/// (1 + dt d) S' − dt A S' = S + dt (Λ + b I' − γ f)
/// ```
///
/// Summing the three rows gives `(1 + dt d) N' − dt A N' = N + dt Λ`, the
/// linear step, so the total population decouples exactly.
#[derive(Debug)]
pub struct Integrator<'a> {
    grid: &'a Grid,
    params: ModelParams,
    env: &'a RandomEnvironment,
    dt: f64,
    stride: i64,
    solver: SolverConfig,
    v1: Option<&'a [f64]>,
    lambda: Vec<f64>,
    frozen: Option<StepOps>,
}

impl<'a> Integrator<'a> {
    pub fn new(
        grid: &'a Grid,
        params: ModelParams,
        env: &'a RandomEnvironment,
        dt: f64,
        solver: SolverConfig,
    ) -> Result<Self> {
        params.validate()?;
        if !(dt > 0.0) {
            return Err(Error::param("dt", format!("must be positive, got {dt}")));
        }
        let stride = snap_to_grid(dt, env.dt()).map_err(|_| {
            Error::param("dt", format!("{dt} is not a multiple of the noise step {}", env.dt()))
        })?;
        if stride < 1 {
            return Err(Error::param("dt", format!("{dt} is below the noise step {}", env.dt())));
        }
        let frozen = if env.field.is_constant() {
            Some(StepOps::build(
                grid,
                &env.field,
                0,
                dt,
                (params.alpha(), params.d),
                true,
                &solver,
            )?)
        } else {
            None
        };
        Ok(Self {
            grid,
            params,
            env,
            dt,
            stride,
            solver,
            v1: None,
            lambda: params.lambda_field(grid),
            frozen,
        })
    }

    /// Eigenvector used for the `w` column; without it `w` is NaN.
    pub fn with_eigenvector(mut self, v1: &'a [f64]) -> Self {
        self.v1 = Some(v1);
        self
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn stride(&self) -> i64 {
        self.stride
    }

    pub fn grid(&self) -> &Grid {
        self.grid
    }

    pub fn env(&self) -> &RandomEnvironment {
        self.env
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    fn ops(&self, tick: i64, with_alpha: bool) -> Result<Cow<'_, StepOps>> {
        match &self.frozen {
            Some(ops) => Ok(Cow::Borrowed(ops)),
            None => Ok(Cow::Owned(StepOps::build(
                self.grid,
                &self.env.field,
                tick,
                self.dt,
                (self.params.alpha(), self.params.d),
                with_alpha,
                &self.solver,
            )?)),
        }
    }

    fn check_ticks(&self, k0: i64, k1: i64) -> Result<()> {
        let (lo, hi) = self.env.path.tick_range();
        let dt = self.env.dt();
        for k in [k0, k1] {
            if k < lo || k > hi {
                let (wlo, whi) = self.env.window();
                return Err(Error::OutsideWindow {
                    t: k as f64 * dt,
                    lo: wlo,
                    hi: whi,
                });
            }
        }
        if k1 < k0 {
            return Err(Error::param("t1", format!("end time {} precedes start {}", k1 as f64 * dt, k0 as f64 * dt)));
        }
        if (k1 - k0) % self.stride != 0 {
            return Err(Error::param(
                "t1",
                format!("run length {} is not a multiple of dt = {}", (k1 - k0) as f64 * dt, self.dt),
            ));
        }
        Ok(())
    }

    /// One IMEX step from `state.tick` to `state.tick + stride`.
    pub fn step_imex(&self, state: &StateField) -> Result<(StateField, StepStats)> {
        let k = state.tick;
        self.check_ticks(k, k + self.stride)?;
        self.step_unchecked(state)
    }

    fn step_unchecked(&self, state: &StateField) -> Result<(StateField, StepStats)> {
        let k = state.tick;
        let k1 = k + self.stride;
        let dt = self.dt;
        let p = &self.params;
        let gamma = self.env.gamma.at(k);
        let ops = self.ops(k1, true)?;
        let f = incidence_unchecked(&state.s, &state.i, &state.r);
        let mut stats = StepStats::default();
        let mut clamped_sq = 0.0;

        let rhs: Vec<f64> = state.i.iter().zip(&f).map(|(&i, &f)| i + dt * gamma * f).collect();
        let (mut i_new, it) = ops.solve_alpha(&rhs, &state.i, &self.solver)?;
        stats.iterations += it;
        clamped_sq += clamp(&mut i_new);

        let rhs: Vec<f64> = state.r.iter().zip(&i_new).map(|(&r, &i)| r + dt * p.c * i).collect();
        let (mut r_new, it) = ops.solve_decay(&rhs, &state.r, &self.solver)?;
        stats.iterations += it;
        clamped_sq += clamp(&mut r_new);

        let rhs: Vec<f64> = state
            .s
            .iter()
            .zip(&i_new)
            .zip(&f)
            .zip(&self.lambda)
            .map(|(((&s, &i), &f), &l)| s + dt * (l + p.b * i - gamma * f))
            .collect();
        let (mut s_new, it) = ops.solve_decay(&rhs, &state.s, &self.solver)?;
        stats.iterations += it;
        clamped_sq += clamp(&mut s_new);

        let next = StateField {
            s: s_new,
            i: i_new,
            r: r_new,
            tick: k1,
            t: k1 as f64 * self.env.dt(),
        };
        stats.clamp_mass = (self.grid.cell_volume() * clamped_sq).sqrt();
        let before = state.norm_x(self.grid);
        let after = next.norm_x(self.grid);
        let allowance = 10.0 * (before + dt * p.lambda_norm(self.grid));
        if !(after <= allowance) {
            return Err(Error::BlowUp {
                t: next.t,
                before,
                after,
            });
        }
        Ok((next, stats))
    }

    /// One step of the linear total-population equation.
    pub fn step_linear(&self, n: &[f64], tick: i64) -> Result<Vec<f64>> {
        self.check_ticks(tick, tick + self.stride)?;
        self.step_linear_unchecked(n, tick)
    }

    fn step_linear_unchecked(&self, n: &[f64], tick: i64) -> Result<Vec<f64>> {
        let ops = self.ops(tick + self.stride, false)?;
        let rhs: Vec<f64> = n.iter().zip(&self.lambda).map(|(&n, &l)| n + self.dt * l).collect();
        let (mut out, _) = ops.solve_decay(&rhs, n, &self.solver)?;
        clamp(&mut out);
        Ok(out)
    }

    fn row(&self, u: &StateField) -> TrajectoryRow {
        let g = self.grid;
        let n = u.total();
        TrajectoryRow {
            t: u.t,
            norm_s: g.norm(&u.s),
            norm_i: g.norm(&u.i),
            norm_r: g.norm(&u.r),
            norm_n: g.norm(&n),
            int_i: g.integral(&u.i),
            w: self.v1.map_or(f64::NAN, |v| g.dot(&u.i, v)),
            ratio_ir_over_n: u.max_infected_ratio(),
            gamma: self.env.gamma.at(u.tick),
        }
    }

    pub fn simulate(&self, u0: &StateField, t0: f64, t1: f64, opts: &SimOptions) -> Result<Trajectory> {
        let k0 = self.env.tick_of(t0)?;
        let k1 = self.env.tick_of(t1).map_err(|e| match e {
            Error::OutsideWindow { .. } | Error::OffGrid { .. } => Error::validation("run.t1", e.to_string()),
            other => other,
        })?;
        self.simulate_ticks(u0, k0, k1, opts)
    }

    /// Evolves `u0` from tick `k0` to `k1`; the time label of `u0` is ignored.
    pub fn simulate_ticks(&self, u0: &StateField, k0: i64, k1: i64, opts: &SimOptions) -> Result<Trajectory> {
        if u0.len() != self.grid.len() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.len(),
                got: u0.len(),
            });
        }
        u0.check_non_negative()?;
        self.check_ticks(k0, k1)?;
        let every = opts.record_every.max(1);
        let mut snapshot_ticks = Vec::with_capacity(opts.snapshot_times.len());
        for &t in &opts.snapshot_times {
            let k = self.env.tick_of(t)?;
            if k < k0 || k > k1 || (k - k0) % self.stride != 0 {
                return Err(Error::validation(
                    "run.snapshot_times",
                    format!("snapshot time {t} is not a step time of the run"),
                ));
            }
            snapshot_ticks.push(k);
        }

        let mut u = u0.clone().at_tick(k0, self.env.dt());
        let mut total = opts.track_total.then(|| u.total());
        let steps = ((k1 - k0) / self.stride) as usize;
        let mut traj = Trajectory {
            rows: Vec::new(),
            ticks: Vec::new(),
            snapshots: Vec::new(),
            final_state: u.clone(),
            sum_defect: Vec::new(),
            max_clamp_ratio: 0.0,
            steps,
            solver_iterations: 0,
        };
        let record = |traj: &mut Trajectory, u: &StateField, total: &Option<Vec<f64>>| {
            traj.rows.push(self.row(u));
            traj.ticks.push(u.tick);
            if let Some(n_lin) = total {
                let diff: Vec<f64> = u.total().iter().zip(n_lin).map(|(a, b)| a - b).collect();
                let denom = self.grid.norm(n_lin);
                let num = self.grid.norm(&diff);
                traj.sum_defect.push(if denom > 0.0 { num / denom } else { num });
            }
        };
        record(&mut traj, &u, &total);
        if snapshot_ticks.contains(&u.tick) {
            traj.snapshots.push(u.clone());
        }
        for step in 1..=steps {
            let (next, stats) = self.step_unchecked(&u)?;
            if let Some(n_lin) = &mut total {
                *n_lin = self.step_linear_unchecked(n_lin, u.tick)?;
            }
            let scale = next.norm_x(self.grid);
            if scale > 0.0 {
                traj.max_clamp_ratio = traj.max_clamp_ratio.max(stats.clamp_mass / scale);
            }
            traj.solver_iterations += stats.iterations;
            u = next;
            if step % every == 0 || step == steps {
                record(&mut traj, &u, &total);
            }
            if snapshot_ticks.contains(&u.tick) {
                traj.snapshots.push(u.clone());
            }
        }
        traj.final_state = u;
        Ok(traj)
    }

    /// Integrates `N' = Λ + A N − d N` from `n0` with the same operators as
    /// the full system.
    pub fn solve_linear_n(&self, n0: &[f64], t0: f64, t1: f64, record_every: usize) -> Result<LinearRun> {
        let k0 = self.env.tick_of(t0)?;
        let k1 = self.env.tick_of(t1)?;
        self.solve_linear_n_ticks(n0, k0, k1, record_every)
    }

    pub fn solve_linear_n_ticks(&self, n0: &[f64], k0: i64, k1: i64, record_every: usize) -> Result<LinearRun> {
        if n0.len() != self.grid.len() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.len(),
                got: n0.len(),
            });
        }
        if let Some((index, &value)) = n0.iter().enumerate().find(|(_, &v)| !(v >= 0.0)) {
            return Err(Error::NegativeInput { field: "N", index, value });
        }
        self.check_ticks(k0, k1)?;
        let every = record_every.max(1);
        let steps = ((k1 - k0) / self.stride) as usize;
        let dt_noise = self.env.dt();
        let mut n = n0.to_vec();
        let mut run = LinearRun {
            ticks: vec![k0],
            times: vec![k0 as f64 * dt_noise],
            norms: vec![self.grid.norm(&n)],
            final_n: Vec::new(),
        };
        let mut k = k0;
        for step in 1..=steps {
            n = self.step_linear_unchecked(&n, k)?;
            k += self.stride;
            if step % every == 0 || step == steps {
                run.ticks.push(k);
                run.times.push(k as f64 * dt_noise);
                run.norms.push(self.grid.norm(&n));
            }
        }
        run.final_n = n;
        Ok(run)
    }
}

/// Zeroes negative entries and returns the sum of their squares.
fn clamp(u: &mut [f64]) -> f64 {
    let mut sq = 0.0;
    for v in u.iter_mut() {
        if *v < 0.0 {
            sq += *v * *v;
            *v = 0.0;
        }
    }
    sq
}
