use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::randomness::DiffusionField;
use crate::spatial::{
    assemble_diffusion, conjugate_gradient, BandCholesky, CgConfig, DiffusionOperator, Grid, ImplicitSystem,
};

/// How the implicit systems `(1 + dt·k) u − dt·A u = rhs` are solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    /// Banded Cholesky factorization, exact up to rounding.
    #[default]
    Direct,
    /// Jacobi-preconditioned conjugate gradients, warm-started from the
    /// previous state.
    Cg,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub kind: SolverKind,
    pub cg_tol: f64,
    pub cg_max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let cg = CgConfig::default();
        Self {
            kind: SolverKind::Direct,
            cg_tol: cg.tol,
            cg_max_iter: cg.max_iter,
        }
    }
}

impl SolverConfig {
    fn cg(&self) -> CgConfig {
        CgConfig {
            tol: self.cg_tol,
            max_iter: self.cg_max_iter,
        }
    }
}

#[derive(Debug, Clone)]
enum Implicit {
    Direct(BandCholesky),
    Cg { shift: f64 },
}

/// Operators of one step: `A` frozen at the step's end tick and the implicit
/// matrices for the `I` equation (rate `α`) and the `S`, `R`, `N` equations
/// (rate `d`).
#[derive(Debug, Clone)]
pub(crate) struct StepOps {
    op: DiffusionOperator,
    dt: f64,
    alpha: Option<Implicit>,
    decay: Implicit,
}

impl StepOps {
    pub fn build(
        grid: &Grid,
        field: &DiffusionField,
        tick: i64,
        dt: f64,
        rates: (f64, f64),
        with_alpha: bool,
        cfg: &SolverConfig,
    ) -> Result<Self> {
        let op = assemble_diffusion(grid, field, tick);
        let (alpha, d) = rates;
        let make = |rate: f64| -> Result<Implicit> {
            let shift = 1.0 + dt * rate;
            Ok(match cfg.kind {
                SolverKind::Direct => Implicit::Direct(BandCholesky::factor(grid.len(), op.bandwidth(), |i, j| {
                    let e = -dt * op.entry(i, j);
                    if i == j { shift + e } else { e }
                })?),
                SolverKind::Cg => Implicit::Cg { shift },
            })
        };
        let alpha = if with_alpha { Some(make(alpha)?) } else { None };
        let decay = make(d)?;
        Ok(Self { op, dt, alpha, decay })
    }

    fn solve(&self, which: &Implicit, rhs: &[f64], guess: &[f64], cfg: &SolverConfig) -> Result<(Vec<f64>, usize)> {
        match which {
            Implicit::Direct(f) => Ok((f.solve(rhs), 0)),
            Implicit::Cg { shift } => {
                let sys = ImplicitSystem {
                    op: &self.op,
                    shift: *shift,
                    scale: self.dt,
                };
                let mut x = guess.to_vec();
                let stats = conjugate_gradient(&sys, rhs, &mut x, &cfg.cg())?;
                Ok((x, stats.iterations))
            }
        }
    }

    pub fn solve_alpha(&self, rhs: &[f64], guess: &[f64], cfg: &SolverConfig) -> Result<(Vec<f64>, usize)> {
        let which = self.alpha.as_ref().expect("operators built without the infected-class matrix");
        self.solve(which, rhs, guess, cfg)
    }

    pub fn solve_decay(&self, rhs: &[f64], guess: &[f64], cfg: &SolverConfig) -> Result<(Vec<f64>, usize)> {
        self.solve(&self.decay, rhs, guess, cfg)
    }
}

/// Direct solve of the stationary total-population system `(d − A) N = Λ`.
pub fn stationary_total_population(op: &DiffusionOperator, lambda: f64, d: f64) -> Result<Vec<f64>> {
    let n = op.grid().len();
    let f = BandCholesky::factor(n, op.bandwidth(), |i, j| {
        let e = -op.entry(i, j);
        if i == j { d + e } else { e }
    })?;
    Ok(f.solve(&vec![lambda; n]))
}
