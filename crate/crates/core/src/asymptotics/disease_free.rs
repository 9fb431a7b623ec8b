use serde::{Deserialize, Serialize};

use crate::dynamics::Integrator;
use crate::error::{Error, Result};

/// Truncated pullback approximation of the disease-free solution `N*(t, ω)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiseaseFree {
    pub t: f64,
    pub n: Vec<f64>,
    /// Truncation length of the returned run.
    pub t_trunc: f64,
    /// Relative change between the last two truncation lengths.
    pub last_change: f64,
    pub doublings: usize,
}

const MAX_DOUBLINGS: usize = 24;

fn ticks_for(integ: &Integrator<'_>, span: f64) -> i64 {
    let stride = integ.stride();
    let steps = (span / integ.dt()).ceil().max(1.0) as i64;
    steps * stride
}

/// `N*(t, ω)` as the linear run from zero data over `[t − T, t]`, doubling
/// `T` until two successive results differ by less than `tol` relative.
///
/// The first `T` solves `e^{−(λ₀+d)T} = tol`.
pub fn disease_free_solution(integ: &Integrator<'_>, t: f64, lambda0: f64, tol: f64) -> Result<DiseaseFree> {
    let tick = integ.env().tick_of(t)?;
    disease_free_at_tick(integ, tick, lambda0, tol)
}

pub fn disease_free_at_tick(integ: &Integrator<'_>, tick: i64, lambda0: f64, tol: f64) -> Result<DiseaseFree> {
    if !(tol > 0.0) {
        return Err(Error::param("tol", format!("must be positive, got {tol}")));
    }
    let dt_noise = integ.env().dt();
    let len = integ.grid().len();
    let t = tick as f64 * dt_noise;
    if integ.params().lambda == 0.0 {
        return Ok(DiseaseFree {
            t,
            n: vec![0.0; len],
            t_trunc: 0.0,
            last_change: 0.0,
            doublings: 0,
        });
    }
    let rate = lambda0 + integ.params().d;
    let mut span = ticks_for(integ, (1.0 / tol).ln() / rate);
    let (lo, _) = integ.env().path.tick_range();
    let zero = vec![0.0; len];
    let run = |span: i64| -> Result<Vec<f64>> {
        if tick - span < lo {
            return Err(Error::TruncationNotConverged {
                reason: format!(
                    "noise window starts at {} but the truncation needs {}",
                    lo as f64 * dt_noise,
                    (tick - span) as f64 * dt_noise
                ),
            });
        }
        Ok(integ.solve_linear_n_ticks(&zero, tick - span, tick, usize::MAX)?.final_n)
    };
    let mut prev = run(span)?;
    for doublings in 1..=MAX_DOUBLINGS {
        span *= 2;
        let next = run(span)?;
        let diff: Vec<f64> = next.iter().zip(&prev).map(|(a, b)| a - b).collect();
        let scale = integ.grid().norm(&next);
        let change = integ.grid().norm(&diff) / scale;
        if change < tol {
            return Ok(DiseaseFree {
                t,
                n: next,
                t_trunc: span as f64 * dt_noise,
                last_change: change,
                doublings,
            });
        }
        prev = next;
    }
    Err(Error::TruncationNotConverged {
        reason: format!("no agreement to {tol} after {MAX_DOUBLINGS} doublings"),
    })
}

/// `‖N(t1; t0, N*(t0)) − N*(t1)‖₂ / ‖N*(t1)‖₂`.
pub fn disease_free_invariance_residual(
    integ: &Integrator<'_>,
    t0: f64,
    t1: f64,
    lambda0: f64,
    tol: f64,
) -> Result<f64> {
    let k0 = integ.env().tick_of(t0)?;
    let k1 = integ.env().tick_of(t1)?;
    let start = disease_free_at_tick(integ, k0, lambda0, tol)?;
    let end = disease_free_at_tick(integ, k1, lambda0, tol)?;
    let moved = integ.solve_linear_n_ticks(&start.n, k0, k1, usize::MAX)?.final_n;
    let diff: Vec<f64> = moved.iter().zip(&end.n).map(|(a, b)| a - b).collect();
    let g = integ.grid();
    let scale = g.norm(&end.n);
    if scale == 0.0 {
        return Ok(g.norm(&diff));
    }
    Ok(g.norm(&diff) / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{stationary_total_population, ModelParams, SolverConfig};
    use crate::randomness::{NoiseSpec, Profile, RandomEnvironment};
    use crate::spatial::{assemble_diffusion, build_grid, first_eigenpair};

    fn env(a0: f64, a1: f64) -> RandomEnvironment {
        RandomEnvironment::sample(&NoiseSpec {
            seed: 21,
            dt: 1e-3,
            t_lo: -12.0,
            t_hi: 3.0,
            kappa: 1.0,
            sigma: 1.0,
            phi0: 0.0,
            gamma0: 1.0,
            gamma_max: 3.0,
            a0,
            a1,
            profile: Profile::Bump,
        })
        .unwrap()
    }

    #[test]
    fn zero_recruitment_gives_zero() {
        let g = build_grid(1, &[1.0], &[20]).unwrap();
        let e = env(0.5, 1.5);
        let p = ModelParams::new(0.0, 0.2, 0.0, 0.1).unwrap();
        let it = Integrator::new(&g, p, &e, 1e-2, SolverConfig::default()).unwrap();
        let n = disease_free_solution(&it, 0.0, 5.0, 1e-8).unwrap();
        assert!(n.n.iter().all(|&v| v == 0.0));
        assert_eq!(disease_free_invariance_residual(&it, 0.0, 1.0, 5.0, 1e-8).unwrap(), 0.0);
    }

    #[test]
    fn constant_coefficient_matches_stationary_solve() {
        let g = build_grid(1, &[1.0], &[30]).unwrap();
        let e = env(0.8, 0.8);
        let p = ModelParams::new(3.0, 0.2, 0.0, 0.1).unwrap();
        let eig = first_eigenpair(&g).unwrap();
        let it = Integrator::new(&g, p, &e, 1e-2, SolverConfig::default()).unwrap();
        let nstar = disease_free_solution(&it, 1.0, 0.8 * eig.lambda1, 1e-10).unwrap();
        let stat = stationary_total_population(&assemble_diffusion(&g, &e.field, 0), 3.0, 0.2).unwrap();
        let diff: Vec<f64> = nstar.n.iter().zip(&stat).map(|(a, b)| a - b).collect();
        assert!(g.norm(&diff) <= 1e-8 * g.norm(&stat));
    }

    #[test]
    fn random_coefficient_bound_and_invariance() {
        let g = build_grid(1, &[1.0], &[30]).unwrap();
        let e = env(0.5, 1.5);
        let p = ModelParams::new(2.0, 0.3, 0.0, 0.1).unwrap();
        let eig = first_eigenpair(&g).unwrap();
        let lambda0 = 0.5 * eig.lambda1;
        let it = Integrator::new(&g, p, &e, 1e-2, SolverConfig::default()).unwrap();
        let tol = 1e-9;
        let nstar = disease_free_solution(&it, 0.0, lambda0, tol).unwrap();
        assert!(g.norm(&nstar.n) <= p.lambda_norm(&g) / (lambda0 + p.d));
        let res = disease_free_invariance_residual(&it, 0.0, 2.0, lambda0, tol).unwrap();
        assert!(res <= 2.0 * tol, "{res}");
        assert_eq!(disease_free_invariance_residual(&it, 1.0, 1.0, lambda0, tol).unwrap(), 0.0);
    }

    #[test]
    fn short_window_is_reported() {
        let g = build_grid(1, &[1.0], &[10]).unwrap();
        let e = env(0.5, 1.5);
        let p = ModelParams::new(2.0, 0.3, 0.0, 0.1).unwrap();
        let it = Integrator::new(&g, p, &e, 1e-2, SolverConfig::default()).unwrap();
        assert!(matches!(
            disease_free_solution(&it, 0.0, 1e-3, 1e-12),
            Err(Error::TruncationNotConverged { .. })
        ));
    }
}
