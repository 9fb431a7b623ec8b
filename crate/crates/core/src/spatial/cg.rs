use crate::error::{Error, Result};

use super::operator::SymmetricOperator;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgConfig {
    /// Relative residual `‖b − Mx‖ / ‖b‖` at which to stop.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for CgConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgStats {
    pub iterations: usize,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned conjugate gradients for a symmetric positive
/// definite `op`. `x` holds the initial guess and receives the solution.
pub fn conjugate_gradient(
    op: &impl SymmetricOperator,
    b: &[f64],
    x: &mut [f64],
    cfg: &CgConfig,
) -> Result<CgStats> {
    let n = op.dim();
    if b.len() != n || x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.len().min(x.len()),
        });
    }
    let b_norm = dot(b, b).sqrt();
    if b_norm == 0.0 {
        x.fill(0.0);
        return Ok(CgStats {
            iterations: 0,
            residual: 0.0,
        });
    }
    let inv_diag: Vec<f64> = op.diagonal().iter().map(|d| 1.0 / d).collect();

    let mut r = vec![0.0; n];
    op.apply(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut res = dot(&r, &r).sqrt() / b_norm;

    for it in 0..cfg.max_iter {
        if res <= cfg.tol {
            return Ok(CgStats {
                iterations: it,
                residual: res,
            });
        }
        op.apply(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            return Err(Error::SolverDiverged {
                iterations: it,
                residual: res,
            });
        }
        let alpha = rz / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        res = dot(&r, &r).sqrt() / b_norm;
    }
    if res <= cfg.tol {
        return Ok(CgStats {
            iterations: cfg.max_iter,
            residual: res,
        });
    }
    Err(Error::SolverDiverged {
        iterations: cfg.max_iter,
        residual: res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spatial::{build_grid, laplacian, DiffusionOperator, ImplicitSystem};

    #[test]
    fn solves_implicit_step_to_tolerance() {
        let g = build_grid(2, &[1.0, 1.0], &[20, 20]).unwrap();
        let op = DiffusionOperator::from_coefficient(&g, None, |x| 1.0 + 0.5 * x[0]);
        let sys = ImplicitSystem {
            op: &op,
            shift: 1.01,
            scale: 0.05,
        };
        let b: Vec<f64> = (0..g.len()).map(|p| ((p * 7919) % 13) as f64 - 6.0).collect();
        let mut x = vec![0.0; g.len()];
        let stats = conjugate_gradient(&sys, &b, &mut x, &CgConfig::default()).unwrap();
        let mut mx = vec![0.0; g.len()];
        sys.apply(&x, &mut mx);
        let err: f64 = mx.iter().zip(&b).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let bn: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(err / bn <= 1e-10, "{}", err / bn);
        assert!(stats.iterations > 0);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let g = build_grid(1, &[1.0], &[10]).unwrap();
        let op = laplacian(&g);
        let sys = ImplicitSystem {
            op: &op,
            shift: 1.0,
            scale: 0.1,
        };
        let mut x = vec![3.0; 10];
        conjugate_gradient(&sys, &[0.0; 10], &mut x, &CgConfig::default()).unwrap();
        assert!(x.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn iteration_cap_reports_divergence() {
        let g = build_grid(1, &[1.0], &[50]).unwrap();
        let op = laplacian(&g);
        let sys = ImplicitSystem {
            op: &op,
            shift: 1.0,
            scale: 1.0,
        };
        let b = vec![1.0; 50];
        let mut x = vec![0.0; 50];
        let cfg = CgConfig { tol: 1e-14, max_iter: 2 };
        assert!(matches!(
            conjugate_gradient(&sys, &b, &mut x, &cfg),
            Err(Error::SolverDiverged { iterations: 2, .. })
        ));
    }
}
