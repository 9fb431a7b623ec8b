//! Sparse kernels checked against dense linear algebra.

use nalgebra::{DMatrix, DVector};

use sirlab::spatial::{
    build_grid, conjugate_gradient, first_eigenpair, laplacian, BandCholesky, CgConfig, DiffusionOperator,
    ImplicitSystem,
};

fn dense(op: &DiffusionOperator) -> DMatrix<f64> {
    let rows = op.to_dense();
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

fn rough_coefficient(x: &[f64]) -> f64 {
    1.0 + 0.6 * (7.0 * x[0]).sin() * (3.0 * x.get(1).copied().unwrap_or(0.5)).cos()
}

#[test]
fn principal_eigenvalue_matches_dense_2d() {
    let g = build_grid(2, &[1.0, 2.0], &[9, 7]).unwrap();
    let m = -dense(&laplacian(&g));
    let eig = m.symmetric_eigen();
    let smallest = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let pair = first_eigenpair(&g).unwrap();
    assert!((pair.lambda1 - smallest).abs() < 1e-9 * smallest, "{} vs {smallest}", pair.lambda1);
}

#[test]
fn rough_operator_is_symmetric_negative_definite() {
    let g = build_grid(2, &[1.0, 1.0], &[8, 6]).unwrap();
    let op = DiffusionOperator::from_coefficient(&g, None, rough_coefficient);
    let m = dense(&op);
    assert!((&m - m.transpose()).amax() < 1e-12);
    let eig = (-m).symmetric_eigen();
    assert!(eig.eigenvalues.iter().all(|&l| l > 0.0));
}

#[test]
fn band_cholesky_and_cg_match_dense_solve() {
    let g = build_grid(2, &[1.0, 1.5], &[10, 7]).unwrap();
    let op = DiffusionOperator::from_coefficient(&g, None, rough_coefficient);
    let (shift, scale) = (1.35, 0.01);
    let system = ImplicitSystem { op: &op, shift, scale };
    let n = g.len();
    let m = DMatrix::identity(n, n) * shift - dense(&op) * scale;
    let b: Vec<f64> = (0..n).map(|k| ((k * 37 % 11) as f64) - 4.0).collect();
    let expected = m.clone().lu().solve(&DVector::from_vec(b.clone())).unwrap();

    let chol = BandCholesky::factor(n, op.bandwidth(), |i, j| m[(i, j)]).unwrap();
    let direct = chol.solve(&b);
    let mut iterative = vec![0.0; n];
    conjugate_gradient(&system, &b, &mut iterative, &CgConfig { tol: 1e-12, max_iter: 1000 }).unwrap();
    let scale_b = expected.amax();
    for k in 0..n {
        assert!((direct[k] - expected[k]).abs() < 1e-12 * scale_b);
        assert!((iterative[k] - expected[k]).abs() < 1e-9 * scale_b);
    }
}
