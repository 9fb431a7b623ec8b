use crate::error::{Error, Result};

/// Cholesky factor `L` of a symmetric positive definite band matrix, stored
/// row by row: `rows[i][k]` is `L[i][i − bw + k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    rows: Vec<f64>,
}

impl BandCholesky {
    /// Factors the matrix whose lower band is given by `entry(i, j)`,
    /// `j ∈ [i − bw, i]`.
    pub fn factor(n: usize, bw: usize, entry: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let w = bw + 1;
        let mut rows = vec![0.0; n * w];
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let mut s = entry(i, j);
                let k0 = j0.max(j.saturating_sub(bw));
                for k in k0..j {
                    s -= rows[i * w + (k + bw - i)] * rows[j * w + (k + bw - j)];
                }
                if j == i {
                    if !(s > 0.0) {
                        return Err(Error::NotPositiveDefinite { row: i, pivot: s });
                    }
                    rows[i * w + bw] = s.sqrt();
                } else {
                    rows[i * w + (j + bw - i)] = s / rows[j * w + bw];
                }
            }
        }
        Ok(Self { n, bw, rows })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `L Lᵀ x = b` in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        for i in 0..n {
            let mut s = x[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.rows[i * w + (k + bw - i)] * x[k];
            }
            x[i] = s / self.rows[i * w + bw];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n.min(i + bw + 1) {
                s -= self.rows[k * w + (i + bw - k)] * x[k];
            }
            x[i] = s / self.rows[i * w + bw];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_solve() {
        // [4 1 0; 1 4 1; 0 1 4] x = [1 2 3]
        let m = |i: usize, j: usize| if i == j { 4.0 } else { 1.0 };
        let f = BandCholesky::factor(3, 1, m).unwrap();
        let x = f.solve(&[1.0, 2.0, 3.0]);
        let expect = [5.0 / 28.0, 2.0 / 7.0, 19.0 / 28.0];
        for (a, b) in x.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn wide_band_matches_residual() {
        let n = 30;
        let bw = 5;
        let m = move |i: usize, j: usize| {
            let d = i.abs_diff(j);
            if d == 0 {
                12.0 + i as f64 * 0.1
            } else if d <= bw {
                1.0 / (d as f64 + 1.0)
            } else {
                0.0
            }
        };
        let f = BandCholesky::factor(n, bw, m).unwrap();
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = f.solve(&b);
        for i in 0..n {
            let ax: f64 = (0..n).map(|j| m(i, j) * x[j]).sum();
            assert!((ax - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn indefinite_is_rejected() {
        let m = |i: usize, j: usize| if i == j { -1.0 } else { 0.0 };
        assert!(matches!(
            BandCholesky::factor(3, 1, m),
            Err(Error::NotPositiveDefinite { row: 0, .. })
        ));
    }
}
