use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform interior grid on an interval or rectangle with homogeneous
/// Dirichlet boundary. Unknowns are the `n` interior points per axis,
/// ordered x-fastest; boundary values are implicit zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dimension: usize,
    lengths: Vec<f64>,
    n: Vec<usize>,
    h: Vec<f64>,
}

pub fn build_grid(dimension: usize, lengths: &[f64], n: &[usize]) -> Result<Grid> {
    if !(1..=2).contains(&dimension) {
        return Err(Error::param("dimension", format!("must be 1 or 2, got {dimension}")));
    }
    if lengths.len() != dimension || n.len() != dimension {
        return Err(Error::param(
            "grid",
            format!(
                "expected {dimension} lengths and point counts, got {} and {}",
                lengths.len(),
                n.len()
            ),
        ));
    }
    if let Some(&l) = lengths.iter().find(|&&l| !(l > 0.0) || !l.is_finite()) {
        return Err(Error::param("lengths", format!("must be positive, got {l}")));
    }
    if let Some(&k) = n.iter().find(|&&k| k < 3) {
        return Err(Error::param("n", format!("need at least 3 interior points per axis, got {k}")));
    }
    let h = lengths
        .iter()
        .zip(n)
        .map(|(&l, &k)| l / (k as f64 + 1.0))
        .collect();
    Ok(Grid {
        dimension,
        lengths: lengths.to_vec(),
        n: n.to_vec(),
        h,
    })
}

impl Grid {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn n(&self) -> &[usize] {
        &self.n
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    /// Number of unknowns.
    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Weight of one grid point in discrete integrals.
    pub fn cell_volume(&self) -> f64 {
        self.h.iter().product()
    }

    /// Physical coordinates of the point with multi-index `idx`.
    pub fn coords(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .zip(&self.h)
            .map(|(&i, &h)| (i as f64 + 1.0) * h)
            .collect()
    }

    /// Physical coordinates of the unknown with flat index `p`.
    pub fn point(&self, p: usize) -> Vec<f64> {
        match self.dimension {
            1 => vec![(p as f64 + 1.0) * self.h[0]],
            _ => {
                let (i, j) = (p % self.n[0], p / self.n[0]);
                vec![(i as f64 + 1.0) * self.h[0], (j as f64 + 1.0) * self.h[1]]
            }
        }
    }

    /// Discrete `L²` inner product.
    pub fn dot(&self, u: &[f64], v: &[f64]) -> f64 {
        self.cell_volume() * u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Discrete `L²` norm.
    pub fn norm(&self, u: &[f64]) -> f64 {
        self.dot(u, u).sqrt()
    }

    /// Discrete integral `∫ u dx`.
    pub fn integral(&self, u: &[f64]) -> f64 {
        self.cell_volume() * u.iter().sum::<f64>()
    }

    /// Grid function sampled from `f` at every interior point.
    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        (0..self.len()).map(|p| f(&self.point(p))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-15
    }

    #[test]
    fn spacing() {
        let g = build_grid(1, &[1.0], &[99]).unwrap();
        assert!(close(g.h()[0], 0.01));
        let g = build_grid(2, &[1.0, 1.0], &[49, 49]).unwrap();
        assert!(close(g.h()[0], 0.02) && close(g.h()[1], 0.02));
        assert_eq!(g.len(), 49 * 49);
        let g = build_grid(1, &[2.0], &[3]).unwrap();
        assert!(close(g.h()[0], 0.5));
    }

    #[test]
    fn rejects_invalid() {
        assert!(build_grid(3, &[1.0, 1.0, 1.0], &[5, 5, 5]).is_err());
        assert!(build_grid(1, &[1.0], &[2]).is_err());
        assert!(build_grid(1, &[0.0], &[5]).is_err());
        assert!(build_grid(2, &[1.0], &[5]).is_err());
    }

    #[test]
    fn discrete_norm_of_constant() {
        let g = build_grid(1, &[1.0], &[99]).unwrap();
        let one = vec![1.0; 99];
        assert!((g.norm(&one) - 0.99f64.sqrt()).abs() < 1e-14);
        assert!((g.integral(&one) - 0.99).abs() < 1e-14);
    }

    #[test]
    fn flat_index_points() {
        let g = build_grid(2, &[1.0, 2.0], &[3, 4]).unwrap();
        assert_eq!(g.point(0), vec![0.25, 0.4]);
        assert_eq!(g.point(4), vec![0.5, 0.8]);
        assert_eq!(g.coords(&[1, 1]), g.point(4));
    }
}
