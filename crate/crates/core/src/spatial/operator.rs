use crate::error::Result;
use crate::randomness::{DiffusionField, RandomEnvironment};

use super::grid::Grid;

/// A symmetric linear map on grid functions.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn diagonal(&self) -> Vec<f64>;
}

/// Discrete `div(a ∇·)` with homogeneous Dirichlet boundary, stored as one
/// coefficient `a_face / h²` per cell face. Each face couples its two
/// neighbours with the same weight, so the matrix is exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionOperator {
    grid: Grid,
    tick: Option<i64>,
    /// x-faces, `(n_x + 1)` per row, row-major over y.
    cx: Vec<f64>,
    /// y-faces, `n_x` per face row, `n_y + 1` face rows. Empty in 1D.
    cy: Vec<f64>,
}

/// Assembles `A(θ_t ω)` at noise tick `tick`, with `a` evaluated at face
/// midpoints.
pub fn assemble_diffusion(grid: &Grid, field: &DiffusionField, tick: i64) -> DiffusionOperator {
    let lengths = grid.lengths();
    DiffusionOperator::from_coefficient(grid, Some(tick), |x| field.coefficient(tick, x, lengths))
}

/// Same as [`assemble_diffusion`] but addressed by time, checking the window.
pub fn assemble_diffusion_at(grid: &Grid, env: &RandomEnvironment, t: f64) -> Result<DiffusionOperator> {
    let tick = env.tick_of(t)?;
    Ok(assemble_diffusion(grid, &env.field, tick))
}

/// Constant-coefficient discrete Laplacian `Δʰ`.
pub fn laplacian(grid: &Grid) -> DiffusionOperator {
    DiffusionOperator::from_coefficient(grid, None, |_| 1.0)
}

impl DiffusionOperator {
    pub fn from_coefficient(grid: &Grid, tick: Option<i64>, a: impl Fn(&[f64]) -> f64) -> Self {
        let h = grid.h();
        let n = grid.n();
        let (nx, ny) = (n[0], if grid.dimension() == 2 { n[1] } else { 1 });
        let hx2 = h[0] * h[0];
        let mut cx = Vec::with_capacity((nx + 1) * ny);
        for j in 0..ny {
            for i in 0..=nx {
                let x = (i as f64 + 0.5) * h[0];
                let coeff = if grid.dimension() == 1 {
                    a(&[x])
                } else {
                    a(&[x, (j as f64 + 1.0) * h[1]])
                };
                cx.push(coeff / hx2);
            }
        }
        let mut cy = Vec::new();
        if grid.dimension() == 2 {
            let hy2 = h[1] * h[1];
            cy.reserve(nx * (ny + 1));
            for j in 0..=ny {
                for i in 0..nx {
                    let p = [(i as f64 + 1.0) * h[0], (j as f64 + 0.5) * h[1]];
                    cy.push(a(&p) / hy2);
                }
            }
        }
        Self {
            grid: grid.clone(),
            tick,
            cx,
            cy,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Noise tick at which the coefficient was frozen, if any.
    pub fn tick(&self) -> Option<i64> {
        self.tick
    }

    fn nx_ny(&self) -> (usize, usize) {
        let n = self.grid.n();
        (n[0], if self.grid.dimension() == 2 { n[1] } else { 1 })
    }

    /// `y = A x`.
    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let (nx, ny) = self.nx_ny();
        for j in 0..ny {
            let row = &self.cx[j * (nx + 1)..(j + 1) * (nx + 1)];
            let xs = &x[j * nx..(j + 1) * nx];
            let ys = &mut y[j * nx..(j + 1) * nx];
            for i in 0..nx {
                let west = if i > 0 { xs[i - 1] } else { 0.0 };
                let east = if i + 1 < nx { xs[i + 1] } else { 0.0 };
                ys[i] = row[i] * (west - xs[i]) + row[i + 1] * (east - xs[i]);
            }
        }
        if !self.cy.is_empty() {
            for j in 0..ny {
                for i in 0..nx {
                    let p = i + nx * j;
                    let south = if j > 0 { x[p - nx] } else { 0.0 };
                    let north = if j + 1 < ny { x[p + nx] } else { 0.0 };
                    y[p] += self.cy[i + nx * j] * (south - x[p]) + self.cy[i + nx * (j + 1)] * (north - x[p]);
                }
            }
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        self.apply_into(x, &mut y);
        y
    }

    /// Diagonal of `A` (non-positive).
    pub fn diag(&self) -> Vec<f64> {
        let (nx, ny) = self.nx_ny();
        let mut d = vec![0.0; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let p = i + nx * j;
                d[p] = -(self.cx[j * (nx + 1) + i] + self.cx[j * (nx + 1) + i + 1]);
                if !self.cy.is_empty() {
                    d[p] -= self.cy[i + nx * j] + self.cy[i + nx * (j + 1)];
                }
            }
        }
        d
    }

    /// Half-bandwidth of the matrix in the flat ordering.
    pub fn bandwidth(&self) -> usize {
        if self.grid.dimension() == 2 {
            self.grid.n()[0]
        } else {
            1
        }
    }

    /// Matrix entry `A[p][q]`.
    pub fn entry(&self, p: usize, q: usize) -> f64 {
        let (nx, _) = self.nx_ny();
        if p == q {
            return self.diag_entry(p);
        }
        let (lo, hi) = if p < q { (p, q) } else { (q, p) };
        let (i, j) = (lo % nx, lo / nx);
        if hi == lo + 1 && i + 1 < nx {
            return self.cx[j * (nx + 1) + i + 1];
        }
        if !self.cy.is_empty() && hi == lo + nx {
            return self.cy[i + nx * (j + 1)];
        }
        0.0
    }

    fn diag_entry(&self, p: usize) -> f64 {
        let (nx, _) = self.nx_ny();
        let (i, j) = (p % nx, p / nx);
        let mut d = -(self.cx[j * (nx + 1) + i] + self.cx[j * (nx + 1) + i + 1]);
        if !self.cy.is_empty() {
            d -= self.cy[i + nx * j] + self.cy[i + nx * (j + 1)];
        }
        d
    }

    /// Row-major dense copy; only meant for small grids.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.grid.len();
        let mut m = vec![vec![0.0; n]; n];
        let mut e = vec![0.0; n];
        for q in 0..n {
            e[q] = 1.0;
            let col = self.apply(&e);
            for p in 0..n {
                m[p][q] = col[p];
            }
            e[q] = 0.0;
        }
        m
    }
}

/// `M = shift · I − scale · A`, the matrix of one implicit step.
#[derive(Debug, Clone, Copy)]
pub struct ImplicitSystem<'a> {
    pub op: &'a DiffusionOperator,
    pub shift: f64,
    pub scale: f64,
}

impl SymmetricOperator for ImplicitSystem<'_> {
    fn dim(&self) -> usize {
        self.op.grid.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.op.apply_into(x, y);
        for (yi, &xi) in y.iter_mut().zip(x) {
            *yi = self.shift * xi - self.scale * *yi;
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        self.op
            .diag()
            .into_iter()
            .map(|d| self.shift - self.scale * d)
            .collect()
    }
}

/// `−A` as an operator.
#[derive(Debug, Clone, Copy)]
pub struct Negated<'a>(pub &'a DiffusionOperator);

impl SymmetricOperator for Negated<'_> {
    fn dim(&self) -> usize {
        self.0.grid.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.0.apply_into(x, y);
        y.iter_mut().for_each(|v| *v = -*v);
    }

    fn diagonal(&self) -> Vec<f64> {
        self.0.diag().into_iter().map(|d| -d).collect()
    }
}
