//! Uniform grids on `[-L, L]^n` (n = 1 or 2) with homogeneous Dirichlet
//! boundary, scalar fields on them, and the second-order difference
//! operators used by every solver in the crate.
//!
//! All reductions are serial, fixed-order, compensated sums, so every
//! quantity derived from them is bitwise reproducible run to run. The
//! forward-difference gradient norm is chosen so that summation by parts
//! `inner(laplacian(f), f) = -grad_norm_sq(f)` holds exactly (up to
//! rounding) for Dirichlet fields; the energy identities downstream
//! inherit their exactness from this single discrete fact.

use crate::{Error, Result};

/// Neumaier-compensated serial sum. Fixed evaluation order keeps results
/// bitwise stable; compensation keeps rounding near one ulp even for the
/// ~1e7-term sums that arise in long runs.
pub(crate) fn csum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for x in terms {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

/// Uniform tensor grid on `[-half_width, half_width]^dim` with
/// `points_per_axis` nodes per axis (boundary nodes included).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    half_width: f64,
    points_per_axis: usize,
}

impl Grid {
    pub fn new(dim: usize, half_width: f64, points_per_axis: usize) -> Result<Grid> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dim must be 1 or 2, got {dim}")));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "half_width must be positive and finite, got {half_width}"
            )));
        }
        if points_per_axis < 3 {
            return Err(Error::InvalidGrid(format!(
                "points_per_axis must be >= 3, got {points_per_axis}"
            )));
        }
        Ok(Grid { dim, half_width, points_per_axis })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    /// Mesh width `h = 2L / (N - 1)`.
    pub fn h(&self) -> f64 {
        2.0 * self.half_width / (self.points_per_axis - 1) as f64
    }

    /// Total number of nodes, `N^dim`.
    pub fn node_count(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    /// Coordinate of node `i` along one axis: `x_i = -L + i h`.
    pub fn coord(&self, i: usize) -> f64 {
        debug_assert!(i < self.points_per_axis);
        -self.half_width + i as f64 * self.h()
    }

    /// Quadrature weight of the rectangle rule, `h^dim`.
    pub fn quad_weight(&self) -> f64 {
        self.h().powi(self.dim as i32)
    }

    /// Row-major index of a 2d node.
    #[inline]
    pub fn idx2(&self, i: usize, j: usize) -> usize {
        debug_assert!(self.dim == 2 && i < self.points_per_axis && j < self.points_per_axis);
        i * self.points_per_axis + j
    }

    /// Minimal distance (in cells) of a node to the boundary.
    fn boundary_distance(&self, flat: usize) -> usize {
        let n = self.points_per_axis;
        let edge = |i: usize| i.min(n - 1 - i);
        match self.dim {
            1 => edge(flat),
            _ => edge(flat / n).min(edge(flat % n)),
        }
    }
}

/// Scalar field sampled on the nodes of a [`Grid`], stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: Grid) -> Field {
        Field { grid, values: vec![0.0; grid.node_count()] }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Field> {
        if values.len() != grid.node_count() {
            return Err(Error::InvalidGrid(format!(
                "value buffer has {} entries, grid has {} nodes",
                values.len(),
                grid.node_count()
            )));
        }
        Ok(Field { grid, values })
    }

    /// Fill from a closure over node coordinates (slice of length `dim`).
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Field {
        let n = grid.points_per_axis;
        let mut values = Vec::with_capacity(grid.node_count());
        match grid.dim {
            1 => {
                for i in 0..n {
                    values.push(f(&[grid.coord(i)]));
                }
            }
            _ => {
                for i in 0..n {
                    let x = grid.coord(i);
                    for j in 0..n {
                        values.push(f(&[x, grid.coord(j)]));
                    }
                }
            }
        }
        Field { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Zero out the boundary nodes in place.
    pub fn project_dirichlet(&mut self) {
        let n = self.grid.points_per_axis;
        match self.grid.dim {
            1 => {
                self.values[0] = 0.0;
                self.values[n - 1] = 0.0;
            }
            _ => {
                for i in 0..n {
                    self.values[self.grid.idx2(i, 0)] = 0.0;
                    self.values[self.grid.idx2(i, n - 1)] = 0.0;
                    self.values[self.grid.idx2(0, i)] = 0.0;
                    self.values[self.grid.idx2(n - 1, i)] = 0.0;
                }
            }
        }
    }

    /// True iff every boundary node is exactly zero.
    pub fn is_dirichlet(&self) -> bool {
        let n = self.grid.points_per_axis;
        match self.grid.dim {
            1 => self.values[0] == 0.0 && self.values[n - 1] == 0.0,
            _ => (0..n).all(|i| {
                self.values[self.grid.idx2(i, 0)] == 0.0
                    && self.values[self.grid.idx2(i, n - 1)] == 0.0
                    && self.values[self.grid.idx2(0, i)] == 0.0
                    && self.values[self.grid.idx2(n - 1, i)] == 0.0
            }),
        }
    }

    fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Rectangle-rule integral `h^dim * sum f_i`.
    pub fn integral(&self) -> f64 {
        self.grid.quad_weight() * csum(self.values.iter().copied())
    }

    /// Squared L2 norm `h^dim * sum f_i^2`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.quad_weight() * csum(self.values.iter().map(|v| v * v))
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().max(0.0).sqrt()
    }

    /// L2 inner product `h^dim * sum f_i g_i`.
    pub fn inner(&self, other: &Field) -> Result<f64> {
        self.check_same_grid(other)?;
        let w = self.grid.quad_weight();
        Ok(w * csum(self.values.iter().zip(&other.values).map(|(a, b)| a * b)))
    }

    /// Largest absolute node value.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Largest absolute value over nodes at distance 1..=layers from the
    /// boundary (the boundary itself is pinned to zero and excluded).
    pub fn boundary_layer_max(&self, layers: usize) -> f64 {
        let mut m = 0.0f64;
        for (flat, v) in self.values.iter().enumerate() {
            let d = self.grid.boundary_distance(flat);
            if d >= 1 && d <= layers {
                m = m.max(v.abs());
            }
        }
        m
    }

    /// Five-point (three-point in 1d) Laplacian; output is zero on the
    /// boundary, matching the Dirichlet function space.
    pub fn laplacian(&self) -> Field {
        let n = self.grid.points_per_axis;
        let inv_h2 = 1.0 / (self.grid.h() * self.grid.h());
        let mut out = vec![0.0; self.values.len()];
        match self.grid.dim {
            1 => {
                for i in 1..n - 1 {
                    out[i] =
                        (self.values[i - 1] - 2.0 * self.values[i] + self.values[i + 1]) * inv_h2;
                }
            }
            _ => {
                for i in 1..n - 1 {
                    let row = i * n;
                    for j in 1..n - 1 {
                        let c = row + j;
                        out[c] = (self.values[c - n]
                            + self.values[c + n]
                            + self.values[c - 1]
                            + self.values[c + 1]
                            - 4.0 * self.values[c])
                            * inv_h2;
                    }
                }
            }
        }
        Field { grid: self.grid, values: out }
    }

    /// Discrete bilaplacian, defined as the composition of two Laplacian
    /// applications (13-point stencil in 2d). Symmetric and positive
    /// semidefinite by construction.
    pub fn biharmonic(&self) -> Field {
        self.laplacian().laplacian()
    }

    /// Squared H1 seminorm from forward differences:
    /// `h^dim * sum over axes and cells ((f_{i+1} - f_i)/h)^2`.
    ///
    /// With this choice `inner(laplacian(f), f) = -grad_norm_sq(f)` exactly
    /// for Dirichlet fields (summation by parts telescopes node by node).
    pub fn grad_norm_sq(&self) -> f64 {
        self.grad_inner(self).expect("same grid")
    }

    /// Bilinear form behind [`Field::grad_norm_sq`]:
    /// `h^dim * sum (df)(dg) / h^2` over forward differences.
    pub fn grad_inner(&self, other: &Field) -> Result<f64> {
        self.check_same_grid(other)?;
        let n = self.grid.points_per_axis;
        let w = self.grid.quad_weight() / (self.grid.h() * self.grid.h());
        let f = &self.values;
        let g = &other.values;
        let total = match self.grid.dim {
            1 => csum((0..n - 1).map(|i| (f[i + 1] - f[i]) * (g[i + 1] - g[i]))),
            _ => {
                let axis0 = (0..n - 1).flat_map(|i| {
                    (0..n).map(move |j| (i * n + j, (i + 1) * n + j))
                });
                let axis1 = (0..n).flat_map(|i| {
                    (0..n - 1).map(move |j| (i * n + j, i * n + j + 1))
                });
                csum(axis0.chain(axis1).map(|(a, b)| (f[b] - f[a]) * (g[b] - g[a])))
            }
        };
        Ok(w * total)
    }

    /// Dirichlet eigenmode: `sin(j pi (x + L) / 2L)` per axis (product of
    /// sines in 2d with the same index on both axes unless given separately).
    pub fn eigenmode(grid: Grid, j: usize) -> Result<Field> {
        match grid.dim {
            1 => Self::eigenmode_nd(grid, &[j]),
            _ => Self::eigenmode_nd(grid, &[j, j]),
        }
    }

    /// Eigenmode with per-axis indices (`js.len() == dim`).
    pub fn eigenmode_nd(grid: Grid, js: &[usize]) -> Result<Field> {
        if js.len() != grid.dim {
            return Err(Error::InvalidSpec(format!(
                "eigenmode needs {} axis indices, got {}",
                grid.dim,
                js.len()
            )));
        }
        let n = grid.points_per_axis;
        for &j in js {
            if j < 1 || j > n - 2 {
                return Err(Error::InvalidMode { j, max: n - 2 });
            }
        }
        let line = |j: usize| -> Vec<f64> {
            (0..n)
                .map(|i| (std::f64::consts::PI * (j * i) as f64 / (n - 1) as f64).sin())
                .collect()
        };
        let mut f = match grid.dim {
            1 => Field { grid, values: line(js[0]) },
            _ => {
                let (a, b) = (line(js[0]), line(js[1]));
                let mut values = Vec::with_capacity(grid.node_count());
                for i in 0..n {
                    for j in 0..n {
                        values.push(a[i] * b[j]);
                    }
                }
                Field { grid, values }
            }
        };
        // sin(pi j i / (N-1)) is zero at i = 0, N-1 only up to rounding.
        f.project_dirichlet();
        Ok(f)
    }

    /// Discrete Dirichlet eigenvalue of `-laplacian` for the mode with
    /// per-axis indices `js`: `sum_axes (2/h^2)(1 - cos(j pi h / 2L))`.
    pub fn eigenvalue_nd(grid: Grid, js: &[usize]) -> f64 {
        let h2 = grid.h() * grid.h();
        js.iter()
            .map(|&j| {
                2.0 / h2 * (1.0 - (std::f64::consts::PI * j as f64 * grid.h()
                    / (2.0 * grid.half_width()))
                .cos())
            })
            .sum()
    }
}
