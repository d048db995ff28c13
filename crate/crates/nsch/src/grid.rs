//! Uniform 2D grid with cell-centered scalars and MAC-staggered velocities.
//!
//! Scalars live at cell centers `((i+1/2)hx, (j+1/2)hy)`. Velocity components
//! live on faces: `u` on vertical faces, `v` on horizontal faces. Two boundary
//! modes are supported: homogeneous Neumann for scalars combined with no-slip
//! walls for the velocity, and fully periodic (used by manufactured-solution
//! tests only).

use crate::error::NschError;

/// Boundary-condition mode, uniform for the whole run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcKind {
    /// Mirrored ghosts for scalars, zero normal velocity and reflected
    /// tangential velocity at walls.
    NeumannNoSlip,
    /// All fields wrap around.
    Periodic,
}

/// Uniform rectangular grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub hx: f64,
    pub hy: f64,
    pub bc: BcKind,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64, bc: BcKind) -> Result<Self, NschError> {
        if nx < 8 || ny < 8 {
            return Err(NschError::Grid(format!(
                "grid must be at least 8x8, got {nx}x{ny}"
            )));
        }
        if !(lx > 0.0 && ly > 0.0) {
            return Err(NschError::Grid(format!(
                "domain lengths must be positive, got {lx}x{ly}"
            )));
        }
        Ok(Self {
            nx,
            ny,
            lx,
            ly,
            hx: lx / nx as f64,
            hy: ly / ny as f64,
            bc,
        })
    }

    #[inline]
    pub fn ncells(&self) -> usize {
        self.nx * self.ny
    }

    /// Cell area, the quadrature weight of the midpoint rule.
    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }

    /// Center coordinate of cell (i, j).
    #[inline]
    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        ((i as f64 + 0.5) * self.hx, (j as f64 + 0.5) * self.hy)
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }
}

/// One scalar unknown sampled at cell centers, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid2D,
    pub data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &Grid2D) -> Self {
        Self {
            grid: *grid,
            data: vec![0.0; grid.ncells()],
        }
    }

    pub fn constant(grid: &Grid2D, c: f64) -> Self {
        Self {
            grid: *grid,
            data: vec![c; grid.ncells()],
        }
    }

    /// Fill from a function of the cell-center coordinates.
    pub fn from_fn(grid: &Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.ncells());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let (x, y) = grid.cell_center(i, j);
                data.push(f(x, y));
            }
        }
        Self { grid: *grid, data }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.grid.nx + i]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[j * self.grid.nx + i]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, &v| m.max(v.abs()))
    }

    /// Midpoint-rule integral over the domain.
    pub fn integrate(&self) -> f64 {
        self.data.iter().sum::<f64>() * self.grid.cell_area()
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.grid.ncells() as f64
    }

    /// L2 norm with the midpoint quadrature weight.
    pub fn norm_l2(&self) -> f64 {
        (self.data.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_area()).sqrt()
    }

    /// Pointwise map into a fresh field.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// self += a * other
    pub fn axpy(&mut self, a: f64, other: &ScalarField) {
        for (s, o) in self.data.iter_mut().zip(other.data.iter()) {
            *s += a * o;
        }
    }

    pub fn scale(&mut self, a: f64) {
        self.data.iter_mut().for_each(|v| *v *= a);
    }

    /// Transpose the field onto the x<->y relabeled grid (for symmetry tests).
    pub fn transposed(&self) -> Self {
        let g = self.grid;
        let tg = Grid2D {
            nx: g.ny,
            ny: g.nx,
            lx: g.ly,
            ly: g.lx,
            hx: g.hy,
            hy: g.hx,
            bc: g.bc,
        };
        let mut out = ScalarField::zeros(&tg);
        for j in 0..g.ny {
            for i in 0..g.nx {
                *out.at_mut(j, i) = self.at(i, j);
            }
        }
        out
    }
}

/// MAC-staggered velocity (or any face-valued vector field, e.g. fluxes).
///
/// In `NeumannNoSlip` mode `u` is `(nx+1) x ny` and `v` is `nx x (ny+1)`;
/// boundary normal faces are pinned to zero. In `Periodic` mode each component
/// stores one value per unique face, `nx x ny`.
#[derive(Debug, Clone, PartialEq)]
pub struct MacVelocity {
    pub grid: Grid2D,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl MacVelocity {
    /// (columns, rows) of the u component.
    #[inline]
    pub fn u_dims(grid: &Grid2D) -> (usize, usize) {
        match grid.bc {
            BcKind::NeumannNoSlip => (grid.nx + 1, grid.ny),
            BcKind::Periodic => (grid.nx, grid.ny),
        }
    }

    /// (columns, rows) of the v component.
    #[inline]
    pub fn v_dims(grid: &Grid2D) -> (usize, usize) {
        match grid.bc {
            BcKind::NeumannNoSlip => (grid.nx, grid.ny + 1),
            BcKind::Periodic => (grid.nx, grid.ny),
        }
    }

    pub fn zeros(grid: &Grid2D) -> Self {
        let (nux, nuy) = Self::u_dims(grid);
        let (nvx, nvy) = Self::v_dims(grid);
        Self {
            grid: *grid,
            u: vec![0.0; nux * nuy],
            v: vec![0.0; nvx * nvy],
        }
    }

    /// Fill from functions of the face coordinates; no-slip pins boundary
    /// normal faces to zero regardless of `fu`/`fv`.
    pub fn from_fn(
        grid: &Grid2D,
        fu: impl Fn(f64, f64) -> f64,
        fv: impl Fn(f64, f64) -> f64,
    ) -> Self {
        let mut w = Self::zeros(grid);
        let (nux, nuy) = Self::u_dims(grid);
        for j in 0..nuy {
            for i in 0..nux {
                let (x, y) = (i as f64 * grid.hx, (j as f64 + 0.5) * grid.hy);
                w.u[j * nux + i] = fu(x, y);
            }
        }
        let (nvx, nvy) = Self::v_dims(grid);
        for j in 0..nvy {
            for i in 0..nvx {
                let (x, y) = ((i as f64 + 0.5) * grid.hx, j as f64 * grid.hy);
                w.v[j * nvx + i] = fv(x, y);
            }
        }
        w.enforce_boundary();
        w
    }

    #[inline]
    pub fn u_at(&self, i: usize, j: usize) -> f64 {
        let (nux, _) = Self::u_dims(&self.grid);
        self.u[j * nux + i]
    }

    #[inline]
    pub fn v_at(&self, i: usize, j: usize) -> f64 {
        let (nvx, _) = Self::v_dims(&self.grid);
        self.v[j * nvx + i]
    }

    /// Zero the boundary normal faces (no-op in periodic mode).
    pub fn enforce_boundary(&mut self) {
        if self.grid.bc != BcKind::NeumannNoSlip {
            return;
        }
        let (nux, nuy) = Self::u_dims(&self.grid);
        for j in 0..nuy {
            self.u[j * nux] = 0.0;
            self.u[j * nux + nux - 1] = 0.0;
        }
        let (nvx, nvy) = Self::v_dims(&self.grid);
        for i in 0..nvx {
            self.v[i] = 0.0;
            self.v[(nvy - 1) * nvx + i] = 0.0;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(self.v.iter()).all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.u
            .iter()
            .chain(self.v.iter())
            .fold(0.0_f64, |m, &v| m.max(v.abs()))
    }

    /// Face-weighted L2 inner product (each face carries weight hx*hy).
    pub fn dot(&self, other: &MacVelocity) -> f64 {
        let su: f64 = self.u.iter().zip(&other.u).map(|(a, b)| a * b).sum();
        let sv: f64 = self.v.iter().zip(&other.v).map(|(a, b)| a * b).sum();
        (su + sv) * self.grid.cell_area()
    }

    pub fn norm_l2(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// self += a * other
    pub fn axpy(&mut self, a: f64, other: &MacVelocity) {
        for (s, o) in self.u.iter_mut().zip(other.u.iter()) {
            *s += a * o;
        }
        for (s, o) in self.v.iter_mut().zip(other.v.iter()) {
            *s += a * o;
        }
    }

    pub fn scale(&mut self, a: f64) {
        self.u.iter_mut().for_each(|x| *x *= a);
        self.v.iter_mut().for_each(|x| *x *= a);
    }

    /// Swap the roles of x and y (u<->v) on the transposed grid.
    pub fn transposed(&self) -> Self {
        let g = self.grid;
        let tg = Grid2D {
            nx: g.ny,
            ny: g.nx,
            lx: g.ly,
            ly: g.lx,
            hx: g.hy,
            hy: g.hx,
            bc: g.bc,
        };
        let mut out = MacVelocity::zeros(&tg);
        let (nux, nuy) = Self::u_dims(&g);
        let (tnvx, _) = Self::v_dims(&tg);
        for j in 0..nuy {
            for i in 0..nux {
                out.v[i * tnvx + j] = self.u[j * nux + i];
            }
        }
        let (nvx, nvy) = Self::v_dims(&g);
        let (tnux, _) = Self::u_dims(&tg);
        for j in 0..nvy {
            for i in 0..nvx {
                out.u[i * tnux + j] = self.v[j * nvx + i];
            }
        }
        out
    }
}
