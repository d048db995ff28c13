//! Incompressible velocity step with variable viscosity and Korteweg forcing.
//!
//! Non-incremental Chorin projection:
//!   (i)   (v* - v^n)/dt + div(v^n x v^n) = div(2 eta(phi+) D v*) + F_korteweg
//!         with the viscous term implicit (CG, componentwise constant-eta
//!         Helmholtz preconditioner),
//!   (ii)  Lap q+ = div(v*)/dt with Neumann pressure and mean(q+) = 0,
//!         solved directly in the cosine basis,
//!   (iii) v+ = v* - dt grad q+.
//!
//! The viscous operator is assembled as the exact variational derivative of
//! sum 2 eta (s_xx^2 + s_yy^2) + eta_corner s_xy^2 over cells and corners, so
//! it is symmetric negative semidefinite by construction; the tangential
//! no-slip ghosts (reflected values) show up as factor-2 wall weights in the
//! adjoint scatter.

use crate::error::NschError;
use crate::grid::{BcKind, Grid2D, MacVelocity, ScalarField};
use crate::linsolve::{pcg, KrylovStats};
use crate::ops::{gradient_cc_to_face, interpolate_cc_to_face};
use crate::params::{psi_eval, ModelParams};
use crate::spectral::{CellSpectral, MacSpectral};

/// Capillary force (mu + chi sigma) grad phi on faces.
pub fn korteweg_force(
    mu: &ScalarField,
    sigma: &ScalarField,
    phi: &ScalarField,
    chi: f64,
) -> MacVelocity {
    let mut w = mu.clone();
    w.axpy(chi, sigma);
    let w_face = interpolate_cc_to_face(&w);
    let mut force = gradient_cc_to_face(phi);
    for (f, c) in force.u.iter_mut().zip(w_face.u.iter()) {
        *f *= c;
    }
    for (f, c) in force.v.iter_mut().zip(w_face.v.iter()) {
        *f *= c;
    }
    force
}

/// Viscosity samples the viscous operator needs: 2 eta at cells and eta at
/// corners (4-cell averages, mirrored at walls, wrapped when periodic).
pub struct ViscousCoeffs {
    grid: Grid2D,
    pub two_eta_cell: Vec<f64>,
    pub eta_corner: Vec<f64>,
    pub eta_mean: f64,
}

impl ViscousCoeffs {
    pub fn new(phi: &ScalarField, p: &ModelParams) -> Self {
        let g = phi.grid;
        let s_max = p.potential.s_max;
        let eta_cell: Vec<f64> = phi
            .data
            .iter()
            .map(|&s| p.viscosity_eta.eval(s.clamp(-s_max, s_max)))
            .collect();
        let eta_mean = eta_cell.iter().sum::<f64>() / eta_cell.len() as f64;
        let (ncx, ncy) = corner_dims(&g);
        let mut eta_corner = vec![0.0; ncx * ncy];
        for cj in 0..ncy {
            for ci in 0..ncx {
                eta_corner[cj * ncx + ci] = match g.bc {
                    BcKind::NeumannNoSlip => {
                        // average over adjacent cells, clamped at the walls
                        let i0 = ci.saturating_sub(1).min(g.nx - 1);
                        let i1 = ci.min(g.nx - 1);
                        let j0 = cj.saturating_sub(1).min(g.ny - 1);
                        let j1 = cj.min(g.ny - 1);
                        0.25 * (eta_cell[j0 * g.nx + i0]
                            + eta_cell[j0 * g.nx + i1]
                            + eta_cell[j1 * g.nx + i0]
                            + eta_cell[j1 * g.nx + i1])
                    }
                    BcKind::Periodic => {
                        let im = (ci + g.nx - 1) % g.nx;
                        let jm = (cj + g.ny - 1) % g.ny;
                        0.25 * (eta_cell[jm * g.nx + im]
                            + eta_cell[jm * g.nx + ci]
                            + eta_cell[cj * g.nx + im]
                            + eta_cell[cj * g.nx + ci])
                    }
                };
            }
        }
        Self {
            grid: g,
            two_eta_cell: eta_cell.iter().map(|&e| 2.0 * e).collect(),
            eta_corner,
            eta_mean,
        }
    }
}

fn corner_dims(g: &Grid2D) -> (usize, usize) {
    match g.bc {
        BcKind::NeumannNoSlip => (g.nx + 1, g.ny + 1),
        BcKind::Periodic => (g.nx, g.ny),
    }
}

/// div(2 eta D w) on the MAC grid; symmetric negative semidefinite.
pub fn apply_viscous(w: &MacVelocity, coeffs: &ViscousCoeffs) -> MacVelocity {
    let g = coeffs.grid;
    let (nx, ny) = (g.nx, g.ny);
    let (hx, hy) = (g.hx, g.hy);
    let (nux, _nuy) = MacVelocity::u_dims(&g);
    let (nvx, _nvy) = MacVelocity::v_dims(&g);
    let (ncx, ncy) = corner_dims(&g);
    let periodic = g.bc == BcKind::Periodic;

    // cell strains weighted by 2 eta
    let mut t_xx = vec![0.0; nx * ny];
    let mut t_yy = vec![0.0; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let (ue, uw) = if periodic {
                (w.u[j * nux + (i + 1) % nx], w.u[j * nux + i])
            } else {
                (w.u[j * nux + i + 1], w.u[j * nux + i])
            };
            let (vn, vs) = if periodic {
                (w.v[((j + 1) % ny) * nvx + i], w.v[j * nvx + i])
            } else {
                (w.v[(j + 1) * nvx + i], w.v[j * nvx + i])
            };
            let c = coeffs.two_eta_cell[j * nx + i];
            t_xx[j * nx + i] = c * (ue - uw) / hx;
            t_yy[j * nx + i] = c * (vn - vs) / hy;
        }
    }

    // corner shear strain weighted by eta; ghosts reflect tangential values
    let mut t_xy = vec![0.0; ncx * ncy];
    for cj in 0..ncy {
        for ci in 0..ncx {
            let du_dy = if periodic {
                let jm = (cj + ny - 1) % ny;
                (w.u[cj * nux + ci] - w.u[jm * nux + ci]) / hy
            } else {
                let hi = if cj < ny {
                    w.u[cj * nux + ci]
                } else {
                    -w.u[(ny - 1) * nux + ci]
                };
                let lo = if cj > 0 {
                    w.u[(cj - 1) * nux + ci]
                } else {
                    -w.u[ci]
                };
                (hi - lo) / hy
            };
            let dv_dx = if periodic {
                let im = (ci + nx - 1) % nx;
                (w.v[cj * nvx + ci] - w.v[cj * nvx + im]) / hx
            } else {
                let hi = if ci < nx {
                    w.v[cj * nvx + ci]
                } else {
                    -w.v[cj * nvx + nx - 1]
                };
                let lo = if ci > 0 {
                    w.v[cj * nvx + ci - 1]
                } else {
                    -w.v[cj * nvx]
                };
                (hi - lo) / hx
            };
            t_xy[cj * ncx + ci] = coeffs.eta_corner[cj * ncx + ci] * (du_dy + dv_dx);
        }
    }

    // adjoint scatter
    let mut out = MacVelocity::zeros(&g);
    if periodic {
        for j in 0..ny {
            for i in 0..nx {
                let im = (i + nx - 1) % nx;
                let jp = (j + 1) % ny;
                out.u[j * nux + i] = (t_xx[j * nx + i] - t_xx[j * nx + im]) / hx
                    + (t_xy[jp * ncx + i] - t_xy[j * ncx + i]) / hy;
                let jm = (j + ny - 1) % ny;
                let ip = (i + 1) % nx;
                out.v[j * nvx + i] = (t_yy[j * nx + i] - t_yy[jm * nx + i]) / hy
                    + (t_xy[j * ncx + ip] - t_xy[j * ncx + i]) / hx;
            }
        }
    } else {
        for j in 0..ny {
            // u: interior faces only, walls stay pinned
            for i in 1..nx {
                let a = if j == 0 { 2.0 } else { 1.0 };
                let b = if j == ny - 1 { 2.0 } else { 1.0 };
                out.u[j * nux + i] = (t_xx[j * nx + i] - t_xx[j * nx + i - 1]) / hx
                    + (b * t_xy[(j + 1) * ncx + i] - a * t_xy[j * ncx + i]) / hy;
            }
        }
        for j in 1..ny {
            for i in 0..nx {
                let a = if i == 0 { 2.0 } else { 1.0 };
                let b = if i == nx - 1 { 2.0 } else { 1.0 };
                out.v[j * nvx + i] = (t_yy[j * nx + i] - t_yy[(j - 1) * nx + i]) / hy
                    + (b * t_xy[j * ncx + i + 1] - a * t_xy[j * ncx + i]) / hx;
            }
        }
    }
    out
}

/// Viscous dissipation 2 eta |D w|^2 integrated over the domain, evaluated
/// with the same cell/corner quadrature the operator derives from.
pub fn viscous_dissipation(w: &MacVelocity, coeffs: &ViscousCoeffs) -> f64 {
    let g = coeffs.grid;
    let (nx, ny) = (g.nx, g.ny);
    let (hx, hy) = (g.hx, g.hy);
    let (nux, _) = MacVelocity::u_dims(&g);
    let (nvx, _) = MacVelocity::v_dims(&g);
    let (ncx, ncy) = corner_dims(&g);
    let periodic = g.bc == BcKind::Periodic;
    let mut total = 0.0;
    for j in 0..ny {
        for i in 0..nx {
            let ue = if periodic {
                w.u[j * nux + (i + 1) % nx]
            } else {
                w.u[j * nux + i + 1]
            };
            let vn = if periodic {
                w.v[((j + 1) % ny) * nvx + i]
            } else {
                w.v[(j + 1) * nvx + i]
            };
            let sxx = (ue - w.u[j * nux + i]) / hx;
            let syy = (vn - w.v[j * nvx + i]) / hy;
            total += coeffs.two_eta_cell[j * nx + i] * (sxx * sxx + syy * syy);
        }
    }
    for cj in 0..ncy {
        for ci in 0..ncx {
            let du_dy = if periodic {
                let jm = (cj + ny - 1) % ny;
                (w.u[cj * nux + ci] - w.u[jm * nux + ci]) / hy
            } else {
                let hi = if cj < ny {
                    w.u[cj * nux + ci]
                } else {
                    -w.u[(ny - 1) * nux + ci]
                };
                let lo = if cj > 0 { w.u[(cj - 1) * nux + ci] } else { -w.u[ci] };
                (hi - lo) / hy
            };
            let dv_dx = if periodic {
                let im = (ci + nx - 1) % nx;
                (w.v[cj * nvx + ci] - w.v[cj * nvx + im]) / hx
            } else {
                let hi = if ci < nx {
                    w.v[cj * nvx + ci]
                } else {
                    -w.v[cj * nvx + nx - 1]
                };
                let lo = if ci > 0 { w.v[cj * nvx + ci - 1] } else { -w.v[cj * nvx] };
                (hi - lo) / hx
            };
            let sxy = du_dy + dv_dx;
            total += coeffs.eta_corner[cj * ncx + ci] * sxy * sxy;
        }
    }
    total * hx * hy
}

/// Conservative momentum advection div(w x adv) with centered two-point
/// averages; energy-neutral when adv is discretely divergence free.
pub fn advect_momentum(adv: &MacVelocity, w: &MacVelocity) -> MacVelocity {
    let g = w.grid;
    let (nx, ny) = (g.nx, g.ny);
    let (hx, hy) = (g.hx, g.hy);
    let (nux, _) = MacVelocity::u_dims(&g);
    let (nvx, _) = MacVelocity::v_dims(&g);
    let periodic = g.bc == BcKind::Periodic;
    let mut out = MacVelocity::zeros(&g);

    // u-momentum: east/west fluxes at cell centers, north/south at corners
    let uc = |arr: &[f64], c: usize, j: usize| -> f64 {
        // average of the two u faces of cell c in row j
        if periodic {
            0.5 * (arr[j * nux + c] + arr[j * nux + (c + 1) % nx])
        } else {
            0.5 * (arr[j * nux + c] + arr[j * nux + c + 1])
        }
    };
    for j in 0..ny {
        let irange = if periodic { 0..nx } else { 1..nx };
        for i in irange {
            // x part
            let (cw, ce) = if periodic {
                ((i + nx - 1) % nx, i)
            } else {
                (i - 1, i)
            };
            let fx_e = uc(&w.u, ce, j) * uc(&adv.u, ce, j);
            let fx_w = uc(&w.u, cw, j) * uc(&adv.u, cw, j);
            // y part: corner fluxes
            let corner = |jc: usize| -> f64 {
                if periodic {
                    let jm = (jc + ny - 1) % ny;
                    let im = (i + nx - 1) % nx;
                    let u_c = 0.5 * (w.u[jm * nux + i] + w.u[jc * nux + i]);
                    let v_c = 0.5 * (adv.v[jc * nvx + im] + adv.v[jc * nvx + i]);
                    u_c * v_c
                } else if jc == 0 || jc == ny {
                    0.0 // wall corners carry zero flux
                } else {
                    let u_c = 0.5 * (w.u[(jc - 1) * nux + i] + w.u[jc * nux + i]);
                    let v_c = 0.5 * (adv.v[jc * nvx + i - 1] + adv.v[jc * nvx + i]);
                    u_c * v_c
                }
            };
            let (fy_n, fy_s) = if periodic {
                (corner((j + 1) % ny), corner(j))
            } else {
                (corner(j + 1), corner(j))
            };
            out.u[j * nux + i] = (fx_e - fx_w) / hx + (fy_n - fy_s) / hy;
        }
    }

    // v-momentum, mirrored
    let vc = |arr: &[f64], i: usize, c: usize| -> f64 {
        if periodic {
            0.5 * (arr[c * nvx + i] + arr[((c + 1) % ny) * nvx + i])
        } else {
            0.5 * (arr[c * nvx + i] + arr[(c + 1) * nvx + i])
        }
    };
    let jrange = if periodic { 0..ny } else { 1..ny };
    for j in jrange {
        for i in 0..nx {
            let (cs, cn) = if periodic {
                ((j + ny - 1) % ny, j)
            } else {
                (j - 1, j)
            };
            let fy_n = vc(&w.v, i, cn) * vc(&adv.v, i, cn);
            let fy_s = vc(&w.v, i, cs) * vc(&adv.v, i, cs);
            let corner = |ic: usize| -> f64 {
                if periodic {
                    let im = (ic + nx - 1) % nx;
                    let jm = (j + ny - 1) % ny;
                    let v_c = 0.5 * (w.v[j * nvx + im] + w.v[j * nvx + ic]);
                    let u_c = 0.5 * (adv.u[jm * nux + ic] + adv.u[j * nux + ic]);
                    v_c * u_c
                } else if ic == 0 || ic == nx {
                    0.0
                } else {
                    let v_c = 0.5 * (w.v[j * nvx + ic - 1] + w.v[j * nvx + ic]);
                    let u_c = 0.5 * (adv.u[(j - 1) * nux + ic] + adv.u[j * nux + ic]);
                    v_c * u_c
                }
            };
            let (fx_e, fx_w) = if periodic {
                (corner((i + 1) % nx), corner(i))
            } else {
                (corner(i + 1), corner(i))
            };
            out.v[j * nvx + i] = (fy_n - fy_s) / hy + (fx_e - fx_w) / hx;
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct NsStepResult {
    pub v: MacVelocity,
    pub q: ScalarField,
    pub stats: KrylovStats,
    pub div_max: f64,
}

pub struct NsSolver {
    mac: MacSpectral,
    cell: CellSpectral,
}

impl NsSolver {
    pub fn new(grid: &Grid2D) -> Self {
        Self {
            mac: MacSpectral::new(grid),
            cell: CellSpectral::new(grid),
        }
    }

    /// One projection step. `extra_force` is an optional additional body
    /// force on faces (used by manufactured-solution studies).
    #[allow(clippy::too_many_arguments)]
    pub fn step(
        &self,
        v_n: &MacVelocity,
        phi_next: &ScalarField,
        mu_next: &ScalarField,
        sigma_next: &ScalarField,
        dt: f64,
        p: &ModelParams,
        krylov_tol: f64,
        krylov_maxit: usize,
        extra_force: Option<&MacVelocity>,
    ) -> Result<NsStepResult, NschError> {
        let coeffs = ViscousCoeffs::new(phi_next, p);

        // rhs = v^n/dt - div(v^n x v^n) + F
        let mut rhs = advect_momentum(v_n, v_n);
        rhs.scale(-1.0);
        rhs.axpy(1.0 / dt, v_n);
        let force = korteweg_force(mu_next, sigma_next, phi_next, p.chi);
        rhs.axpy(1.0, &force);
        if let Some(f) = extra_force {
            rhs.axpy(1.0, f);
        }
        rhs.enforce_boundary();

        // implicit viscous solve for v*
        let apply = |w: &MacVelocity| {
            let mut out = apply_viscous(w, &coeffs);
            out.scale(-1.0);
            out.axpy(1.0 / dt, w);
            out.enforce_boundary();
            out
        };
        let eta_bar = coeffs.eta_mean;
        let precond = |r: &MacVelocity| self.mac.solve_helmholtz(r, 1.0 / dt, eta_bar);
        let (mut v_star, stats, _) =
            pcg(apply, precond, &rhs, krylov_tol, krylov_maxit, "ns_step")?;
        v_star.enforce_boundary();

        // pressure Poisson: Lap q = div(v*)/dt, mean-zero q
        let mut div = crate::ops::divergence_face_to_cc(&v_star);
        div.scale(-1.0 / dt);
        let q = self.cell.solve_diag(&div, |s| s);

        // v+ = v* - dt grad q
        let gq = gradient_cc_to_face(&q);
        let mut v = v_star;
        v.axpy(-dt, &gq);
        v.enforce_boundary();

        if !v.is_finite() || !q.is_finite() {
            return Err(NschError::NanDetected("ns_step output".into()));
        }
        let div_max = crate::ops::divergence_face_to_cc(&v).max_abs();
        Ok(NsStepResult {
            v,
            q,
            stats,
            div_max,
        })
    }
}

/// A Psi(phi) + (B/2)|grad phi|^2 at cell centers: the shift between the
/// modified and the physical pressure. Face gradient squares are averaged
/// back to centers.
pub fn capillary_pressure_shift(phi: &ScalarField, p: &ModelParams) -> ScalarField {
    let g = phi.grid;
    let grad = gradient_cc_to_face(phi);
    let (nux, _) = MacVelocity::u_dims(&g);
    let (nvx, _) = MacVelocity::v_dims(&g);
    let periodic = g.bc == BcKind::Periodic;
    let mut out = ScalarField::zeros(&g);
    for j in 0..g.ny {
        for i in 0..g.nx {
            let gw = grad.u[j * nux + i];
            let ge = if periodic {
                grad.u[j * nux + (i + 1) % g.nx]
            } else {
                grad.u[j * nux + i + 1]
            };
            let gs = grad.v[j * nvx + i];
            let gn = if periodic {
                grad.v[((j + 1) % g.ny) * nvx + i]
            } else {
                grad.v[(j + 1) * nvx + i]
            };
            let grad_sq = 0.5 * (gw * gw + ge * ge) + 0.5 * (gs * gs + gn * gn);
            let (psi, _, _) = psi_eval(phi.at(i, j), &p.potential);
            *out.at_mut(i, j) = p.a * psi + 0.5 * p.b * grad_sq;
        }
    }
    out
}

/// p_phys = q - A Psi(phi) - (B/2)|grad phi|^2, mean-normalized to zero.
pub fn recover_physical_pressure(
    q: &ScalarField,
    phi: &ScalarField,
    p: &ModelParams,
) -> ScalarField {
    let shift = capillary_pressure_shift(phi, p);
    let mut out = q.clone();
    out.axpy(-1.0, &shift);
    let mean = out.mean();
    out.data.iter_mut().for_each(|v| *v -= mean);
    out
}
