//! Discrete differential operators on the staggered grid.
//!
//! The operators are built as an adjoint pair: `divergence_face_to_cc` is the
//! negative transpose of `gradient_cc_to_face` in the hx*hy-weighted inner
//! products, under both boundary modes. The cell Laplacian equals their
//! composition, so spectral Poisson solves and the stencil agree exactly.

use crate::grid::{BcKind, Grid2D, MacVelocity, ScalarField};

#[inline]
fn wrap_sub(i: usize, n: usize) -> usize {
    if i == 0 {
        n - 1
    } else {
        i - 1
    }
}

#[inline]
fn wrap_add(i: usize, n: usize) -> usize {
    if i + 1 == n {
        0
    } else {
        i + 1
    }
}

/// 5-point Laplacian with mirrored ghosts (Neumann) or wrap-around (periodic).
pub fn laplacian(f: &ScalarField) -> ScalarField {
    let g = f.grid;
    let (nx, ny) = (g.nx, g.ny);
    let (ax, ay) = (1.0 / (g.hx * g.hx), 1.0 / (g.hy * g.hy));
    let mut out = ScalarField::zeros(&g);
    for j in 0..ny {
        for i in 0..nx {
            let c = f.at(i, j);
            let (w, e, s, n) = match g.bc {
                BcKind::NeumannNoSlip => (
                    if i > 0 { f.at(i - 1, j) } else { c },
                    if i + 1 < nx { f.at(i + 1, j) } else { c },
                    if j > 0 { f.at(i, j - 1) } else { c },
                    if j + 1 < ny { f.at(i, j + 1) } else { c },
                ),
                BcKind::Periodic => (
                    f.at(wrap_sub(i, nx), j),
                    f.at(wrap_add(i, nx), j),
                    f.at(i, wrap_sub(j, ny)),
                    f.at(i, wrap_add(j, ny)),
                ),
            };
            *out.at_mut(i, j) = ax * (w - 2.0 * c + e) + ay * (s - 2.0 * c + n);
        }
    }
    out
}

/// Two-point face differences; Neumann boundary faces carry a zero normal
/// gradient.
pub fn gradient_cc_to_face(f: &ScalarField) -> MacVelocity {
    let g = f.grid;
    let mut out = MacVelocity::zeros(&g);
    let (nux, nuy) = MacVelocity::u_dims(&g);
    for j in 0..nuy {
        for i in 0..nux {
            let d = match g.bc {
                BcKind::NeumannNoSlip => {
                    if i == 0 || i == g.nx {
                        0.0
                    } else {
                        f.at(i, j) - f.at(i - 1, j)
                    }
                }
                BcKind::Periodic => f.at(i, j) - f.at(wrap_sub(i, g.nx), j),
            };
            out.u[j * nux + i] = d / g.hx;
        }
    }
    let (nvx, nvy) = MacVelocity::v_dims(&g);
    for j in 0..nvy {
        for i in 0..nvx {
            let d = match g.bc {
                BcKind::NeumannNoSlip => {
                    if j == 0 || j == g.ny {
                        0.0
                    } else {
                        f.at(i, j) - f.at(i, j - 1)
                    }
                }
                BcKind::Periodic => f.at(i, j) - f.at(i, wrap_sub(j, g.ny)),
            };
            out.v[j * nvx + i] = d / g.hy;
        }
    }
    out
}

/// Cell-centered divergence of a face field.
pub fn divergence_face_to_cc(w: &MacVelocity) -> ScalarField {
    let g = w.grid;
    let mut out = ScalarField::zeros(&g);
    let (nux, _) = MacVelocity::u_dims(&g);
    let (nvx, _) = MacVelocity::v_dims(&g);
    for j in 0..g.ny {
        for i in 0..g.nx {
            let (ue, uw, vn, vs) = match g.bc {
                BcKind::NeumannNoSlip => (
                    w.u[j * nux + i + 1],
                    w.u[j * nux + i],
                    w.v[(j + 1) * nvx + i],
                    w.v[j * nvx + i],
                ),
                BcKind::Periodic => (
                    w.u[j * nux + wrap_add(i, g.nx)],
                    w.u[j * nux + i],
                    w.v[wrap_add(j, g.ny) * nvx + i],
                    w.v[j * nvx + i],
                ),
            };
            *out.at_mut(i, j) = (ue - uw) / g.hx + (vn - vs) / g.hy;
        }
    }
    out
}

/// Arithmetic two-point average of a cell field onto faces. Neumann boundary
/// faces take the adjacent cell value (mirrored ghost); constants survive
/// exactly.
pub fn interpolate_cc_to_face(f: &ScalarField) -> MacVelocity {
    let g = f.grid;
    let mut out = MacVelocity::zeros(&g);
    let (nux, nuy) = MacVelocity::u_dims(&g);
    for j in 0..nuy {
        for i in 0..nux {
            out.u[j * nux + i] = match g.bc {
                BcKind::NeumannNoSlip => {
                    if i == 0 {
                        f.at(0, j)
                    } else if i == g.nx {
                        f.at(g.nx - 1, j)
                    } else {
                        0.5 * (f.at(i - 1, j) + f.at(i, j))
                    }
                }
                BcKind::Periodic => 0.5 * (f.at(wrap_sub(i, g.nx), j) + f.at(i, j)),
            };
        }
    }
    let (nvx, nvy) = MacVelocity::v_dims(&g);
    for j in 0..nvy {
        for i in 0..nvx {
            out.v[j * nvx + i] = match g.bc {
                BcKind::NeumannNoSlip => {
                    if j == 0 {
                        f.at(i, 0)
                    } else if j == g.ny {
                        f.at(i, g.ny - 1)
                    } else {
                        0.5 * (f.at(i, j - 1) + f.at(i, j))
                    }
                }
                BcKind::Periodic => 0.5 * (f.at(i, wrap_sub(j, g.ny)) + f.at(i, j)),
            };
        }
    }
    out
}

/// Average each face component back to cell centers.
pub fn face_to_cc(w: &MacVelocity) -> (ScalarField, ScalarField) {
    let g = w.grid;
    let mut uc = ScalarField::zeros(&g);
    let mut vc = ScalarField::zeros(&g);
    let (nux, _) = MacVelocity::u_dims(&g);
    let (nvx, _) = MacVelocity::v_dims(&g);
    for j in 0..g.ny {
        for i in 0..g.nx {
            let (ue, vn) = match g.bc {
                BcKind::NeumannNoSlip => (w.u[j * nux + i + 1], w.v[(j + 1) * nvx + i]),
                BcKind::Periodic => (
                    w.u[j * nux + wrap_add(i, g.nx)],
                    w.v[wrap_add(j, g.ny) * nvx + i],
                ),
            };
            *uc.at_mut(i, j) = 0.5 * (w.u[j * nux + i] + ue);
            *vc.at_mut(i, j) = 0.5 * (w.v[j * nvx + i] + vn);
        }
    }
    (uc, vc)
}

/// Conservative advection div(f w) with centered face interpolation of f.
///
/// For a discretely divergence-free w this is the advective form up to
/// f div w; its integral telescopes to zero under both boundary modes.
pub fn advect_scalar(w: &MacVelocity, f: &ScalarField) -> ScalarField {
    let fluxes = flux_of(w, f);
    divergence_face_to_cc(&fluxes)
}

/// Face fluxes f_face * w used by `advect_scalar`.
pub fn flux_of(w: &MacVelocity, f: &ScalarField) -> MacVelocity {
    let mut fw = interpolate_cc_to_face(f);
    for (a, b) in fw.u.iter_mut().zip(w.u.iter()) {
        *a *= b;
    }
    for (a, b) in fw.v.iter_mut().zip(w.v.iter()) {
        *a *= b;
    }
    fw
}

/// div(c grad f) with the coefficient already sampled on faces.
pub fn div_coeff_grad(coeff_face: &MacVelocity, f: &ScalarField) -> ScalarField {
    let mut grad = gradient_cc_to_face(f);
    for (a, b) in grad.u.iter_mut().zip(coeff_face.u.iter()) {
        *a *= b;
    }
    for (a, b) in grad.v.iter_mut().zip(coeff_face.v.iter()) {
        *a *= b;
    }
    divergence_face_to_cc(&grad)
}

/// hx*hy-weighted inner product of two cell fields.
pub fn dot_cc(a: &ScalarField, b: &ScalarField) -> f64 {
    a.data
        .iter()
        .zip(b.data.iter())
        .map(|(x, y)| x * y)
        .sum::<f64>()
        * a.grid.cell_area()
}

/// Weighted quadratic sum over faces: sum coeff * |w|^2 * hx * hy.
pub fn weighted_face_energy(coeff_face: &MacVelocity, w: &MacVelocity) -> f64 {
    let su: f64 = coeff_face
        .u
        .iter()
        .zip(w.u.iter())
        .map(|(c, x)| c * x * x)
        .sum();
    let sv: f64 = coeff_face
        .v
        .iter()
        .zip(w.v.iter())
        .map(|(c, x)| c * x * x)
        .sum();
    (su + sv) * w.grid.cell_area()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_field(g: &Grid2D, rng: &mut ChaCha8Rng) -> ScalarField {
        let mut f = ScalarField::zeros(g);
        for v in f.data.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        f
    }

    fn random_mac(g: &Grid2D, rng: &mut ChaCha8Rng) -> MacVelocity {
        let mut w = MacVelocity::zeros(g);
        for v in w.u.iter_mut().chain(w.v.iter_mut()) {
            *v = rng.gen_range(-1.0..1.0);
        }
        w.enforce_boundary();
        w
    }

    #[test]
    fn laplacian_of_constant_is_zero() {
        for bc in [BcKind::NeumannNoSlip, BcKind::Periodic] {
            let g = Grid2D::new(16, 12, 1.0, 1.5, bc).unwrap();
            let f = ScalarField::constant(&g, 4.2);
            assert!(laplacian(&f).max_abs() == 0.0);
        }
    }

    #[test]
    fn laplacian_neumann_eigenfunction() {
        // cos(pi x / Lx) is an exact eigenfunction of the discrete Neumann
        // Laplacian with eigenvalue -(2/hx^2)(1 - cos(pi hx / Lx)).
        let g = Grid2D::new(32, 8, 1.0, 1.0, BcKind::NeumannNoSlip).unwrap();
        let f = ScalarField::from_fn(&g, |x, _| (std::f64::consts::PI * x / g.lx).cos());
        let lam = -(2.0 / (g.hx * g.hx)) * (1.0 - (std::f64::consts::PI * g.hx / g.lx).cos());
        let lf = laplacian(&f);
        for (a, b) in lf.data.iter().zip(f.data.iter()) {
            assert!((a - lam * b).abs() < 1e-11, "{a} vs {}", lam * b);
        }
    }

    #[test]
    fn laplacian_periodic_quadratic_interior() {
        let g = Grid2D::new(32, 8, 1.0, 1.0, BcKind::Periodic).unwrap();
        let f = ScalarField::from_fn(&g, |x, _| x * x);
        let lf = laplacian(&f);
        // away from the wrap seam the stencil sees a clean parabola
        for j in 0..g.ny {
            for i in 2..g.nx - 2 {
                assert!((lf.at(i, j) - 2.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn gradient_linear_periodic_exact() {
        let g = Grid2D::new(16, 16, 1.0, 1.0, BcKind::Periodic).unwrap();
        let f = ScalarField::from_fn(&g, |x, _| 3.0 * x);
        let grad = gradient_cc_to_face(&f);
        // two-point differences are exact on linear data away from the seam
        let (nux, _) = MacVelocity::u_dims(&g);
        for j in 0..g.ny {
            for i in 1..g.nx {
                assert!((grad.u[j * nux + i] - 3.0).abs() < 1e-12);
            }
        }
        assert!(grad.v.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn gradient_neumann_boundary_faces_zero() {
        let g = Grid2D::new(16, 8, 1.0, 1.0, BcKind::NeumannNoSlip).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random_field(&g, &mut rng);
        let grad = gradient_cc_to_face(&f);
        for j in 0..g.ny {
            assert_eq!(grad.u_at(0, j), 0.0);
            assert_eq!(grad.u_at(g.nx, j), 0.0);
        }
        for i in 0..g.nx {
            assert_eq!(grad.v_at(i, 0), 0.0);
            assert_eq!(grad.v_at(i, g.ny), 0.0);
        }
    }

    #[test]
    fn summation_by_parts_duality() {
        // <div w, f> = -<w, grad f> to round-off under both boundary modes
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for bc in [BcKind::NeumannNoSlip, BcKind::Periodic] {
            let g = Grid2D::new(24, 16, 1.3, 0.9, bc).unwrap();
            for _ in 0..5 {
                let f = random_field(&g, &mut rng);
                let w = random_mac(&g, &mut rng);
                let lhs = dot_cc(&divergence_face_to_cc(&w), &f);
                let rhs = -w.dot(&gradient_cc_to_face(&f));
                let scale = w.norm_l2() * f.norm_l2() / g.cell_area().sqrt() + 1e-30;
                assert!(
                    (lhs - rhs).abs() <= 1e-12 * scale,
                    "bc {bc:?}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn div_grad_equals_laplacian() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for bc in [BcKind::NeumannNoSlip, BcKind::Periodic] {
            let g = Grid2D::new(16, 24, 2.0, 1.0, bc).unwrap();
            let f = random_field(&g, &mut rng);
            let a = divergence_face_to_cc(&gradient_cc_to_face(&f));
            let b = laplacian(&f);
            for (x, y) in a.data.iter().zip(b.data.iter()) {
                assert!((x - y).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn laplacian_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for bc in [BcKind::NeumannNoSlip, BcKind::Periodic] {
            let g = Grid2D::new(12, 10, 1.0, 1.0, bc).unwrap();
            let f = random_field(&g, &mut rng);
            let h = random_field(&g, &mut rng);
            let a = dot_cc(&laplacian(&f), &h);
            let b = dot_cc(&f, &laplacian(&h));
            assert!((a - b).abs() < 1e-11 * (a.abs() + b.abs() + 1.0));
        }
    }

    #[test]
    fn advection_zero_velocity() {
        let g = Grid2D::new(16, 16, 1.0, 1.0, BcKind::NeumannNoSlip).unwrap();
        let f = ScalarField::from_fn(&g, |x, y| x * y);
        let w = MacVelocity::zeros(&g);
        assert_eq!(advect_scalar(&w, &f).max_abs(), 0.0);
    }

    #[test]
    fn advection_integral_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for bc in [BcKind::NeumannNoSlip, BcKind::Periodic] {
            let g = Grid2D::new(20, 12, 1.0, 2.0, bc).unwrap();
            let f = random_field(&g, &mut rng);
            let w = random_mac(&g, &mut rng);
            let adv = advect_scalar(&w, &f);
            assert!(
                adv.integrate().abs() < 1e-12 * adv.max_abs().max(1.0),
                "bc {bc:?}"
            );
        }
    }

    #[test]
    fn interpolation_preserves_constants() {
        for bc in [BcKind::NeumannNoSlip, BcKind::Periodic] {
            let g = Grid2D::new(16, 8, 1.0, 1.0, bc).unwrap();
            let f = ScalarField::constant(&g, 2.5);
            let w = interpolate_cc_to_face(&f);
            assert!(w.u.iter().chain(w.v.iter()).all(|&v| (v - 2.5).abs() == 0.0));
        }
    }

    #[test]
    fn interpolation_roundtrip_second_order() {
        // cc -> face -> cc on a smooth field loses O(h^2)
        let mut errs = Vec::new();
        for n in [16usize, 32, 64] {
            let g = Grid2D::new(n, n, 1.0, 1.0, BcKind::Periodic).unwrap();
            let f = ScalarField::from_fn(&g, |x, y| {
                (2.0 * std::f64::consts::PI * x).sin() * (2.0 * std::f64::consts::PI * y).cos()
            });
            let w = interpolate_cc_to_face(&f);
            let (uc, vc) = face_to_cc(&w);
            let mut err = 0.0_f64;
            for (a, b) in uc.data.iter().zip(f.data.iter()) {
                err = err.max((a - b).abs());
            }
            for (a, b) in vc.data.iter().zip(f.data.iter()) {
                err = err.max((a - b).abs());
            }
            errs.push(err);
        }
        let slope1 = (errs[0] / errs[1]).log2();
        let slope2 = (errs[1] / errs[2]).log2();
        assert!(slope1 > 1.8 && slope2 > 1.8, "slopes {slope1} {slope2}");
    }

    #[test]
    fn laplacian_refinement_second_order() {
        let mut errs = Vec::new();
        for n in [16usize, 32, 64] {
            let g = Grid2D::new(n, n, 1.0, 1.0, BcKind::NeumannNoSlip).unwrap();
            let k = std::f64::consts::PI / g.lx;
            let f = ScalarField::from_fn(&g, |x, y| (k * x).cos() * (k * y).cos());
            let exact = f.map(|v| -2.0 * k * k * v);
            let lf = laplacian(&f);
            let mut err = 0.0_f64;
            for (i, (a, b)) in lf.data.iter().zip(exact.data.iter()).enumerate() {
                let _ = i;
                err = err.max((a - b).abs());
            }
            errs.push(err);
        }
        let slope = (errs[1] / errs[2]).log2();
        assert!(slope > 1.8 && slope < 2.2, "slope {slope}");
    }
}
