//! Preconditioned conjugate gradients over field-shaped vectors.
//!
//! Dot products are plain sequential sums so results are bit-reproducible;
//! the solver is generic over the two vector shapes used in the crate.

use crate::error::NschError;
use crate::grid::{MacVelocity, ScalarField};

/// Minimal vector interface for the Krylov loop.
pub trait KrylovVec: Clone {
    fn dot(&self, other: &Self) -> f64;
    fn axpy(&mut self, a: f64, x: &Self);
    fn scale(&mut self, a: f64);
    fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
    fn all_finite(&self) -> bool;
}

impl KrylovVec for ScalarField {
    fn dot(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    fn axpy(&mut self, a: f64, x: &Self) {
        ScalarField::axpy(self, a, x)
    }

    fn scale(&mut self, a: f64) {
        ScalarField::scale(self, a)
    }

    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl KrylovVec for MacVelocity {
    fn dot(&self, other: &Self) -> f64 {
        let su: f64 = self.u.iter().zip(&other.u).map(|(a, b)| a * b).sum();
        let sv: f64 = self.v.iter().zip(&other.v).map(|(a, b)| a * b).sum();
        su + sv
    }

    fn axpy(&mut self, a: f64, x: &Self) {
        MacVelocity::axpy(self, a, x)
    }

    fn scale(&mut self, a: f64) {
        MacVelocity::scale(self, a)
    }

    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct KrylovStats {
    pub iterations: usize,
    /// Final residual relative to the right-hand side norm.
    pub relative_residual: f64,
}

/// Solve A x = b for symmetric positive definite A from a zero initial guess.
/// Returns the solution, iteration stats, and the final residual vector
/// (callers use it for exact nullspace-mode corrections).
pub fn pcg<V: KrylovVec>(
    apply: impl Fn(&V) -> V,
    precond: impl Fn(&V) -> V,
    b: &V,
    tol: f64,
    maxit: usize,
    context: &str,
) -> Result<(V, KrylovStats, V), NschError> {
    let bnorm = b.norm();
    if bnorm == 0.0 || !bnorm.is_finite() {
        if !bnorm.is_finite() {
            return Err(NschError::NanDetected(format!("{context} right-hand side")));
        }
        let mut x = b.clone();
        x.scale(0.0);
        return Ok((x.clone(), KrylovStats::default(), x));
    }

    let mut x = b.clone();
    x.scale(0.0);
    let mut r = b.clone();
    let mut z = precond(&r);
    let mut p = z.clone();
    let mut rz = r.dot(&z);

    for it in 1..=maxit {
        let q = apply(&p);
        let pq = p.dot(&q);
        if !(pq > 0.0) || !pq.is_finite() {
            return Err(NschError::KrylovDiverged {
                context: format!("{context}: operator lost positive definiteness (p.Ap = {pq})"),
                residual: r.norm() / bnorm,
                iterations: it,
            });
        }
        let alpha = rz / pq;
        x.axpy(alpha, &p);
        r.axpy(-alpha, &q);
        let rel = r.norm() / bnorm;
        if !rel.is_finite() {
            return Err(NschError::NanDetected(format!("{context} residual")));
        }
        if rel <= tol {
            return Ok((
                x,
                KrylovStats {
                    iterations: it,
                    relative_residual: rel,
                },
                r,
            ));
        }
        z = precond(&r);
        let rz_new = r.dot(&z);
        let beta = rz_new / rz;
        rz = rz_new;
        let mut p_next = z.clone();
        p_next.axpy(beta, &p);
        p = p_next;
    }

    Err(NschError::KrylovDiverged {
        context: context.to_string(),
        residual: r.norm() / bnorm,
        iterations: maxit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{BcKind, Grid2D};
    use crate::ops::laplacian;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pcg_solves_shifted_laplacian() {
        let g = Grid2D::new(16, 16, 1.0, 1.0, BcKind::NeumannNoSlip).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut b = ScalarField::zeros(&g);
        for v in b.data.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        let apply = |x: &ScalarField| {
            let mut out = laplacian(x);
            out.scale(-0.1);
            out.axpy(1.0, x);
            out
        };
        let (x, stats, _) =
            pcg(apply, |r: &ScalarField| r.clone(), &b, 1e-12, 500, "test").unwrap();
        let mut resid = apply(&x);
        resid.axpy(-1.0, &b);
        assert!(resid.norm() <= 1e-11 * b.norm(), "stats {stats:?}");
    }

    #[test]
    fn pcg_zero_rhs_returns_zero() {
        let g = Grid2D::new(8, 8, 1.0, 1.0, BcKind::Periodic).unwrap();
        let b = ScalarField::zeros(&g);
        let (x, stats, _) = pcg(
            |x: &ScalarField| x.clone(),
            |r: &ScalarField| r.clone(),
            &b,
            1e-10,
            10,
            "test",
        )
        .unwrap();
        assert_eq!(stats.iterations, 0);
        assert!(x.max_abs() == 0.0);
    }

    #[test]
    fn pcg_reports_indefinite_operator() {
        let g = Grid2D::new(8, 8, 1.0, 1.0, BcKind::Periodic).unwrap();
        let b = ScalarField::constant(&g, 1.0);
        let res = pcg(
            |x: &ScalarField| {
                let mut out = x.clone();
                out.scale(-1.0);
                out
            },
            |r: &ScalarField| r.clone(),
            &b,
            1e-10,
            10,
            "indefinite",
        );
        assert!(matches!(res, Err(NschError::KrylovDiverged { .. })));
    }
}
