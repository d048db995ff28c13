//! Cahn-Hilliard step: advance (phi, mu) with explicit conservative
//! convection, variable mobility frozen at the old state, chemotaxis
//! coupling, and the mass-transfer source.
//!
//! The linearly-implicit stabilized splitting solves
//!
//!   (phi+ - phi^n)/dt + div(phi^n v^n) = div(m(phi^n) grad mu+) + Gamma^n
//!   mu+ = A [Psi'(phi^n) + S (phi+ - phi^n)] - B Lap phi+ - chi sigma^n
//!
//! as one coupled system. Writing C = A S I - B Lap (constant-coefficient,
//! SPD) and X = -div(m grad .), eliminating phi+ = C^{-1}(mu+ + b2) turns the
//! block system into G mu+ = rhs with G = (1/dt) C^{-1} + X, which is SPD, so
//! preconditioned CG applies; C^{-1} is a direct cosine-transform solve. With
//! constant mobility the preconditioner equals G and CG converges in one
//! iteration.

use crate::error::NschError;
use crate::grid::{Grid2D, MacVelocity, ScalarField};
use crate::linsolve::{pcg, KrylovStats};
use crate::ops::{advect_scalar, div_coeff_grad, interpolate_cc_to_face, laplacian};
use crate::params::{psi_eval, CoeffSpec, ModelParams};
use crate::spectral::CellSpectral;

/// Per-step solver settings for the (phi, mu) system.
#[derive(Debug, Clone, Copy)]
pub struct ChStepConfig {
    pub dt: f64,
    /// Stabilization constant; must dominate Psi'' on the working range.
    pub stabilization: f64,
    pub krylov_tol: f64,
    pub krylov_maxit: usize,
}

impl ChStepConfig {
    pub fn new(dt: f64, p: &ModelParams, krylov_tol: f64, krylov_maxit: usize) -> Self {
        Self {
            dt,
            stabilization: p.potential.stabilization,
            krylov_tol,
            krylov_maxit,
        }
    }
}

/// mu = A Psi'(phi) - B Lap phi - chi sigma with the discrete Laplacian.
pub fn chemical_potential(
    phi: &ScalarField,
    sigma: &ScalarField,
    p: &ModelParams,
) -> ScalarField {
    let mut mu = laplacian(phi);
    for ((m, &ph), &sg) in mu.data.iter_mut().zip(&phi.data).zip(&sigma.data) {
        let (_, dpsi, _) = psi_eval(ph, &p.potential);
        *m = p.a * dpsi - p.b * *m - p.chi * sg;
    }
    mu
}

/// Evaluate a clamped coefficient profile at phi (arguments clamped to the
/// certified working range) and average it onto faces.
pub fn coeff_on_faces(spec: &CoeffSpec, phi: &ScalarField, s_max: f64) -> MacVelocity {
    let at_cells = phi.map(|s| spec.eval(s.clamp(-s_max, s_max)));
    interpolate_cc_to_face(&at_cells)
}

#[derive(Debug, Clone)]
pub struct ChStepResult {
    pub phi: ScalarField,
    pub mu: ScalarField,
    pub stats: KrylovStats,
    /// Set when |phi^n| exceeded the certified working range; coefficient
    /// arguments were clamped.
    pub range_warning: bool,
}

/// Owns the transform plans for one grid.
pub struct ChSolver {
    spectral: CellSpectral,
}

impl ChSolver {
    pub fn new(grid: &Grid2D) -> Self {
        Self {
            spectral: CellSpectral::new(grid),
        }
    }

    pub fn step(
        &self,
        phi_n: &ScalarField,
        sigma_n: &ScalarField,
        v_n: &MacVelocity,
        gamma_n: &ScalarField,
        cfg: &ChStepConfig,
        p: &ModelParams,
    ) -> Result<ChStepResult, NschError> {
        let dt = cfg.dt;
        let a_s = p.a * cfg.stabilization;
        let s_max = p.potential.s_max;
        let range_warning = phi_n.max_abs() > s_max;

        let m_face = coeff_on_faces(&p.mobility_m, phi_n, s_max);
        let m_bar = phi_n
            .data
            .iter()
            .map(|&s| p.mobility_m.eval(s.clamp(-s_max, s_max)))
            .sum::<f64>()
            / phi_n.data.len() as f64;

        // b1 = phi^n/dt - div(phi^n v^n) + Gamma^n
        let mut b1 = advect_scalar(v_n, phi_n);
        b1.scale(-1.0);
        b1.axpy(1.0 / dt, phi_n);
        b1.axpy(1.0, gamma_n);

        // C phi+ - mu+ = b2 with b2 = -(A Psi'(phi^n) - A S phi^n - chi sigma^n)
        let mut b2 = ScalarField::zeros(&phi_n.grid);
        for ((o, &ph), &sg) in b2.data.iter_mut().zip(&phi_n.data).zip(&sigma_n.data) {
            let (_, dpsi, _) = psi_eval(ph, &p.potential);
            *o = -(p.a * dpsi - a_s * ph - p.chi * sg);
        }

        let c_inv = |f: &ScalarField| self.spectral.solve_diag(f, |s| a_s + p.b * s);

        // rhs = b1 - (1/dt) C^{-1} b2
        let mut rhs = c_inv(&b2);
        rhs.scale(-1.0 / dt);
        rhs.axpy(1.0, &b1);

        let apply = |mu: &ScalarField| {
            let mut out = c_inv(mu);
            out.scale(1.0 / dt);
            let mut flux = div_coeff_grad(&m_face, mu);
            flux.scale(-1.0);
            out.axpy(1.0, &flux);
            out
        };
        let precond = |r: &ScalarField| {
            self.spectral
                .solve_diag(r, |s| 1.0 / (dt * (a_s + p.b * s)) + m_bar * s)
        };

        let (mut mu, stats, resid) =
            pcg(apply, precond, &rhs, cfg.krylov_tol, cfg.krylov_maxit, "ch_step")?;

        // constants are an exact eigenvector of G with eigenvalue 1/(dt A S);
        // shifting mu by the residual's mean mode makes the discrete mass
        // balance exact
        let r_mean = resid.mean();
        for v in mu.data.iter_mut() {
            *v += r_mean * dt * a_s;
        }

        // phi+ = C^{-1}(mu+ + b2)
        let mut tmp = mu.clone();
        tmp.axpy(1.0, &b2);
        let phi = c_inv(&tmp);

        if !phi.is_finite() || !mu.is_finite() {
            return Err(NschError::NanDetected("ch_step output".into()));
        }
        Ok(ChStepResult {
            phi,
            mu,
            stats,
            range_warning,
        })
    }
}
