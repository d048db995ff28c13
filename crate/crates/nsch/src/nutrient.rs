//! Chemical-density step and the transport-mechanism flux split.
//!
//! sigma is advanced with implicit variable diffusion, explicit conservative
//! convection, the explicit active-transport cross term, and the reaction
//! source:
//!
//!   (sigma+ - sigma^n)/dt + div(sigma^n v^n)
//!       = div(n(phi+) grad sigma+) - chi div(n(phi+) grad phi+) + S^n
//!
//! which is the flux form div(n grad(sigma + chi(1-phi))) with n frozen at
//! the just-computed phi+. The implicit operator (1/dt) I - div(n grad .) is
//! an SPD M-matrix, so CG converges and the chi = 0 diffusion step obeys a
//! discrete maximum principle.

use crate::ch::{chemical_potential, coeff_on_faces};
use crate::error::NschError;
use crate::grid::{Grid2D, MacVelocity, ScalarField};
use crate::linsolve::{pcg, KrylovStats};
use crate::ops::{advect_scalar, div_coeff_grad, gradient_cc_to_face};
use crate::params::ModelParams;
use crate::spectral::CellSpectral;

#[derive(Debug, Clone)]
pub struct SigmaStepResult {
    pub sigma: ScalarField,
    pub stats: KrylovStats,
}

pub struct NutrientSolver {
    spectral: CellSpectral,
}

impl NutrientSolver {
    pub fn new(grid: &Grid2D) -> Self {
        Self {
            spectral: CellSpectral::new(grid),
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn step(
        &self,
        sigma_n: &ScalarField,
        phi_next: &ScalarField,
        v_n: &MacVelocity,
        s_n: &ScalarField,
        dt: f64,
        p: &ModelParams,
        krylov_tol: f64,
        krylov_maxit: usize,
    ) -> Result<SigmaStepResult, NschError> {
        let s_max = p.potential.s_max;
        let n_face = coeff_on_faces(&p.mobility_n, phi_next, s_max);
        let n_bar = phi_next
            .data
            .iter()
            .map(|&s| p.mobility_n.eval(s.clamp(-s_max, s_max)))
            .sum::<f64>()
            / phi_next.data.len() as f64;

        // rhs = sigma^n/dt - div(sigma^n v^n) - chi div(n grad phi+) + S^n
        let mut rhs = advect_scalar(v_n, sigma_n);
        rhs.scale(-1.0);
        rhs.axpy(1.0 / dt, sigma_n);
        if p.chi != 0.0 {
            let cross = div_coeff_grad(&n_face, phi_next);
            rhs.axpy(-p.chi, &cross);
        }
        rhs.axpy(1.0, s_n);

        let apply = |sg: &ScalarField| {
            let mut out = sg.clone();
            out.scale(1.0 / dt);
            let mut flux = div_coeff_grad(&n_face, sg);
            flux.scale(-1.0);
            out.axpy(1.0, &flux);
            out
        };
        let precond = |r: &ScalarField| self.spectral.solve_diag(r, |s| 1.0 / dt + n_bar * s);

        let (mut sigma, stats, resid) =
            pcg(apply, precond, &rhs, krylov_tol, krylov_maxit, "sigma_step")?;

        // constants are an exact eigenvector with eigenvalue 1/dt; cancel the
        // residual's mean mode so the discrete mass balance is exact
        let r_mean = resid.mean();
        for v in sigma.data.iter_mut() {
            *v += r_mean * dt;
        }

        if !sigma.is_finite() {
            return Err(NschError::NanDetected("sigma_step output".into()));
        }
        Ok(SigmaStepResult { sigma, stats })
    }
}

/// The four transport-mechanism fluxes as face fields:
/// q_phi = -m grad mu  =  m chi grad sigma  -  m grad(A Psi' - B Lap phi)
/// q_sigma = -n grad N_sigma  =  n chi grad phi  -  n grad sigma
#[derive(Debug, Clone)]
pub struct FluxDecomposition {
    pub q_phi_diffusive: MacVelocity,
    pub q_phi_chemotactic: MacVelocity,
    pub q_sigma_diffusive: MacVelocity,
    pub q_sigma_active: MacVelocity,
}

impl FluxDecomposition {
    /// Sum of the phi-flux parts; equals -m grad mu to round-off.
    pub fn q_phi_total(&self) -> MacVelocity {
        let mut t = self.q_phi_diffusive.clone();
        t.axpy(1.0, &self.q_phi_chemotactic);
        t
    }

    pub fn q_sigma_total(&self) -> MacVelocity {
        let mut t = self.q_sigma_diffusive.clone();
        t.axpy(1.0, &self.q_sigma_active);
        t
    }
}

pub fn flux_decomposition(
    phi: &ScalarField,
    mu: &ScalarField,
    sigma: &ScalarField,
    p: &ModelParams,
) -> FluxDecomposition {
    let s_max = p.potential.s_max;
    let m_face = coeff_on_faces(&p.mobility_m, phi, s_max);
    let n_face = coeff_on_faces(&p.mobility_n, phi, s_max);

    // mu + chi sigma = A Psi'(phi) - B Lap phi, the chi-free part of the flux
    let mut w = mu.clone();
    w.axpy(p.chi, sigma);

    let grad_w = gradient_cc_to_face(&w);
    let grad_sigma = gradient_cc_to_face(sigma);
    let grad_phi = gradient_cc_to_face(phi);

    let mut q_phi_diffusive = grad_w;
    scale_by_face(&mut q_phi_diffusive, &m_face, -1.0);
    let mut q_phi_chemotactic = grad_sigma.clone();
    scale_by_face(&mut q_phi_chemotactic, &m_face, p.chi);
    let mut q_sigma_diffusive = grad_sigma;
    scale_by_face(&mut q_sigma_diffusive, &n_face, -1.0);
    let mut q_sigma_active = grad_phi;
    scale_by_face(&mut q_sigma_active, &n_face, p.chi);

    FluxDecomposition {
        q_phi_diffusive,
        q_phi_chemotactic,
        q_sigma_diffusive,
        q_sigma_active,
    }
}

fn scale_by_face(w: &mut MacVelocity, coeff: &MacVelocity, factor: f64) {
    for (a, c) in w.u.iter_mut().zip(coeff.u.iter()) {
        *a *= factor * c;
    }
    for (a, c) in w.v.iter_mut().zip(coeff.v.iter()) {
        *a *= factor * c;
    }
}
