//! Physical parameters: the double-well potential, the chemical free energy,
//! coefficient profiles with hard bounds, and validation of the structural
//! assumptions the well-posedness theory needs (non-degenerate coefficients,
//! potential growth and coercivity, and the A > 2 chi^2 / C3 gate).

use crate::error::NschError;

/// Number of sample points used by the dense certification scans.
const SCAN_POINTS: usize = 20_001;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    Quartic,
    UserPolynomial,
}

/// Growth certificates for the potential: |Psi''| <= C0 (1+|s|^r),
/// |Psi'| <= C1 Psi + C2, Psi >= C3 s^2 - C4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthConstants {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub r: f64,
}

/// Double-well potential specification. `coefficients` are ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub coefficients: Vec<f64>,
    pub growth: GrowthConstants,
    /// Working range [-s_max, s_max] the certificates are sampled on.
    pub s_max: f64,
    /// Stabilization constant >= sup Psi'' over the working range.
    pub stabilization: f64,
}

impl PotentialSpec {
    /// The standard quartic double well Psi(s) = (s^2-1)^2 / 4.
    pub fn quartic() -> Self {
        Self::quartic_with_range(2.0)
    }

    pub fn quartic_with_range(s_max: f64) -> Self {
        let coefficients = vec![0.25, 0.0, -0.5, 0.0, 0.25];
        let c3 = 0.125;
        let c4 = compute_c4(&coefficients, c3, s_max);
        let stabilization = sup_psi_second(&coefficients, s_max);
        Self {
            kind: PotentialKind::Quartic,
            coefficients,
            // |Psi''| = |3s^2-1| <= 3(1+s^2); |Psi'| <= 4 Psi + 6 (certified
            // by the validation scan)
            growth: GrowthConstants {
                c0: 3.0,
                c1: 4.0,
                c2: 6.0,
                c3,
                c4,
                r: 2.0,
            },
            s_max,
            stabilization,
        }
    }

    /// A user polynomial; C4 and the stabilization bound are computed on the
    /// declared range, the remaining growth certificates by sampling.
    pub fn user_polynomial(coefficients: Vec<f64>, c3: f64, s_max: f64) -> Result<Self, NschError> {
        if coefficients.is_empty() {
            return Err(NschError::Config("potential has no coefficients".into()));
        }
        if !(c3 > 0.0) || !(s_max > 0.0) {
            return Err(NschError::Config(
                "potential C3 and s_max must be positive".into(),
            ));
        }
        let c4 = compute_c4(&coefficients, c3, s_max);
        let stabilization = sup_psi_second(&coefficients, s_max);
        let r = (coefficients.len().saturating_sub(3)).max(1) as f64;
        let mut c0 = 0.0_f64;
        let mut c2 = 0.0_f64;
        let c1 = 1.0;
        for k in 0..SCAN_POINTS {
            let s = -s_max + 2.0 * s_max * k as f64 / (SCAN_POINTS - 1) as f64;
            let (psi, dpsi, ddpsi) = eval_poly(&coefficients, s);
            c0 = c0.max(ddpsi.abs() / (1.0 + s.abs().powf(r)));
            c2 = c2.max(dpsi.abs() - c1 * psi);
        }
        Ok(Self {
            kind: PotentialKind::UserPolynomial,
            coefficients,
            growth: GrowthConstants {
                c0: c0 + 1e-12,
                c1,
                c2: c2.max(0.0) + 1e-12,
                c3,
                c4,
                r,
            },
            s_max,
            stabilization,
        })
    }
}

/// Evaluate (Psi, Psi', Psi'') at s.
pub fn psi_eval(s: f64, spec: &PotentialSpec) -> (f64, f64, f64) {
    eval_poly(&spec.coefficients, s)
}

fn eval_poly(coeffs: &[f64], s: f64) -> (f64, f64, f64) {
    // Horner for the value and both derivatives in one sweep
    let mut p = 0.0;
    let mut dp = 0.0;
    let mut ddp = 0.0;
    for &c in coeffs.iter().rev() {
        ddp = ddp * s + 2.0 * dp;
        dp = dp * s + p;
        p = p * s + c;
    }
    (p, dp, ddp)
}

/// One-time 1D minimization oracle for C4: the smallest constant with
/// Psi(s) >= C3 s^2 - C4 on [-s_max, s_max], padded by 1e-12 so the dense
/// certification scan cannot dip below zero through rounding.
fn compute_c4(coeffs: &[f64], c3: f64, s_max: f64) -> f64 {
    let f = |s: f64| eval_poly(coeffs, s).0 - c3 * s * s;
    let n = 4001;
    let mut best_s = -s_max;
    let mut best = f64::INFINITY;
    for k in 0..n {
        let s = -s_max + 2.0 * s_max * k as f64 / (n - 1) as f64;
        let v = f(s);
        if v < best {
            best = v;
            best_s = s;
        }
    }
    // golden-section refinement around the scan minimum
    let h = 2.0 * s_max / (n - 1) as f64;
    let (mut lo, mut hi) = ((best_s - h).max(-s_max), (best_s + h).min(s_max));
    let inv_phi = 0.618_033_988_749_894_9;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let min_val = best.min(f1).min(f2);
    (-min_val).max(0.0) + 1e-12
}

fn sup_psi_second(coeffs: &[f64], s_max: f64) -> f64 {
    let mut sup = f64::NEG_INFINITY;
    for k in 0..SCAN_POINTS {
        let s = -s_max + 2.0 * s_max * k as f64 / (SCAN_POINTS - 1) as f64;
        sup = sup.max(eval_poly(coeffs, s).2);
    }
    sup
}

/// Chemical free energy N(phi, sigma) = sigma^2/2 + chi sigma (1 - phi) and
/// its partial derivatives (N_phi, N_sigma).
pub fn chemical_free_energy(phi: f64, sigma: f64, chi: f64) -> (f64, f64, f64) {
    let n = 0.5 * sigma * sigma + chi * sigma * (1.0 - phi);
    let n_phi = -chi * sigma;
    let n_sigma = sigma + chi * (1.0 - phi);
    (n, n_phi, n_sigma)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffKind {
    Constant,
    ClampedPolynomial,
}

/// A mobility or viscosity profile, clamped into [lower, upper] after
/// polynomial evaluation so the non-degeneracy bounds hold by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSpec {
    pub kind: CoeffKind,
    pub lower: f64,
    pub upper: f64,
    pub coefficients: Vec<f64>,
}

impl CoeffSpec {
    pub fn constant(value: f64) -> Self {
        Self {
            kind: CoeffKind::Constant,
            lower: value,
            upper: value,
            coefficients: vec![value],
        }
    }

    pub fn clamped_poly(coefficients: Vec<f64>, lower: f64, upper: f64) -> Self {
        Self {
            kind: CoeffKind::ClampedPolynomial,
            lower,
            upper,
            coefficients,
        }
    }

    pub fn is_constant(&self) -> bool {
        match self.kind {
            CoeffKind::Constant => true,
            CoeffKind::ClampedPolynomial => self.lower == self.upper,
        }
    }

    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        match self.kind {
            CoeffKind::Constant => self.lower,
            CoeffKind::ClampedPolynomial => {
                let mut p = 0.0;
                for &c in self.coefficients.iter().rev() {
                    p = p * s + c;
                }
                p.clamp(self.lower, self.upper)
            }
        }
    }
}

/// All physical constants of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Energy coefficient multiplying Psi.
    pub a: f64,
    /// Gradient-energy coefficient.
    pub b: f64,
    /// Chemotaxis parameter.
    pub chi: f64,
    pub domain_size: (f64, f64),
    pub potential: PotentialSpec,
    pub mobility_m: CoeffSpec,
    pub mobility_n: CoeffSpec,
    pub viscosity_eta: CoeffSpec,
}

impl ModelParams {
    /// Unit constants on the unit square with the quartic well.
    pub fn default_unit() -> Self {
        Self {
            a: 1.0,
            b: 0.01,
            chi: 0.0,
            domain_size: (1.0, 1.0),
            potential: PotentialSpec::quartic(),
            mobility_m: CoeffSpec::constant(1.0),
            mobility_n: CoeffSpec::constant(1.0),
            viscosity_eta: CoeffSpec::constant(1.0),
        }
    }

    /// Interface-width scale sqrt(B/A); equals epsilon when (A, B) came from
    /// `epsilon_beta_map`.
    pub fn epsilon(&self) -> f64 {
        (self.b / self.a).sqrt()
    }

    pub fn psi(&self, s: f64) -> (f64, f64, f64) {
        psi_eval(s, &self.potential)
    }
}

/// Surface-tension scaling A = beta / epsilon, B = beta * epsilon.
pub fn epsilon_beta_map(beta: f64, epsilon: f64) -> Result<(f64, f64), NschError> {
    if !(beta > 0.0) || !(epsilon > 0.0) {
        return Err(NschError::Config(format!(
            "epsilon_beta_map needs beta > 0 and epsilon > 0, got beta={beta}, epsilon={epsilon}"
        )));
    }
    Ok((beta / epsilon, beta * epsilon))
}

/// Outcome of `validate_params`; empty `violations` means pass.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_error(&self) -> NschError {
        NschError::Validation(self.violations.join("\n"))
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.passed() {
            write!(f, "all structural assumptions hold")
        } else {
            for v in &self.violations {
                writeln!(f, "- {v}")?;
            }
            Ok(())
        }
    }
}

/// Check every structural assumption the analysis rests on. Violations are
/// reported with the offending values; simulation start is blocked on failure
/// unless the override flag is set.
pub fn validate_params(p: &ModelParams) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let bad = &mut rep.violations;

    if !(p.a > 0.0) {
        bad.push(format!("A must be positive, got {}", p.a));
    }
    if !(p.b > 0.0) {
        bad.push(format!("B must be positive, got {}", p.b));
    }
    if !(p.chi >= 0.0) {
        bad.push(format!("chi must be non-negative, got {}", p.chi));
    }
    if !(p.domain_size.0 > 0.0 && p.domain_size.1 > 0.0) {
        bad.push(format!(
            "domain size must be positive, got {:?}",
            p.domain_size
        ));
    }

    // coercivity gate A > 2 chi^2 / C3
    let c3 = p.potential.growth.c3;
    if c3 > 0.0 && p.chi > 0.0 {
        let needed = 2.0 * p.chi * p.chi / c3;
        if !(p.a > needed) {
            bad.push(format!(
                "coercivity A > 2 chi^2 / C3 violated: A = {}, requires A > {} (chi = {}, C3 = {})",
                p.a, needed, p.chi, c3
            ));
        }
    }
    if !(c3 > 0.0) {
        bad.push(format!("C3 must be positive, got {c3}"));
    }

    for (name, spec) in [
        ("mobility m", &p.mobility_m),
        ("mobility n", &p.mobility_n),
        ("viscosity eta", &p.viscosity_eta),
    ] {
        if !(spec.lower > 0.0) {
            bad.push(format!(
                "{name}: lower bound must be positive, got {}",
                spec.lower
            ));
        }
        if !(spec.lower <= spec.upper) {
            bad.push(format!(
                "{name}: bounds out of order, lower {} > upper {}",
                spec.lower, spec.upper
            ));
        }
    }

    // dense certification of the potential on the working range
    let pot = &p.potential;
    let g = pot.growth;
    let mut min_psi = f64::INFINITY;
    let mut min_coercive = f64::INFINITY;
    let mut max_ddpsi = f64::NEG_INFINITY;
    let mut growth0_ok = true;
    let mut growth1_ok = true;
    for k in 0..SCAN_POINTS {
        let s = -pot.s_max + 2.0 * pot.s_max * k as f64 / (SCAN_POINTS - 1) as f64;
        let (psi, dpsi, ddpsi) = eval_poly(&pot.coefficients, s);
        min_psi = min_psi.min(psi);
        min_coercive = min_coercive.min(psi - g.c3 * s * s + g.c4);
        max_ddpsi = max_ddpsi.max(ddpsi);
        if ddpsi.abs() > g.c0 * (1.0 + s.abs().powf(g.r)) {
            growth0_ok = false;
        }
        if dpsi.abs() > g.c1 * psi + g.c2 {
            growth1_ok = false;
        }
    }
    if min_psi < 0.0 {
        bad.push(format!(
            "potential is negative on the working range (min {} over [-{}, {}])",
            min_psi, pot.s_max, pot.s_max
        ));
    }
    if min_coercive < 0.0 {
        bad.push(format!(
            "coercivity certificate Psi >= C3 s^2 - C4 fails: min(Psi - C3 s^2 + C4) = {min_coercive}"
        ));
    }
    if pot.stabilization < max_ddpsi {
        bad.push(format!(
            "stabilization bound {} below sup Psi'' = {max_ddpsi} on the working range",
            pot.stabilization
        ));
    }
    if !growth0_ok {
        bad.push(format!(
            "growth certificate |Psi''| <= C0 (1+|s|^r) fails with C0 = {}, r = {}",
            g.c0, g.r
        ));
    }
    if !growth1_ok {
        bad.push(format!(
            "growth certificate |Psi'| <= C1 Psi + C2 fails with C1 = {}, C2 = {}",
            g.c1, g.c2
        ));
    }

    rep
}
