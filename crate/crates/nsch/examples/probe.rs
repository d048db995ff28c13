// probe: periodic ns_step with pure-gradient force
use nsch::grid::*;
use nsch::ns::NsSolver;
use nsch::ops::gradient_cc_to_face;
use nsch::params::ModelParams;

fn main() {
    let g = Grid2D::new(24, 24, 1.0, 1.0, BcKind::Periodic).unwrap();
    let p = ModelParams::default_unit();
    let solver = NsSolver::new(&g);
    let psi = ScalarField::from_fn(&g, |x, y| (2.0*std::f64::consts::PI*x).sin() * (4.0*std::f64::consts::PI*y).cos());
    let force = gradient_cc_to_face(&psi);
    let v0 = MacVelocity::zeros(&g);
    let phi = ScalarField::constant(&g, 1.0);
    let mu = ScalarField::zeros(&g);
    let sigma = ScalarField::zeros(&g);
    let out = solver.step(&v0, &phi, &mu, &sigma, 1e-2, &p, 1e-13, 3000, Some(&force)).unwrap();
    println!("periodic residual velocity: {:.3e} (force max {:.3e})", out.v.max_abs(), force.max_abs());
}
