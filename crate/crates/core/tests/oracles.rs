mod common;

use orlicz_eigen::solver::{lagrange_quotient, p2_eigenpair};
use orlicz_eigen::{solve_e, weak_residual, Mesh, SolveOptions, YoungFunction};

#[test]
fn shooting_agrees_with_closed_form() {
    for p in [1.5, 2.0, 3.0, 4.0] {
        let s = common::shooting_eigenvalue(p);
        let c = common::closed_form_eigenvalue(p);
        assert!((s - c).abs() < 1e-4 * c, "p={p}: shooting {s}, closed form {c}");
    }
    let pi2 = std::f64::consts::PI.powi(2);
    assert!((common::shooting_eigenvalue(2.0) - pi2).abs() < 1e-6 * pi2);
}

#[test]
fn lumped_weights_match_the_mesh() {
    let m = Mesh::interval(1.0, 50).unwrap();
    assert_eq!(m.weights(), common::lumped_weights(1.0, 50).as_slice());
}

#[test]
fn generalized_eigenpair_is_close_to_three_point_value() {
    let (mu, _) = common::generalized_p2_eigenpair(1.0, 200);
    let three = common::three_point_eigenvalue(200);
    assert!((mu - three).abs() < 1e-4 * three);
}

#[test]
fn inverse_iteration_agrees_with_the_oracle() {
    for cells in [40, 200] {
        let m = Mesh::interval(1.0, cells).unwrap();
        let (u, mu) = p2_eigenpair(&m).unwrap();
        let (mu_ref, u_ref) = common::generalized_p2_eigenpair(1.0, cells);
        assert!((mu - mu_ref).abs() < 1e-10 * mu_ref, "{mu} vs {mu_ref}");
        let scale = u_ref[cells / 2] / u[cells / 2];
        for (a, b) in u.iter().zip(&u_ref) {
            assert!((a * scale - b).abs() < 1e-7);
        }
    }
}

#[test]
fn p2_minimizer_solves_the_discrete_eigenproblem() {
    let m = Mesh::interval(1.0, 200).unwrap();
    let f = YoungFunction::power(2.0).unwrap();
    let r = solve_e(&f, &m, 1.0, &SolveOptions::default()).unwrap();
    let (mu_ref, u_ref) = common::generalized_p2_eigenpair(1.0, 200);
    assert!((r.lambda - mu_ref).abs() < 1e-8 * mu_ref);
    assert!((r.quotient() - mu_ref).abs() < 1e-8 * mu_ref);
    // The oracle's eigenvector, rescaled onto the constraint, is a critical point.
    assert!(weak_residual(&f, &u_ref, mu_ref, &m).unwrap() <= 1e-10);
    assert!((lagrange_quotient(&f, &u_ref, &m).unwrap() - mu_ref).abs() < 1e-10 * mu_ref);
}

#[test]
fn p3_quotient_matches_shooting() {
    let m = Mesh::interval(1.0, 200).unwrap();
    let r = solve_e(&YoungFunction::power(3.0).unwrap(), &m, 1.0, &SolveOptions::default()).unwrap();
    let reference = common::shooting_eigenvalue(3.0);
    assert!(r.converged);
    assert!((r.quotient() - reference).abs() < 2e-2 * reference, "{} vs {reference}", r.quotient());
}
