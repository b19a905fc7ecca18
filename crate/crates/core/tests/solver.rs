use approx::assert_abs_diff_eq;
use mgn::auto::{auto_certify, AutoOptions, ModelChoice};
use mgn::linalg::{Matrix, Vector};
use mgn::majorant::{certify_lipschitz, certify_surjective_lipschitz};
use mgn::problems::{build, ProblemSpec};
use mgn::solver::*;

fn circle() -> (Problem, Vector) {
    let p = build(&ProblemSpec::builtin("circle")).unwrap();
    (p.problem, p.x0)
}

#[test]
fn uncertified_circle_lands_on_the_circle() {
    let (p, x0) = circle();
    let r = solve(&p, &x0, None, &SolveOptions::default()).unwrap();
    assert_eq!(r.status, SolveStatus::Stationary);
    assert_abs_diff_eq!(r.final_point().norm(), 1.0, epsilon = 1e-12);
    assert!(r.audit.is_none());
}

#[test]
fn certified_circle_matches_scalar_sequence() {
    let (p, x0) = circle();
    // beta = 3/4 and L = 1/2 give t* = 1, which is exactly ||x* - x0||.
    let cert = certify_surjective_lipschitz(0.75, 0.5, f64::INFINITY).unwrap();
    let r = solve(&p, &x0, Some(&cert), &SolveOptions::default()).unwrap();
    assert_eq!(r.status, SolveStatus::Stationary);
    let audit = r.audit.as_ref().unwrap();
    assert!(audit.bd.iter().all(|&m| m >= -1e-12));
    assert!(audit.violation.is_none());
    assert_abs_diff_eq!((r.final_point() - &x0).norm(), cert.t_star, epsilon = 1e-9);
}

#[test]
fn optimistic_constant_is_caught() {
    let (p, x0) = circle();
    let cert = certify_surjective_lipschitz(0.75, 0.05, f64::INFINITY).unwrap();
    let r = solve(&p, &x0, Some(&cert), &SolveOptions::default()).unwrap();
    assert_eq!(r.status, SolveStatus::AuditViolation);
    assert!(r.audit.unwrap().violation.is_some());
}

#[test]
fn wrong_beta_is_rejected() {
    let (p, x0) = circle();
    let cert = certify_lipschitz(0.5, 0.5, 0.0, f64::INFINITY).unwrap();
    let err = solve(&p, &x0, Some(&cert), &SolveOptions::default()).unwrap_err();
    assert!(matches!(err, SolveError::BetaMismatch { .. }));
}

#[test]
fn small_domain_stops_the_run() {
    let (p, x0) = circle();
    let opts = SolveOptions {
        domain_radius: Some(0.5),
        ..SolveOptions::default()
    };
    assert_eq!(solve(&p, &x0, None, &opts).unwrap().status, SolveStatus::LeftBall);
}

#[test]
fn zero_jacobian_is_an_error() {
    let (p, _) = circle();
    let err = solve(&p, &Vector::zeros(2), None, &SolveOptions::default()).unwrap_err();
    assert_eq!(err, SolveError::ZeroJacobian { index: 0 });
}

#[test]
fn finite_difference_problem_solves() {
    let p = Problem::with_fd_jacobian("shifted_circle", 2, 1, |x: &Vector| {
        Ok(Vector::from_element(1, (x[0] - 1.0).powi(2) + x[1] * x[1] - 4.0))
    });
    let r = solve(&p, &Vector::from_row_slice(&[4.0, 0.5]), None, &SolveOptions::default()).unwrap();
    assert_eq!(r.status, SolveStatus::Stationary);
    assert!(r.residual_norms.last().unwrap().abs() <= 1e-10);
}

#[test]
fn numerical_rank_drop_stops() {
    // x1 halves every step until 2 x1 falls below the rank tolerance.
    let p = Problem::new(
        "pinch",
        2,
        2,
        |x: &Vector| Ok(Vector::from_row_slice(&[x[0] * x[0], x[1]])),
        |x: &Vector| Ok(Matrix::from_row_slice(2, 2, &[2.0 * x[0], 0.0, 0.0, 1.0])),
    );
    let opts = SolveOptions {
        stationary_tol: Some(0.0),
        step_floor: 0.0,
        ..SolveOptions::default()
    };
    let r = solve(&p, &Vector::from_row_slice(&[1.0, 1.0]), None, &opts).unwrap();
    assert_eq!(r.status, SolveStatus::RankDrop);
    assert_eq!(*r.rank_history.first().unwrap(), 2);
    assert_eq!(*r.rank_history.last().unwrap(), 1);
}

#[test]
fn linearization_bound_holds_on_parabola() {
    let b = build(&ProblemSpec::builtin("parabola_residual")).unwrap();
    let auto = auto_certify(
        &b.problem,
        &b.x0,
        &ModelChoice::Lipschitz { l: None, radius: None },
        &AutoOptions::default(),
    )
    .unwrap();
    let cert = auto.outcome.unwrap();
    let a = linearization_audit(&b.problem, &cert, &b.x0, 500, 1, 1e-9).unwrap();
    assert_eq!(a.violations, 0);
    assert!(a.checked > 0);
    let far = Vector::from_element(1, b.x0[0] + 10.0 * cert.model.radius);
    let c = linearization_error_check(&b.problem, &cert, &b.x0, &b.x0, &far, 1e-9).unwrap();
    assert_eq!(c.status, mgn::CheckStatus::PremiseNotMet);
}
