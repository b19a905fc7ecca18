//! Certified Gauss-Newton on `F(x) = |x|^2 - 1` from `(2, 0)`.
//!
//! The Jacobian is surjective, so `kappa = 0` and the run is audited against
//! the scalar sequence step by step.

use mgn::auto::{auto_certify, AutoOptions, ModelChoice};
use mgn::problems::{build, ProblemSpec};
use mgn::scalar;
use mgn::solver::{residual_contraction_check, solve, SolveOptions};

fn main() {
    let p = build(&ProblemSpec::builtin("circle")).unwrap();
    let auto = auto_certify(
        &p.problem,
        &p.x0,
        &ModelChoice::Lipschitz { l: None, radius: None },
        &AutoOptions::default(),
    )
    .unwrap();
    let cert = auto.outcome.unwrap();
    println!("beta={} L={:?} mode={:?} t*={}", cert.beta, auto.estimates.l.map(|l| l.value), cert.mode, cert.t_star);

    let r = solve(&p.problem, &p.x0, Some(&cert), &SolveOptions::default()).unwrap();
    let audit = r.audit.as_ref().unwrap();
    println!("status {:?} after {} steps", r.status, r.iterations());
    println!("{:>3} {:>22} {:>12} {:>12} {:>12}", "k", "x_k", "step", "bd margin", "|F|");
    for k in 0..r.iterates.len() {
        let x = &r.iterates[k];
        let step = r.step_norms.get(k).map_or(String::new(), |s| format!("{s:.3e}"));
        let bd = audit.bd.get(k).map_or(String::new(), |m| format!("{m:.3e}"));
        println!("{k:>3} {:>22} {step:>12} {bd:>12} {:>12.3e}", format!("({:.6}, {:.6})", x[0], x[1]), r.residual_norms[k]);
    }

    let trace = scalar::run(&cert, r.iterates.len() + 1, 0.0);
    let contraction = residual_contraction_check(&r, &trace, 1e-9).unwrap();
    println!("residual contraction: {:?}", contraction.result.status);
}
