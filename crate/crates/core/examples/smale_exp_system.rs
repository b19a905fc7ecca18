//! Smale certificates from analytic derivative bounds on `(e^{x1} - 1, x1 + x2^2 - c)`.

use mgn::auto::{auto_certify, AutoOptions, ModelChoice};
use mgn::problems::{build, ProblemSpec};
use mgn::solver::{linearization_audit, solve, SolveOptions};

fn main() {
    for c in [0.0, 1.0] {
        let p = build(&ProblemSpec::builtin("exp_system").param("c", c)).unwrap();
        let auto = auto_certify(&p.problem, &p.x0, &ModelChoice::Smale { gamma: None }, &AutoOptions::default()).unwrap();
        let gamma = auto.estimates.gamma.unwrap().value;
        let beta = auto.estimates.beta.value;
        print!("c={c}: beta={beta:.4} gamma={gamma:.4} alpha={:.4} -> ", beta * gamma);
        match auto.outcome {
            Err(refusal) => println!("refused ({})", refusal.failed_check),
            Ok(cert) => {
                let r = solve(&p.problem, &p.x0, Some(&cert), &SolveOptions::default()).unwrap();
                let lemma = linearization_audit(&p.problem, &cert, &p.x0, 1000, 0, 1e-9).unwrap();
                let x = r.final_point();
                println!(
                    "t*={:.6}, {:?} at ({:.6}, {:.6}) in {} steps, {} lemma violations",
                    cert.t_star,
                    r.status,
                    x[0],
                    x[1],
                    r.iterations(),
                    lemma.violations
                );
            }
        }
    }
}
