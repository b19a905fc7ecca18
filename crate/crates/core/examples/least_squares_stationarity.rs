//! A least-squares point that is not a zero: `F(x) = (x, a x^2 + b)`.

use mgn::problems::{build, ProblemSpec};
use mgn::solver::{solve, SolveOptions};

fn main() {
    let p = build(&ProblemSpec::builtin("parabola_residual")).unwrap();
    let r = solve(&p.problem, &p.x0, None, &SolveOptions::default()).unwrap();
    for k in 0..r.iterates.len() {
        println!(
            "k={k} x={:+.3e} |J^+ F|={:.3e} |F|={:.6}",
            r.iterates[k][0], r.stationarity[k], r.residual_norms[k]
        );
    }
    println!("{:?}: stationary, but |F| stays at b = {}", r.status, p.params["b"]);
}
