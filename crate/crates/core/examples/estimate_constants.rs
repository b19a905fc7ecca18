//! Sampled lower bounds for L and kappa and the analytic gamma bound for each built-in.

use mgn::auto::DEFAULT_RADIUS_FACTOR;
use mgn::problems::{build, lipschitz_estimate, smale_gamma_estimate, ProblemSpec, BUILTIN_NAMES};
use mgn::solver::{kappa_estimate, stationarity};

fn main() {
    println!("{:<18} {:>10} {:>10} {:>10} {:>10}", "problem", "beta", "L", "kappa", "gamma");
    for name in BUILTIN_NAMES {
        let p = build(&ProblemSpec::builtin(name)).unwrap();
        let beta = stationarity(&p.problem, &p.x0).unwrap();
        let radius = DEFAULT_RADIUS_FACTOR * beta;
        let l = lipschitz_estimate(&p.problem, &p.x0, radius, 2000, 0).unwrap();
        let kappa = kappa_estimate(&p.problem, &p.x0, radius, 2000, 0).unwrap();
        let gamma = smale_gamma_estimate(&p.problem, &p.x0).unwrap();
        println!("{name:<18} {beta:>10.4} {l:>10.4} {:>10.2e} {gamma:>10.4}", kappa.value);
    }
}
