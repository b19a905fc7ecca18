//! The majorizing scalar sequence `t_{k+1} = t_k - h(t_k) / h'_0(t_k)` and its rate checks.

use mgn::majorant::certify_lipschitz;
use mgn::scalar;

fn main() {
    for (beta, label) in [(0.25, "simple zero"), (0.5, "double zero")] {
        let cert = certify_lipschitz(beta, 1.0, 0.0, f64::INFINITY).unwrap();
        let trace = scalar::run(&cert, scalar::DEFAULT_MAX_ITERS, scalar::DEFAULT_STOP_TOL);
        println!("beta={beta} ({label}), t*={}, {:?} after {} steps", cert.t_star, trace.status, trace.steps.len());
        for (k, t) in trace.ts.iter().enumerate().take(8) {
            println!("  t_{k} = {t:.16}  t* - t_k = {:.3e}", cert.t_star - t);
        }
        let rate = scalar::rate_check(&trace, &cert).unwrap();
        println!("  halving bound: {:?}", rate.linear.status);
        if let Some(q) = &rate.quadratic {
            println!("  quadratic bound (constant {:.4}): {:?}", rate.quadratic_constant.unwrap(), q.status);
        }
    }

    // lambda > 0: no rate is predicted, the sequence still increases to t*.
    let cert = certify_lipschitz(0.2, 1.0, 0.3, f64::INFINITY).unwrap();
    let trace = scalar::run(&cert, 2000, scalar::DEFAULT_STOP_TOL);
    println!("kappa=0.3: lambda={:.4}, {} steps to reach t*={:.12}", cert.lambda, trace.steps.len(), trace.last());
}
