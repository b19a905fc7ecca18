//! Certificates for the Lipschitz majorant `f(t) = L t^2 / 2 - t`.
//!
//! ```text
//! cargo run --example certify_lipschitz
//! ```

use mgn::majorant::{certify_lipschitz, delta_threshold};

fn main() {
    let cert = certify_lipschitz(0.25, 1.0, 0.0, f64::INFINITY).unwrap();
    println!("beta=0.25 L=1 kappa=0: t* = {:.15} (1 - sqrt(1/2) = {:.15})", cert.t_star, 1.0 - 0.5f64.sqrt());
    println!("predicted rate: {:?}", cert.rate);

    // With kappa > 0 the admissible beta L shrinks and lambda becomes positive.
    for kappa in [0.0, 0.2, 0.5] {
        let delta = delta_threshold(kappa);
        let cert = certify_lipschitz(0.9 * delta, 1.0, kappa, f64::INFINITY).unwrap();
        println!(
            "kappa={kappa}: Delta={delta:.6} lambda={:.6} t*={:.6}",
            cert.lambda, cert.t_star
        );
    }

    match certify_lipschitz(0.6, 1.0, 0.0, f64::INFINITY) {
        Ok(_) => unreachable!(),
        Err(refusal) => println!("beta=0.6: refused at '{}' ({})", refusal.failed_check, refusal.detail),
    }
}
