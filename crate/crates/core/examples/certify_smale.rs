//! Point-estimate certificates from `alpha = beta gamma`.

use mgn::majorant::{certify_smale, SMALE_ALPHA_THRESHOLD};

fn main() {
    let gamma = 2.0;
    println!("alpha threshold 3 - 2 sqrt(2) = {SMALE_ALPHA_THRESHOLD:.12}");

    for alpha in [0.05, 0.1, 0.15, SMALE_ALPHA_THRESHOLD] {
        let cert = certify_smale(alpha / gamma, gamma, 0.0).unwrap();
        println!("alpha={alpha:.6}: t*={:.12} R={:.3} rate={:?}", cert.t_star, cert.radius, cert.rate);
    }
    // At the threshold the zero is double and sits at (2 - sqrt(2)) / (2 gamma).
    println!("boundary closed form: {:.12}", (2.0 - 2f64.sqrt()) / (2.0 * gamma));

    let refusal = certify_smale(0.1716 / gamma, gamma, 0.0).unwrap_err();
    println!("alpha=0.1716: {}", refusal);
}
