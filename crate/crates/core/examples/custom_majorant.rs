//! User-supplied majorants: a closure pair and a tabulated `f'`.

use mgn::majorant::{certify, CertificateMode, MajorantModel};
use mgn::scalar;

fn main() {
    // f(t) = e^t - 1 - 2t: f(0) = 0, f'(0) = -1, f' convex and increasing.
    let model = MajorantModel::custom("exp", |t: f64| t.exp_m1() - 2.0 * t, |t: f64| t.exp() - 2.0, 1.0);
    let cert = certify(&model, 0.1, 0.0, None, CertificateMode::General).unwrap();
    let trace = scalar::run(&cert, 100, 1e-13);
    println!("closure model: t*={:.12} in {} steps", cert.t_star, trace.steps.len());

    // Tabulating f'(t) = t - 1 recovers the Lipschitz model with L = 1.
    let ts: Vec<f64> = (0..=40).map(|i| i as f64 * 0.05).collect();
    let fps = ts.iter().map(|t| t - 1.0).collect();
    let table = MajorantModel::tabulated("table", ts, None, fps).unwrap();
    let cert = certify(&table, 0.25, 0.0, None, CertificateMode::General).unwrap();
    println!("tabulated model: t*={:.12} (1 - sqrt(1/2) = {:.12})", cert.t_star, 1.0 - 0.5f64.sqrt());

    let concave = MajorantModel::custom("concave", |t: f64| -t - t * t, |t: f64| -1.0 - 2.0 * t, 1.0);
    let refusal = certify(&concave, 0.1, 0.0, None, CertificateMode::General).unwrap_err();
    println!("concave f': refused at '{}'", refusal.failed_check);
}
