//! Smale specialization: `f(t) = t / (1 - gamma t) - 2t` on `[0, 1/gamma)`,
//! with `alpha = beta gamma`.

use crate::check::{first_failure, CheckResult};

use super::{
    domain_check, parameter_check, smaller_quadratic_root, Certificate, CertificateMode,
    MajorantModel, PredictedRate, Provenance, Refusal,
};

/// `3 - 2 sqrt(2)`.
pub const SMALE_ALPHA_THRESHOLD: f64 = 3.0 - 2.0 * std::f64::consts::SQRT_2;

// Products beta * gamma built from beta = threshold / gamma land within a few ulps.
const ALPHA_TOL: f64 = 4.0 * f64::EPSILON * SMALE_ALPHA_THRESHOLD;

fn certify_with(beta: f64, gamma: f64, kappa: f64, mode: CertificateMode) -> Result<Certificate, Refusal> {
    let mut checks = vec![parameter_check(
        beta > 0.0 && gamma > 0.0 && (0.0..1.0).contains(&kappa),
        format!("need beta > 0, gamma > 0, 0 <= kappa < 1 (beta = {beta}, gamma = {gamma}, kappa = {kappa})"),
    )];
    if first_failure(&checks).is_some() {
        return Err(Refusal::from_checks(checks));
    }
    checks.push(CheckResult::pass("h1").with_detail("f(0) = 0, f'(0) = -1 exactly"));
    checks.push(
        CheckResult::pass("h2").with_detail("f''(t) = 2 gamma / (1 - gamma t)^3 > 0 and increasing"),
    );

    let alpha = beta * gamma;
    let radius = 1.0 / gamma;
    let lambda = kappa;
    checks.push(
        CheckResult::upper("threshold", alpha, SMALE_ALPHA_THRESHOLD, ALPHA_TOL)
            .with_detail("alpha = beta gamma <= 3 - 2 sqrt(2)"),
    );
    if first_failure(&checks).is_some() {
        return Err(Refusal::from_checks(checks));
    }

    // h(t) (1 - gamma t) = (2 - k) gamma t^2 - (1 - k + alpha) t + beta.
    let b = 1.0 - kappa + alpha;
    let a = (2.0 - kappa) * gamma;
    let raw_disc = b * b - 4.0 * (2.0 - kappa) * alpha;
    let (t_star, disc) = match smaller_quadratic_root(a, b, beta) {
        Some(r) => r,
        None => {
            checks.push(
                CheckResult::fail("discriminant")
                    .with_measured(raw_disc)
                    .with_detail(format!(
                        "(1 - kappa + alpha)^2 - 4 (2 - kappa) alpha < 0 although alpha = {alpha} passes the alpha threshold"
                    )),
            );
            return Err(Refusal::from_checks(checks));
        }
    };
    checks.push(
        CheckResult::pass("discriminant")
            .with_measured(disc)
            .with_detail("(1 - kappa + alpha)^2 - 4 (2 - kappa) alpha >= 0"),
    );
    checks.push(domain_check(t_star, radius));
    if first_failure(&checks).is_some() {
        return Err(Refusal::from_checks(checks));
    }

    let model = MajorantModel::smale(gamma);
    let rate = if kappa != 0.0 {
        PredictedRate::None
    } else if alpha < SMALE_ALPHA_THRESHOLD && disc > 0.0 {
        let h_prime_0 = model.f_prime(t_star);
        PredictedRate::QQuadratic {
            constant: model.f_second_left(t_star) / (-2.0 * h_prime_0),
        }
    } else {
        PredictedRate::QLinear
    };

    Ok(Certificate {
        beta,
        kappa,
        lambda,
        radius,
        t_star,
        model,
        mode,
        checks,
        rate,
        provenance: Provenance::Asserted,
    })
}

/// Certificate with `lambda = kappa` and `R = 1/gamma`.
///
/// The discriminant is checked explicitly: for `kappa > 0` the alpha threshold
/// alone does not make it nonnegative.
pub fn certify_smale(beta: f64, gamma: f64, kappa: f64) -> Result<Certificate, Refusal> {
    certify_with(beta, gamma, kappa, CertificateMode::General)
}

/// Surjective-Jacobian certificate (`kappa = lambda = 0`).
pub fn certify_surjective_smale(beta: f64, gamma: f64) -> Result<Certificate, Refusal> {
    certify_with(beta, gamma, 0.0, CertificateMode::Surjective)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn boundary_double_root() {
        for gamma in [1.0, 2.5] {
            let cert = certify_smale(SMALE_ALPHA_THRESHOLD / gamma, gamma, 0.0).unwrap();
            let expected = (2.0 - std::f64::consts::SQRT_2) / (2.0 * gamma);
            assert_abs_diff_eq!(cert.t_star, expected, epsilon = 1e-12);
            assert_eq!(cert.rate, PredictedRate::QLinear);
        }
    }

    #[test]
    fn interior_point() {
        // Smaller root of 2 t^2 - 1.1 t + 0.1 = 0.
        let cert = certify_smale(0.1, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(cert.t_star, (1.1 - 0.41f64.sqrt()) / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cert.t_star, 0.114_921_9, epsilon = 1e-7);
        assert!(matches!(cert.rate, PredictedRate::QQuadratic { .. }));
        let scaled = certify_smale(0.1 / 4.0, 4.0, 0.0).unwrap();
        assert_abs_diff_eq!(scaled.t_star, cert.t_star / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn kappa_case() {
        let cert = certify_smale(0.05, 1.0, 0.5).unwrap();
        assert_abs_diff_eq!(cert.t_star, 0.5 / 3.0, epsilon = 1e-14);
        assert_eq!(cert.lambda, 0.5);
        assert_eq!(cert.rate, PredictedRate::None);
    }

    #[test]
    fn discriminant_gap_is_refused() {
        // 0.1716 would already exceed 3 - 2 sqrt(2) = 0.171573.
        let refusal = certify_smale(0.1715, 1.0, 0.5).unwrap_err();
        assert_eq!(refusal.failed_check, "discriminant");
        let threshold = refusal.checks.iter().find(|c| c.name == "threshold").unwrap();
        assert!(threshold.passed());
    }

    #[test]
    fn surjective_examples() {
        let cert = certify_surjective_smale(SMALE_ALPHA_THRESHOLD, 1.0).unwrap();
        assert_abs_diff_eq!(cert.t_star, (2.0 - std::f64::consts::SQRT_2) / 2.0, epsilon = 1e-12);
        assert_eq!(cert.rate, PredictedRate::QLinear);
        assert_eq!(cert.mode, CertificateMode::Surjective);

        let cert = certify_surjective_smale(0.1, 1.0).unwrap();
        assert_abs_diff_eq!(cert.t_star, 0.114_921_9, epsilon = 1e-7);
        assert!(matches!(cert.rate, PredictedRate::QQuadratic { .. }));

        let refusal = certify_surjective_smale(0.18, 1.0).unwrap_err();
        assert_eq!(refusal.failed_check, "threshold");
    }
}
