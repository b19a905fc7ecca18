//! Lipschitz specialization: `f(t) = L t^2 / 2 - t`.

use crate::check::{first_failure, CheckResult};

use super::{
    domain_check, parameter_check, smaller_quadratic_root, Certificate, CertificateMode,
    MajorantModel, PredictedRate, Provenance, Refusal,
};

/// Admissibility threshold on `beta L` for a given `kappa`:
/// `(1 - k)^2 / ((k^2 - k + 1) + sqrt(2k^2 - 2k + 1))`.
pub fn delta_threshold(kappa: f64) -> f64 {
    let k = kappa;
    (1.0 - k).powi(2) / ((k * k - k + 1.0) + (2.0 * k * k - 2.0 * k + 1.0).sqrt())
}

fn analytic_shape_checks() -> [CheckResult; 2] {
    [
        CheckResult::pass("h1").with_detail("f(0) = 0, f'(0) = -1 exactly"),
        CheckResult::pass("h2").with_detail("f'(t) = L t - 1 is affine and increasing"),
    ]
}

/// Closed-form certificate with `lambda = (1 - beta L) kappa`.
///
/// Requires `beta L <= Delta(kappa)`; the discriminant `(1 - lambda)^2 - 2 beta L`
/// and `t* < R` are checked separately.
pub fn certify_lipschitz(beta: f64, l: f64, kappa: f64, radius: f64) -> Result<Certificate, Refusal> {
    let mut checks = vec![parameter_check(
        beta > 0.0 && l > 0.0 && (0.0..1.0).contains(&kappa) && radius > 0.0,
        format!("need beta > 0, L > 0, 0 <= kappa < 1, R > 0 (beta = {beta}, L = {l}, kappa = {kappa}, R = {radius})"),
    )];
    if first_failure(&checks).is_some() {
        return Err(Refusal::from_checks(checks));
    }
    checks.extend(analytic_shape_checks());

    let beta_l = beta * l;
    let delta = delta_threshold(kappa);
    checks.push(
        CheckResult::upper("threshold", beta_l, delta, 0.0).with_detail("beta L <= Delta(kappa)"),
    );

    let lambda = (1.0 - beta_l) * kappa;
    let b = 1.0 - lambda;
    let root = smaller_quadratic_root(l / 2.0, b, beta);
    let raw_disc = b * b - 2.0 * beta_l;
    match root {
        Some((_, disc)) => checks.push(
            CheckResult::pass("discriminant")
                .with_measured(disc)
                .with_detail("(1 - lambda)^2 - 2 beta L >= 0"),
        ),
        None => checks.push(
            CheckResult::fail("discriminant")
                .with_measured(raw_disc)
                .with_detail("(1 - lambda)^2 - 2 beta L < 0"),
        ),
    }
    if first_failure(&checks).is_some() {
        return Err(Refusal::from_checks(checks));
    }
    let (t_star, disc) = root.expect("discriminant checked");
    checks.push(domain_check(t_star, radius));
    if first_failure(&checks).is_some() {
        return Err(Refusal::from_checks(checks));
    }

    // h'_{beta,lambda}(t*) = -sqrt(disc), so h'_{beta,0}(t*) = -lambda - sqrt(disc).
    let h_prime_0_star = -lambda - disc.sqrt();
    let rate = if lambda != 0.0 {
        PredictedRate::None
    } else if h_prime_0_star < 0.0 {
        PredictedRate::QQuadratic {
            constant: l / (-2.0 * h_prime_0_star),
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
        model: MajorantModel::lipschitz(l, radius),
        mode: CertificateMode::General,
        checks,
        rate,
        provenance: Provenance::Asserted,
    })
}

/// Surjective-Jacobian certificate: `kappa = lambda = 0`, `beta L <= 1/2`.
pub fn certify_surjective_lipschitz(beta: f64, l: f64, radius: f64) -> Result<Certificate, Refusal> {
    let mut checks = vec![parameter_check(
        beta > 0.0 && l > 0.0 && radius > 0.0,
        format!("need beta > 0, L > 0, R > 0 (beta = {beta}, L = {l}, R = {radius})"),
    )];
    if first_failure(&checks).is_some() {
        return Err(Refusal::from_checks(checks));
    }
    checks.extend(analytic_shape_checks());
    let beta_l = beta * l;
    checks.push(CheckResult::upper("threshold", beta_l, 0.5, 0.0).with_detail("beta L <= 1/2"));
    if first_failure(&checks).is_some() {
        return Err(Refusal::from_checks(checks));
    }
    let (t_star, disc) = match smaller_quadratic_root(l / 2.0, 1.0, beta) {
        Some(r) => r,
        None => {
            checks.push(CheckResult::fail("discriminant").with_detail("1 - 2 beta L < 0"));
            return Err(Refusal::from_checks(checks));
        }
    };
    checks.push(CheckResult::pass("discriminant").with_measured(disc));
    checks.push(domain_check(t_star, radius));
    if first_failure(&checks).is_some() {
        return Err(Refusal::from_checks(checks));
    }

    let rate = if beta_l < 0.5 && disc > 0.0 {
        PredictedRate::QQuadratic {
            constant: l / (2.0 * disc.sqrt()),
        }
    } else {
        PredictedRate::QLinear
    };

    Ok(Certificate {
        beta,
        kappa: 0.0,
        lambda: 0.0,
        radius,
        t_star,
        model: MajorantModel::lipschitz(l, radius),
        mode: CertificateMode::Surjective,
        checks,
        rate,
        provenance: Provenance::Asserted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn delta_examples() {
        assert_eq!(delta_threshold(0.0), 0.5);
        assert!(delta_threshold(1.0 - 1e-9) < 1e-17);
        assert_abs_diff_eq!(delta_threshold(0.5), 0.25 / (0.75 + 0.5f64.sqrt()), epsilon = 1e-16);
        assert_abs_diff_eq!(delta_threshold(0.5), 0.171_572_9, epsilon = 1e-7);
    }

    #[test]
    fn delta_is_decreasing() {
        let mut prev = delta_threshold(0.0);
        for i in 1..100 {
            let d = delta_threshold(i as f64 / 100.0);
            assert!(d < prev);
            prev = d;
        }
    }

    #[test]
    fn certify_quadratic_rate() {
        let cert = certify_lipschitz(0.25, 1.0, 0.0, f64::INFINITY).unwrap();
        let t_star = 1.0 - 0.5f64.sqrt();
        assert_eq!(cert.lambda, 0.0);
        assert_abs_diff_eq!(cert.t_star, t_star, epsilon = 1e-15);
        match cert.rate {
            PredictedRate::QQuadratic { constant } => {
                assert_abs_diff_eq!(constant, 1.0 / (2.0 * (1.0 - t_star)), epsilon = 1e-14);
                assert_abs_diff_eq!(constant, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-14);
            }
            other => panic!("expected quadratic rate, got {other:?}"),
        }
    }

    #[test]
    fn certify_refuses_above_threshold() {
        let refusal = certify_lipschitz(0.6, 1.0, 0.0, f64::INFINITY).unwrap_err();
        assert_eq!(refusal.failed_check, "threshold");
    }

    #[test]
    fn certify_with_kappa() {
        let cert = certify_lipschitz(0.15, 1.0, 0.5, f64::INFINITY).unwrap();
        assert_abs_diff_eq!(cert.lambda, 0.425, epsilon = 1e-15);
        assert_abs_diff_eq!(cert.t_star, 0.4, epsilon = 1e-15);
        assert_eq!(cert.rate, PredictedRate::None);
    }

    #[test]
    fn certify_refuses_outside_domain() {
        let refusal = certify_lipschitz(0.25, 1.0, 0.0, 0.2).unwrap_err();
        assert_eq!(refusal.failed_check, "domain");
    }

    #[test]
    fn surjective_examples() {
        let cert = certify_surjective_lipschitz(0.5, 1.0, f64::INFINITY).unwrap();
        assert_eq!(cert.t_star, 1.0);
        assert_eq!(cert.rate, PredictedRate::QLinear);

        let cert = certify_surjective_lipschitz(0.25, 1.0, f64::INFINITY).unwrap();
        assert_abs_diff_eq!(cert.t_star, 1.0 - 0.5f64.sqrt(), epsilon = 1e-15);
        assert!(matches!(cert.rate, PredictedRate::QQuadratic { .. }));
        assert_eq!(cert.mode, CertificateMode::Surjective);

        let refusal = certify_surjective_lipschitz(0.51, 1.0, f64::INFINITY).unwrap_err();
        assert_eq!(refusal.failed_check, "threshold");
    }

    #[test]
    fn threshold_boundary_is_certified() {
        for i in 0..20 {
            let kappa = i as f64 / 20.0;
            let beta = delta_threshold(kappa);
            let cert = certify_lipschitz(beta, 1.0, kappa, f64::INFINITY);
            assert!(cert.is_ok(), "kappa = {kappa}: {:?}", cert.err());
        }
    }
}
