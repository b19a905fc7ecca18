//! Certification from estimated constants.
//!
//! Missing constants (`L` or `gamma`, and `kappa` when `F'(x0)` is not
//! surjective) are estimated on a ball around `x0`; the resulting certificate
//! is marked [`Provenance::Empirical`] whenever any estimate was used.

use serde::Serialize;

use crate::linalg::{decompose, Vector, DEFAULT_RANK_TOL_FACTOR};
use crate::majorant::{
    certify, certify_lipschitz, certify_smale, certify_surjective_lipschitz, certify_surjective_smale,
    Certificate, CertificateMode, MajorantModel, Provenance, Refusal,
};
use crate::problems::{lipschitz_estimate, smale_gamma_estimate, ProblemError};
use crate::solver::{kappa_estimate, stationarity, Problem, SolveError};

/// The estimation ball is `B(x0, DEFAULT_RADIUS_FACTOR * beta)` unless given.
pub const DEFAULT_RADIUS_FACTOR: f64 = 3.0;
pub const DEFAULT_SAMPLES: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Asserted,
    Estimated,
    Derived,
    Measured,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sourced {
    pub value: f64,
    pub source: Source,
}

impl Sourced {
    pub fn asserted(value: f64) -> Self {
        Self {
            value,
            source: Source::Asserted,
        }
    }

    pub fn estimated(value: f64) -> Self {
        Self {
            value,
            source: Source::Estimated,
        }
    }
}

/// Majorant family and whichever constants the caller already knows.
#[derive(Debug, Clone)]
pub enum ModelChoice {
    Lipschitz { l: Option<f64>, radius: Option<f64> },
    Smale { gamma: Option<f64> },
    /// A fixed model; only `kappa` may be estimated.
    Model(MajorantModel),
}

#[derive(Debug, Clone)]
pub struct AutoOptions {
    pub radius: Option<f64>,
    pub kappa: Option<f64>,
    pub samples: usize,
    pub seed: u64,
}

impl Default for AutoOptions {
    fn default() -> Self {
        Self {
            radius: None,
            kappa: None,
            samples: DEFAULT_SAMPLES,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Estimates {
    pub beta: Sourced,
    pub radius: f64,
    pub surjective: bool,
    pub rank: usize,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<Sourced>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Sourced>,
    pub kappa: Sourced,
}

impl Estimates {
    pub fn any_estimated(&self) -> bool {
        let sources = [Some(self.kappa), self.l, self.gamma];
        sources.iter().flatten().any(|s| s.source == Source::Estimated)
    }
}

#[derive(Debug, Clone)]
pub struct AutoCertification {
    pub estimates: Estimates,
    pub outcome: Result<Certificate, Refusal>,
}

pub fn auto_certify(
    problem: &Problem,
    x0: &Vector,
    choice: &ModelChoice,
    opts: &AutoOptions,
) -> Result<AutoCertification, ProblemError> {
    let beta = stationarity(problem, x0)?;
    let j0 = problem.jacobian(x0)?;
    let d0 = decompose(&j0, DEFAULT_RANK_TOL_FACTOR).map_err(SolveError::from)?;
    if d0.rank() == 0 {
        return Err(SolveError::ZeroJacobian { index: 0 }.into());
    }
    let surjective = d0.is_surjective();
    let radius = match choice {
        ModelChoice::Lipschitz { radius: Some(r), .. } => *r,
        _ => opts.radius.unwrap_or(DEFAULT_RADIUS_FACTOR * beta),
    };

    let kappa = match opts.kappa {
        Some(k) => Sourced::asserted(k),
        None if surjective => Sourced {
            value: 0.0,
            source: Source::Derived,
        },
        None if radius > 0.0 => {
            Sourced::estimated(kappa_estimate(problem, x0, radius, opts.samples, opts.seed)?.value)
        }
        None => Sourced::estimated(0.0),
    };
    // Surjective mode is only used when kappa is zero by construction or assertion.
    let surjective_mode = surjective && kappa.value == 0.0;

    let mut estimates = Estimates {
        beta: Sourced {
            value: beta,
            source: Source::Measured,
        },
        radius,
        surjective,
        rank: d0.rank(),
        l: None,
        gamma: None,
        kappa,
    };

    if beta == 0.0 {
        let outcome = certify_lipschitz(beta, 1.0, kappa.value, f64::INFINITY);
        return Ok(AutoCertification { estimates, outcome });
    }

    let outcome = match choice {
        ModelChoice::Lipschitz { l, .. } => {
            let l = match l {
                Some(l) => Sourced::asserted(*l),
                None => Sourced::estimated(lipschitz_estimate(problem, x0, radius, opts.samples, opts.seed)?),
            };
            estimates.l = Some(l);
            if surjective_mode {
                certify_surjective_lipschitz(beta, l.value, radius)
            } else {
                certify_lipschitz(beta, l.value, kappa.value, radius)
            }
        }
        ModelChoice::Smale { gamma } => {
            let gamma = match gamma {
                Some(g) => Sourced::asserted(*g),
                None => Sourced::estimated(smale_gamma_estimate(problem, x0)?),
            };
            estimates.gamma = Some(gamma);
            if surjective_mode {
                certify_surjective_smale(beta, gamma.value)
            } else {
                certify_smale(beta, gamma.value, kappa.value)
            }
        }
        ModelChoice::Model(model) => {
            let mode = if surjective_mode {
                CertificateMode::Surjective
            } else {
                CertificateMode::General
            };
            certify(model, beta, kappa.value, None, mode)
        }
    };
    let provenance = if estimates.any_estimated() {
        Provenance::Empirical
    } else {
        Provenance::Asserted
    };
    Ok(AutoCertification {
        outcome: outcome.map(|c| c.with_provenance(provenance)),
        estimates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{build, ProblemSpec};
    use approx::assert_abs_diff_eq;

    #[test]
    fn circle_is_certified_in_surjective_mode() {
        let p = build(&ProblemSpec::builtin("circle")).unwrap();
        let auto = auto_certify(
            &p.problem,
            &p.x0,
            &ModelChoice::Lipschitz { l: None, radius: None },
            &AutoOptions::default(),
        )
        .unwrap();
        assert!(auto.estimates.surjective);
        assert_eq!(auto.estimates.kappa.source, Source::Derived);
        let cert = auto.outcome.unwrap();
        assert_eq!(cert.mode, CertificateMode::Surjective);
        assert_eq!(cert.provenance, Provenance::Empirical);
        assert_abs_diff_eq!(cert.t_star, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn asserted_constants_stay_asserted() {
        let p = build(&ProblemSpec::builtin("scalar_quadratic").param("c", 1.5)).unwrap();
        let auto = auto_certify(
            &p.problem,
            &p.x0,
            &ModelChoice::Lipschitz { l: Some(1.0), radius: Some(1.0) },
            &AutoOptions::default(),
        )
        .unwrap();
        let cert = auto.outcome.unwrap();
        assert_eq!(cert.provenance, Provenance::Asserted);
        assert_abs_diff_eq!(cert.t_star, 1.0 - 0.5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn parabola_gets_general_certificate() {
        let p = build(&ProblemSpec::builtin("parabola_residual")).unwrap();
        let auto = auto_certify(
            &p.problem,
            &p.x0,
            &ModelChoice::Lipschitz { l: None, radius: None },
            &AutoOptions::default(),
        )
        .unwrap();
        assert!(!auto.estimates.surjective);
        assert!(auto.estimates.kappa.value > 0.0 && auto.estimates.kappa.value < 1.0);
        let cert = auto.outcome.unwrap();
        assert_eq!(cert.mode, CertificateMode::General);
    }
}
