//! The scalar comparison sequence `t_{k+1} = t_k - h_{beta,lambda}(t_k) / h'_{beta,0}(t_k)`
//! started at `t_0 = 0`, and checks of its convergence rate.

use serde::Serialize;
use thiserror::Error;

use crate::check::CheckResult;
use crate::majorant::{h_eval, AuxFunction, Certificate, MajorantError, PredictedRate};

pub const DEFAULT_STOP_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITERS: usize = 200;

/// Relative slack on the rate bounds, on top of the rounding budget.
pub const RATE_REL_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScalarError {
    #[error("t = {t} is outside the basin [0, {t_star})")]
    OutOfBasin { t: f64, t_star: f64 },
    #[error("iteration made no progress at t = {t}")]
    Stalled { t: f64 },
    #[error("n(t) = {next} fell below beta = {beta}")]
    BelowBeta { next: f64, beta: f64 },
    #[error("rate bounds only apply when lambda = 0 (lambda = {lambda})")]
    NotApplicable { lambda: f64 },
    #[error(transparent)]
    Majorant(#[from] MajorantError),
}

/// One step of the iteration map, clamped to `t_star` against rounding drift.
///
/// In exact arithmetic `t < n(t) < t_star` and `n(t) >= beta`.
pub fn next_t(aux: &AuxFunction, t_star: f64, t: f64) -> Result<f64, ScalarError> {
    if !(0.0..t_star).contains(&t) {
        return Err(ScalarError::OutOfBasin { t, t_star });
    }
    let v = h_eval(aux, t)?;
    if !(v.h_prime_0 < 0.0) {
        return Err(ScalarError::OutOfBasin { t, t_star });
    }
    let next = t - v.h / v.h_prime_0;
    if !(next > t) {
        return Err(ScalarError::Stalled { t });
    }
    if next < aux.beta * (1.0 - 4.0 * f64::EPSILON) {
        return Err(ScalarError::BelowBeta {
            next,
            beta: aux.beta,
        });
    }
    Ok(next.min(t_star))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceStatus {
    Converged,
    MaxIters,
    /// The map stopped making progress before reaching `stop_tol` (rounding floor near a double root).
    Stalled,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalarTrace {
    pub ts: Vec<f64>,
    pub hs: Vec<f64>,
    pub steps: Vec<f64>,
    pub t_star: f64,
    pub status: TraceStatus,
}

impl ScalarTrace {
    pub fn last(&self) -> f64 {
        *self.ts.last().expect("trace always holds t_0")
    }

    /// `t_k`, holding at `t_star` past the end of the computed sequence.
    pub fn t(&self, k: usize) -> f64 {
        self.ts.get(k).copied().unwrap_or(self.t_star)
    }
}

pub fn run(cert: &Certificate, max_iters: usize, stop_tol: f64) -> ScalarTrace {
    let aux = cert.aux();
    let t_star = cert.t_star;
    let mut ts = vec![0.0];
    let mut hs = vec![aux.h(0.0)];
    let mut steps = Vec::new();
    let mut status = TraceStatus::MaxIters;
    let mut t = 0.0;
    for _ in 0..=max_iters {
        if t_star - t <= stop_tol {
            status = TraceStatus::Converged;
            break;
        }
        if steps.len() == max_iters {
            break;
        }
        match next_t(&aux, t_star, t) {
            Ok(next) => {
                steps.push(next - t);
                ts.push(next);
                hs.push(aux.h(next));
                t = next;
            }
            Err(_) => {
                status = TraceStatus::Stalled;
                break;
            }
        }
    }
    ScalarTrace {
        ts,
        hs,
        steps,
        t_star,
        status,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RateStep {
    pub k: usize,
    pub gap: f64,
    pub next_gap: f64,
    pub linear_bound: f64,
    pub quadratic_bound: Option<f64>,
    pub slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateReport {
    pub linear: CheckResult,
    /// `None` when `h'_{beta,0}(t*) = 0` and only the linear bound is available.
    pub quadratic: Option<CheckResult>,
    pub quadratic_constant: Option<f64>,
    pub steps: Vec<RateStep>,
}

impl RateReport {
    pub fn all_passed(&self) -> bool {
        self.linear.passed() && self.quadratic.as_ref().is_none_or(|q| q.passed())
    }
}

/// Absolute rounding budget for `t* - n(t_k)`: the error in evaluating `h` at
/// `t_k` divided by `|h'_{beta,0}(t_k)|`, plus the representation error of `t*`.
fn rounding_budget(aux: &AuxFunction, t_star: f64, t: f64) -> f64 {
    let fp = aux.model.f_prime(t);
    let magnitude = aux.beta + aux.lambda * t + aux.model.f(t).abs() + 2.0 * t + fp.abs() * t;
    8.0 * f64::EPSILON * (t_star + magnitude / fp.abs().max(f64::MIN_POSITIVE))
}

/// Checks the Q-linear halving bound `t* - t_{k+1} <= (t* - t_k) / 2` on every
/// step, and the Q-quadratic bound with the certificate's constant when the
/// certificate predicts it.
pub fn rate_check(trace: &ScalarTrace, cert: &Certificate) -> Result<RateReport, ScalarError> {
    if cert.lambda != 0.0 {
        return Err(ScalarError::NotApplicable {
            lambda: cert.lambda,
        });
    }
    let constant = match cert.rate {
        PredictedRate::QQuadratic { constant } => Some(constant),
        _ => None,
    };
    let aux = cert.aux();
    let t_star = trace.t_star;
    let mut steps = Vec::new();
    let mut worst_linear = f64::INFINITY;
    let mut worst_quadratic = f64::INFINITY;
    let mut linear_ok = true;
    let mut quadratic_ok = true;
    for (k, pair) in trace.ts.windows(2).enumerate() {
        let gap = t_star - pair[0];
        let next_gap = t_star - pair[1];
        let slack = rounding_budget(&aux, t_star, pair[0]);
        let linear_bound = 0.5 * gap;
        let margin = linear_bound - next_gap;
        worst_linear = worst_linear.min(margin);
        linear_ok &= margin >= -(RATE_REL_TOL * linear_bound + slack);
        let quadratic_bound = constant.map(|c| c * gap * gap);
        if let Some(qb) = quadratic_bound {
            let qm = qb - next_gap;
            worst_quadratic = worst_quadratic.min(qm);
            quadratic_ok &= qm >= -(RATE_REL_TOL * qb + slack);
        }
        steps.push(RateStep {
            k,
            gap,
            next_gap,
            linear_bound,
            quadratic_bound,
            slack,
        });
    }
    let finish = |name: &str, ok: bool, worst: f64| {
        let c = if ok {
            CheckResult::pass(name)
        } else {
            CheckResult::fail(name)
        };
        if worst.is_finite() {
            c.with_measured(worst)
        } else {
            c
        }
    };
    Ok(RateReport {
        linear: finish("q_linear", linear_ok, worst_linear),
        quadratic: constant.map(|_| finish("q_quadratic", quadratic_ok, worst_quadratic)),
        quadratic_constant: constant,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorant::{certify_lipschitz, certify_surjective_lipschitz, MajorantModel};
    use approx::assert_abs_diff_eq;

    fn aux_quarter() -> (AuxFunction, f64) {
        let aux = AuxFunction::new(0.25, 0.0, MajorantModel::lipschitz(1.0, f64::INFINITY));
        (aux, 1.0 - 0.5f64.sqrt())
    }

    #[test]
    fn next_t_examples() {
        let (aux, t_star) = aux_quarter();
        assert_eq!(next_t(&aux, t_star, 0.0).unwrap(), 0.25);
        let t2 = next_t(&aux, t_star, 0.25).unwrap();
        assert_abs_diff_eq!(t2, 0.25 + 0.03125 / 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(t2, 0.291_666_7, epsilon = 1e-7);
        let t3 = next_t(&aux, t_star, t2).unwrap();
        assert_abs_diff_eq!(t3, 0.292_892_2, epsilon = 1e-7);
        assert!(matches!(
            next_t(&aux, t_star, t_star),
            Err(ScalarError::OutOfBasin { .. })
        ));
    }

    #[test]
    fn run_converges_to_closed_form() {
        let cert = certify_lipschitz(0.25, 1.0, 0.0, f64::INFINITY).unwrap();
        let trace = run(&cert, DEFAULT_MAX_ITERS, DEFAULT_STOP_TOL);
        assert_eq!(trace.status, TraceStatus::Converged);
        let expected = [0.0, 0.25, 0.291_666_7, 0.292_892_2, 0.292_893_2];
        for (t, e) in trace.ts.iter().zip(expected) {
            assert_abs_diff_eq!(*t, e, epsilon = 1e-7);
        }
        assert!((cert.t_star - trace.last()).abs() <= DEFAULT_STOP_TOL);
        assert!(trace.ts.windows(2).all(|w| w[1] > w[0]));
        assert!(trace.hs.iter().take(trace.hs.len() - 1).all(|&h| h > 0.0));
    }

    #[test]
    fn double_root_converges_linearly() {
        let cert = certify_surjective_lipschitz(0.5, 1.0, f64::INFINITY).unwrap();
        let trace = run(&cert, DEFAULT_MAX_ITERS, DEFAULT_STOP_TOL);
        assert!(trace.ts.windows(2).all(|w| w[1] > w[0]));
        // Gaps halve exactly for the double root.
        for w in trace.ts.windows(2).take(10) {
            assert_abs_diff_eq!((1.0 - w[1]) / (1.0 - w[0]), 0.5, epsilon = 1e-6);
        }
        let report = rate_check(&trace, &cert).unwrap();
        assert!(report.linear.passed());
        assert!(report.quadratic.is_none());
    }

    #[test]
    fn already_converged_trace_is_single_point() {
        let cert = certify_lipschitz(1e-14, 1.0, 0.0, f64::INFINITY).unwrap();
        let trace = run(&cert, DEFAULT_MAX_ITERS, DEFAULT_STOP_TOL);
        assert_eq!(trace.ts, vec![0.0]);
        assert_eq!(trace.status, TraceStatus::Converged);
    }

    #[test]
    fn rate_check_quadratic_case() {
        let cert = certify_lipschitz(0.25, 1.0, 0.0, f64::INFINITY).unwrap();
        let trace = run(&cert, DEFAULT_MAX_ITERS, DEFAULT_STOP_TOL);
        let report = rate_check(&trace, &cert).unwrap();
        assert!(report.all_passed(), "{report:?}");
        assert_abs_diff_eq!(report.quadratic_constant.unwrap(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn rate_check_not_applicable_with_lambda() {
        let cert = certify_lipschitz(0.15, 1.0, 0.5, f64::INFINITY).unwrap();
        let trace = run(&cert, DEFAULT_MAX_ITERS, DEFAULT_STOP_TOL);
        assert!(matches!(
            rate_check(&trace, &cert),
            Err(ScalarError::NotApplicable { .. })
        ));
    }
}
