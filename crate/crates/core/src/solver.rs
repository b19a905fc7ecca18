//! The Gauss-Newton iteration `x_{k+1} = x_k - F'(x_k)^+ F(x_k)` and, when a
//! certificate is attached, an audit of every bound the convergence theorems
//! assert along the trajectory:
//!
//! - step majorization `||x_{k+1} - x_k|| <= t_{k+1} - t_k`
//! - quadratic step bound `||x_{k+1} - x_k|| <= (t_{k+1} - t_k) / (t_k - t_{k-1})^2 ||x_k - x_{k-1}||^2`
//! - containment `||x_k - x_0|| <= t_k`
//! - rank constancy inside `B(x_0, t*)`
//! - `||F'(x_k)^+|| <= -||F'(x_0)^+|| / h'_{beta,0}(t_k)`
//! - in surjective mode, contraction of `||F'(x_0)^+ F(x_k)||`
//!
//! A violated bound ends the run with [`SolveStatus::AuditViolation`]; it is
//! an answer about the supplied constants, not an error.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::check::{CheckResult, CheckStatus};
use crate::linalg::{decompose, DecomposedOperator, LinalgError, Matrix, Vector, DEFAULT_RANK_TOL_FACTOR};
use crate::majorant::{Certificate, CertificateMode};
use crate::sampling;
use crate::scalar::{self, ScalarTrace};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("evaluation failed: {0}")]
pub struct EvalError(pub String);

pub type ResidualFn = Arc<dyn Fn(&Vector) -> Result<Vector, EvalError> + Send + Sync>;
pub type JacobianFn = Arc<dyn Fn(&Vector) -> Result<Matrix, EvalError> + Send + Sync>;
/// Upper bound on `||F^{(n)}(x)||` (operator norm of the n-th derivative).
pub type DerivativeBoundFn = Arc<dyn Fn(&Vector, usize) -> f64 + Send + Sync>;

/// `F: R^n -> R^m` with its Jacobian.
#[derive(Clone)]
pub struct Problem {
    pub name: String,
    pub n: usize,
    pub m: usize,
    residual: ResidualFn,
    jacobian: JacobianFn,
    /// Radius of the ball around `x0` standing in for the domain.
    pub domain_radius: Option<f64>,
    derivative_bound: Option<DerivativeBoundFn>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("m", &self.m)
            .field("domain_radius", &self.domain_radius)
            .finish_non_exhaustive()
    }
}

impl Problem {
    pub fn new<R, J>(name: impl Into<String>, n: usize, m: usize, residual: R, jacobian: J) -> Self
    where
        R: Fn(&Vector) -> Result<Vector, EvalError> + Send + Sync + 'static,
        J: Fn(&Vector) -> Result<Matrix, EvalError> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            n,
            m,
            residual: Arc::new(residual),
            jacobian: Arc::new(jacobian),
            domain_radius: None,
            derivative_bound: None,
        }
    }

    /// Problem whose Jacobian is a central-difference approximation of `residual`.
    pub fn with_fd_jacobian<R>(name: impl Into<String>, n: usize, m: usize, residual: R) -> Self
    where
        R: Fn(&Vector) -> Result<Vector, EvalError> + Send + Sync + 'static,
    {
        let residual: ResidualFn = Arc::new(residual);
        let jacobian = crate::problems::fd_jacobian(residual.clone(), n, m);
        Self {
            name: name.into(),
            n,
            m,
            residual,
            jacobian,
            domain_radius: None,
            derivative_bound: None,
        }
    }

    pub fn with_domain_radius(mut self, radius: f64) -> Self {
        self.domain_radius = Some(radius);
        self
    }

    pub fn with_derivative_bound<D>(mut self, bound: D) -> Self
    where
        D: Fn(&Vector, usize) -> f64 + Send + Sync + 'static,
    {
        self.derivative_bound = Some(Arc::new(bound));
        self
    }

    pub fn residual_fn(&self) -> ResidualFn {
        self.residual.clone()
    }

    pub fn derivative_bound(&self, x: &Vector, order: usize) -> Option<f64> {
        self.derivative_bound.as_ref().map(|b| b(x, order))
    }

    pub fn residual(&self, x: &Vector) -> Result<Vector, EvalError> {
        self.check_input(x)?;
        let f = (self.residual)(x)?;
        if f.len() != self.m {
            return Err(EvalError(format!(
                "{}: residual has length {}, expected {}",
                self.name,
                f.len(),
                self.m
            )));
        }
        if !f.iter().all(|v| v.is_finite()) {
            return Err(EvalError(format!("{}: non-finite residual", self.name)));
        }
        Ok(f)
    }

    pub fn jacobian(&self, x: &Vector) -> Result<Matrix, EvalError> {
        self.check_input(x)?;
        let j = (self.jacobian)(x)?;
        if j.shape() != (self.m, self.n) {
            return Err(EvalError(format!(
                "{}: jacobian is {}x{}, expected {}x{}",
                self.name,
                j.nrows(),
                j.ncols(),
                self.m,
                self.n
            )));
        }
        if !j.iter().all(|v| v.is_finite()) {
            return Err(EvalError(format!("{}: non-finite jacobian", self.name)));
        }
        Ok(j)
    }

    fn check_input(&self, x: &Vector) -> Result<(), EvalError> {
        if x.len() != self.n {
            return Err(EvalError(format!(
                "{}: point has dimension {}, expected {}",
                self.name,
                x.len(),
                self.n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("F'(x) vanishes at iterate {index}")]
    ZeroJacobian { index: usize },
    #[error(transparent)]
    Evaluation(#[from] EvalError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("certificate beta {certified} does not match computed beta {computed}")]
    BetaMismatch { certified: f64, computed: f64 },
    #[error("check not applicable: {0}")]
    NotApplicable(String),
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub max_iters: usize,
    /// Defaults to `1e-12 * max(1, ||F(x0)||)`.
    pub stationary_tol: Option<f64>,
    pub step_floor: f64,
    pub rank_tol_factor: f64,
    pub audit_tol: f64,
    pub beta_rel_tol: f64,
    /// Overrides the problem's domain radius; with a certificate the default is `2 t*`.
    pub domain_radius: Option<f64>,
    /// Treat a failed quadratic step bound as a violation even when `lambda > 0`.
    /// Off by default: for `lambda > 0` the bound is not implied by the other
    /// hypotheses (see `parabola_residual`), so its margins are only recorded.
    pub enforce_quad_with_lambda: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iters: 100,
            stationary_tol: None,
            step_floor: 1e-15,
            rank_tol_factor: DEFAULT_RANK_TOL_FACTOR,
            audit_tol: 1e-9,
            beta_rel_tol: 1e-8,
            domain_radius: None,
            enforce_quad_with_lambda: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Stationary,
    MaxIters,
    LeftBall,
    RankDrop,
    AuditViolation,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Violation {
    pub kind: String,
    pub index: usize,
    pub margin: f64,
}

/// Per-step margins against the scalar sequence; nonnegative means the bound held.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Audit {
    pub ts: Vec<f64>,
    /// `(t_{k+1} - t_k) - ||x_{k+1} - x_k||`, one entry per step.
    pub bd: Vec<f64>,
    /// Quadratic step bound margin per step; `None` for `k = 0` or a degenerate denominator.
    pub quad: Vec<Option<f64>>,
    /// Whether a negative `quad` margin counts as a violation.
    pub quad_enforced: bool,
    /// `t_k - ||x_k - x_0||`, one entry per iterate.
    pub containment: Vec<f64>,
    /// `-||F'(x0)^+|| / h'_{beta,0}(t_k) - ||F'(x_k)^+||` per iterate with `t_k < t*`.
    pub norm_bound: Vec<Option<f64>>,
    /// Residual contraction margin per iterate, surjective mode only.
    pub residual_contraction: Vec<Option<f64>>,
    pub rank_constant: bool,
    pub violation: Option<Violation>,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub beta: f64,
    pub iterates: Vec<Vector>,
    pub step_norms: Vec<f64>,
    /// `||F'(x_k)^+ F(x_k)||`.
    pub stationarity: Vec<f64>,
    pub residual_norms: Vec<f64>,
    /// `||F'(x_0)^+ F(x_k)||`.
    pub anchored_residuals: Vec<f64>,
    pub rank_history: Vec<usize>,
    pub status: SolveStatus,
    pub certificate_mode: Option<CertificateMode>,
    pub audit: Option<Audit>,
}

impl SolveReport {
    pub fn final_point(&self) -> &Vector {
        self.iterates.last().expect("report holds x0")
    }

    pub fn iterations(&self) -> usize {
        self.iterates.len() - 1
    }
}

#[derive(Debug, Clone)]
pub struct GnStep {
    pub x_next: Vector,
    pub step: Vector,
    pub rank: usize,
}

fn evaluate(problem: &Problem, x: &Vector, rank_tol_factor: f64) -> Result<(Vector, DecomposedOperator), SolveError> {
    let f = problem.residual(x)?;
    let j = problem.jacobian(x)?;
    Ok((f, decompose(&j, rank_tol_factor)?))
}

/// One Gauss-Newton step.
pub fn gn_step(problem: &Problem, x: &Vector, rank_tol_factor: f64) -> Result<GnStep, SolveError> {
    let (f, d) = evaluate(problem, x, rank_tol_factor)?;
    if d.rank() == 0 {
        return Err(SolveError::ZeroJacobian { index: 0 });
    }
    let step = d.apply_pinv(&f);
    Ok(GnStep {
        x_next: x - &step,
        step,
        rank: d.rank(),
    })
}

/// `||F'(x)^+ F(x)||`, zero exactly at least-squares stationary points.
pub fn stationarity(problem: &Problem, x: &Vector) -> Result<f64, SolveError> {
    let (f, d) = evaluate(problem, x, DEFAULT_RANK_TOL_FACTOR)?;
    Ok(d.apply_pinv(&f).norm())
}

/// `(t_{k+1} - t_k) / (t_k - t_{k-1}) * r_{k-1} - r_k` with `r_k = ||F'(x0)^+ F(x_k)||`.
fn contraction_margin(anchored: &[f64], trace: &ScalarTrace, k: usize) -> Option<f64> {
    if k == 0 || k >= anchored.len() {
        return None;
    }
    let dt_prev = trace.t(k) - trace.t(k - 1);
    if !(dt_prev > 0.0) {
        return None;
    }
    let ratio = (trace.t(k + 1) - trace.t(k)) / dt_prev;
    Some(ratio * anchored[k - 1] - anchored[k])
}

fn quad_margin(trace: &ScalarTrace, step_norms: &[f64], k: usize) -> Option<f64> {
    if k == 0 {
        return None;
    }
    let dt_prev = trace.t(k) - trace.t(k - 1);
    if !(dt_prev > 0.0) {
        return None;
    }
    let bound = (trace.t(k + 1) - trace.t(k)) / (dt_prev * dt_prev) * step_norms[k - 1].powi(2);
    Some(bound - step_norms[k])
}

/// Runs Gauss-Newton from `x0`, auditing against `cert` when given.
pub fn solve(
    problem: &Problem,
    x0: &Vector,
    cert: Option<&Certificate>,
    opts: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    let (f0, d0) = evaluate(problem, x0, opts.rank_tol_factor)?;
    if d0.rank() == 0 {
        return Err(SolveError::ZeroJacobian { index: 0 });
    }
    let rank0 = d0.rank();
    let j0_pinv = d0.pinv();
    let j0_pinv_norm = d0.pinv_norm();
    let mut step = d0.apply_pinv(&f0);
    let beta = step.norm();
    let stationary_tol = opts
        .stationary_tol
        .unwrap_or(1e-12 * f0.norm().max(1.0));

    let mut report = SolveReport {
        beta,
        iterates: Vec::new(),
        step_norms: Vec::new(),
        stationarity: Vec::new(),
        residual_norms: Vec::new(),
        anchored_residuals: Vec::new(),
        rank_history: Vec::new(),
        status: SolveStatus::MaxIters,
        certificate_mode: cert.map(|c| c.mode),
        audit: None,
    };

    if beta == 0.0 {
        report.iterates.push(x0.clone());
        report.stationarity.push(0.0);
        report.residual_norms.push(f0.norm());
        report.anchored_residuals.push((&j0_pinv * &f0).norm());
        report.rank_history.push(rank0);
        report.status = SolveStatus::Stationary;
        return Ok(report);
    }

    let trace = match cert {
        Some(c) => {
            if (c.beta - beta).abs() > opts.beta_rel_tol * beta {
                return Err(SolveError::BetaMismatch {
                    certified: c.beta,
                    computed: beta,
                });
            }
            Some(scalar::run(c, opts.max_iters + 2, 0.0))
        }
        None => None,
    };
    let mut audit = cert.map(|c| Audit {
        rank_constant: true,
        quad_enforced: c.lambda == 0.0 || opts.enforce_quad_with_lambda,
        ..Audit::default()
    });
    let domain_radius = opts
        .domain_radius
        .or(problem.domain_radius)
        .or(cert.map(|c| 2.0 * c.t_star))
        .unwrap_or(f64::INFINITY);

    let mut x = x0.clone();
    let mut f = f0;
    let mut d = d0;
    let mut k = 0usize;
    loop {
        let stat = step.norm();
        report.iterates.push(x.clone());
        report.stationarity.push(stat);
        report.residual_norms.push(f.norm());
        report.anchored_residuals.push((&j0_pinv * &f).norm());
        report.rank_history.push(d.rank());

        if let (Some(a), Some(tr), Some(c)) = (audit.as_mut(), trace.as_ref(), cert) {
            if let Some(v) = audit_iterate(a, tr, c, &report, x0, k, &d, j0_pinv_norm, rank0, opts.audit_tol) {
                a.violation = Some(v);
                report.status = SolveStatus::AuditViolation;
                break;
            }
        }

        // After a rank drop the pseudoinverse ignores the lost direction, so a small
        // stationarity value there says nothing about the original problem.
        if d.rank() < rank0 {
            report.status = SolveStatus::RankDrop;
            break;
        }
        if stat <= stationary_tol || stat <= opts.step_floor * (1.0 + x.norm()) {
            report.status = SolveStatus::Stationary;
            break;
        }
        if k == opts.max_iters {
            report.status = SolveStatus::MaxIters;
            break;
        }

        let x_next = &x - &step;
        report.step_norms.push(stat);

        if let (Some(a), Some(tr)) = (audit.as_mut(), trace.as_ref()) {
            let bd = (tr.t(k + 1) - tr.t(k)) - stat;
            a.bd.push(bd);
            let quad = quad_margin(tr, &report.step_norms, k);
            a.quad.push(quad);
            let violation = if bd < -opts.audit_tol {
                Some(("step_bound", bd))
            } else {
                quad.filter(|&q| a.quad_enforced && q < -opts.audit_tol)
                    .map(|q| ("quadratic_step_bound", q))
            };
            if let Some((kind, margin)) = violation {
                a.violation = Some(Violation {
                    kind: kind.into(),
                    index: k,
                    margin,
                });
                report.status = SolveStatus::AuditViolation;
                break;
            }
        }

        if (&x_next - x0).norm() > domain_radius {
            report.status = SolveStatus::LeftBall;
            break;
        }

        let (f_next, d_next) = evaluate(problem, &x_next, opts.rank_tol_factor)?;
        step = d_next.apply_pinv(&f_next);
        x = x_next;
        f = f_next;
        d = d_next;
        k += 1;
    }

    if let (Some(a), Some(tr)) = (audit.as_mut(), trace) {
        a.ts = (0..report.iterates.len()).map(|i| tr.t(i)).collect();
    }
    report.audit = audit;
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn audit_iterate(
    a: &mut Audit,
    trace: &ScalarTrace,
    cert: &Certificate,
    report: &SolveReport,
    x0: &Vector,
    k: usize,
    d: &DecomposedOperator,
    j0_pinv_norm: f64,
    rank0: usize,
    tol: f64,
) -> Option<Violation> {
    let x = &report.iterates[k];
    let t_k = trace.t(k);
    let dist = (x - x0).norm();
    let containment = t_k - dist;
    a.containment.push(containment);

    let norm_bound = if t_k < cert.t_star {
        let hp = cert.model.f_prime(t_k);
        (hp < 0.0).then(|| -j0_pinv_norm / hp - d.pinv_norm())
    } else {
        None
    };
    a.norm_bound.push(norm_bound);

    let contraction = if cert.mode == CertificateMode::Surjective {
        contraction_margin(&report.anchored_residuals, trace, k)
    } else {
        None
    };
    a.residual_contraction.push(contraction);

    let rank_changed = dist < cert.t_star && d.rank() != rank0;
    if rank_changed {
        a.rank_constant = false;
    }

    let violation = |kind: &str, margin: f64| Violation {
        kind: kind.into(),
        index: k,
        margin,
    };
    if containment < -tol {
        return Some(violation("containment", containment));
    }
    if rank_changed {
        return Some(violation("rank_constancy", -1.0));
    }
    // The norm bound is relative: pseudoinverse norms can be large.
    if let Some(m) = norm_bound {
        if m < -tol * (1.0 + d.pinv_norm()) {
            return Some(violation("pinv_norm_bound", m));
        }
    }
    if let Some(m) = contraction {
        if m < -tol {
            return Some(violation("residual_contraction", m));
        }
    }
    None
}

/// Result of a per-iterate check over a trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryCheck {
    pub result: CheckResult,
    pub margins: Vec<Option<f64>>,
}

/// Residual contraction `||F'(x0)^+ F(x_k)|| <= (t_{k+1} - t_k)/(t_k - t_{k-1}) ||F'(x0)^+ F(x_{k-1})||`
/// for `k >= 1`. Only meaningful for surjective-mode certificates.
pub fn residual_contraction_check(report: &SolveReport, trace: &ScalarTrace, tol: f64) -> Result<TrajectoryCheck, SolveError> {
    if report.certificate_mode != Some(CertificateMode::Surjective) {
        return Err(SolveError::NotApplicable(
            "residual contraction needs a surjective-mode certificate".into(),
        ));
    }
    let margins: Vec<Option<f64>> = (0..report.anchored_residuals.len())
        .map(|k| contraction_margin(&report.anchored_residuals, trace, k))
        .collect();
    let worst = margins.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let result = if margins.iter().flatten().count() == 0 {
        CheckResult::new("residual_contraction", CheckStatus::NotApplicable)
            .with_detail("needs at least two iterates")
    } else if worst >= -tol {
        CheckResult::pass("residual_contraction").with_measured(worst)
    } else {
        CheckResult::fail("residual_contraction").with_measured(worst)
    };
    Ok(TrajectoryCheck { result, margins })
}

/// `f(u) - f(t) - f'(t)(u - t)` for the certificate's majorant.
pub fn majorant_linearization_error(cert: &Certificate, t: f64, u: f64) -> f64 {
    let m = &cert.model;
    m.f(u) - m.f(t) - m.f_prime(t) * (u - t)
}

/// Checks `||F'(x0)^+|| ||F(y) - F(x) - F'(x)(y - x)|| <= e_f(t, v) ||y - x||^2 / (v - t)^2`
/// with `t = ||x - x0||` and `v = t + ||y - x||`.
pub fn linearization_error_check(
    problem: &Problem,
    cert: &Certificate,
    x0: &Vector,
    x: &Vector,
    y: &Vector,
    tol: f64,
) -> Result<CheckResult, SolveError> {
    let j0 = problem.jacobian(x0)?;
    let j0_pinv_norm = decompose(&j0, DEFAULT_RANK_TOL_FACTOR)?.pinv_norm();
    linearization_check_with(problem, cert, j0_pinv_norm, x0, x, y, tol)
}

fn linearization_check_with(
    problem: &Problem,
    cert: &Certificate,
    j0_pinv_norm: f64,
    x0: &Vector,
    x: &Vector,
    y: &Vector,
    tol: f64,
) -> Result<CheckResult, SolveError> {
    let t = (x - x0).norm();
    let dist = (y - x).norm();
    let v = t + dist;
    if v >= cert.model.radius {
        return Ok(CheckResult::new("linearization_error", CheckStatus::PremiseNotMet)
            .with_detail(format!("v = {v} >= R = {}", cert.model.radius)));
    }
    let fx = problem.residual(x)?;
    let fy = problem.residual(y)?;
    let jx = problem.jacobian(x)?;
    let err = fy - fx - jx * (y - x);
    let lhs = j0_pinv_norm * err.norm();
    let rhs = if dist == 0.0 {
        0.0
    } else {
        // ||y - x|| = v - t, so the ratio is one up to rounding.
        majorant_linearization_error(cert, t, v) * (dist * dist) / ((v - t) * (v - t))
    };
    Ok(CheckResult::upper("linearization_error", lhs, rhs, tol))
}

#[derive(Debug, Clone, Serialize)]
pub struct LinearizationAudit {
    pub checked: usize,
    pub premise_skipped: usize,
    pub violations: usize,
    pub worst_margin: f64,
}

/// Monte-Carlo audit of the linearization-error bound: `x` uniform in
/// `B(x0, t*)`, `y` uniform in the ball around `x` that keeps `v < R`.
pub fn linearization_audit(
    problem: &Problem,
    cert: &Certificate,
    x0: &Vector,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<LinearizationAudit, SolveError> {
    let j0 = problem.jacobian(x0)?;
    let j0_pinv_norm = decompose(&j0, DEFAULT_RANK_TOL_FACTOR)?.pinv_norm();
    let mut rng = sampling::rng(seed);
    let mut out = LinearizationAudit {
        checked: 0,
        premise_skipped: 0,
        violations: 0,
        worst_margin: f64::INFINITY,
    };
    for _ in 0..samples {
        let x = sampling::in_ball(&mut rng, x0, cert.t_star);
        let t = (&x - x0).norm();
        let reach = if cert.model.radius.is_finite() {
            (cert.model.radius - t) * (1.0 - 1e-9)
        } else {
            2.0 * cert.t_star
        };
        let y = sampling::in_ball(&mut rng, &x, reach);
        let check = linearization_check_with(problem, cert, j0_pinv_norm, x0, &x, &y, tol)?;
        match check.status {
            CheckStatus::PremiseNotMet => out.premise_skipped += 1,
            _ => {
                out.checked += 1;
                if check.failed() {
                    out.violations += 1;
                }
                if let Some(m) = check.margin {
                    out.worst_margin = out.worst_margin.min(m);
                }
            }
        }
    }
    Ok(out)
}

/// Largest sampled ratio for the rank condition.
#[derive(Debug, Clone, Serialize)]
pub struct KappaEstimate {
    pub value: f64,
    pub pairs: usize,
    pub argmax: Option<(Vec<f64>, Vec<f64>)>,
}

/// Sampled lower bound on the smallest `kappa` with
/// `||F'(y)^+ (I - F'(x) F'(x)^+) F(x)|| <= kappa ||x - y||` on `B(center, radius)`.
///
/// Uses uniform pairs in the ball plus all ordered pairs of in-ball iterates
/// of a short uncertified Gauss-Newton run from `center`.
pub fn kappa_estimate(
    problem: &Problem,
    center: &Vector,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<KappaEstimate, SolveError> {
    let mut rng = sampling::rng(seed);
    let mut points: Vec<Vector> = (0..2 * samples)
        .map(|_| sampling::in_ball(&mut rng, center, radius))
        .collect();
    let mut pairs: Vec<(usize, usize)> = (0..samples).flat_map(|i| [(2 * i, 2 * i + 1), (2 * i + 1, 2 * i)]).collect();

    let trial_opts = SolveOptions {
        max_iters: 20,
        ..SolveOptions::default()
    };
    if let Ok(trial) = solve(problem, center, None, &trial_opts) {
        let first = points.len();
        points.extend(
            trial
                .iterates
                .iter()
                .filter(|p| (*p - center).norm() <= radius)
                .cloned(),
        );
        for i in first..points.len() {
            for j in first..points.len() {
                if i != j {
                    pairs.push((i, j));
                }
            }
        }
    }

    // Per point: the complement residual (I - F'F'^+) F and the decomposition.
    let evaluated: Vec<(Vector, DecomposedOperator)> = points
        .iter()
        .map(|p| {
            let (f, d) = evaluate(problem, p, DEFAULT_RANK_TOL_FACTOR)?;
            Ok((d.residual_complement(&f), d))
        })
        .collect::<Result<_, SolveError>>()?;

    let min_dist = 1e-9 * radius;
    let mut best = KappaEstimate {
        value: 0.0,
        pairs: 0,
        argmax: None,
    };
    for (i, j) in pairs {
        let dist = (&points[i] - &points[j]).norm();
        if dist < min_dist {
            continue;
        }
        best.pairs += 1;
        let ratio = evaluated[j].1.apply_pinv(&evaluated[i].0).norm() / dist;
        if ratio > best.value {
            best.value = ratio;
            best.argmax = Some((points[i].iter().copied().collect(), points[j].iter().copied().collect()));
        }
    }
    Ok(best)
}
