//! Majorant functions, the auxiliary function `h(t) = beta + lambda t + f(t)`,
//! its smallest zero, and a priori convergence certificates.
//!
//! A majorant `f: [0, R) -> R` must satisfy `f(0) = 0`, `f'(0) = -1` and have a
//! convex, strictly increasing derivative. The Lipschitz and Smale families
//! have closed-form zeros; custom majorants fall back to bracket-and-bisect.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::check::{first_failure, CheckResult, CheckStatus};

mod lipschitz;
mod smale;

pub use lipschitz::{certify_lipschitz, certify_surjective_lipschitz, delta_threshold};
pub use smale::{certify_smale, certify_surjective_smale, SMALE_ALPHA_THRESHOLD};

/// Tolerance for the numeric h1/h2 checks on custom majorants.
pub const VALIDATION_TOL: f64 = 1e-8;

/// Number of points in the geometric bracketing grid used for custom majorants.
pub const BRACKET_GRID_POINTS: usize = 512;

/// Relative width at which bisection stops.
pub const BISECTION_REL_TOL: f64 = 1e-13;

const DEFAULT_VALIDATION_GRID: usize = 256;

/// Agreement required between tabulated `f` and the integral of tabulated `f'`.
pub const TABLE_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MajorantError {
    #[error("beta = {beta} lies outside the majorant domain [0, {radius})")]
    BetaOutOfDomain { beta: f64, radius: f64 },
    #[error("t = {t} lies outside the majorant domain [0, {radius})")]
    OutOfDomain { t: f64, radius: f64 },
    #[error("auxiliary function has no zero in (0, R)")]
    NoZero,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied majorant given by `f` and `f'`.
#[derive(Clone)]
pub struct CustomMajorant {
    pub label: String,
    f: ScalarFn,
    f_prime: ScalarFn,
}

impl fmt::Debug for CustomMajorant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomMajorant")
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum MajorantKind {
    /// `f(t) = L t^2 / 2 - t`.
    Lipschitz { l: f64 },
    /// `f(t) = t / (1 - gamma t) - 2 t` on `[0, 1/gamma)`.
    Smale { gamma: f64 },
    Custom(CustomMajorant),
}

/// A majorant function on `[0, radius)`.
#[derive(Debug, Clone)]
pub struct MajorantModel {
    pub kind: MajorantKind,
    pub radius: f64,
}

/// Serializable description of a model.
#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelDescriptor {
    Lipschitz {
        #[serde(rename = "L")]
        l: f64,
        #[serde(rename = "R")]
        radius: Option<f64>,
    },
    Smale {
        gamma: f64,
        #[serde(rename = "R")]
        radius: f64,
    },
    Custom {
        label: String,
        #[serde(rename = "R")]
        radius: f64,
    },
}

impl MajorantModel {
    /// Lipschitz majorant; `radius` may be infinite.
    pub fn lipschitz(l: f64, radius: f64) -> Self {
        Self {
            kind: MajorantKind::Lipschitz { l },
            radius,
        }
    }

    pub fn smale(gamma: f64) -> Self {
        Self {
            kind: MajorantKind::Smale { gamma },
            radius: 1.0 / gamma,
        }
    }

    pub fn custom<F, G>(label: impl Into<String>, f: F, f_prime: G, radius: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            kind: MajorantKind::Custom(CustomMajorant {
                label: label.into(),
                f: Arc::new(f),
                f_prime: Arc::new(f_prime),
            }),
            radius,
        }
    }

    /// Custom model from samples of `f'` on a grid starting at 0.
    ///
    /// `f'` is linearly interpolated and `f` is its exact integral from 0, so
    /// the pair is consistent by construction; `R` is the last grid point. If
    /// samples of `f` are given they must agree with that integral to
    /// [`TABLE_TOL`]. The model is only as accurate as the grid.
    pub fn tabulated(label: impl Into<String>, ts: Vec<f64>, fs: Option<Vec<f64>>, fps: Vec<f64>) -> Result<Self, MajorantError> {
        if ts.len() < 2 || fps.len() != ts.len() || fs.as_ref().is_some_and(|f| f.len() != ts.len()) {
            return Err(MajorantError::InvalidParameter(
                "table needs at least two rows and one value per column".into(),
            ));
        }
        if ts[0] != 0.0 || !ts.windows(2).all(|w| w[1] > w[0]) {
            return Err(MajorantError::InvalidParameter(
                "table grid must start at 0 and be strictly increasing".into(),
            ));
        }
        if !ts.iter().chain(&fps).chain(fs.iter().flatten()).all(|v| v.is_finite()) {
            return Err(MajorantError::InvalidParameter("table has non-finite entries".into()));
        }
        // Cumulative trapezoid integral of f' at the grid points.
        let mut integral = vec![0.0; ts.len()];
        for i in 1..ts.len() {
            integral[i] = integral[i - 1] + 0.5 * (fps[i] + fps[i - 1]) * (ts[i] - ts[i - 1]);
        }
        if let Some(fs) = &fs {
            let offset = fs[0];
            for i in 0..ts.len() {
                let expected = offset + integral[i];
                if (fs[i] - expected).abs() > TABLE_TOL * (1.0 + expected.abs()) {
                    return Err(MajorantError::InvalidParameter(format!(
                        "f({}) = {} disagrees with the integral of f' ({expected})",
                        ts[i], fs[i]
                    )));
                }
            }
            for v in &mut integral {
                *v += offset;
            }
        }
        let radius = *ts.last().expect("checked length");
        let table = Arc::new((ts, integral, fps));
        let cell = |ts: &[f64], t: f64| ts.partition_point(|&s| s <= t).clamp(1, ts.len() - 1) - 1;
        let t2 = table.clone();
        Ok(Self::custom(
            label,
            move |t| {
                let (ts, f0, fp) = &*table;
                let i = cell(ts, t);
                let d = t - ts[i];
                let slope = (fp[i + 1] - fp[i]) / (ts[i + 1] - ts[i]);
                f0[i] + fp[i] * d + 0.5 * slope * d * d
            },
            move |t| {
                let (ts, _, fp) = &*t2;
                let i = cell(ts, t);
                let w = (t - ts[i]) / (ts[i + 1] - ts[i]);
                fp[i] + w * (fp[i + 1] - fp[i])
            },
            radius,
        ))
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self.kind, MajorantKind::Custom(_))
    }

    pub fn descriptor(&self) -> ModelDescriptor {
        match &self.kind {
            MajorantKind::Lipschitz { l } => ModelDescriptor::Lipschitz {
                l: *l,
                radius: self.radius.is_finite().then_some(self.radius),
            },
            MajorantKind::Smale { gamma } => ModelDescriptor::Smale {
                gamma: *gamma,
                radius: self.radius,
            },
            MajorantKind::Custom(c) => ModelDescriptor::Custom {
                label: c.label.clone(),
                radius: self.radius,
            },
        }
    }

    pub fn f(&self, t: f64) -> f64 {
        match &self.kind {
            MajorantKind::Lipschitz { l } => l * t * t / 2.0 - t,
            MajorantKind::Smale { gamma } => t / (1.0 - gamma * t) - 2.0 * t,
            MajorantKind::Custom(c) => (c.f)(t),
        }
    }

    pub fn f_prime(&self, t: f64) -> f64 {
        match &self.kind {
            MajorantKind::Lipschitz { l } => l * t - 1.0,
            MajorantKind::Smale { gamma } => {
                let s = 1.0 - gamma * t;
                1.0 / (s * s) - 2.0
            }
            MajorantKind::Custom(c) => (c.f_prime)(t),
        }
    }

    /// Left derivative of `f'`; analytic for built-ins, a backward difference otherwise.
    pub fn f_second_left(&self, t: f64) -> f64 {
        match &self.kind {
            MajorantKind::Lipschitz { l } => *l,
            MajorantKind::Smale { gamma } => {
                let s = 1.0 - gamma * t;
                2.0 * gamma / (s * s * s)
            }
            MajorantKind::Custom(c) => {
                let h = (f64::EPSILON.sqrt() * t.max(1e-3)).min(t);
                if h <= 0.0 {
                    let h = f64::EPSILON.sqrt();
                    return ((c.f_prime)(h) - (c.f_prime)(0.0)) / h;
                }
                ((c.f_prime)(t) - (c.f_prime)(t - h)) / h
            }
        }
    }

    fn in_domain(&self, t: f64) -> bool {
        t >= 0.0 && t < self.radius
    }

    /// Upper end used for grids when the domain is unbounded.
    fn grid_end(&self, beta: f64) -> f64 {
        if self.radius.is_finite() {
            return self.radius;
        }
        match &self.kind {
            MajorantKind::Lipschitz { l } => 4.0 / l + 4.0 * beta,
            _ => 1e6 * (1.0 + beta),
        }
    }
}

/// Checks h1 (`f(0) = 0`, `f'(0) = -1`) and h2 (`f'` strictly increasing and
/// midpoint-convex) on a uniform grid over the domain.
pub fn validate(model: &MajorantModel, grid_points: usize) -> Vec<CheckResult> {
    let mut checks = Vec::new();
    let builtin = model.is_builtin();

    let params_ok = match &model.kind {
        MajorantKind::Lipschitz { l } => l.is_finite() && *l > 0.0,
        MajorantKind::Smale { gamma } => gamma.is_finite() && *gamma > 0.0,
        MajorantKind::Custom(_) => model.radius.is_finite(),
    } && model.radius > 0.0;
    if !params_ok {
        checks.push(
            CheckResult::fail("model_parameters")
                .with_detail("model constants must be positive; custom majorants need a finite R"),
        );
        return checks;
    }

    let (f0, fp0) = (model.f(0.0), model.f_prime(0.0));
    let tol = if builtin { 0.0 } else { VALIDATION_TOL };
    let h1_value = CheckResult::upper("h1_value", f0.abs(), 0.0, tol).with_detail("f(0) = 0");
    let h1_slope =
        CheckResult::upper("h1_slope", (fp0 + 1.0).abs(), 0.0, tol).with_detail("f'(0) = -1");
    checks.push(h1_value);
    checks.push(h1_slope);

    let points = grid_points.max(3);
    let end = match &model.kind {
        // Stay off the pole where f' blows up.
        MajorantKind::Smale { .. } => model.radius * (1.0 - 1e-3),
        _ => model.grid_end(0.0) * (1.0 - 1e-9),
    };
    let grid: Vec<f64> = (0..points)
        .map(|i| end * i as f64 / (points - 1) as f64)
        .collect();
    let derivs: Vec<f64> = grid.iter().map(|&t| model.f_prime(t)).collect();

    let worst_increase = derivs
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let increasing = if worst_increase > 0.0 {
        CheckResult::pass("h2_increasing")
    } else {
        CheckResult::fail("h2_increasing").with_detail("f' is not strictly increasing on the grid")
    };
    checks.push(increasing.with_measured(worst_increase));

    let mut worst_convexity = f64::INFINITY;
    for i in 0..points - 1 {
        let mid = model.f_prime(0.5 * (grid[i] + grid[i + 1]));
        let chord = 0.5 * (derivs[i] + derivs[i + 1]);
        let scale = 1.0 + derivs[i].abs().max(derivs[i + 1].abs());
        worst_convexity = worst_convexity.min((chord - mid) / scale);
    }
    let convex_tol = if builtin { 1e-12 } else { VALIDATION_TOL };
    let convex = if worst_convexity >= -convex_tol {
        CheckResult::pass("h2_convex")
    } else {
        CheckResult::fail("h2_convex").with_detail("f' violates midpoint convexity on the grid")
    };
    checks.push(convex.with_measured(worst_convexity));

    if let MajorantKind::Custom(c) = &model.kind {
        // f' must be the derivative of f.
        let mut worst = 0.0f64;
        for &t in grid.iter().skip(1).take(points - 2) {
            let h = 1e-6 * end;
            let fd = ((c.f)(t + h) - (c.f)(t - h)) / (2.0 * h);
            worst = worst.max((fd - (c.f_prime)(t)).abs() / (1.0 + fd.abs()));
        }
        checks.push(
            CheckResult::upper("derivative_consistency", worst, 0.0, 1e-5)
                .with_detail("f' matches a central difference of f"),
        );
    }
    checks
}

/// Remark-style choice `lambda = max(0, -kappa f'(beta))`.
pub fn lambda_choice(kappa: f64, model: &MajorantModel, beta: f64) -> Result<f64, MajorantError> {
    if !(0.0..1.0).contains(&kappa) {
        return Err(MajorantError::InvalidParameter(format!(
            "kappa = {kappa} must lie in [0, 1)"
        )));
    }
    if !(beta > 0.0) {
        return Err(MajorantError::InvalidParameter(format!(
            "beta = {beta} must be positive"
        )));
    }
    if beta >= model.radius {
        return Err(MajorantError::BetaOutOfDomain {
            beta,
            radius: model.radius,
        });
    }
    Ok((-kappa * model.f_prime(beta)).max(0.0))
}

/// `h_{beta,lambda}(t) = beta + lambda t + f(t)`.
#[derive(Debug, Clone)]
pub struct AuxFunction {
    pub beta: f64,
    pub lambda: f64,
    pub model: MajorantModel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HValues {
    pub h: f64,
    /// `h'_{beta,lambda}(t) = lambda + f'(t)`.
    pub h_prime_lambda: f64,
    /// `h'_{beta,0}(t) = f'(t)`.
    pub h_prime_0: f64,
}

impl AuxFunction {
    pub fn new(beta: f64, lambda: f64, model: MajorantModel) -> Self {
        Self {
            beta,
            lambda,
            model,
        }
    }

    pub fn radius(&self) -> f64 {
        self.model.radius
    }

    /// Unchecked evaluation of `h`.
    pub fn h(&self, t: f64) -> f64 {
        self.beta + self.lambda * t + self.model.f(t)
    }

    pub fn h_prime_0(&self, t: f64) -> f64 {
        self.model.f_prime(t)
    }
}

pub fn h_eval(aux: &AuxFunction, t: f64) -> Result<HValues, MajorantError> {
    if !aux.model.in_domain(t) {
        return Err(MajorantError::OutOfDomain {
            t,
            radius: aux.model.radius,
        });
    }
    let fp = aux.model.f_prime(t);
    Ok(HValues {
        h: aux.h(t),
        h_prime_lambda: aux.lambda + fp,
        h_prime_0: fp,
    })
}

/// Smallest zero of `a t^2 - b t + c` with `a, b, c > 0`, evaluated as
/// `2c / (b + sqrt(b^2 - 4ac))`. Discriminants within rounding of zero are
/// treated as exact double roots.
pub(crate) fn smaller_quadratic_root(a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    if !(a > 0.0 && b > 0.0 && c > 0.0) {
        return None;
    }
    let disc = b * b - 4.0 * a * c;
    let snap = 64.0 * f64::EPSILON * b * b;
    let disc = if disc.abs() <= snap {
        0.0
    } else if disc < 0.0 {
        return None;
    } else {
        disc
    };
    Some((2.0 * c / (b + disc.sqrt()), disc))
}

/// Smallest zero of `h` on `(0, R)`: closed form for built-in models,
/// bracket-and-bisect otherwise.
pub fn smallest_zero(aux: &AuxFunction) -> Result<f64, MajorantError> {
    if !(aux.beta > 0.0) || aux.lambda < 0.0 {
        return Err(MajorantError::InvalidParameter(
            "need beta > 0 and lambda >= 0".into(),
        ));
    }
    // h'(0) = lambda - 1 >= 0 and h' increasing means h never decreases from beta.
    if aux.lambda >= 1.0 {
        return Err(MajorantError::NoZero);
    }
    let t_star = match &aux.model.kind {
        MajorantKind::Lipschitz { l } => {
            smaller_quadratic_root(l / 2.0, 1.0 - aux.lambda, aux.beta)
                .ok_or(MajorantError::NoZero)?
                .0
        }
        MajorantKind::Smale { gamma } => {
            let alpha = aux.beta * gamma;
            smaller_quadratic_root((2.0 - aux.lambda) * gamma, 1.0 - aux.lambda + alpha, aux.beta)
                .ok_or(MajorantError::NoZero)?
                .0
        }
        MajorantKind::Custom(_) => return smallest_zero_bisect(aux),
    };
    if t_star < aux.model.radius {
        Ok(t_star)
    } else {
        Err(MajorantError::NoZero)
    }
}

/// Generic zero finder: scans a geometric grid for the first sign change of
/// `h`, then bisects. Works for any continuous `h` with `h(0) = beta > 0`.
pub fn smallest_zero_bisect(aux: &AuxFunction) -> Result<f64, MajorantError> {
    let end = aux.model.grid_end(aux.beta);
    let lo_t = end * 1e-9;
    let hi_t = end * (1.0 - 1e-9);
    let ratio = (hi_t / lo_t).powf(1.0 / (BRACKET_GRID_POINTS - 1) as f64);

    let mut prev = 0.0;
    let mut bracket = None;
    for i in 0..BRACKET_GRID_POINTS {
        let t = if i + 1 == BRACKET_GRID_POINTS {
            hi_t
        } else {
            lo_t * ratio.powi(i as i32)
        };
        let h = aux.h(t);
        if !h.is_finite() {
            break;
        }
        if h <= 0.0 {
            bracket = Some((prev, t));
            break;
        }
        prev = t;
    }
    let (mut lo, mut hi) = bracket.ok_or(MajorantError::NoZero)?;
    while hi - lo > BISECTION_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if aux.h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Which convergence theorem a certificate instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateMode {
    /// General rank condition with `kappa` and `lambda`.
    General,
    /// `F'(x0)` surjective: `kappa = lambda = 0` and the residual contraction bound applies.
    Surjective,
}

/// Whether the constants were asserted by the user or produced by estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Asserted,
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PredictedRate {
    None,
    QLinear,
    QQuadratic { constant: f64 },
}

/// A priori convergence certificate.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub beta: f64,
    pub kappa: f64,
    pub lambda: f64,
    pub radius: f64,
    pub t_star: f64,
    pub model: MajorantModel,
    pub mode: CertificateMode,
    pub checks: Vec<CheckResult>,
    pub rate: PredictedRate,
    pub provenance: Provenance,
}

impl Certificate {
    pub fn aux(&self) -> AuxFunction {
        AuxFunction::new(self.beta, self.lambda, self.model.clone())
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// `h'_{beta,0}(t*)`.
    pub fn h_prime_0_at_star(&self) -> f64 {
        self.model.f_prime(self.t_star)
    }

    /// Checks the smallest-zero property: `h(t*) = 0` and, for `samples`
    /// points in `[0, t*)`, `h > 0` and `h'_{beta,0} < 0`.
    pub fn audit_zero(&self, samples: usize) -> Vec<CheckResult> {
        let aux = self.aux();
        let zero_tol = 1e-12 * self.beta.max(1.0);
        let at_star = CheckResult::upper("h_at_t_star", aux.h(self.t_star).abs(), 0.0, zero_tol);
        let mut min_h = f64::INFINITY;
        let mut max_hp = f64::NEG_INFINITY;
        for i in 0..samples {
            let t = self.t_star * i as f64 / samples as f64;
            min_h = min_h.min(aux.h(t));
            max_hp = max_hp.max(aux.h_prime_0(t));
        }
        let positive = if min_h > 0.0 {
            CheckResult::pass("h_positive_before_t_star")
        } else {
            CheckResult::fail("h_positive_before_t_star")
        };
        let decreasing = if max_hp < 0.0 {
            CheckResult::pass("h_prime_0_negative_before_t_star")
        } else {
            CheckResult::fail("h_prime_0_negative_before_t_star")
        };
        vec![
            at_star,
            positive.with_measured(min_h),
            decreasing.with_measured(max_hp),
        ]
    }
}

/// Why a certificate was refused: the first failed check, with everything
/// that was evaluated.
#[derive(Debug, Clone, Error)]
#[error("certificate refused: {failed_check} ({detail})")]
pub struct Refusal {
    pub failed_check: String,
    pub detail: String,
    pub checks: Vec<CheckResult>,
}

impl Refusal {
    pub(crate) fn from_checks(checks: Vec<CheckResult>) -> Self {
        let first = first_failure(&checks).cloned().unwrap_or_else(|| {
            CheckResult::fail("unknown").with_detail("refused without a failing check")
        });
        Self {
            failed_check: first.name,
            detail: first.detail,
            checks,
        }
    }
}

pub(crate) fn parameter_check(ok: bool, detail: String) -> CheckResult {
    if ok {
        CheckResult::pass("parameters")
    } else {
        CheckResult::fail("parameters").with_detail(detail)
    }
}

pub(crate) fn domain_check(t_star: f64, radius: f64) -> CheckResult {
    let check = CheckResult::new(
        "domain",
        if t_star < radius {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
    )
    .with_measured(t_star)
    .with_detail("t* < R");
    if radius.is_finite() {
        check.with_bound(radius)
    } else {
        check
    }
}

/// Rate implied for `lambda = 0`: Q-quadratic when `h'_{beta,0}(t*) < 0`.
pub(crate) fn rate_for(lambda: f64, model: &MajorantModel, t_star: f64, h_prime_0_star: f64) -> PredictedRate {
    if lambda != 0.0 {
        PredictedRate::None
    } else if h_prime_0_star < 0.0 {
        PredictedRate::QQuadratic {
            constant: model.f_second_left(t_star) / (-2.0 * h_prime_0_star),
        }
    } else {
        PredictedRate::QLinear
    }
}

/// Certificate for an arbitrary majorant model.
///
/// `lambda` defaults to [`lambda_choice`]; an override must satisfy
/// `lambda >= max(0, -kappa f'(beta))`.
pub fn certify(
    model: &MajorantModel,
    beta: f64,
    kappa: f64,
    lambda: Option<f64>,
    mode: CertificateMode,
) -> Result<Certificate, Refusal> {
    let mut checks = vec![parameter_check(
        beta > 0.0 && (0.0..1.0).contains(&kappa) && model.radius > 0.0,
        format!("need beta > 0, 0 <= kappa < 1, R > 0 (beta = {beta}, kappa = {kappa})"),
    )];
    if mode == CertificateMode::Surjective && kappa != 0.0 {
        checks.push(CheckResult::fail("parameters").with_detail("surjective mode requires kappa = 0"));
    }
    if first_failure(&checks).is_some() {
        return Err(Refusal::from_checks(checks));
    }
    checks.extend(validate(model, DEFAULT_VALIDATION_GRID));
    if first_failure(&checks).is_some() {
        return Err(Refusal::from_checks(checks));
    }

    let minimal = match lambda_choice(kappa, model, beta) {
        Ok(l) => l,
        Err(e) => {
            checks.push(CheckResult::fail("lambda").with_detail(e.to_string()));
            return Err(Refusal::from_checks(checks));
        }
    };
    let lambda = lambda.unwrap_or(minimal);
    checks.push(
        CheckResult::upper("lambda", minimal, lambda, 0.0)
            .with_detail("lambda >= max(0, -kappa f'(beta))"),
    );
    if first_failure(&checks).is_some() {
        return Err(Refusal::from_checks(checks));
    }

    let aux = AuxFunction::new(beta, lambda, model.clone());
    let t_star = match smallest_zero(&aux) {
        Ok(t) => t,
        Err(e) => {
            checks.push(CheckResult::fail("h3").with_detail(e.to_string()));
            return Err(Refusal::from_checks(checks));
        }
    };
    checks.push(CheckResult::pass("h3").with_measured(t_star));
    checks.push(domain_check(t_star, model.radius));
    if first_failure(&checks).is_some() {
        return Err(Refusal::from_checks(checks));
    }

    let rate = rate_for(lambda, model, t_star, model.f_prime(t_star));
    Ok(Certificate {
        beta,
        kappa,
        lambda,
        radius: model.radius,
        t_star,
        model: model.clone(),
        mode,
        checks,
        rate,
        provenance: Provenance::Asserted,
    })
}
