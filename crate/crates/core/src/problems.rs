//! Built-in test problems, the finite-difference Jacobian and problem files.
//!
//! | name                | F                              | n | m |
//! |---------------------|--------------------------------|---|---|
//! | `scalar_quadratic`  | `x^2 - c`                      | 1 | 1 |
//! | `circle`            | `x1^2 + x2^2 - c`              | 2 | 1 |
//! | `parabola_residual` | `(x, a x^2 + b)`               | 1 | 2 |
//! | `exp_system`        | `(e^{x1} - 1, x1 + x2^2 - c)`  | 2 | 2 |

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{decompose, spectral_norm, Matrix, Vector, DEFAULT_RANK_TOL_FACTOR};
use crate::sampling;
use crate::solver::{EvalError, JacobianFn, Problem, ResidualFn, SolveError};

pub const BUILTIN_NAMES: [&str; 4] = ["scalar_quadratic", "circle", "parabola_residual", "exp_system"];

/// Highest derivative order used by [`smale_gamma_estimate`].
pub const GAMMA_MAX_ORDER: usize = 40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("unknown problem '{0}' (known: scalar_quadratic, circle, parabola_residual, exp_system)")]
    UnknownProblem(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Evaluation(#[from] EvalError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("{0}")]
    Io(String),
}

/// Reference values a problem file may carry along; not used by any computation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedValues {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_star: Option<f64>,
    #[serde(default, rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// Empty means the problem's default starting point.
    #[serde(default)]
    pub x0: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<ExpectedValues>,
}

impl ProblemSpec {
    pub fn builtin(name: &str) -> Self {
        Self {
            name: name.to_string(),
            params: BTreeMap::new(),
            x0: Vec::new(),
            expected: None,
        }
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn x0(mut self, x0: &[f64]) -> Self {
        self.x0 = x0.to_vec();
        self
    }

    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        serde_json::from_str(text).map_err(|e| ProblemError::BadParams(e.to_string()))
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, ProblemError> {
        let text = std::fs::read_to_string(path).map_err(|e| ProblemError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// A built problem together with its starting point and resolved parameters.
#[derive(Debug, Clone)]
pub struct BuiltProblem {
    pub problem: Problem,
    pub x0: Vector,
    pub params: BTreeMap<String, f64>,
}

fn resolve_params(spec: &ProblemSpec, defaults: &[(&str, f64)]) -> Result<BTreeMap<String, f64>, ProblemError> {
    let mut params: BTreeMap<String, f64> = defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for (k, v) in &spec.params {
        if !params.contains_key(k) {
            let known: Vec<&str> = defaults.iter().map(|(k, _)| *k).collect();
            return Err(ProblemError::BadParams(format!(
                "{}: unknown parameter '{k}' (known: {})",
                spec.name,
                known.join(", ")
            )));
        }
        if !v.is_finite() {
            return Err(ProblemError::BadParams(format!("{}: parameter {k} = {v} is not finite", spec.name)));
        }
        params.insert(k.clone(), *v);
    }
    Ok(params)
}

fn resolve_x0(spec: &ProblemSpec, default: &[f64]) -> Result<Vector, ProblemError> {
    let x0 = if spec.x0.is_empty() { default } else { &spec.x0 };
    if x0.len() != default.len() {
        return Err(ProblemError::BadParams(format!(
            "{}: x0 has dimension {}, expected {}",
            spec.name,
            x0.len(),
            default.len()
        )));
    }
    if !x0.iter().all(|v| v.is_finite()) {
        return Err(ProblemError::BadParams(format!("{}: x0 is not finite", spec.name)));
    }
    Ok(Vector::from_column_slice(x0))
}

fn v1(x: f64) -> Vector {
    Vector::from_element(1, x)
}

pub fn build(spec: &ProblemSpec) -> Result<BuiltProblem, ProblemError> {
    match spec.name.as_str() {
        "scalar_quadratic" => {
            let params = resolve_params(spec, &[("c", 2.0)])?;
            let c = params["c"];
            let problem = Problem::new(
                "scalar_quadratic",
                1,
                1,
                move |x| Ok(v1(x[0] * x[0] - c)),
                |x| Ok(Matrix::from_element(1, 1, 2.0 * x[0])),
            )
            .with_derivative_bound(|_, order| match order {
                2 => 2.0,
                _ => 0.0,
            });
            Ok(BuiltProblem {
                problem,
                x0: resolve_x0(spec, &[1.0])?,
                params,
            })
        }
        "circle" => {
            let params = resolve_params(spec, &[("c", 1.0)])?;
            let c = params["c"];
            let problem = Problem::new(
                "circle",
                2,
                1,
                move |x| Ok(v1(x.norm_squared() - c)),
                |x| Ok(Matrix::from_row_slice(1, 2, &[2.0 * x[0], 2.0 * x[1]])),
            )
            .with_derivative_bound(|_, order| match order {
                2 => 2.0,
                _ => 0.0,
            });
            Ok(BuiltProblem {
                problem,
                x0: resolve_x0(spec, &[2.0, 0.0])?,
                params,
            })
        }
        "parabola_residual" => {
            let params = resolve_params(spec, &[("a", 0.1), ("b", 0.05)])?;
            let (a, b) = (params["a"], params["b"]);
            let problem = Problem::new(
                "parabola_residual",
                1,
                2,
                move |x| Ok(Vector::from_row_slice(&[x[0], a * x[0] * x[0] + b])),
                move |x| Ok(Matrix::from_row_slice(2, 1, &[1.0, 2.0 * a * x[0]])),
            )
            .with_derivative_bound(move |_, order| match order {
                2 => 2.0 * a.abs(),
                _ => 0.0,
            });
            Ok(BuiltProblem {
                problem,
                x0: resolve_x0(spec, &[0.4])?,
                params,
            })
        }
        "exp_system" => {
            let params = resolve_params(spec, &[("c", 0.0)])?;
            let c = params["c"];
            let problem = Problem::new(
                "exp_system",
                2,
                2,
                move |x| Ok(Vector::from_row_slice(&[x[0].exp_m1(), x[0] + x[1] * x[1] - c])),
                |x| Ok(Matrix::from_row_slice(2, 2, &[x[0].exp(), 0.0, 1.0, 2.0 * x[1]])),
            )
            // Beyond order two only e^{x1} contributes; at order two x2^2 adds 2.
            .with_derivative_bound(|x, order| match order {
                2 => (x[0].exp().powi(2) + 4.0).sqrt(),
                _ => x[0].exp(),
            });
            Ok(BuiltProblem {
                problem,
                x0: resolve_x0(spec, &[0.01, 1.01])?,
                params,
            })
        }
        other => Err(ProblemError::UnknownProblem(other.to_string())),
    }
}

/// Central-difference step for coordinate value `x`: `eps^(1/3) (1 + |x|)`.
pub fn fd_step(x: f64) -> f64 {
    f64::EPSILON.cbrt() * (1.0 + x.abs())
}

/// Central-difference Jacobian of `residual`.
pub fn fd_jacobian(residual: ResidualFn, n: usize, m: usize) -> JacobianFn {
    Arc::new(move |x: &Vector| {
        let mut j = Matrix::zeros(m, n);
        let mut probe = x.clone();
        for i in 0..n {
            let h = fd_step(x[i]);
            probe[i] = x[i] + h;
            let plus = residual(&probe)?;
            probe[i] = x[i] - h;
            let minus = residual(&probe)?;
            probe[i] = x[i];
            if plus.len() != m || minus.len() != m {
                return Err(EvalError(format!("residual has length {}, expected {m}", plus.len())));
            }
            // Divide by the actually representable stencil width.
            let width = (x[i] + h) - (x[i] - h);
            j.set_column(i, &((plus - minus) / width));
        }
        Ok(j)
    })
}

/// Sampled lower bound on the smallest `L` with
/// `||F'(x0)^+|| ||F'(x) - F'(y)|| <= L ||x - y||` on `B(x0, radius)`.
pub fn lipschitz_estimate(problem: &Problem, x0: &Vector, radius: f64, samples: usize, seed: u64) -> Result<f64, ProblemError> {
    let j0 = problem.jacobian(x0)?;
    let scale = decompose(&j0, DEFAULT_RANK_TOL_FACTOR)
        .map_err(SolveError::from)?
        .pinv_norm();
    let mut rng = sampling::rng(seed);
    // Very close pairs only measure rounding noise in the difference quotient.
    let min_dist = 1e-4 * radius;
    let mut best = 0.0f64;
    for _ in 0..samples {
        let x = sampling::in_ball(&mut rng, x0, radius);
        let y = sampling::in_ball(&mut rng, x0, radius);
        let dist = (&x - &y).norm();
        if dist < min_dist {
            continue;
        }
        let diff = problem.jacobian(&x)? - problem.jacobian(&y)?;
        best = best.max(scale * spectral_norm(&diff) / dist);
    }
    Ok(best)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Smale's `gamma = sup_{n >= 2} (||F'(x0)^+|| ||F^{(n)}(x0)|| / n!)^{1/(n-1)}`
/// from the problem's analytic derivative bounds, truncated at [`GAMMA_MAX_ORDER`].
///
/// Uses the product `||F'(x0)^+|| ||F^{(n)}||` rather than `||F'(x0)^+ F^{(n)}||`,
/// which can only make `gamma` larger.
pub fn smale_gamma_estimate(problem: &Problem, x0: &Vector) -> Result<f64, ProblemError> {
    let j0 = problem.jacobian(x0)?;
    let scale = decompose(&j0, DEFAULT_RANK_TOL_FACTOR)
        .map_err(SolveError::from)?
        .pinv_norm();
    if problem.derivative_bound(x0, 2).is_none() {
        return Err(ProblemError::BadParams(format!(
            "{}: no analytic derivative bounds, gamma cannot be estimated",
            problem.name
        )));
    }
    let mut gamma = 0.0f64;
    for order in 2..=GAMMA_MAX_ORDER {
        let bound = problem.derivative_bound(x0, order).unwrap_or(0.0);
        if bound > 0.0 {
            gamma = gamma.max((scale * bound / factorial(order)).powf(1.0 / (order - 1) as f64));
        }
    }
    Ok(gamma)
}
