//! Dense real linear algebra: SVD with numerical rank, the Moore-Penrose
//! pseudoinverse, the associated orthogonal projectors, and checkable forms of
//! the Banach and pseudoinverse-perturbation lemmas.
//!
//! All operator norms are spectral norms computed from singular values.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::check::{CheckResult, CheckStatus};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Default numerical-rank factor: `rank_tol = factor * max(m, n) * sigma_max`.
pub const DEFAULT_RANK_TOL_FACTOR: f64 = f64::EPSILON;

/// Relative tolerance for Penrose identities and lemma bounds.
pub const PENROSE_TOL: f64 = 1e-10;

/// Agreement required between the SVD and normal-equation pseudoinverses.
pub const CROSS_CHECK_TOL: f64 = 1e-8;


#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("SVD did not converge")]
    DecompositionFailed,
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is empty ({rows}x{cols})")]
    Empty { rows: usize, cols: usize },
    #[error("matrix is not surjective: numerical rank {rank} < {rows} rows")]
    NotSurjective { rank: usize, rows: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// Thin SVD `A = U diag(s) V^T` with singular values sorted nonincreasing.
///
/// `u` is `m x p`, `v` is `n x p` with `p = min(m, n)`; the columns are
/// orthonormal.
#[derive(Debug, Clone)]
pub struct DecomposedOperator {
    pub u: Matrix,
    pub singular_values: Vec<f64>,
    pub v: Matrix,
    pub rank_tol: f64,
    pub numerical_rank: usize,
}

pub fn ensure_finite(a: &Matrix) -> Result<(), LinalgError> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(LinalgError::Empty {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if a.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(LinalgError::NonFinite)
    }
}

// nalgebra's SVD mis-factors some rank-deficient inputs, so the factorization goes through faer.
fn thin_svd(a: &Matrix) -> Result<(Matrix, Vec<f64>, Matrix), LinalgError> {
    let (m, n) = a.shape();
    let p = m.min(n);
    if p == 0 {
        return Ok((Matrix::zeros(m, 0), Vec::new(), Matrix::zeros(n, 0)));
    }
    let fa = faer::Mat::<f64>::from_fn(m, n, |i, j| a[(i, j)]);
    let svd = fa.thin_svd().map_err(|_| LinalgError::DecompositionFailed)?;
    let (fu, fs, fv) = (svd.U(), svd.S().column_vector(), svd.V());
    let u = Matrix::from_fn(m, p, |i, j| fu[(i, j)]);
    let v = Matrix::from_fn(n, p, |i, j| fv[(i, j)]);
    let s = (0..p).map(|i| fs[i]).collect();
    Ok((u, s, v))
}

pub fn decompose(a: &Matrix, rank_tol_factor: f64) -> Result<DecomposedOperator, LinalgError> {
    ensure_finite(a)?;
    let (m, n) = a.shape();
    let (u, s, v) = thin_svd(a)?;
    let p = s.len();

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));

    let mut u_sorted = Matrix::zeros(m, p);
    let mut v_sorted = Matrix::zeros(n, p);
    let mut values = Vec::with_capacity(p);
    for (dst, &src) in order.iter().enumerate() {
        u_sorted.set_column(dst, &u.column(src));
        v_sorted.set_column(dst, &v.column(src));
        values.push(s[src].max(0.0));
    }

    let sigma_max = values.first().copied().unwrap_or(0.0);
    let rank_tol = if sigma_max > 0.0 {
        rank_tol_factor * (m.max(n) as f64) * sigma_max
    } else {
        rank_tol_factor
    };
    let numerical_rank = values.iter().filter(|&&x| x > rank_tol).count();

    Ok(DecomposedOperator {
        u: u_sorted,
        singular_values: values,
        v: v_sorted,
        rank_tol,
        numerical_rank,
    })
}

impl DecomposedOperator {
    pub fn rows(&self) -> usize {
        self.u.nrows()
    }

    pub fn cols(&self) -> usize {
        self.v.nrows()
    }

    pub fn rank(&self) -> usize {
        self.numerical_rank
    }

    /// Spectral norm of the decomposed operator.
    pub fn norm(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Spectral norm of the pseudoinverse, `1 / sigma_r` (zero for the zero operator).
    pub fn pinv_norm(&self) -> f64 {
        match self.numerical_rank {
            0 => 0.0,
            r => 1.0 / self.singular_values[r - 1],
        }
    }

    pub fn is_surjective(&self) -> bool {
        self.numerical_rank == self.rows()
    }

    pub fn reconstruct(&self) -> Matrix {
        let sigma = Matrix::from_diagonal(&Vector::from_row_slice(&self.singular_values));
        &self.u * sigma * self.v.transpose()
    }

    pub fn pinv(&self) -> Matrix {
        let (m, n) = (self.rows(), self.cols());
        let r = self.numerical_rank;
        let mut out = Matrix::zeros(n, m);
        for i in 0..r {
            let scale = 1.0 / self.singular_values[i];
            out += (self.v.column(i) * scale) * self.u.column(i).transpose();
        }
        out
    }

    /// `A^+ b` without forming the pseudoinverse.
    pub fn apply_pinv(&self, b: &Vector) -> Vector {
        let r = self.numerical_rank;
        let mut out = Vector::zeros(self.cols());
        for i in 0..r {
            let coeff = self.u.column(i).dot(b) / self.singular_values[i];
            out.axpy(coeff, &self.v.column(i), 1.0);
        }
        out
    }

    /// `A A^+` (m x m).
    pub fn proj_ker_perp(&self) -> Matrix {
        let ur = self.u.columns(0, self.numerical_rank);
        ur * ur.transpose()
    }

    /// `A^+ A` (n x n).
    pub fn proj_im(&self) -> Matrix {
        let vr = self.v.columns(0, self.numerical_rank);
        vr * vr.transpose()
    }

    /// `(I - A A^+) b`. Exactly zero when the operator is surjective.
    pub fn residual_complement(&self, b: &Vector) -> Vector {
        if self.is_surjective() {
            return Vector::zeros(self.rows());
        }
        let mut out = b.clone();
        for i in 0..self.numerical_rank {
            let coeff = self.u.column(i).dot(b);
            out.axpy(-coeff, &self.u.column(i), 1.0);
        }
        out
    }
}

pub fn pinv(d: &DecomposedOperator) -> Matrix {
    d.pinv()
}

pub fn proj_ker_perp(d: &DecomposedOperator) -> Matrix {
    d.proj_ker_perp()
}

pub fn proj_im(d: &DecomposedOperator) -> Matrix {
    d.proj_im()
}

/// `A^T (A A^T)^{-1}` for a matrix of full row rank.
///
/// Evaluated through a QR factorization of `A^T = Q R`, which gives the same
/// matrix as `Q R^{-T}` without forming `A A^T`. The rank test uses the SVD.
pub fn pinv_surjective(a: &Matrix) -> Result<Matrix, LinalgError> {
    let d = decompose(a, DEFAULT_RANK_TOL_FACTOR)?;
    let rows = a.nrows();
    if d.numerical_rank < rows {
        return Err(LinalgError::NotSurjective {
            rank: d.numerical_rank,
            rows,
        });
    }
    let qr = a.transpose().qr();
    let q = qr.q();
    let r = qr.r();
    let r_inv = r
        .solve_upper_triangular(&Matrix::identity(rows, rows))
        .ok_or(LinalgError::NotSurjective {
            rank: d.numerical_rank,
            rows,
        })?;
    Ok(q * r_inv.transpose())
}

pub fn spectral_norm(a: &Matrix) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    thin_svd(a)
        .map(|(_, s, _)| s.iter().copied().fold(0.0, f64::max))
        .unwrap_or(f64::NAN)
}

/// Relative residuals of the four Penrose identities for a candidate `x = A^+`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PenroseResiduals {
    pub axa: f64,
    pub xax: f64,
    pub ax_symmetric: f64,
    pub xa_symmetric: f64,
}

impl PenroseResiduals {
    pub fn max(&self) -> f64 {
        self.axa
            .max(self.xax)
            .max(self.ax_symmetric)
            .max(self.xa_symmetric)
    }
}

/// Frobenius-norm residuals, each scaled by the norm of the matrix it should reproduce.
pub fn penrose_residuals(a: &Matrix, x: &Matrix) -> PenroseResiduals {
    let rel = |r: Matrix, scale: f64| {
        let nr = r.norm();
        if scale > 0.0 {
            nr / scale
        } else {
            nr
        }
    };
    let ax = a * x;
    let xa = x * a;
    PenroseResiduals {
        axa: rel(&ax * a - a, a.norm()),
        xax: rel(&xa * x - x, x.norm()),
        ax_symmetric: rel(ax.transpose() - &ax, ax.norm().max(1.0)),
        xa_symmetric: rel(xa.transpose() - &xa, xa.norm().max(1.0)),
    }
}

/// `max ||P^2 - P||_F` over the two projectors of `d`.
pub fn projector_residual(d: &DecomposedOperator) -> f64 {
    let p = d.proj_ker_perp();
    let q = d.proj_im();
    let rp = (&p * &p - &p).norm();
    let rq = (&q * &q - &q).norm();
    let sp = (p.transpose() - &p).norm();
    let sq = (q.transpose() - &q).norm();
    rp.max(rq).max(sp).max(sq)
}

/// Banach lemma: `||B - I|| < 1` implies `B` invertible with
/// `||B^{-1}|| <= 1 / (1 - ||B - I||)`.
pub fn banach_bound_check(b: &Matrix) -> Result<CheckResult, LinalgError> {
    ensure_finite(b)?;
    if !b.is_square() {
        return Err(LinalgError::ShapeMismatch(format!(
            "banach check needs a square matrix, got {}x{}",
            b.nrows(),
            b.ncols()
        )));
    }
    let n = b.nrows();
    let dist = spectral_norm(&(b - Matrix::identity(n, n)));
    if dist >= 1.0 {
        return Ok(CheckResult::new("banach", CheckStatus::PremiseNotMet)
            .with_measured(dist)
            .with_detail(format!("||B - I|| = {dist} >= 1")));
    }
    let bound = 1.0 / (1.0 - dist);
    let d = decompose(b, DEFAULT_RANK_TOL_FACTOR)?;
    if d.numerical_rank < n {
        return Ok(CheckResult::fail("banach")
            .with_bound(bound)
            .with_detail("premise holds but B is numerically singular"));
    }
    let inv_norm = 1.0 / d.singular_values[n - 1];
    Ok(CheckResult::upper("banach", inv_norm, bound, PENROSE_TOL * bound))
}

/// Every quantity the pseudoinverse perturbation lemma mentions, plus the
/// checked conclusions.
#[derive(Debug, Clone, Serialize)]
pub struct PerturbationCheck {
    pub rank_a: usize,
    pub rank_b: usize,
    pub pinv_norm_a: f64,
    pub pinv_norm_b: f64,
    pub distance: f64,
    pub premise: CheckResult,
    pub rank_equality: CheckResult,
    /// `||A^+|| <= ||B^+|| / (1 - ||B^+|| ||A - B||)`, vacuous when the denominator is not positive.
    pub stated_bound: CheckResult,
    /// `||B^+|| <= ||A^+|| / (1 - ||A^+|| ||A - B||)`, the form implied by the premise.
    pub premise_side_bound: CheckResult,
}

impl PerturbationCheck {
    pub fn premise_met(&self) -> bool {
        self.premise.passed()
    }

    pub fn violated(&self) -> bool {
        self.rank_equality.failed() || self.stated_bound.failed() || self.premise_side_bound.failed()
    }
}

/// Checks `1 <= rank(B) <= rank(A)`, `||A^+|| ||A - B|| < 1` ⇒ `rank(A) = rank(B)`
/// together with both orientations of the norm bound.
pub fn perturbation_bound_check(a: &Matrix, b: &Matrix) -> Result<PerturbationCheck, LinalgError> {
    if a.shape() != b.shape() {
        return Err(LinalgError::ShapeMismatch(format!(
            "A is {}x{}, B is {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let da = decompose(a, DEFAULT_RANK_TOL_FACTOR)?;
    let db = decompose(b, DEFAULT_RANK_TOL_FACTOR)?;
    let distance = spectral_norm(&(a - b));
    let (rank_a, rank_b) = (da.rank(), db.rank());
    let (na, nb) = (da.pinv_norm(), db.pinv_norm());
    let product = na * distance;

    let premise_ok = 1 <= rank_b && rank_b <= rank_a && product < 1.0;
    let skipped = |name: &str| CheckResult::new(name, CheckStatus::PremiseNotMet);
    if !premise_ok {
        let premise = CheckResult::new("premise", CheckStatus::PremiseNotMet)
            .with_measured(product)
            .with_detail(format!(
                "rank(A) = {rank_a}, rank(B) = {rank_b}, ||A^+|| ||A - B|| = {product}"
            ));
        return Ok(PerturbationCheck {
            rank_a,
            rank_b,
            pinv_norm_a: na,
            pinv_norm_b: nb,
            distance,
            premise,
            rank_equality: skipped("rank_equality"),
            stated_bound: skipped("stated_bound"),
            premise_side_bound: skipped("premise_side_bound"),
        });
    }

    let premise = CheckResult::pass("premise").with_measured(product).with_bound(1.0);
    let rank_equality = if rank_a == rank_b {
        CheckResult::pass("rank_equality")
    } else {
        CheckResult::fail("rank_equality")
            .with_detail(format!("rank(A) = {rank_a} != rank(B) = {rank_b}"))
    };

    let stated_denominator = 1.0 - nb * distance;
    let stated_bound = if stated_denominator > 0.0 {
        let bound = nb / stated_denominator;
        CheckResult::upper("stated_bound", na, bound, PENROSE_TOL * bound)
    } else {
        CheckResult::new("stated_bound", CheckStatus::NotApplicable)
            .with_measured(na)
            .with_detail("||B^+|| ||A - B|| >= 1: bound is vacuous")
    };
    let side_bound = na / (1.0 - product);
    let premise_side_bound =
        CheckResult::upper("premise_side_bound", nb, side_bound, PENROSE_TOL * side_bound);

    Ok(PerturbationCheck {
        rank_a,
        rank_b,
        pinv_norm_a: na,
        pinv_norm_b: nb,
        distance,
        premise,
        rank_equality,
        stated_bound,
        premise_side_bound,
    })
}

/// Uniform random `m x n` matrix with entries in `[-1, 1]`.
pub fn random_matrix<R: rand::Rng>(rng: &mut R, m: usize, n: usize) -> Matrix {
    Matrix::from_fn(m, n, |_, _| rng.random_range(-1.0..=1.0))
}

/// Random matrix of the given rank (almost surely), as a product of factors.
pub fn random_matrix_of_rank<R: rand::Rng>(rng: &mut R, m: usize, n: usize, rank: usize) -> Matrix {
    random_matrix(rng, m, rank) * random_matrix(rng, rank, n)
}

/// Summary of a randomized run of the pseudoinverse identities and both lemmas.
#[derive(Debug, Clone, Default, Serialize)]
pub struct LinalgAudit {
    pub samples: usize,
    pub max_penrose_residual: f64,
    pub max_projector_residual: f64,
    pub surjective_cases: usize,
    pub max_surjective_diff: f64,
    pub penrose_failures: usize,
    pub surjective_failures: usize,
    pub banach_instances: usize,
    pub banach_violations: usize,
    pub perturbation_instances: usize,
    pub perturbation_violations: usize,
    /// Instances where the stated orientation of the norm bound is vacuous.
    pub stated_bound_vacuous: usize,
}

impl LinalgAudit {
    pub fn passed(&self) -> bool {
        self.penrose_failures == 0
            && self.surjective_failures == 0
            && self.banach_violations == 0
            && self.perturbation_violations == 0
    }
}

/// Runs `samples` random instances of each check with dimensions up to `max_dim`.
pub fn linalg_audit(samples: usize, seed: u64, max_dim: usize) -> Result<LinalgAudit, LinalgError> {
    use rand::Rng;
    let mut rng = crate::sampling::rng(seed);
    let mut out = LinalgAudit {
        samples,
        ..LinalgAudit::default()
    };
    for _ in 0..samples {
        let m = rng.random_range(1..=max_dim);
        let n = rng.random_range(1..=max_dim);
        let a = random_matrix(&mut rng, m, n);
        let d = decompose(&a, DEFAULT_RANK_TOL_FACTOR)?;
        let x = d.pinv();
        let penrose = penrose_residuals(&a, &x).max();
        let projector = projector_residual(&d);
        out.max_penrose_residual = out.max_penrose_residual.max(penrose);
        out.max_projector_residual = out.max_projector_residual.max(projector);
        if penrose > PENROSE_TOL || projector > PENROSE_TOL {
            out.penrose_failures += 1;
        }
        if d.is_surjective() {
            out.surjective_cases += 1;
            let diff = (pinv_surjective(&a)? - &x).norm() / x.norm().max(f64::MIN_POSITIVE);
            out.max_surjective_diff = out.max_surjective_diff.max(diff);
            if diff > CROSS_CHECK_TOL {
                out.surjective_failures += 1;
            }
        }

        // Banach: B = I + E with ||E|| < 1.
        let k = rng.random_range(1..=max_dim);
        let e = random_matrix(&mut rng, k, k);
        let scale = rng.random_range(0.0..0.999) / spectral_norm(&e).max(f64::MIN_POSITIVE);
        let b = Matrix::identity(k, k) + e * scale;
        let check = banach_bound_check(&b)?;
        if check.status != CheckStatus::PremiseNotMet {
            out.banach_instances += 1;
            if check.failed() {
                out.banach_violations += 1;
            }
        }

        // Perturbation: B = A + E inside the column and row spaces of A, ||A^+|| ||E|| < 1.
        let rank = rng.random_range(1..=m.min(n));
        let a = random_matrix_of_rank(&mut rng, m, n, rank);
        let da = decompose(&a, DEFAULT_RANK_TOL_FACTOR)?;
        let r = da.rank();
        if r == 0 {
            continue;
        }
        let core = random_matrix(&mut rng, r, r);
        let u = da.u.columns(0, r);
        let v = da.v.columns(0, r);
        let e = u * core * v.transpose();
        let scale = rng.random_range(0.0..0.999) / (da.pinv_norm() * spectral_norm(&e)).max(f64::MIN_POSITIVE);
        let b = &a + e * scale;
        let check = perturbation_bound_check(&a, &b)?;
        if check.premise_met() {
            out.perturbation_instances += 1;
            if check.violated() {
                out.perturbation_violations += 1;
            }
            if check.stated_bound.status == CheckStatus::NotApplicable {
                out.stated_bound_vacuous += 1;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn mat(rows: usize, cols: usize, data: &[f64]) -> Matrix {
        Matrix::from_row_slice(rows, cols, data)
    }

    #[test]
    fn decompose_identity() {
        let d = decompose(&Matrix::identity(2, 2), DEFAULT_RANK_TOL_FACTOR).unwrap();
        assert_eq!(d.singular_values, vec![1.0, 1.0]);
        assert_eq!(d.numerical_rank, 2);
    }

    #[test]
    fn decompose_zero_operator() {
        let d = decompose(&Matrix::zeros(2, 3), DEFAULT_RANK_TOL_FACTOR).unwrap();
        assert_eq!(d.singular_values, vec![0.0, 0.0]);
        assert_eq!(d.numerical_rank, 0);
        assert_eq!(d.rank_tol, DEFAULT_RANK_TOL_FACTOR);
    }

    #[test]
    fn decompose_diagonal_sorts_and_counts_rank() {
        let d = decompose(&mat(2, 2, &[0.0, 0.0, 0.0, 3.0]), DEFAULT_RANK_TOL_FACTOR).unwrap();
        assert_abs_diff_eq!(d.singular_values[0], 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.singular_values[1], 0.0, epsilon = 1e-15);
        assert_eq!(d.numerical_rank, 1);
        let a = mat(2, 3, &[1.0, -2.0, 0.5, 3.0, 0.25, 4.0]);
        let d = decompose(&a, DEFAULT_RANK_TOL_FACTOR).unwrap();
        assert!((d.reconstruct() - &a).norm() <= 1e-14 * a.norm());
    }

    #[test]
    fn decompose_rejects_non_finite() {
        let a = mat(1, 2, &[1.0, f64::NAN]);
        assert_eq!(decompose(&a, 1e-16).unwrap_err(), LinalgError::NonFinite);
    }

    #[test]
    fn pinv_examples() {
        let id = decompose(&Matrix::identity(2, 2), DEFAULT_RANK_TOL_FACTOR).unwrap();
        assert!((pinv(&id) - Matrix::identity(2, 2)).norm() < 1e-15);

        // A^T (A A^T)^{-1} for [1, 2] is [1, 2]^T / 5.
        let row = mat(1, 2, &[1.0, 2.0]);
        let p = pinv(&decompose(&row, DEFAULT_RANK_TOL_FACTOR).unwrap());
        assert_abs_diff_eq!(p[(0, 0)], 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(p[(1, 0)], 0.4, epsilon = 1e-15);

        let zero = pinv(&decompose(&Matrix::zeros(2, 3), DEFAULT_RANK_TOL_FACTOR).unwrap());
        assert_eq!(zero.shape(), (3, 2));
        assert_eq!(zero.norm(), 0.0);
    }

    #[test]
    fn pinv_surjective_examples() {
        let p = pinv_surjective(&mat(1, 2, &[1.0, 2.0])).unwrap();
        assert_abs_diff_eq!(p[(0, 0)], 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(p[(1, 0)], 0.4, epsilon = 1e-15);
        let p = pinv_surjective(&Matrix::identity(2, 2)).unwrap();
        assert!((p - Matrix::identity(2, 2)).norm() < 1e-15);
        assert_eq!(
            pinv_surjective(&mat(1, 2, &[0.0, 0.0])).unwrap_err(),
            LinalgError::NotSurjective { rank: 0, rows: 1 }
        );
    }

    #[test]
    fn projector_examples() {
        let id = decompose(&Matrix::identity(2, 2), DEFAULT_RANK_TOL_FACTOR).unwrap();
        assert!((proj_ker_perp(&id) - Matrix::identity(2, 2)).norm() < 1e-15);
        let axis = decompose(&mat(2, 2, &[1.0, 0.0, 0.0, 0.0]), DEFAULT_RANK_TOL_FACTOR).unwrap();
        assert!((proj_ker_perp(&axis) - mat(2, 2, &[1.0, 0.0, 0.0, 0.0])).norm() < 1e-15);
        let row = decompose(&mat(1, 2, &[1.0, 2.0]), DEFAULT_RANK_TOL_FACTOR).unwrap();
        let expected = mat(2, 2, &[0.2, 0.4, 0.4, 0.8]);
        assert!((proj_im(&row) - expected).norm() < 1e-15);
    }

    #[test]
    fn residual_complement_vanishes_for_surjective() {
        let d = decompose(&mat(1, 2, &[3.0, -1.0]), DEFAULT_RANK_TOL_FACTOR).unwrap();
        let r = d.residual_complement(&Vector::from_row_slice(&[7.0]));
        assert_eq!(r[0], 0.0);
        let tall = decompose(&mat(2, 1, &[1.0, 0.0]), DEFAULT_RANK_TOL_FACTOR).unwrap();
        let r = tall.residual_complement(&Vector::from_row_slice(&[0.3, 1.0]));
        assert_abs_diff_eq!(r[0], 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(r[1], 1.0, epsilon = 1e-16);
    }

    #[test]
    fn banach_examples() {
        let r = banach_bound_check(&Matrix::identity(2, 2)).unwrap();
        assert!(r.passed());
        assert_abs_diff_eq!(r.bound.unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.measured.unwrap(), 1.0, epsilon = 1e-15);

        let r = banach_bound_check(&mat(2, 2, &[1.5, 0.0, 0.0, 0.75])).unwrap();
        assert!(r.passed());
        assert_abs_diff_eq!(r.bound.unwrap(), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.measured.unwrap(), 4.0 / 3.0, epsilon = 1e-14);

        let r = banach_bound_check(&mat(2, 2, &[2.5, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(r.status, CheckStatus::PremiseNotMet);
        assert!(banach_bound_check(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn perturbation_examples() {
        let id = Matrix::identity(2, 2);
        let r = perturbation_bound_check(&id, &id).unwrap();
        assert!(r.premise_met() && !r.violated());
        assert_abs_diff_eq!(r.stated_bound.bound.unwrap(), 1.0, epsilon = 1e-15);

        let b = mat(2, 2, &[1.0, 0.0, 0.0, 0.9]);
        let r = perturbation_bound_check(&id, &b).unwrap();
        assert!(r.premise_met() && !r.violated());
        assert_eq!((r.rank_a, r.rank_b), (2, 2));
        assert_abs_diff_eq!(r.premise.measured.unwrap(), 0.1, epsilon = 1e-15);
        let nb = 10.0 / 9.0;
        assert_abs_diff_eq!(r.stated_bound.bound.unwrap(), nb / (1.0 - nb * 0.1), epsilon = 1e-14);

        let a = mat(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let r = perturbation_bound_check(&a, &id).unwrap();
        assert!(!r.premise_met());
        assert_eq!(r.premise.status, CheckStatus::PremiseNotMet);
    }

    #[test]
    fn stated_bound_is_vacuous_when_denominator_nonpositive() {
        // Premise holds (|a - b| / |a| = 0.6 < 1) but ||B^+|| ||A - B|| = 1.5.
        let a = mat(1, 1, &[1.0]);
        let b = mat(1, 1, &[0.4]);
        let r = perturbation_bound_check(&a, &b).unwrap();
        assert!(r.premise_met());
        assert_eq!(r.stated_bound.status, CheckStatus::NotApplicable);
        assert!(r.premise_side_bound.passed());
        assert!(!r.violated());
    }
}
