//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any failure.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use mgn::auto::{auto_certify, AutoOptions, ModelChoice};
use mgn::linalg::linalg_audit;
use mgn::majorant::{
    certify_lipschitz, certify_smale, delta_threshold, smallest_zero_bisect, Certificate, CertificateMode,
    SMALE_ALPHA_THRESHOLD,
};
use mgn::problems::{build, BuiltProblem, ProblemSpec};
use mgn::scalar::{self, TraceStatus};
use mgn::solver::{kappa_estimate, linearization_audit, residual_contraction_check, solve, SolveOptions, SolveStatus};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn builtin(name: &str) -> BuiltProblem {
    build(&ProblemSpec::builtin(name)).expect("built-in problem")
}

fn auto(p: &BuiltProblem, choice: ModelChoice) -> Result<Certificate, String> {
    let a = auto_certify(&p.problem, &p.x0, &choice, &AutoOptions::default()).map_err(|e| e.to_string())?;
    a.outcome.map_err(|r| r.to_string())
}

fn lipschitz_auto() -> ModelChoice {
    ModelChoice::Lipschitz { l: None, radius: None }
}

fn pseudoinverse() -> Outcome {
    let start = Instant::now();
    let a = linalg_audit(10_000, 0, 8).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(a.penrose_failures == 0 && a.surjective_failures == 0, || {
        format!("{} Penrose failures, {} surjective mismatches", a.penrose_failures, a.surjective_failures)
    })?;
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:.2?}"))?;
    Ok(format!(
        "{} matrices, max identity residual {:.1e}, max projector residual {:.1e}, {} surjective cross-checks (max diff {:.1e}), {elapsed:.2?}",
        a.samples, a.max_penrose_residual, a.max_projector_residual, a.surjective_cases, a.max_surjective_diff
    ))
}

fn lemmas() -> Outcome {
    let a = linalg_audit(10_000, 1, 8).map_err(|e| e.to_string())?;
    ensure(a.banach_instances >= 10_000 && a.perturbation_instances >= 9_000, || {
        format!("too few instances: {} / {}", a.banach_instances, a.perturbation_instances)
    })?;
    ensure(a.banach_violations == 0 && a.perturbation_violations == 0, || {
        format!("{} Banach and {} perturbation violations", a.banach_violations, a.perturbation_violations)
    })?;
    Ok(format!(
        "{} Banach and {} perturbation instances, no violations",
        a.banach_instances, a.perturbation_instances
    ))
}

fn closed_forms() -> Outcome {
    let c = certify_lipschitz(0.25, 1.0, 0.0, f64::INFINITY).map_err(|r| r.to_string())?;
    let expected = 1.0 - 0.5f64.sqrt();
    ensure((c.t_star - expected).abs() <= 1e-12, || format!("lipschitz t* = {}", c.t_star))?;

    let gamma = 1.7;
    let c = certify_smale(SMALE_ALPHA_THRESHOLD / gamma, gamma, 0.0).map_err(|r| r.to_string())?;
    let expected = (2.0 - 2f64.sqrt()) / (2.0 * gamma);
    ensure((c.t_star - expected).abs() <= 1e-12, || format!("smale t* = {}", c.t_star))?;

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let (mut lip, mut sma) = (0, 0);
    while lip < 100 {
        let kappa = rng.random_range(0.0..0.9);
        let l = rng.random_range(0.1..10.0);
        let beta = rng.random_range(0.01..1.0) * delta_threshold(kappa) / l;
        if let Ok(c) = certify_lipschitz(beta, l, kappa, f64::INFINITY) {
            let z = smallest_zero_bisect(&c.aux()).map_err(|e| e.to_string())?;
            worst = worst.max((z - c.t_star).abs());
            lip += 1;
        }
    }
    while sma < 100 {
        let kappa = rng.random_range(0.0..0.5);
        let gamma = rng.random_range(0.1..10.0);
        let beta = rng.random_range(0.01..1.0) * SMALE_ALPHA_THRESHOLD / gamma;
        if let Ok(c) = certify_smale(beta, gamma, kappa) {
            let z = smallest_zero_bisect(&c.aux()).map_err(|e| e.to_string())?;
            worst = worst.max((z - c.t_star).abs());
            sma += 1;
        }
    }
    ensure(worst <= 1e-10, || format!("bisection differs by {worst:.2e}"))?;
    Ok(format!("closed forms exact, bisection within {worst:.1e} on {lip} + {sma} draws"))
}

fn threshold() -> Outcome {
    let mut worst = f64::INFINITY;
    for i in 0..100 {
        let kappa = i as f64 / 100.0;
        let bl = delta_threshold(kappa);
        let lambda = (1.0 - bl) * kappa;
        let disc = (1.0 - lambda).powi(2) - 2.0 * bl;
        worst = worst.min(disc);
    }
    ensure(worst >= -1e-12, || format!("discriminant {worst:.3e}"))?;
    Ok(format!("min discriminant {worst:.2e} over 100 kappa"))
}

fn scalar_sequence() -> Outcome {
    let mut certs = Vec::new();
    for beta in [0.05, 0.1, 0.2, 0.25, 0.3, 0.45] {
        for kappa in [0.0, 0.1, 0.3, 0.5] {
            for l in [0.5, 1.0, 1.1] {
                certs.extend(certify_lipschitz(beta, l, kappa, f64::INFINITY));
            }
            for gamma in [0.1, 0.3, 0.5] {
                certs.extend(certify_smale(beta, gamma, kappa));
            }
        }
    }
    certs.extend(certify_lipschitz(0.5, 1.0, 0.0, f64::INFINITY));
    let mut rated = 0;
    let mut floor_gap = 0.0f64;
    for c in &certs {
        // lambda > 0 converges only linearly, so allow a long run to reach the sup.
        let t = scalar::run(c, 20_000, scalar::DEFAULT_STOP_TOL);
        let tag = || format!("beta {} kappa {} model {:?}", c.beta, c.kappa, c.model.descriptor());
        ensure(t.ts.windows(2).all(|w| w[1] > w[0]), || format!("not increasing: {}", tag()))?;
        ensure((t.ts[1] - c.beta).abs() <= 1e-14 * c.beta.max(1.0), || format!("t1 != beta: {}", tag()))?;
        ensure(t.ts.iter().all(|&x| x <= c.t_star), || format!("overshoot: {}", tag()))?;
        let gap = c.t_star - t.last();
        // At a double root h(t) ~ (t* - t)^2 / 2 falls below rounding once t* - t ~ sqrt(eps).
        let double_root = c.h_prime_0_at_star() == 0.0;
        if double_root {
            ensure(t.status == TraceStatus::Stalled && gap <= 4.0 * f64::EPSILON.sqrt() * c.t_star, || {
                format!("double root: sup misses t* by {gap:.2e}: {}", tag())
            })?;
            floor_gap = floor_gap.max(gap);
        } else {
            ensure(gap <= 1e-12, || format!("sup misses t* by {gap:.2e}: {}", tag()))?;
        }
        if c.lambda == 0.0 {
            let r = scalar::rate_check(&t, c).map_err(|e| e.to_string())?;
            ensure(r.all_passed(), || format!("rate bound failed: {}", tag()))?;
            rated += 1;
        }
    }
    Ok(format!(
        "{} certificates, {rated} with rate checks; double-root boundary stops {floor_gap:.1e} below t*",
        certs.len()
    ))
}

fn audited_solve(p: &BuiltProblem, cert: &Certificate) -> Result<Duration, String> {
    let start = Instant::now();
    let r = solve(&p.problem, &p.x0, Some(cert), &SolveOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let name = &p.problem.name;
    let audit = r.audit.as_ref().ok_or("no audit")?;
    ensure(r.status == SolveStatus::Stationary, || format!("{name}: status {:?}", r.status))?;
    ensure(audit.bd.iter().all(|&m| m >= -1e-9), || format!("{name}: step bound {:?}", audit.bd))?;
    ensure(audit.quad.iter().flatten().all(|&m| m >= -1e-9), || format!("{name}: quadratic bound {:?}", audit.quad))?;
    ensure(audit.containment.iter().all(|&m| m >= -1e-9), || format!("{name}: containment {:?}", audit.containment))?;
    ensure(audit.rank_constant, || format!("{name}: rank {:?}", r.rank_history))?;
    if cert.mode == CertificateMode::Surjective {
        let trace = scalar::run(cert, r.iterates.len() + 1, 0.0);
        let c = residual_contraction_check(&r, &trace, 1e-9).map_err(|e| e.to_string())?;
        ensure(c.result.passed(), || format!("{name}: residual contraction {:?}", c.margins))?;
    }
    ensure(elapsed < Duration::from_secs(1), || format!("{name}: took {elapsed:.2?}"))?;
    Ok(elapsed)
}

fn certified_audit() -> Outcome {
    let sq = build(&ProblemSpec::builtin("scalar_quadratic").param("c", 1.5)).map_err(|e| e.to_string())?;
    let c = auto(&sq, ModelChoice::Lipschitz { l: Some(1.0), radius: None })?;
    ensure((c.beta - 0.25).abs() <= 1e-15, || format!("beta {}", c.beta))?;
    let t_sq = audited_solve(&sq, &c)?;
    let circle = builtin("circle");
    let c = auto(&circle, lipschitz_auto())?;
    ensure(c.mode == CertificateMode::Surjective, || "circle not in surjective mode".into())?;
    let t_circle = audited_solve(&circle, &c)?;
    Ok(format!("scalar_quadratic {t_sq:.2?}, circle {t_circle:.2?}"))
}

fn stationarity() -> Outcome {
    let p = builtin("parabola_residual");
    let r = solve(&p.problem, &p.x0, None, &SolveOptions::default()).map_err(|e| e.to_string())?;
    let s = *r.stationarity.last().unwrap();
    let f = *r.residual_norms.last().unwrap();
    ensure(r.status == SolveStatus::Stationary && s <= 1e-10, || format!("status {:?}, stationarity {s:.2e}", r.status))?;
    ensure(f > 0.01, || format!("residual {f}"))?;
    Ok(format!("stationarity {s:.1e} with ||F|| = {f:.4} after {} steps", r.iterations()))
}

fn kappa_sanity() -> Outcome {
    let mut parts = Vec::new();
    for name in ["scalar_quadratic", "circle", "parabola_residual"] {
        let p = builtin(name);
        let beta = mgn::solver::stationarity(&p.problem, &p.x0).map_err(|e| e.to_string())?;
        let radius = mgn::auto::DEFAULT_RADIUS_FACTOR * beta;
        let a = kappa_estimate(&p.problem, &p.x0, radius, 2000, 11).map_err(|e| e.to_string())?;
        let b = kappa_estimate(&p.problem, &p.x0, radius, 2000, 11).map_err(|e| e.to_string())?;
        ensure(a.value.to_bits() == b.value.to_bits(), || format!("{name}: {} vs {}", a.value, b.value))?;
        if name == "parabola_residual" {
            ensure(a.value > 0.0 && a.value < 1.0, || format!("{name}: kappa {}", a.value))?;
        } else {
            ensure(a.value <= 1e-10, || format!("{name}: kappa {}", a.value))?;
        }
        parts.push(format!("{name} {:.3e}", a.value));
    }
    Ok(parts.join(", "))
}

fn linearization() -> Outcome {
    let mut certified = vec![
        (builtin("scalar_quadratic"), lipschitz_auto()),
        (builtin("circle"), lipschitz_auto()),
        (builtin("parabola_residual"), lipschitz_auto()),
    ];
    let exp = build(&ProblemSpec::builtin("exp_system").param("c", 1.0)).map_err(|e| e.to_string())?;
    certified.push((exp, ModelChoice::Smale { gamma: None }));
    let mut parts = Vec::new();
    for (p, choice) in &certified {
        let c = auto(p, choice.clone())?;
        let a = linearization_audit(&p.problem, &c, &p.x0, 1000, 5, 1e-9).map_err(|e| e.to_string())?;
        let name = &p.problem.name;
        ensure(a.violations == 0, || format!("{name}: {} violations, worst {:.2e}", a.violations, a.worst_margin))?;
        ensure(a.checked >= 900, || format!("{name}: only {} pairs inside R", a.checked))?;
        parts.push(format!("{name} {}", a.checked));
    }
    Ok(format!("pairs checked: {}", parts.join(", ")))
}

fn cli() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_mgn");
    let args = ["solve", "--builtin", "circle", "--x0", "2,0", "--certify", "auto", "--seed", "7"];
    let run = || Command::new(bin).args(args).env_remove("MGN_SEED").output().map_err(|e| e.to_string());
    let (a, b) = (run()?, run()?);
    ensure(a.status.code() == Some(0), || format!("solve exited {:?}", a.status.code()))?;
    ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || "reports differ".into())?;

    let refusals: [&[&str]; 2] = [
        &["certify", "--majorant", "lipschitz:L=1", "--beta", "0.6", "--kappa", "0"],
        &["certify", "--builtin", "exp_system", "--majorant", "smale"],
    ];
    for args in refusals {
        let out = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        let stderr = String::from_utf8_lossy(&out.stderr);
        ensure(out.status.code() == Some(2), || format!("{args:?} exited {:?}", out.status.code()))?;
        ensure(stderr.contains("threshold"), || format!("{args:?}: stderr {stderr:?}"))?;
    }
    Ok(format!("{} identical bytes, refusals exit 2 naming the threshold check", a.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("pseudoinverse identities", pseudoinverse),
        ("perturbation lemmas", lemmas),
        ("closed-form t*", closed_forms),
        ("threshold consistency", threshold),
        ("scalar sequence", scalar_sequence),
        ("certified audit", certified_audit),
        ("stationarity semantics", stationarity),
        ("kappa estimator", kappa_sanity),
        ("linearization error", linearization),
        ("cli determinism", cli),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {:2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
