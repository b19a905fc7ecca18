//! The `mgn` command line.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 certificate refused,
//! 3 audit violation.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::auto::{auto_certify, AutoOptions, ModelChoice, Source, DEFAULT_SAMPLES};
use crate::linalg::{linalg_audit, DEFAULT_RANK_TOL_FACTOR};
use crate::majorant::{
    certify, certify_lipschitz, certify_smale, Certificate, CertificateMode, MajorantModel, Refusal,
};
use crate::problems::{build, lipschitz_estimate, smale_gamma_estimate, BuiltProblem, ProblemSpec};
use crate::report::{trace_rows, write_trace_csv, CertificateRecord, RefusalRecord, Report, SolveRecord, TraceRecord};
use crate::scalar::{self, rate_check};
use crate::solver::{kappa_estimate, linearization_audit, solve, stationarity, SolveOptions, SolveStatus};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_REFUSED: i32 = 2;
pub const EXIT_AUDIT: i32 = 3;

/// Environment variable that overrides `--seed`.
pub const SEED_ENV: &str = "MGN_SEED";

#[derive(Debug, Parser)]
#[command(name = "mgn", version, about = "Certified Gauss-Newton for nonlinear least squares")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Issue or refuse a convergence certificate.
    Certify(CertifyArgs),
    /// Run Gauss-Newton, optionally certified and audited.
    Solve(SolveArgs),
    /// Run the scalar majorizing sequence of a certificate.
    Scalar(ScalarArgs),
    /// Estimate beta, L, gamma and kappa for a problem.
    Estimate(EstimateArgs),
    /// Randomized check of the pseudoinverse identities and perturbation lemmas.
    CheckLinalg(LinalgArgs),
}

#[derive(Debug, Args)]
struct ProblemArgs {
    /// Built-in problem: scalar_quadratic, circle, parabola_residual, exp_system.
    #[arg(long, conflicts_with = "problem")]
    builtin: Option<String>,
    /// Problem file (JSON: name, params, x0).
    #[arg(long)]
    problem: Option<PathBuf>,
    /// Starting point, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x0: Option<Vec<f64>>,
    /// Problem parameter as key=value; repeatable.
    #[arg(long = "param", value_parser = parse_key_value)]
    params: Vec<(String, f64)>,
}

#[derive(Debug, Args)]
struct EstimationArgs {
    /// Radius of the estimation ball (default 3 beta).
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Sampler seed; MGN_SEED takes precedence.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// JSON report path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV trace path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// lipschitz[:L=<f>[,R=<f>]] | smale[:gamma=<f>] | custom:<path>
    #[arg(long, default_value = "lipschitz")]
    majorant: String,
    /// Asserted beta; computed from the problem when omitted.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    /// Override lambda (must be at least the minimal admissible value).
    #[arg(long)]
    lambda: Option<f64>,
    #[command(flatten)]
    estimation: EstimationArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CertifyMode {
    /// No certificate, plain Gauss-Newton.
    None,
    /// Estimate any constant the majorant descriptor leaves out.
    Auto,
    /// All constants must be given.
    Asserted,
}

impl CertifyMode {
    fn name(self) -> &'static str {
        match self {
            CertifyMode::None => "none",
            CertifyMode::Auto => "auto",
            CertifyMode::Asserted => "asserted",
        }
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, value_enum, default_value_t = CertifyMode::None)]
    certify: CertifyMode,
    #[arg(long, default_value = "lipschitz")]
    majorant: String,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    /// Default 1e-12 max(1, ||F(x0)||).
    #[arg(long)]
    stationary_tol: Option<f64>,
    #[arg(long, default_value_t = 1e-9)]
    audit_tol: f64,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL_FACTOR)]
    rank_tol_factor: f64,
    /// Domain ball radius around x0 (default 2 t* when certified).
    #[arg(long)]
    domain_radius: Option<f64>,
    /// Sampled pairs for the linearization-error audit of certified runs.
    #[arg(long, default_value_t = 1000)]
    lemma_samples: usize,
    #[command(flatten)]
    estimation: EstimationArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ScalarArgs {
    #[arg(long)]
    majorant: String,
    #[arg(long)]
    beta: f64,
    #[arg(long, default_value_t = 0.0)]
    kappa: f64,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = scalar::DEFAULT_MAX_ITERS)]
    max_iters: usize,
    #[arg(long, default_value_t = scalar::DEFAULT_STOP_TOL)]
    stop_tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    estimation: EstimationArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LinalgArgs {
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 8)]
    max_dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_key_value(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got '{s}'"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("{k}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

/// Parsed majorant descriptor; missing constants are `None`.
#[derive(Debug, Clone)]
enum Descriptor {
    Lipschitz { l: Option<f64>, radius: Option<f64> },
    Smale { gamma: Option<f64> },
    Custom(MajorantModel),
}

fn parse_fields(body: &str, allowed: &[&str]) -> Result<BTreeMap<String, f64>, Failure> {
    let mut out = BTreeMap::new();
    for part in body.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = parse_key_value(part).map_err(usage)?;
        if !allowed.contains(&k.as_str()) {
            return Err(usage(format!("unknown majorant field '{k}' (allowed: {})", allowed.join(", "))));
        }
        if !v.is_finite() || v <= 0.0 {
            return Err(usage(format!("majorant field {k} must be positive and finite")));
        }
        out.insert(k, v);
    }
    Ok(out)
}

fn parse_descriptor(s: &str) -> Result<Descriptor, Failure> {
    let (kind, body) = s.split_once(':').unwrap_or((s, ""));
    match kind {
        "lipschitz" => {
            let f = parse_fields(body, &["L", "R"])?;
            Ok(Descriptor::Lipschitz {
                l: f.get("L").copied(),
                radius: f.get("R").copied(),
            })
        }
        "smale" => {
            let f = parse_fields(body, &["gamma"])?;
            Ok(Descriptor::Smale {
                gamma: f.get("gamma").copied(),
            })
        }
        "custom" if !body.is_empty() => load_table(Path::new(body)).map(Descriptor::Custom),
        _ => Err(usage(format!(
            "bad majorant '{s}': expected lipschitz[:L=<f>[,R=<f>]], smale[:gamma=<f>] or custom:<path>"
        ))),
    }
}

fn load_table(path: &Path) -> Result<MajorantModel, Failure> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let headers = reader.headers().map_err(|e| usage(e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (t_col, fp_col) = match (col("t"), col("f_prime")) {
        (Some(t), Some(fp)) => (t, fp),
        _ => return Err(usage(format!("{}: header must contain t and f_prime", path.display()))),
    };
    let f_col = col("f");
    let (mut ts, mut fs, mut fps) = (Vec::new(), Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record.map_err(|e| usage(e.to_string()))?;
        let get = |i: usize| -> Result<f64, Failure> {
            record
                .get(i)
                .unwrap_or("")
                .trim()
                .parse()
                .map_err(|e| usage(format!("{}: {e}", path.display())))
        };
        ts.push(get(t_col)?);
        fps.push(get(fp_col)?);
        if let Some(i) = f_col {
            fs.push(get(i)?);
        }
    }
    let label = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    MajorantModel::tabulated(label, ts, f_col.map(|_| fs), fps).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn effective_seed(flag: u64) -> Result<u64, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| usage(format!("{SEED_ENV}={v} is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

fn load_problem(args: &ProblemArgs) -> Result<Option<(ProblemSpec, BuiltProblem)>, Failure> {
    let mut spec = match (&args.builtin, &args.problem) {
        (Some(name), None) => ProblemSpec::builtin(name),
        (None, Some(path)) => ProblemSpec::from_file(path).map_err(|e| usage(e.to_string()))?,
        (None, None) => {
            if args.x0.is_some() || !args.params.is_empty() {
                return Err(usage("--x0/--param need --builtin or --problem"));
            }
            return Ok(None);
        }
        (Some(_), Some(_)) => return Err(usage("give either --builtin or --problem, not both")),
    };
    for (k, v) in &args.params {
        spec.params.insert(k.clone(), *v);
    }
    if let Some(x0) = &args.x0 {
        spec.x0 = x0.clone();
    }
    let built = build(&spec).map_err(|e| usage(e.to_string()))?;
    Ok(Some((spec, built)))
}

fn problem_config(spec: Option<&ProblemSpec>, built: Option<&BuiltProblem>) -> Value {
    match (spec, built) {
        (Some(s), Some(b)) => json!({
            "name": s.name,
            "params": b.params,
            "x0": b.x0.iter().copied().collect::<Vec<f64>>(),
        }),
        _ => Value::Null,
    }
}

fn write_output(report: &Report, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    let text = report.to_json();
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| usage(e.to_string())),
    }
}

fn write_csv(path: Option<&Path>, rows: &[[String; 9]]) -> Result<(), Failure> {
    if let Some(path) = path {
        let file = std::fs::File::create(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        write_trace_csv(file, rows).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn refuse(report: &mut Report, refusal: &Refusal) -> Failure {
    report.refusal = Some(RefusalRecord::from(refusal));
    let message = format!("refused: check '{}' failed: {}", refusal.failed_check, refusal.detail);
    report.outcome.status = "refused".into();
    report.outcome.exit_code = EXIT_REFUSED;
    report.outcome.detail = Some(message.clone());
    Failure {
        code: EXIT_REFUSED,
        message,
    }
}

fn choice_for(descriptor: &Descriptor) -> ModelChoice {
    match descriptor {
        Descriptor::Lipschitz { l, radius } => ModelChoice::Lipschitz { l: *l, radius: *radius },
        Descriptor::Smale { gamma } => ModelChoice::Smale { gamma: *gamma },
        Descriptor::Custom(model) => ModelChoice::Model(model.clone()),
    }
}

fn descriptor_sources(descriptor: &Descriptor) -> BTreeMap<String, Source> {
    let mut s = BTreeMap::new();
    match descriptor {
        Descriptor::Lipschitz { radius, .. } => {
            s.insert("L".into(), Source::Asserted);
            if radius.is_some() {
                s.insert("R".into(), Source::Asserted);
            }
        }
        Descriptor::Smale { .. } => {
            s.insert("gamma".into(), Source::Asserted);
            s.insert("R".into(), Source::Derived);
        }
        Descriptor::Custom(_) => {
            s.insert("model".into(), Source::Asserted);
            s.insert("R".into(), Source::Asserted);
        }
    }
    s
}

/// Certificate from an asserted beta and fully specified descriptor.
fn certify_asserted(descriptor: &Descriptor, beta: f64, kappa: f64, lambda: Option<f64>) -> Result<Result<Certificate, Refusal>, Failure> {
    let model = match descriptor {
        Descriptor::Lipschitz { l: Some(l), radius } => {
            let r = radius.unwrap_or(f64::INFINITY);
            if lambda.is_none() {
                return Ok(certify_lipschitz(beta, *l, kappa, r));
            }
            MajorantModel::lipschitz(*l, r)
        }
        Descriptor::Smale { gamma: Some(g) } => {
            if lambda.is_none() {
                return Ok(certify_smale(beta, *g, kappa));
            }
            MajorantModel::smale(*g)
        }
        Descriptor::Custom(model) => model.clone(),
        _ => return Err(usage("majorant constants (L or gamma) are required with --beta")),
    };
    Ok(certify(&model, beta, kappa, lambda, CertificateMode::General))
}

/// Certificate for a problem: estimation is allowed only when `allow_estimates`.
fn certify_problem(
    report: &mut Report,
    built: &BuiltProblem,
    descriptor: &Descriptor,
    kappa: Option<f64>,
    estimation: &EstimationArgs,
    seed: u64,
    allow_estimates: bool,
) -> Result<Certificate, Failure> {
    let opts = AutoOptions {
        radius: estimation.radius,
        kappa,
        samples: estimation.samples,
        seed,
    };
    let auto = auto_certify(&built.problem, &built.x0, &choice_for(descriptor), &opts).map_err(|e| usage(e.to_string()))?;
    if !allow_estimates && auto.estimates.any_estimated() {
        return Err(usage(
            "--certify asserted needs every constant: give L or gamma in --majorant and --kappa unless F'(x0) is surjective",
        ));
    }
    let mut sources = BTreeMap::new();
    sources.insert("beta".into(), auto.estimates.beta.source);
    sources.insert("kappa".into(), auto.estimates.kappa.source);
    if let Some(l) = auto.estimates.l {
        sources.insert("L".into(), l.source);
    }
    if let Some(g) = auto.estimates.gamma {
        sources.insert("gamma".into(), g.source);
        sources.insert("R".into(), Source::Derived);
    } else if matches!(descriptor, Descriptor::Lipschitz { radius: None, .. }) {
        sources.insert("R".into(), Source::Derived);
    } else {
        sources.insert("R".into(), Source::Asserted);
    }
    report.estimates = Some(auto.estimates.clone());
    match auto.outcome {
        Ok(cert) => {
            report.certificate = Some(CertificateRecord::new(&cert, sources));
            Ok(cert)
        }
        Err(refusal) => Err(refuse(report, &refusal)),
    }
}

fn cmd_certify(args: &CertifyArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let seed = effective_seed(args.estimation.seed)?;
    let descriptor = parse_descriptor(&args.majorant)?;
    let problem = load_problem(&args.problem)?;
    let mut config = BTreeMap::new();
    config.insert("problem".into(), problem_config(problem.as_ref().map(|p| &p.0), problem.as_ref().map(|p| &p.1)));
    config.insert("majorant".into(), json!(args.majorant));
    config.insert("beta".into(), json!(args.beta));
    config.insert("kappa".into(), json!(args.kappa));
    config.insert("lambda".into(), json!(args.lambda));
    config.insert("radius".into(), json!(args.estimation.radius));
    config.insert("samples".into(), json!(args.estimation.samples));
    config.insert("seed".into(), json!(seed));
    let mut report = Report::new("certify", config);

    let result = match (args.beta, &problem) {
        (Some(beta), _) => {
            let kappa = args.kappa.ok_or_else(|| usage("--kappa is required with --beta"))?;
            let mut sources = descriptor_sources(&descriptor);
            sources.insert("beta".into(), Source::Asserted);
            sources.insert("kappa".into(), Source::Asserted);
            match certify_asserted(&descriptor, beta, kappa, args.lambda)? {
                Ok(cert) => {
                    report.certificate = Some(CertificateRecord::new(&cert, sources));
                    Ok(cert)
                }
                Err(refusal) => Err(refuse(&mut report, &refusal)),
            }
        }
        (None, Some((_, built))) => {
            if args.lambda.is_some() {
                return Err(usage("--lambda needs --beta"));
            }
            certify_problem(&mut report, built, &descriptor, args.kappa, &args.estimation, seed, true)
        }
        (None, None) => return Err(usage("certify needs --beta or a problem (--builtin/--problem)")),
    };
    let trace = result.as_ref().ok().map(|cert| scalar::run(cert, scalar::DEFAULT_MAX_ITERS, scalar::DEFAULT_STOP_TOL));
    if let Some(t) = &trace {
        report.scalar_trace = Some(TraceRecord::from(t));
        report.outcome.status = "certified".into();
    }
    write_output(&report, args.output.out.as_deref(), stdout)?;
    if let Some(t) = &trace {
        write_csv(args.output.csv.as_deref(), &trace_rows(None, Some(t)))?;
    }
    result.map(|_| EXIT_OK)
}

fn cmd_solve(args: &SolveArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let seed = effective_seed(args.estimation.seed)?;
    let (spec, built) = load_problem(&args.problem)?.ok_or_else(|| usage("solve needs --builtin or --problem"))?;
    let mut config = BTreeMap::new();
    config.insert("problem".into(), problem_config(Some(&spec), Some(&built)));
    config.insert("certify".into(), json!(args.certify.name()));
    if args.certify != CertifyMode::None {
        config.insert("majorant".into(), json!(args.majorant));
        config.insert("kappa".into(), json!(args.kappa));
        config.insert("radius".into(), json!(args.estimation.radius));
        config.insert("samples".into(), json!(args.estimation.samples));
        config.insert("lemma_samples".into(), json!(args.lemma_samples));
        config.insert("seed".into(), json!(seed));
    }
    config.insert("max_iters".into(), json!(args.max_iters));
    config.insert("stationary_tol".into(), json!(args.stationary_tol));
    config.insert("audit_tol".into(), json!(args.audit_tol));
    config.insert("rank_tol_factor".into(), json!(args.rank_tol_factor));
    config.insert("domain_radius".into(), json!(args.domain_radius));
    let mut report = Report::new("solve", config);

    let cert = if args.certify == CertifyMode::None {
        None
    } else {
        let descriptor = parse_descriptor(&args.majorant)?;
        match certify_problem(
            &mut report,
            &built,
            &descriptor,
            args.kappa,
            &args.estimation,
            seed,
            args.certify == CertifyMode::Auto,
        ) {
            Ok(c) => Some(c),
            Err(f) if f.code == EXIT_REFUSED => {
                write_output(&report, args.output.out.as_deref(), stdout)?;
                return Err(f);
            }
            Err(f) => return Err(f),
        }
    };

    let opts = SolveOptions {
        max_iters: args.max_iters,
        stationary_tol: args.stationary_tol,
        audit_tol: args.audit_tol,
        rank_tol_factor: args.rank_tol_factor,
        domain_radius: args.domain_radius,
        ..SolveOptions::default()
    };
    let solved = solve(&built.problem, &built.x0, cert.as_ref(), &opts).map_err(|e| usage(e.to_string()))?;
    let trace = cert.as_ref().map(|c| scalar::run(c, opts.max_iters + 2, 0.0));
    let lemma = match &cert {
        Some(c) if args.lemma_samples > 0 => Some(
            linearization_audit(&built.problem, c, &built.x0, args.lemma_samples, seed, args.audit_tol)
                .map_err(|e| usage(e.to_string()))?,
        ),
        _ => None,
    };
    let lemma_violations = lemma.as_ref().map_or(0, |l| l.violations);
    if let Some(t) = &trace {
        report.scalar_trace = Some(TraceRecord::from(t));
    }
    report.solve = Some(SolveRecord::new(&solved, lemma));

    let code = if solved.status == SolveStatus::AuditViolation || lemma_violations > 0 {
        report.outcome.status = "audit_violation".into();
        let detail = match solved.audit.as_ref().and_then(|a| a.violation.as_ref()) {
            Some(v) => format!("{} violated at k = {} (margin {})", v.kind, v.index, v.margin),
            None => format!("linearization-error bound violated at {lemma_violations} sampled pairs"),
        };
        report.outcome.detail = Some(detail);
        EXIT_AUDIT
    } else {
        report.outcome.status = serde_json::to_value(solved.status)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        EXIT_OK
    };
    report.outcome.exit_code = code;
    write_output(&report, args.output.out.as_deref(), stdout)?;
    write_csv(args.output.csv.as_deref(), &trace_rows(Some(&solved), trace.as_ref()))?;
    if code == EXIT_AUDIT {
        return Err(Failure {
            code,
            message: report.outcome.detail.unwrap_or_default(),
        });
    }
    Ok(code)
}

fn cmd_scalar(args: &ScalarArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let descriptor = parse_descriptor(&args.majorant)?;
    let mut config = BTreeMap::new();
    config.insert("majorant".into(), json!(args.majorant));
    config.insert("beta".into(), json!(args.beta));
    config.insert("kappa".into(), json!(args.kappa));
    config.insert("lambda".into(), json!(args.lambda));
    config.insert("max_iters".into(), json!(args.max_iters));
    config.insert("stop_tol".into(), json!(args.stop_tol));
    let mut report = Report::new("scalar", config);
    let mut sources = descriptor_sources(&descriptor);
    sources.insert("beta".into(), Source::Asserted);
    sources.insert("kappa".into(), Source::Asserted);
    let cert = match certify_asserted(&descriptor, args.beta, args.kappa, args.lambda)? {
        Ok(c) => c,
        Err(refusal) => {
            let f = refuse(&mut report, &refusal);
            write_output(&report, args.output.out.as_deref(), stdout)?;
            return Err(f);
        }
    };
    report.certificate = Some(CertificateRecord::new(&cert, sources));
    let trace = scalar::run(&cert, args.max_iters, args.stop_tol);
    report.scalar_trace = Some(TraceRecord::from(&trace));
    report.rate = rate_check(&trace, &cert).ok();
    report.outcome.status = "certified".into();
    write_output(&report, args.output.out.as_deref(), stdout)?;
    write_csv(args.output.csv.as_deref(), &trace_rows(None, Some(&trace)))?;
    Ok(EXIT_OK)
}

fn cmd_estimate(args: &EstimateArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let seed = effective_seed(args.estimation.seed)?;
    let (spec, built) = load_problem(&args.problem)?.ok_or_else(|| usage("estimate needs --builtin or --problem"))?;
    let fail = |e: &dyn std::fmt::Display| usage(e.to_string());
    let beta = stationarity(&built.problem, &built.x0).map_err(|e| fail(&e))?;
    let radius = args.estimation.radius.unwrap_or(crate::auto::DEFAULT_RADIUS_FACTOR * beta);
    if !(radius > 0.0) {
        return Err(usage("estimation radius is zero (x0 is stationary); pass --radius"));
    }
    let n = args.estimation.samples;
    let l = lipschitz_estimate(&built.problem, &built.x0, radius, n, seed).map_err(|e| fail(&e))?;
    let kappa = kappa_estimate(&built.problem, &built.x0, radius, n, seed).map_err(|e| fail(&e))?;
    let gamma = smale_gamma_estimate(&built.problem, &built.x0).ok();

    let mut config = BTreeMap::new();
    config.insert("problem".into(), problem_config(Some(&spec), Some(&built)));
    config.insert("radius".into(), json!(args.estimation.radius));
    config.insert("samples".into(), json!(n));
    config.insert("seed".into(), json!(seed));
    let mut report = Report::new("estimate", config);
    report.result = Some(json!({
        "beta": {"value": beta, "source": Source::Measured},
        "radius": {"value": radius, "source": if args.estimation.radius.is_some() { Source::Asserted } else { Source::Derived }},
        "L": {"value": l, "source": Source::Estimated},
        "kappa": {"value": kappa.value, "source": Source::Estimated, "pairs": kappa.pairs, "argmax": kappa.argmax},
        "gamma": gamma.map(|g| json!({"value": g, "source": Source::Estimated})),
    }));
    write_output(&report, args.out.as_deref(), stdout)?;
    Ok(EXIT_OK)
}

fn cmd_check_linalg(args: &LinalgArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    if args.max_dim == 0 {
        return Err(usage("--max-dim must be positive"));
    }
    let seed = effective_seed(args.seed)?;
    let audit = linalg_audit(args.samples, seed, args.max_dim).map_err(|e| usage(e.to_string()))?;
    let mut config = BTreeMap::new();
    config.insert("samples".into(), json!(args.samples));
    config.insert("max_dim".into(), json!(args.max_dim));
    config.insert("seed".into(), json!(seed));
    let mut report = Report::new("check-linalg", config);
    let passed = audit.passed();
    report.result = Some(serde_json::to_value(&audit).expect("audit serializes"));
    report.outcome.status = if passed { "ok" } else { "audit_violation" }.into();
    report.outcome.exit_code = if passed { EXIT_OK } else { EXIT_AUDIT };
    write_output(&report, args.out.as_deref(), stdout)?;
    if passed {
        Ok(EXIT_OK)
    } else {
        Err(Failure {
            code: EXIT_AUDIT,
            message: "pseudoinverse or lemma check failed".into(),
        })
    }
}

/// Runs the command line with explicit output streams and returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Certify(a) => cmd_certify(a, stdout),
        Command::Solve(a) => cmd_solve(a, stdout),
        Command::Scalar(a) => cmd_scalar(a, stdout),
        Command::Estimate(a) => cmd_estimate(a, stdout),
        Command::CheckLinalg(a) => cmd_check_linalg(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "mgn: {}", f.message);
            f.code
        }
    }
}

/// Runs the command line against the process's stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}
