//! `freefield`: command-line front end for the free-field engine.
//!
//! Exit codes: 0 on success, 1 when a verification fails, 2 for usage and
//! input errors, 3 when the engine reports an internal inconsistency.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use freefield::fock::FockVector;
use freefield::opers::{canonical_form, miura_map, OperConnection, OperForm, Series};
use freefield::screening::{center_character, classical_ops, critical_ops, kernel_dims};
use freefield::series::EXACT;
use freefield::wakimoto::{basis_vectors, realize, WakimotoRealization};
use freefield::{algebra, AlgebraType, Error, Field, FormLabel, LieAlgebraData, Ring, Scalar, Q};

const THREADS_VAR: &str = "FREEFIELD_THREADS";

#[derive(Parser, Debug)]
#[command(name = "freefield", version, about = "Exact free-field computations for affine Kac-Moody algebras")]
#[command(after_help = "The worker thread count can be set with FREEFIELD_THREADS.")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    /// Write the payload here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Prefix the payload with a `#` comment line naming the tool and command.
    #[arg(long, global = true)]
    provenance: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the affine Kac-Moody relations of the Wakimoto realization on Fock vectors.
    VerifyKm(VerifyArgs),
    /// Dimensions of the joint kernel of screening operators on the Heisenberg module.
    Kernel(KernelArgs),
    /// Apply the Miura transformation to a Miura oper.
    Miura(MiuraArgs),
    /// Reduce an oper file to canonical form.
    Canonical(CanonicalArgs),
    /// OPE table of two realized fields.
    Ope(OpeArgs),
    /// Dump the realization of every Chevalley basis element.
    Realization(RealizationArgs),
}

#[derive(Args, Debug)]
struct AlgebraArg {
    /// A1, A2, B2 (also C2) or G2.
    #[arg(long, short, default_value = "A1")]
    algebra: String,
}

#[derive(Args, Debug)]
struct LevelArg {
    /// `symbolic` (formal k), `critical`, or a rational level such as `1` or `-3/2`.
    #[arg(long, short, default_value = "symbolic", allow_hyphen_values = true)]
    level: String,
    /// Allow symbolic k for algebras other than A1.
    #[arg(long)]
    allow_symbolic: bool,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct VerifyArgs {
    #[command(flatten)]
    algebra: AlgebraArg,
    #[command(flatten)]
    level: LevelArg,
    /// Largest |n|, |m| of the modes compared.
    #[arg(long, short, default_value_t = 4)]
    cutoff: i64,
    /// Largest degree of the test vectors (default 4 for A1, 3 otherwise).
    /// Without --max-degree and --zero-modes, rank-2 runs use degree ≤ 3
    /// without a*_0 together with degree ≤ 2 and one a*_0.
    #[arg(long)]
    max_degree: Option<i64>,
    /// Most factors a*_{α,0} per test vector (default 2 for A1, 0 otherwise).
    #[arg(long)]
    zero_modes: Option<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ScreeningKind {
    /// The critical-level operators V̄_i[1].
    Critical,
    /// Classical W-algebra screenings.
    Classical,
    /// Classical screenings of the Langlands dual.
    Dual,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct KernelArgs {
    #[command(flatten)]
    algebra: AlgebraArg,
    #[arg(long, short = 'd', default_value_t = 6)]
    max_degree: i64,
    #[arg(long, value_enum, default_value_t = ScreeningKind::Critical)]
    screening: ScreeningKind,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct MiuraArgs {
    #[command(flatten)]
    algebra: AlgebraArg,
    /// Miura oper file; overrides --u and --algebra.
    input: Option<PathBuf>,
    /// One Miura coordinate u_i per simple root, as `poly:<polynomial in t>`
    /// or `coeffs:c0,c1,...`.
    #[arg(long)]
    u: Vec<String>,
    /// Truncation order of the Miura coordinates.
    #[arg(long, default_value_t = 8)]
    truncation: i64,
}

#[derive(Args, Debug)]
struct CanonicalArgs {
    /// Oper file in raw, canonical or Miura form.
    input: PathBuf,
    /// Also write the gauge element to this file.
    #[arg(long)]
    gauge: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OpeArgs {
    #[command(flatten)]
    algebra: AlgebraArg,
    #[command(flatten)]
    level: LevelArg,
    /// Left state: a Chevalley label such as `e(1)`, `h1`, `f(1,1)`, or `sugawara`.
    left: String,
    /// Right state, in the same notation.
    right: String,
}

#[derive(Args, Debug)]
struct RealizationArgs {
    #[command(flatten)]
    algebra: AlgebraArg,
    #[command(flatten)]
    level: LevelArg,
}

enum Failure {
    Usage(String),
    Verification,
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) => Failure::Internal(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// A finished command: the payload in both formats and whether it passed.
struct Report {
    json: Value,
    text: String,
    passed: bool,
}

impl Report {
    fn ok(json: Value, text: String) -> Self {
        Report { json, text, passed: true }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    configure_threads()?;
    let report = match &cli.command {
        Command::VerifyKm(a) => verify_km(a)?,
        Command::Kernel(a) => kernel(a)?,
        Command::Miura(a) => miura(a)?,
        Command::Canonical(a) => canonical(a)?,
        Command::Ope(a) => ope(a)?,
        Command::Realization(a) => realization(a)?,
    };
    emit(cli, &report)?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| usage(format!("{THREADS_VAR} must be a non-negative integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Internal(e.to_string()))
}

fn emit(cli: &Cli, report: &Report) -> Result<(), Failure> {
    let mut out = String::new();
    if cli.provenance {
        let args: Vec<String> = std::env::args().skip(1).collect();
        out.push_str(&format!("# freefield {} {}\n", env!("CARGO_PKG_VERSION"), args.join(" ")));
    }
    match cli.format {
        Format::Json => {
            out.push_str(&serde_json::to_string_pretty(&report.json).map_err(|e| Failure::Internal(e.to_string()))?);
            out.push('\n');
        }
        Format::Text => out.push_str(&report.text),
    }
    write_to(cli.output.as_deref(), &out)
}

fn write_to(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Internal(e.to_string())),
    }
}

fn parse_algebra(a: &AlgebraArg) -> Result<LieAlgebraData, Failure> {
    let kind: AlgebraType = a.algebra.parse()?;
    Ok(algebra(kind))
}

fn parse_level(alg: &LieAlgebraData, l: &LevelArg) -> Result<FormLabel, Failure> {
    match l.level.trim() {
        "symbolic" | "k" => {
            if alg.kind != AlgebraType::A1 && !l.allow_symbolic {
                return Err(usage(format!(
                    "symbolic level on {} is slow; pass --allow-symbolic or give a rational level",
                    alg.kind
                )));
            }
            Ok(FormLabel::Generic(Scalar::k()))
        }
        "critical" => Ok(FormLabel::KappaC),
        lit => {
            let c: Q = lit.parse().map_err(|e| usage(format!("level `{lit}`: {e}")))?;
            Ok(FormLabel::Generic(Scalar::from_q(c)))
        }
    }
}

fn level_name(form: &FormLabel) -> String {
    match form {
        FormLabel::KappaC => "critical".into(),
        FormLabel::Generic(s) if s == &Scalar::k() => "symbolic".into(),
        FormLabel::Generic(s) => s.to_string(),
        other => format!("{other:?}"),
    }
}

fn non_negative(name: &str, v: i64) -> Result<i64, Failure> {
    if v < 0 {
        Err(usage(format!("--{name} must be non-negative, got {v}")))
    } else {
        Ok(v)
    }
}

fn verify_km(a: &VerifyArgs) -> Result<Report, Failure> {
    let alg = parse_algebra(&a.algebra)?;
    let form = parse_level(&alg, &a.level)?;
    let cutoff = non_negative("cutoff", a.cutoff)?;
    let a1 = alg.kind == AlgebraType::A1;
    let degree = non_negative("max-degree", a.max_degree.unwrap_or(if a1 { 4 } else { 3 }))?;
    let zeros = non_negative("zero-modes", a.zero_modes.unwrap_or(if a1 { 2 } else { 0 }))?;
    let w = realize(&alg, &form)?;
    let lambda = vec![Scalar::zero(); alg.rank];
    let mut vectors = basis_vectors(&alg, true, degree, zeros as u32, lambda.clone());
    if !a1 && a.max_degree.is_none() && a.zero_modes.is_none() {
        // One a*_0 factor at degree 3 multiplies the rank-2 suites several times over.
        for v in basis_vectors(&alg, true, 2, 1, lambda) {
            if !vectors.contains(&v) {
                vectors.push(v);
            }
        }
    }
    let report = w.verify_modes(cutoff as i32, &vectors)?;
    let mut failures = report.failures.clone();
    failures.sort_by_key(|r| (r.a, r.b, r.n, r.m, r.vector));
    let worst: Vec<Value> = failures
        .iter()
        .take(20)
        .map(|r| {
            json!({
                "pair": [alg.label(r.a), alg.label(r.b)],
                "modes": [r.n, r.m],
                "vector": vectors[r.vector].to_json(),
            })
        })
        .collect();
    let passed = failures.is_empty();
    let status = if passed { "PASS" } else { "FAIL" };
    let mut text = format!(
        "{status}: {} relation checks on {} vectors, {} residuals ({} {}, cutoff {cutoff})\n",
        report.checked,
        vectors.len(),
        failures.len(),
        alg.kind,
        level_name(&form),
    );
    for r in failures.iter().take(20) {
        text.push_str(&format!(
            "  [{}_{}, {}_{}] on {}\n",
            alg.label(r.a),
            r.n,
            alg.label(r.b),
            r.m,
            vectors[r.vector]
        ));
    }
    let json = json!({
        "command": "verify-km",
        "algebra": alg.kind.to_string(),
        "level": level_name(&form),
        "cutoff": cutoff,
        "max_degree": degree,
        "zero_modes": zeros,
        "vectors": vectors.len(),
        "checked": report.checked,
        "residuals": failures.len(),
        "status": status,
        "worst": worst,
    });
    Ok(Report { json, text, passed })
}

fn kernel(a: &KernelArgs) -> Result<Report, Failure> {
    let alg = parse_algebra(&a.algebra)?;
    let d = non_negative("max-degree", a.max_degree)?;
    let ops = match a.screening {
        ScreeningKind::Critical => critical_ops(&alg),
        ScreeningKind::Classical => classical_ops(&alg, false),
        ScreeningKind::Dual => classical_ops(&alg, true),
    };
    let dims = kernel_dims(&alg, &ops, d)?;
    let expected = center_character(&alg, d as usize);
    let passed = dims.iter().map(|&x| x as u64).eq(expected.iter().copied());
    let status = if passed { "PASS" } else { "FAIL" };
    let name = format!("{:?}", a.screening).to_lowercase();
    let mut text = format!("{status}: {} {name} kernel dimensions, degrees 0..={d}\n", alg.kind);
    for (deg, (x, e)) in dims.iter().zip(&expected).enumerate() {
        text.push_str(&format!("  degree {deg}: {x} (character {e})\n"));
    }
    let json = json!({
        "command": "kernel",
        "algebra": alg.kind.to_string(),
        "screening": name,
        "max_degree": d,
        "dims": dims,
        "character": expected,
        "status": status,
    });
    Ok(Report { json, text, passed })
}

/// `poly:<p(t)>` or `coeffs:c0,c1,...`, truncated at `trunc`.
fn parse_series(spec: &str, trunc: i32) -> Result<Series, Failure> {
    let bad = |m: String| usage(format!("series `{spec}`: {m}"));
    if let Some(body) = spec.strip_prefix("coeffs:") {
        let coeffs = body
            .split(',')
            .map(|c| c.trim().parse::<Q>().map_err(|e| bad(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(Series::new(0, coeffs, trunc));
    }
    let body = spec.strip_prefix("poly:").ok_or_else(|| bad("expected `poly:` or `coeffs:`".into()))?;
    if body.contains('k') {
        return Err(bad("the variable is t".into()));
    }
    // The scalar parser reads polynomials in its own variable k.
    let p: Scalar = body.replace('t', "k").parse().map_err(|e: Error| bad(e.to_string()))?;
    if !p.denom().is_constant() {
        return Err(bad("not a polynomial".into()));
    }
    let inv = p.denom().constant_term().inverse().ok_or_else(|| bad("zero denominator".into()))?;
    let coeffs: Vec<Q> = p.numer().coeffs().iter().map(|c| c.times(&inv)).collect();
    if coeffs.len() > trunc as usize {
        return Err(bad(format!("degree exceeds the truncation {trunc}")));
    }
    Ok(Series::new(0, coeffs, trunc))
}

fn miura(a: &MiuraArgs) -> Result<Report, Failure> {
    let (alg, oper) = match &a.input {
        Some(path) => {
            if !a.u.is_empty() {
                return Err(usage("give either an oper file or --u, not both"));
            }
            read_oper(path)?
        }
        None => {
            let alg = parse_algebra(&a.algebra)?;
            let trunc = non_negative("truncation", a.truncation)?;
            if trunc >= EXACT as i64 {
                return Err(usage("--truncation is too large"));
            }
            if a.u.len() != alg.rank {
                return Err(usage(format!("{} needs {} --u values, got {}", alg.kind, alg.rank, a.u.len())));
            }
            let u = a.u.iter().map(|s| parse_series(s, trunc as i32)).collect::<Result<Vec<_>, _>>()?;
            let oper = OperConnection::miura(&alg, u)?;
            (alg, oper)
        }
    };
    if oper.form != OperForm::Miura {
        return Err(usage(format!("expected a Miura oper, got {} form", oper.form.name())));
    }
    let canon = miura_map(&alg, &oper)?;
    oper_report(&alg, &canon)
}

fn canonical(a: &CanonicalArgs) -> Result<Report, Failure> {
    let (alg, oper) = read_oper(&a.input)?;
    let (canon, gauge) = canonical_form(&alg, &oper)?;
    if let Some(path) = &a.gauge {
        let g = serde_json::to_string_pretty(&gauge.to_json(&alg)).map_err(|e| Failure::Internal(e.to_string()))?;
        write_to(Some(path), &format!("{g}\n"))?;
    }
    oper_report(&alg, &canon)
}

fn read_oper(path: &Path) -> Result<(LieAlgebraData, OperConnection), Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    OperConnection::from_json(&v).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn oper_report(alg: &LieAlgebraData, oper: &OperConnection) -> Result<Report, Failure> {
    let json = oper.to_json(alg)?;
    let mut text = format!("{} {} oper, known mod t^{}\n", alg.kind, oper.form.name(), json["truncation"]);
    let val = json["valuation"].as_i64().unwrap_or(0);
    if let Some(coeffs) = json["coefficients"].as_object() {
        for (label, list) in coeffs {
            let terms: Vec<String> = list
                .as_array()
                .into_iter()
                .flatten()
                .enumerate()
                .filter_map(|(i, c)| {
                    let c = c.as_str()?;
                    (c != "0").then(|| format!("({c})t^{}", val + i as i64))
                })
                .collect();
            let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
            text.push_str(&format!("  {label} = {body}\n"));
        }
    }
    Ok(Report::ok(json, text))
}

fn state(w: &WakimotoRealization, spec: &str) -> Result<FockVector, Failure> {
    if spec == "sugawara" {
        return Ok(w.segal_sugawara()?);
    }
    let a = w
        .alg
        .index_of_label(spec)
        .ok_or_else(|| usage(format!("unknown state `{spec}`; expected a Chevalley label or `sugawara`")))?;
    Ok(w.images[a].clone())
}

fn ope(a: &OpeArgs) -> Result<Report, Failure> {
    let alg = parse_algebra(&a.algebra)?;
    let form = parse_level(&alg, &a.level)?;
    let w = realize(&alg, &form)?;
    let x = state(&w, &a.left)?;
    let y = state(&w, &a.right)?;
    let table = freefield::ope::ope_table(&w.space, &x, &y)?;
    let mut text = format!("{}(z) {}(w) ~\n", a.left, a.right);
    let mut products = Vec::new();
    for (n, v) in &table {
        text.push_str(&format!("  (z-w)^-{}: {v}\n", n + 1));
        products.push(json!({ "n": n, "value": v.to_json() }));
    }
    let json = json!({
        "command": "ope",
        "algebra": alg.kind.to_string(),
        "level": level_name(&form),
        "left": a.left,
        "right": a.right,
        "products": products,
    });
    Ok(Report::ok(json, text))
}

fn realization(a: &RealizationArgs) -> Result<Report, Failure> {
    let alg = parse_algebra(&a.algebra)?;
    let form = parse_level(&alg, &a.level)?;
    let w = realize(&alg, &form)?;
    let mut left = Map::new();
    let mut right = Map::new();
    let mut text = format!("{} Wakimoto realization at level {}\n", alg.kind, level_name(&form));
    for x in 0..alg.dim() {
        let label = alg.label(x);
        text.push_str(&format!("  w({label}) = {}\n", w.images[x]));
        left.insert(label, w.images[x].to_json());
    }
    for (i, r) in w.right.iter().enumerate() {
        right.insert(alg.label(alg.e(i)), r.to_json());
    }
    let json = json!({
        "command": "realization",
        "algebra": alg.kind.to_string(),
        "level": level_name(&form),
        "correction_constants": w.constants.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "left": left,
        "right": right,
    });
    Ok(Report::ok(json, text))
}
