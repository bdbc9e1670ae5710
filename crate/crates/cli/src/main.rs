use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::process::ExitCode;
use theta_torus::nctorus::{
    check_bracket_identities, curly, eval_expr, generation_witness, parse_program, EvalTarget, Mode,
};
use theta_torus::projector::{
    invertibility_alpha, invertibility_pq, partition_checks, phi_bounds, phi_even, phi_odd, projection_sweep,
    theta_identity_checks, BoundReport,
};
use theta_torus::repmat::harper_norm;
use theta_torus::theta::{
    check_classical_identities, eval_theta_char, eval_theta_parity, Characteristics, ClassicalSamples, IdentityResidual,
    Parity, UpperHalfPoint, DEFAULT_TOL,
};

const VERIFY_TOL: f64 = 1e-10;
const TOL_ENV: &str = "THETA_TORUS_TOL";
const TABLE_QS: [i64; 16] = [2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 50, 51, 100, 101];

#[derive(Parser, Debug)]
#[command(name = "theta-torus", version, about = "Theta functions, rotation-algebra projections and Harper norms")]
struct Cli {
    /// Output format; tables default to csv, reports to plain.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    /// Tolerance override; falls back to THETA_TORUS_TOL, then the command default.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Plain,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate θ_{a,b}(z, τ) with its truncation bound.
    Theta(ThetaArgs),
    /// Run an identity suite.
    Verify(VerifyArgs),
    /// Harper norms next to their theta lower bounds.
    NormTable(NormTableArgs),
    /// Sample the lower-bound curve φ0 or φ1.
    PhiCurve(PhiCurveArgs),
    /// Residuals of the trace-1/q projection over a twist grid.
    Projection(ProjectionArgs),
    /// Expression for {n,m} in terms of {1,0} and {2,0}.
    Witness(WitnessArgs),
    /// Invertibility criterion at α, or near p/q when both are given.
    Criterion(CriterionArgs),
}

#[derive(Args, Debug)]
struct ThetaArgs {
    #[arg(long, allow_hyphen_values = true)]
    z: String,
    #[arg(long, allow_hyphen_values = true)]
    tau: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, value_enum, default_value_t = ParityArg::Full)]
    parity: ParityArg,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ParityArg {
    Full,
    Odd,
    Even,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Index range for the bracket suite.
    #[arg(long, default_value_t = 4)]
    range: i64,
    /// Values of q for the theta3 and partition suites.
    #[arg(long, num_args = 1..)]
    q: Vec<i64>,
    /// Random samples per identity for the theta3 suite.
    #[arg(long, default_value_t = 20)]
    samples: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Classical,
    Bracket,
    Theta3,
    Partition,
    All,
}

#[derive(Args, Debug)]
struct NormTableArgs {
    #[arg(long, num_args = 1..)]
    q: Vec<i64>,
    #[arg(long, default_value_t = 2.0)]
    lambda: f64,
}

#[derive(Args, Debug)]
struct PhiCurveArgs {
    #[arg(long, value_enum, default_value_t = CurveParity::Even)]
    parity: CurveParity,
    #[arg(long, default_value_t = 0.01)]
    from: f64,
    /// Upper end; defaults to 1/2 (even) or 1/3 (odd).
    #[arg(long)]
    to: Option<f64>,
    #[arg(long, default_value_t = 500)]
    points: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum CurveParity {
    Even,
    Odd,
}

#[derive(Args, Debug)]
struct ProjectionArgs {
    #[arg(long)]
    q: i64,
    #[arg(long, default_value_t = 8)]
    grid: usize,
}

#[derive(Args, Debug)]
struct WitnessArgs {
    #[arg(long)]
    n: i64,
    #[arg(long)]
    m: i64,
}

#[derive(Args, Debug)]
struct CriterionArgs {
    #[arg(long, allow_hyphen_values = true)]
    p: Option<i64>,
    #[arg(long)]
    q: Option<i64>,
    #[arg(long)]
    alpha: f64,
}

/// A usage or input error (exit 2).
#[derive(Debug)]
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

/// Rendered command output and whether every check passed.
struct Report {
    json: Value,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    plain: Vec<String>,
    ok: bool,
    default_format: Format,
}

impl Report {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => format!("{}\n", serde_json::to_string_pretty(&self.json).expect("serializable")),
            Format::Csv => {
                let mut s = self.header.join(",") + "\n";
                for row in &self.rows {
                    s += &row.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",");
                    s += "\n";
                }
                s
            }
            Format::Plain => self.plain.iter().map(|l| format!("{l}\n")).collect(),
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// 12 significant digits, plain notation for moderate exponents.
fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

fn complex_str(z: Complex64) -> String {
    let sign = if z.im < 0.0 { "-" } else { "+" };
    format!("{} {sign} {}i", num(z.re), num(z.im.abs()))
}

/// Parses `1.5`, `i`, `-2i`, `0.5+0.5i`, `1e-3-2i`.
fn parse_complex(text: &str) -> Result<Complex64, Usage> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Usage(format!("cannot parse complex number '{text}'"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re.is_empty() { 0.0 } else { re.parse::<f64>().map_err(|_| bad())? };
    let im = match im.trim_end_matches('*') {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => t.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

fn resolve_tol(flag: Option<f64>, default: f64) -> Result<f64, Usage> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(v) => v.trim().parse::<f64>().map_err(|_| Usage(format!("{TOL_ENV}='{v}' is not a number")))?,
            Err(_) => default,
        },
    };
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Usage(format!("tolerance must be positive, got {tol}")));
    }
    Ok(tol)
}

fn cmd_theta(args: &ThetaArgs, tol: Option<f64>) -> Result<Report, Usage> {
    let tol = resolve_tol(tol, DEFAULT_TOL)?;
    let z = parse_complex(&args.z)?;
    let t = parse_complex(&args.tau)?;
    let tau = UpperHalfPoint::new(t.re, t.im)?;
    let ch = Characteristics::new(args.a, args.b);
    let v = match args.parity {
        ParityArg::Full => eval_theta_char(ch, z, tau, tol)?,
        ParityArg::Odd => eval_theta_parity(Parity::Odd, ch, z, tau, tol)?,
        ParityArg::Even => eval_theta_parity(Parity::Even, ch, z, tau, tol)?,
    };
    Ok(Report {
        json: json!({
            "z": [z.re, z.im], "tau": [t.re, t.im], "a": args.a, "b": args.b,
            "parity": format!("{:?}", args.parity).to_lowercase(), "tol": tol, "value": v,
        }),
        header: ["re", "im", "tail_bound", "rounding_bound", "terms"].map(String::from).to_vec(),
        rows: vec![vec![num(v.value.re), num(v.value.im), num(v.tail_bound), num(v.rounding_bound), v.terms_used.to_string()]],
        plain: vec![
            format!("value: {}", complex_str(v.value)),
            format!("tail_bound: {}", num(v.tail_bound)),
            format!("rounding_bound: {}", num(v.rounding_bound)),
            format!("terms: {}", v.terms_used),
        ],
        ok: true,
        default_format: Format::Plain,
    })
}

fn residual_rows(group: &str, rows: &[IdentityResidual]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| vec![group.into(), r.name.clone(), num(r.max_residual), num(r.tol), r.passed.to_string(), r.worst_sample.clone()])
        .collect()
}

fn residual_lines(group: &str, rows: &[IdentityResidual]) -> Vec<String> {
    rows.iter()
        .map(|r| {
            let mark = if r.passed { "PASS" } else { "FAIL" };
            format!("{mark} [{group}] {}: residual {} (tol {}) at {}", r.name, num(r.max_residual), num(r.tol), r.worst_sample)
        })
        .collect()
}

struct SuiteOut {
    name: &'static str,
    json: Value,
    rows: Vec<Vec<String>>,
    lines: Vec<String>,
    ok: bool,
}

fn suite_residuals(name: &'static str, json: Value, rows: &[IdentityResidual]) -> SuiteOut {
    SuiteOut { name, json, rows: residual_rows(name, rows), lines: residual_lines(name, rows), ok: rows.iter().all(|r| r.passed) }
}

fn suite_classical(tol: f64) -> Result<SuiteOut, Usage> {
    let rep = check_classical_identities(&ClassicalSamples::default(), tol)?;
    let mut out = suite_residuals("classical", serde_json::to_value(&rep)?, &rep.identities);
    for c in &rep.inequalities {
        let mark = if c.holds_everywhere { "PASS" } else { "FAIL" };
        let failing = c.failing_samples.iter().map(|t| num(*t)).collect::<Vec<_>>().join(" ");
        out.lines.push(format!("{mark} [classical] {}: {} samples, min margin {}{}", c.name, c.samples, num(c.min_margin),
            if failing.is_empty() { String::new() } else { format!(", fails at t = {failing}") }));
        out.rows.push(vec!["classical".into(), c.name.clone(), num(-c.min_margin), "0".into(), c.holds_everywhere.to_string(), failing]);
        out.ok &= c.holds_everywhere;
    }
    Ok(out)
}

fn suite_bracket(range: i64) -> Result<SuiteOut, Usage> {
    if range < 0 {
        return Err(Usage("range must be nonnegative".into()));
    }
    let rep = check_bracket_identities(range);
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for t in &rep.identities {
        let ok = t.failures.is_empty();
        let first = t.failures.iter().take(5).cloned().collect::<Vec<_>>().join("; ");
        lines.push(format!("{} [bracket] {}: {} checks, {} failures{}", if ok { "PASS" } else { "FAIL" }, t.name, t.checked,
            t.failures.len(), if ok { String::new() } else { format!(" at {first}") }));
        rows.push(vec!["bracket".into(), t.name.into(), t.failures.len().to_string(), "0".into(), ok.to_string(), first]);
    }
    Ok(SuiteOut { name: "bracket", json: serde_json::to_value(&rep)?, rows, lines, ok: rep.passed() })
}

fn suite_theta3(qs: &[i64], samples: usize, tol: f64) -> Result<SuiteOut, Usage> {
    let qs = if qs.is_empty() { vec![2, 4, 6] } else { qs.to_vec() };
    let rep = theta_identity_checks(&qs, samples, tol)?;
    Ok(suite_residuals("theta3", serde_json::to_value(&rep)?, &rep.identities))
}

fn suite_partition(qs: &[i64]) -> Result<SuiteOut, Usage> {
    let qs = if qs.is_empty() { vec![2, 3, 4, 5] } else { qs.to_vec() };
    let mut reports = Vec::new();
    let mut all = Vec::new();
    for &q in &qs {
        let rep = partition_checks(q)?;
        all.extend(rep.identities.iter().cloned().map(|mut r| {
            r.name = format!("q={q} {}", r.name);
            r
        }));
        reports.push(rep);
    }
    Ok(suite_residuals("partition", serde_json::to_value(&reports)?, &all))
}

fn cmd_verify(args: &VerifyArgs, tol: Option<f64>) -> Result<Report, Usage> {
    let tol = resolve_tol(tol, VERIFY_TOL)?;
    let mut suites = Vec::new();
    let want = |s: Suite| args.suite == s || args.suite == Suite::All;
    if want(Suite::Classical) {
        suites.push(suite_classical(tol)?);
    }
    if want(Suite::Bracket) {
        suites.push(suite_bracket(args.range)?);
    }
    if want(Suite::Theta3) {
        suites.push(suite_theta3(&args.q, args.samples, tol)?);
    }
    if want(Suite::Partition) {
        suites.push(suite_partition(&args.q)?);
    }
    let ok = suites.iter().all(|s| s.ok);
    let mut json = serde_json::Map::new();
    for s in &suites {
        json.insert(s.name.into(), s.json.clone());
    }
    json.insert("passed".into(), Value::Bool(ok));
    let mut plain: Vec<String> = suites.iter().flat_map(|s| s.lines.clone()).collect();
    plain.push(if ok { "all checks passed".into() } else { "verification FAILED".into() });
    Ok(Report {
        json: Value::Object(json),
        header: ["suite", "identity", "residual", "tol", "passed", "sample"].map(String::from).to_vec(),
        rows: suites.into_iter().flat_map(|s| s.rows).collect(),
        plain,
        ok,
        default_format: Format::Plain,
    })
}

#[derive(Serialize)]
struct NormRow {
    q: i64,
    norm: f64,
    bound_kind: Option<&'static str>,
    bound: Option<f64>,
    gap: Option<f64>,
}

fn norm_row(q: i64, lambda: f64) -> Result<NormRow, Usage> {
    let norm = harper_norm(1, q, lambda)?;
    if lambda != 2.0 {
        return Ok(NormRow { q, norm, bound_kind: None, bound: None, gap: None });
    }
    let phi = phi_bounds(q)?.value;
    let kind = if q % 2 == 0 { "phi0" } else { "phi1" };
    Ok(NormRow { q, norm, bound_kind: Some(kind), bound: Some(phi), gap: Some(norm - phi) })
}

fn cmd_norm_table(args: &NormTableArgs) -> Result<Report, Usage> {
    let qs = if args.q.is_empty() { TABLE_QS.to_vec() } else { args.q.clone() };
    if let Some(q) = qs.iter().find(|&&q| q < 2) {
        return Err(Usage(format!("q must be at least 2, got {q}")));
    }
    if !(args.lambda > 0.0 && args.lambda.is_finite()) {
        return Err(Usage(format!("lambda must be positive, got {}", args.lambda)));
    }
    let rows: Vec<Result<NormRow, Usage>> = std::thread::scope(|scope| {
        let handles: Vec<_> = qs.iter().map(|&q| scope.spawn(move || norm_row(q, args.lambda))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    let ok = rows.iter().all(|r| r.gap.is_none_or(|g| g >= -1e-6));
    Ok(Report {
        json: json!({ "lambda": args.lambda, "rows": rows }),
        header: ["q", "norm", "phi", "gap", "phi_kind"].map(String::from).to_vec(),
        rows: rows
            .iter()
            .map(|r| vec![r.q.to_string(), num(r.norm), opt(r.bound), opt(r.gap), r.bound_kind.unwrap_or("").into()])
            .collect(),
        plain: rows
            .iter()
            .map(|r| match (r.bound_kind, r.bound, r.gap) {
                (Some(k), Some(b), Some(g)) => format!("q={:<4} norm={:.5} {k}={b:.5} gap={g:.2e}", r.q, r.norm),
                _ => format!("q={:<4} norm={:.5}", r.q, r.norm),
            })
            .collect(),
        ok,
        default_format: Format::Csv,
    })
}

fn cmd_phi_curve(args: &PhiCurveArgs) -> Result<Report, Usage> {
    let max = match args.parity {
        CurveParity::Even => 0.5,
        CurveParity::Odd => 1.0 / 3.0,
    };
    let to = args.to.unwrap_or(max);
    if !(args.from > 0.0 && args.from < to && to <= max + 1e-15) {
        return Err(Usage(format!("x-range must satisfy 0 < from < to <= {}", num(max))));
    }
    if args.points < 2 {
        return Err(Usage("need at least 2 points".into()));
    }
    let mut samples = Vec::with_capacity(args.points);
    for k in 0..args.points {
        let x = if k + 1 == args.points { to } else { args.from + (to - args.from) * k as f64 / (args.points - 1) as f64 };
        let y = match args.parity {
            CurveParity::Even => phi_even(x)?,
            CurveParity::Odd => phi_odd(x)?,
        };
        samples.push((x, y));
    }
    let name = match args.parity {
        CurveParity::Even => "phi0",
        CurveParity::Odd => "phi1",
    };
    Ok(Report {
        json: json!({ "curve": name, "samples": samples }),
        header: vec!["x".into(), name.into()],
        rows: samples.iter().map(|(x, y)| vec![num(*x), num(*y)]).collect(),
        plain: samples.iter().map(|(x, y)| format!("{} {}", num(*x), num(*y))).collect(),
        ok: true,
        default_format: Format::Csv,
    })
}

fn cmd_projection(args: &ProjectionArgs) -> Result<Report, Usage> {
    if args.grid < 2 {
        return Err(Usage("grid must be at least 2".into()));
    }
    let sweep = projection_sweep(args.q, args.grid)?;
    let ok = sweep.max_idempotency <= 1e-9 && sweep.max_self_adjointness <= 1e-12 && sweep.max_trace_deviation <= 1e-9;
    Ok(Report {
        json: {
            let mut v = serde_json::to_value(&sweep)?;
            v["passed"] = Value::Bool(ok);
            v
        },
        header: ["q", "t1", "t2", "idempotency", "self_adjointness", "trace_deviation"].map(String::from).to_vec(),
        rows: sweep
            .checks
            .iter()
            .map(|c| vec![c.q.to_string(), num(c.t1), num(c.t2), num(c.idempotency), num(c.self_adjointness), num(c.trace_deviation)])
            .collect(),
        plain: vec![
            format!("q: {}, twist grid {}x{}", sweep.q, sweep.grid, sweep.grid),
            format!("max |e^2 - e|: {} (tol 1e-9)", num(sweep.max_idempotency)),
            format!("max |e - e*|: {} (tol 1e-12)", num(sweep.max_self_adjointness)),
            format!("max |tr e - 1/q|: {} (tol 1e-9)", num(sweep.max_trace_deviation)),
            if ok { "projection checks passed".into() } else { "projection checks FAILED".into() },
        ],
        ok,
        default_format: Format::Plain,
    })
}

fn cmd_witness(args: &WitnessArgs) -> Result<Report, Usage> {
    let w = generation_witness(args.n, args.m)?;
    let program = w.to_program();
    let want = curly(Mode::Exact, args.n, args.m);
    let ok = eval_expr(&w.root, &EvalTarget::Formal)? == want && parse_program(&program, Mode::Exact)? == want;
    Ok(Report {
        json: json!({ "n": args.n, "m": args.m, "program": program, "nodes": w.root.node_count(), "verified": ok }),
        header: ["n", "m", "nodes", "verified", "program"].map(String::from).to_vec(),
        rows: vec![vec![args.n.to_string(), args.m.to_string(), w.root.node_count().to_string(), ok.to_string(), program.clone()]],
        plain: program.lines().map(String::from).collect(),
        ok,
        default_format: Format::Plain,
    })
}

fn kebab<T: Serialize>(x: &T) -> String {
    serde_json::to_value(x).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn cmd_criterion(args: &CriterionArgs) -> Result<Report, Usage> {
    let rep: BoundReport = match (args.p, args.q) {
        (Some(p), Some(q)) => invertibility_pq(p, q, args.alpha)?,
        (None, None) => invertibility_alpha(args.alpha)?,
        _ => return Err(Usage("--p and --q must be given together".into())),
    };
    let fields: Vec<(&str, String)> = vec![
        ("alpha", num(rep.alpha)),
        ("p", rep.p.map(|x| x.to_string()).unwrap_or_default()),
        ("q", rep.q.map(|x| x.to_string()).unwrap_or_default()),
        ("c", rep.c.map(num).unwrap_or_default()),
        ("C", rep.big_c.map(num).unwrap_or_default()),
        ("h", rep.h.map(num).unwrap_or_default()),
        ("g", rep.g.map(num).unwrap_or_default()),
        ("s", rep.s.map(num).unwrap_or_default()),
        ("r", rep.r.map(num).unwrap_or_default()),
        ("gamma", rep.gamma.map(num).unwrap_or_default()),
        ("mirrored", rep.mirrored.to_string()),
        ("residue_witness", rep.residue_witness.map(|x| x.to_string()).unwrap_or_default()),
        ("verdict", kebab(&rep.verdict)),
        ("reason", rep.reason.map(|r| kebab(&r)).unwrap_or_default()),
        ("trace", rep.trace.map(num).unwrap_or_default()),
    ];
    Ok(Report {
        json: serde_json::to_value(rep)?,
        header: fields.iter().map(|(k, _)| k.to_string()).collect(),
        rows: vec![fields.iter().map(|(_, v)| v.clone()).collect()],
        plain: fields.iter().filter(|(_, v)| !v.is_empty()).map(|(k, v)| format!("{k}: {v}")).collect(),
        ok: true,
        default_format: Format::Plain,
    })
}

fn run(cli: &Cli) -> Result<Report, Usage> {
    match &cli.command {
        Command::Theta(a) => cmd_theta(a, cli.tol),
        Command::Verify(a) => cmd_verify(a, cli.tol),
        Command::NormTable(a) => cmd_norm_table(a),
        Command::PhiCurve(a) => cmd_phi_curve(a),
        Command::Projection(a) => cmd_projection(a),
        Command::Witness(a) => cmd_witness(a),
        Command::Criterion(a) => cmd_criterion(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let text = report.render(cli.format.unwrap_or(report.default_format));
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if report.ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("error: verification failed");
        ExitCode::from(1)
    }
}
