//! Command-line front end: translate requirements, enumerate the template
//! set, compute formula metrics, report aggregated metrics, check bounded
//! equivalence, evaluate formulas on traces, and export LAST-encoded
//! problems for external checkers.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use fret2mtl::equiv::{self, CheckConfig, Verdict};
use fret2mtl::fretish::{self, Requirement};
use fret2mtl::mtl::{metrics, MetricsReport, MtlFormula};
use fret2mtl::text::{parse_formula, print_formula, Dialect};
use fret2mtl::traces::{self, format_trace, parse_trace_text, TraceData};
use fret2mtl::translator::{translate, Semantics};

#[derive(Parser)]
#[command(
    name = "fret2mtl",
    about = "Translate FRETISH requirements to MTL and analyze the results",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SemanticsArg {
    Past,
    Fin,
    Inf,
}

impl From<SemanticsArg> for Semantics {
    fn from(s: SemanticsArg) -> Semantics {
        match s {
            SemanticsArg::Past => Semantics::Past,
            SemanticsArg::Fin => Semantics::FutureFinite,
            SemanticsArg::Inf => Semantics::FutureInfinite,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DialectArg {
    Canonical,
    Nuxmv,
}

impl From<DialectArg> for Dialect {
    fn from(d: DialectArg) -> Dialect {
        match d {
            DialectArg::Canonical => Dialect::Canonical,
            DialectArg::Nuxmv => Dialect::NuXmvLtl,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Translate a FRETISH sentence (or a requirements file) to MTL
    Translate(TranslateArgs),
    /// Write all 240 template translations into a directory
    Enumerate(EnumerateArgs),
    /// Structural metrics of a formula file
    Metrics(MetricsArgs),
    /// Aggregate per-timing metrics over an enumerated directory
    Report(ReportArgs),
    /// Bounded equivalence or implication check between two formula files
    Equiv(EquivArgs),
    /// Evaluate a formula on a trace at a position
    Eval(EvalArgs),
    /// Rewrite a finite-semantics formula for infinite-trace checkers,
    /// constraining LAST to rise once and stay true
    ExportLast(ExportLastArgs),
}

#[derive(Args)]
struct TranslateArgs {
    /// Requirement sentence
    #[arg(long, conflicts_with = "req_file")]
    req: Option<String>,
    /// File with one requirement per line (# comments allowed)
    #[arg(long)]
    req_file: Option<PathBuf>,
    #[arg(long, value_enum)]
    semantics: SemanticsArg,
    #[arg(long, value_enum, default_value = "canonical")]
    dialect: DialectArg,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Bound used by the within/for/after timings
    #[arg(long)]
    k: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    semantics: SemanticsArg,
    /// Stop proposition used by the until/before timings
    #[arg(long, default_value = "StopCondition")]
    stop_name: String,
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(long)]
    formula: PathBuf,
    /// Treat each non-comment line as its own formula
    #[arg(long)]
    per_line: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory produced by `enumerate`
    #[arg(long)]
    dir: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EquivArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long, value_enum)]
    semantics: SemanticsArg,
    /// Comma-separated proposition universe
    #[arg(long, value_delimiter = ',')]
    props: Vec<String>,
    #[arg(long, default_value_t = 6)]
    max_len: usize,
    #[arg(long, default_value_t = 4)]
    max_prefix: usize,
    #[arg(long, default_value_t = 2)]
    max_loop: usize,
    /// Check implication a → b instead of equivalence
    #[arg(long)]
    implication: bool,
    /// Write a counterexample trace file here when one is found
    #[arg(long)]
    cex_out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    formula: PathBuf,
    #[arg(long)]
    trace: PathBuf,
    #[arg(long)]
    t: usize,
}

#[derive(Args)]
struct ExportLastArgs {
    #[arg(long)]
    formula: PathBuf,
    #[arg(long, value_enum, default_value = "canonical")]
    dialect: DialectArg,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Translate(args) => cmd_translate(args),
        Command::Enumerate(args) => cmd_enumerate(args),
        Command::Metrics(args) => cmd_metrics(args),
        Command::Report(args) => cmd_report(args),
        Command::Equiv(args) => cmd_equiv(args),
        Command::Eval(args) => cmd_eval(args),
        Command::ExportLast(args) => cmd_export_last(args),
    }
}

fn err_str(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn read_file(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

/// Reads a formula file: comment and blank lines are skipped, the remaining
/// lines form one formula.
fn read_formula_file(path: &Path) -> Result<MtlFormula, String> {
    let text = read_file(path)?;
    let body: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    parse_formula(&body.join(" ")).map_err(err_str)
}

fn read_formula_lines(path: &Path) -> Result<Vec<MtlFormula>, String> {
    let text = read_file(path)?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| parse_formula(l).map_err(err_str))
        .collect()
}

fn cmd_translate(args: TranslateArgs) -> Result<ExitCode, String> {
    let dialect: Dialect = args.dialect.into();
    let semantics: Semantics = args.semantics.into();
    let reqs: Vec<Requirement> = match (&args.req, &args.req_file) {
        (Some(sentence), None) => vec![fretish::parse_requirement(sentence).map_err(err_str)?],
        (None, Some(path)) => fretish::parse_requirements_file(&read_file(path)?).map_err(err_str)?,
        _ => return Err("exactly one of --req or --req-file is required".into()),
    };
    for req in &reqs {
        println!("{}", print_formula(&translate(req, semantics), dialect));
    }
    Ok(ExitCode::SUCCESS)
}

fn metrics_json(m: &MetricsReport) -> serde_json::Value {
    json!({
        "size": m.size,
        "temp_ops": m.temp_ops,
        "props": m.props,
        "temporal_depth": m.temporal_depth,
    })
}

fn metrics_text(m: &MetricsReport) -> String {
    format!(
        "size={} temp_ops={} props={} temporal_depth={}",
        m.size, m.temp_ops, m.props, m.temporal_depth
    )
}

fn cmd_metrics(args: MetricsArgs) -> Result<ExitCode, String> {
    let formulas = if args.per_line {
        read_formula_lines(&args.formula)?
    } else {
        vec![read_formula_file(&args.formula)?]
    };
    let reports: Vec<MetricsReport> = formulas.iter().map(metrics).collect();
    if args.json {
        let values: Vec<_> = reports.iter().map(metrics_json).collect();
        let out = if args.per_line { json!(values) } else { values[0].clone() };
        println!("{}", serde_json::to_string_pretty(&out).map_err(err_str)?);
    } else {
        for r in &reports {
            println!("{}", metrics_text(r));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_enumerate(args: EnumerateArgs) -> Result<ExitCode, String> {
    if args.k < 1 {
        return Err("--k must be at least 1".into());
    }
    let semantics: Semantics = args.semantics.into();
    fs::create_dir_all(&args.out)
        .map_err(|e| format!("cannot create {}: {e}", args.out.display()))?;
    let templates = fretish::enumerate_templates(args.k, &args.stop_name);
    let mut manifest = Vec::with_capacity(templates.len());
    for (idx, req) in templates.iter().enumerate() {
        let sentence = fretish::render_requirement(req);
        let file = format!(
            "req_{idx:03}_{}_{}_{}.mtl",
            req.scope.label(),
            req.condition.label(),
            req.timing.label()
        );
        let formula = translate(req, semantics);
        let body = format!("# {sentence}\n{}\n", print_formula(&formula, Dialect::Canonical));
        fs::write(args.out.join(&file), body)
            .map_err(|e| format!("cannot write {file}: {e}"))?;
        manifest.push(json!({
            "file": file,
            "sentence": sentence,
            "scope": req.scope.label(),
            "condition": req.condition.label(),
            "timing": req.timing.label(),
        }));
    }
    let index = json!({
        "k": args.k,
        "semantics": semantics.label(),
        "stop_name": args.stop_name,
        "templates": manifest,
    });
    fs::write(
        args.out.join("index.json"),
        serde_json::to_string_pretty(&index).map_err(err_str)? + "\n",
    )
    .map_err(|e| format!("cannot write index.json: {e}"))?;
    println!("wrote {} translations to {}", templates.len(), args.out.display());
    Ok(ExitCode::SUCCESS)
}

const TIMING_ORDER: [&str; 10] = [
    "immediately",
    "eventually",
    "next",
    "always",
    "never",
    "within",
    "for",
    "after",
    "until",
    "before",
];

fn cmd_report(args: ReportArgs) -> Result<ExitCode, String> {
    let index_text = read_file(&args.dir.join("index.json"))?;
    let index: serde_json::Value = serde_json::from_str(&index_text).map_err(err_str)?;
    let templates = index["templates"]
        .as_array()
        .ok_or_else(|| "index.json has no templates array".to_string())?;

    let mut groups: BTreeMap<String, Vec<MetricsReport>> = BTreeMap::new();
    for entry in templates {
        let file = entry["file"].as_str().ok_or("template entry without file")?;
        let timing = entry["timing"].as_str().ok_or("template entry without timing")?;
        let formula = read_formula_file(&args.dir.join(file))?;
        groups.entry(timing.to_string()).or_default().push(metrics(&formula));
    }

    let mut rows = Vec::new();
    for &timing in TIMING_ORDER.iter().filter(|t| groups.contains_key(**t)) {
        let reports = &groups[timing];
        let count = reports.len();
        let avg = |f: fn(&MetricsReport) -> usize| {
            reports.iter().map(f).sum::<usize>() as f64 / count as f64
        };
        rows.push((
            timing,
            count,
            avg(|m| m.size),
            avg(|m| m.temporal_depth),
            avg(|m| m.props),
            avg(|m| m.temp_ops),
        ));
    }

    if args.json {
        let out = json!({
            "semantics": index["semantics"],
            "timings": rows.iter().map(|(timing, count, size, depth, props, temp)| json!({
                "timing": timing,
                "count": count,
                "avg_size": size,
                "avg_temporal_depth": depth,
                "avg_props": props,
                "avg_temp_ops": temp,
            })).collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&out).map_err(err_str)?);
    } else {
        println!("{:<14} {:>5} {:>10} {:>10} {:>10} {:>10}", "timing", "count", "avg len", "avg depth", "avg props", "avg tops");
        for (timing, count, size, depth, props, temp) in &rows {
            println!("{timing:<14} {count:>5} {size:>10.2} {depth:>10.2} {props:>10.2} {temp:>10.2}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_equiv(args: EquivArgs) -> Result<ExitCode, String> {
    let f = read_formula_file(&args.a)?;
    let g = read_formula_file(&args.b)?;
    let mut cfg = CheckConfig::new(args.semantics.into(), args.props.clone());
    cfg.max_len = args.max_len;
    cfg.max_prefix = args.max_prefix;
    cfg.max_loop = args.max_loop;
    if let Ok(value) = std::env::var("FRET2MTL_MAX_TRACE_BITS") {
        cfg.trace_bits_limit = value
            .parse()
            .map_err(|_| format!("FRET2MTL_MAX_TRACE_BITS is not a number: {value}"))?;
    }
    let verdict = if args.implication {
        equiv::check_implication(&f, &g, &cfg)
    } else {
        equiv::check_equiv(&f, &g, &cfg)
    }
    .map_err(err_str)?;
    match verdict {
        Verdict::Equivalent => {
            println!("{} up to bounds", if args.implication { "Valid" } else { "Equivalent" });
            Ok(ExitCode::SUCCESS)
        }
        Verdict::Counterexample { witness, t } => {
            let serialized = format_trace(&witness, Some(t));
            println!("Counterexample found:");
            print!("{serialized}");
            if let Some(path) = &args.cex_out {
                fs::write(path, &serialized)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            }
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_eval(args: EvalArgs) -> Result<ExitCode, String> {
    let formula = read_formula_file(&args.formula)?;
    let (data, _) = parse_trace_text(&read_file(&args.trace)?).map_err(err_str)?;
    let value = match &data {
        TraceData::Finite(trace) => traces::eval(&formula, trace, args.t).map_err(err_str)?,
        TraceData::Lasso(lasso) => traces::eval_lasso(&formula, lasso, args.t),
    };
    println!("{value}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_export_last(args: ExportLastArgs) -> Result<ExitCode, String> {
    let formula = read_formula_file(&args.formula)?;
    // encode end-of-trace for infinite-trace checkers: LAST eventually rises
    // and then stays true forever
    let constraint = MtlFormula::eventually(fret2mtl::Interval::Unbounded, MtlFormula::Last).and(
        MtlFormula::globally(
            fret2mtl::Interval::Unbounded,
            MtlFormula::Last.implies(MtlFormula::Last.next()),
        ),
    );
    let encoded = constraint.implies(formula);
    println!("{}", print_formula(&encoded, args.dialect.into()));
    Ok(ExitCode::SUCCESS)
}
