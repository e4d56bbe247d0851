//! Argument parsing and the five subcommands.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::Serialize;
use serde_json::{json, Value};
use tritile::constructions::ColumnLabeling;
use tritile::format::{self, GraphFile};
use tritile::pattern::PatternId;
use tritile::solver::Certificate;
use tritile::structure::{default_delta, default_gamma, detect_extreme, fit_approx};
use tritile::tiler::{solve, SolveOutcome, TilerError};

use crate::config::{parse_ratio, sha256_hex, RunConfig};
use crate::exit;
use crate::generate::{generate, Family, GenerateError, GraphMeta, Params};
use crate::scan::{scan, ScanError, ScanParams};

#[derive(Parser, Debug)]
#[command(name = "tritile", version, about = "Perfect K_{h,h,h}-tilings of balanced tripartite graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a graph from one of the built-in families.
    Generate(GenerateArgs),
    /// Look for a K_{h,h,h}-factor or a proof that none exists.
    Solve(SolveArgs),
    /// Check a certificate against a graph.
    Verify(VerifyArgs),
    /// Search for an approximate pattern blow-up or an extreme-case triple.
    Detect(DetectArgs),
    /// Solve random graphs at exact bar-min-degree levels and tally outcomes.
    Scan(ScanArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    family: Family,
    /// Graph file to write; sidecars go to `<out>.meta.json` and `<out>.cert.json`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long = "N")]
    big_n: Option<usize>,
    #[arg(long)]
    h: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    level: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    noise: Option<f64>,
}

/// Config file plus overrides; flags win over the file.
#[derive(Args, Debug)]
struct ConfigArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_ratio)]
    gamma: Option<Ratio<u64>>,
    #[arg(long, value_parser = parse_ratio)]
    delta: Option<Ratio<u64>>,
    #[arg(long, value_parser = parse_ratio)]
    epsilon: Option<Ratio<u64>>,
    #[arg(long)]
    node_budget: Option<u64>,
    #[arg(long)]
    effort: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    graph: PathBuf,
    /// Tile size; defaults to the one in the graph header.
    #[arg(long)]
    h: Option<usize>,
    #[command(flatten)]
    config: ConfigArgs,
    /// Metadata sidecar with a column labeling; `<graph>.meta.json` is used
    /// when present.
    #[arg(long)]
    meta: Option<PathBuf>,
    /// Skip the exact search.
    #[arg(long)]
    no_exact: bool,
    /// Also write the certificate, if any, to this file.
    #[arg(long)]
    cert_out: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    graph: PathBuf,
    /// A certificate, or a solve report carrying one.
    certificate: PathBuf,
    #[arg(long)]
    h: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DetectPattern {
    Gamma3,
    Theta22,
    Theta32,
    Theta33,
    Extreme,
}

#[derive(Args, Debug)]
struct DetectArgs {
    graph: PathBuf,
    #[arg(long, value_enum)]
    pattern: DetectPattern,
    /// Density bound: δ for patterns, γ for the extreme case.
    #[arg(long, value_parser = parse_ratio)]
    tolerance: Option<Ratio<u64>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    effort: usize,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    h: usize,
    #[arg(long = "N")]
    big_n: usize,
    /// Comma-separated bar-min-degree levels.
    #[arg(long, value_delimiter = ',', required = true)]
    levels: Vec<usize>,
    #[arg(long)]
    samples: usize,
    #[command(flatten)]
    config: ConfigArgs,
    /// Directory for exemplar graphs and their certificates.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 16)]
    max_exemplars: usize,
    #[arg(long, env = "TRITILE_WORKERS")]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure carrying its exit code and one-line diagnostic.
struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

type Outcome = Result<i32, Failure>;

/// Every report carries the seed, the config and its hash, and the hash of
/// the input graph file.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    command: &'static str,
    seed: u64,
    config_hash: String,
    config: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    graph_sha256: Option<String>,
    report: T,
}

fn envelope<'a, T: Serialize>(command: &'static str, config: &'a RunConfig, graph_sha256: Option<String>, report: T) -> Envelope<'a, T> {
    Envelope {
        tool: concat!("tritile ", env!("CARGO_PKG_VERSION")),
        command,
        seed: config.seed,
        config_hash: config.hash(),
        config,
        graph_sha256,
        report,
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| fail(exit::IO, format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| fail(exit::IO, format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write_file(p, text),
        None => out.write_all(text.as_bytes()).map_err(|e| fail(exit::IO, format!("cannot write output: {e}"))),
    }
}

/// Reads a graph file, returning it with the SHA-256 of its bytes.
fn load_graph(path: &Path) -> Result<(GraphFile, String), Failure> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes).map_err(|_| fail(exit::PARSE, format!("{}: not UTF-8", path.display())))?;
    let file = format::parse(&text).map_err(|e| fail(exit::PARSE, format!("{}: {e}", path.display())))?;
    Ok((file, sha256_hex(text.as_bytes())))
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn load_config(args: &ConfigArgs) -> Result<RunConfig, Failure> {
    let mut c = match &args.config {
        Some(p) => {
            let text = String::from_utf8(read(p)?).map_err(|_| fail(exit::PARSE, format!("{}: not UTF-8", p.display())))?;
            RunConfig::from_toml(&text).map_err(|e| fail(exit::PARSE, format!("{}: {e}", p.display())))?
        }
        None => RunConfig::default(),
    };
    c.seed = args.seed.unwrap_or(c.seed);
    c.gamma = args.gamma.unwrap_or(c.gamma);
    c.delta = args.delta.unwrap_or(c.delta);
    c.epsilon = args.epsilon.unwrap_or(c.epsilon);
    c.node_budget = args.node_budget.unwrap_or(c.node_budget);
    c.effort = args.effort.unwrap_or(c.effort);
    c.restarts = args.restarts.unwrap_or(c.restarts);
    c.validate().map_err(|e| fail(exit::USAGE, e.to_string()))?;
    Ok(c)
}

fn tile_size(flag: Option<usize>, file: &GraphFile) -> Result<usize, Failure> {
    flag.or(file.h).ok_or_else(|| fail(exit::USAGE, "no tile size: pass --h or set h in the graph header"))
}

fn cmd_generate(a: GenerateArgs, out: &mut dyn Write) -> Outcome {
    let params = Params {
        m: a.m,
        n: a.n,
        d: a.d,
        big_n: a.big_n,
        h: a.h,
        q: a.q,
        r: a.r,
        level: a.level,
        p: a.p,
        noise: a.noise,
    };
    let g = generate(a.family, &params, a.seed).map_err(|e| match e {
        GenerateError::Infeasible(m) => fail(exit::INFEASIBLE, m),
        GenerateError::Invalid(m) => fail(exit::USAGE, m),
    })?;
    let text = format::write(&g.graph, g.h);
    let meta = GraphMeta {
        family: a.family,
        seed: a.seed,
        params,
        n: g.graph.n(),
        h: g.h,
        bar_min_degree: g.graph.bar_min_degree(),
        graph_sha256: sha256_hex(text.as_bytes()),
        columns: g.columns,
        blocks: g.blocks,
        extra: g.extra,
    };
    write_file(&a.out, &text)?;
    write_file(&sidecar(&a.out, ".meta.json"), &to_json(&meta))?;
    if let Some(cert) = &g.certificate {
        write_file(&sidecar(&a.out, ".cert.json"), &to_json(cert))?;
    }
    emit(out, None, &to_json(&meta))?;
    Ok(exit::OK)
}

fn load_columns(args: &SolveArgs) -> Result<Option<ColumnLabeling>, Failure> {
    let path = match &args.meta {
        Some(p) => p.clone(),
        None => {
            let p = sidecar(&args.graph, ".meta.json");
            if !p.exists() {
                return Ok(None);
            }
            p
        }
    };
    let meta: GraphMeta = serde_json::from_slice(&read(&path)?)
        .map_err(|e| fail(exit::PARSE, format!("{}: {e}", path.display())))?;
    Ok(meta.columns)
}

fn cmd_solve(a: SolveArgs, out: &mut dyn Write) -> Outcome {
    let (file, sha) = load_graph(&a.graph)?;
    let h = tile_size(a.h, &file)?;
    let config = load_config(&a.config)?;
    let mut solve_config = config.solve_config(file.graph.n());
    solve_config.exact_fallback &= !a.no_exact;
    solve_config.columns = load_columns(&a)?;
    let report = solve(&file.graph, h, &solve_config).map_err(|e| match e {
        TilerError::IndivisibleN { .. } => fail(exit::DATA, e.to_string()),
        _ => fail(exit::SOFTWARE, e.to_string()),
    })?;
    if let (Some(p), Some(cert)) = (&a.cert_out, &report.certificate) {
        write_file(p, &to_json(cert))?;
    }
    let code = match report.outcome {
        SolveOutcome::Factor => exit::OK,
        SolveOutcome::NoFactor => exit::NO_FACTOR,
        SolveOutcome::Structure => exit::STRUCTURE,
        SolveOutcome::Unknown => exit::UNKNOWN,
    };
    emit(out, a.out.as_deref(), &to_json(&envelope("solve", &config, Some(sha), &report)))?;
    Ok(code)
}

/// Accepts a bare certificate or any JSON carrying one under
/// `report.certificate` or `certificate`.
fn extract_certificate(value: Value) -> Result<Certificate, String> {
    let nested = value.pointer("/report/certificate").or_else(|| value.get("certificate")).cloned();
    let candidate = match nested {
        Some(Value::Null) => return Err("the report carries no certificate".into()),
        Some(v) => v,
        None => value,
    };
    serde_json::from_value(candidate).map_err(|e| format!("not a certificate: {e}"))
}

fn certificate_h(cert: &Certificate) -> Option<usize> {
    use tritile::solver::NoFactorCertificate as N;
    match cert {
        Certificate::Factor(f) => f.copies.first().map(|c| c.parts()[0].len()),
        Certificate::NoFactor(N::ExhaustedSearch { h, .. }) => Some(*h),
        Certificate::NoFactor(N::ColumnArgument(arg)) => Some(arg.h),
    }
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Outcome {
    let (file, sha) = load_graph(&a.graph)?;
    let value: Value = serde_json::from_slice(&read(&a.certificate)?)
        .map_err(|e| fail(exit::PARSE, format!("{}: {e}", a.certificate.display())))?;
    let cert = extract_certificate(value).map_err(|e| fail(exit::PARSE, format!("{}: {e}", a.certificate.display())))?;
    let h = a
        .h
        .or(file.h)
        .or_else(|| certificate_h(&cert))
        .ok_or_else(|| fail(exit::USAGE, "no tile size: pass --h"))?;
    let result = cert.verify(&file.graph, h);
    let kind = match cert {
        Certificate::Factor(_) => "factor",
        Certificate::NoFactor(_) => "no_factor",
    };
    let report = json!({
        "graph_sha256": sha,
        "h": h,
        "kind": kind,
        "valid": result.is_ok(),
        "reason": result.as_ref().err(),
    });
    emit(out, None, &to_json(&report))?;
    Ok(if result.is_ok() { exit::OK } else { exit::INVALID })
}

fn cmd_detect(a: DetectArgs, out: &mut dyn Write) -> Outcome {
    let (file, sha) = load_graph(&a.graph)?;
    let g = &file.graph;
    let (name, tolerance, witness) = match a.pattern {
        DetectPattern::Extreme => {
            let gamma = a.tolerance.unwrap_or_else(default_gamma);
            let w = detect_extreme(g, gamma, a.seed, a.effort).map(|w| serde_json::to_value(w).expect("serializes"));
            ("extreme", gamma, w)
        }
        p => {
            let id = match p {
                DetectPattern::Gamma3 => PatternId::Gamma3,
                DetectPattern::Theta22 => PatternId::Theta22,
                DetectPattern::Theta32 => PatternId::Theta32,
                _ => PatternId::Theta33,
            };
            let delta = a.tolerance.unwrap_or_else(default_delta);
            let w = fit_approx(g, &id.pattern(), delta, a.seed, a.effort).map(|w| serde_json::to_value(w).expect("serializes"));
            (id.name(), delta, w)
        }
    };
    let found = witness.is_some();
    let report = json!({
        "graph_sha256": sha,
        "pattern": name,
        "tolerance": format!("{}/{}", tolerance.numer(), tolerance.denom()),
        "seed": a.seed,
        "effort": a.effort,
        "found": found,
        "witness": witness,
    });
    emit(out, None, &to_json(&report))?;
    Ok(if found { exit::OK } else { exit::UNKNOWN })
}

fn cmd_scan(a: ScanArgs, out: &mut dyn Write) -> Outcome {
    let config = load_config(&a.config)?;
    if a.workers == Some(0) {
        return Err(fail(exit::USAGE, "--workers must be positive"));
    }
    let params = ScanParams {
        h: a.h,
        n: a.big_n,
        levels: a.levels,
        samples: a.samples,
        out_dir: a.out_dir,
        max_exemplars: a.max_exemplars,
        workers: a.workers,
    };
    let report = scan(&params, &config).map_err(|e| match e {
        ScanError::Tiler(TilerError::IndivisibleN { .. }) => fail(exit::DATA, e.to_string()),
        ScanError::Io(_) => fail(exit::IO, e.to_string()),
        _ => fail(exit::SOFTWARE, e.to_string()),
    })?;
    emit(out, a.out.as_deref(), &to_json(&envelope("scan", &config, None, &report)))?;
    Ok(exit::OK)
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    exit::OK
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    exit::USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a, out),
        Command::Solve(a) => cmd_solve(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Detect(a) => cmd_detect(a, out),
        Command::Scan(a) => cmd_scan(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "tritile: {}", f.message);
            f.code
        }
    }
}
