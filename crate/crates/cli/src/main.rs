use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use maxop_core::checks::run_checks;
use maxop_core::multiplier::{decay_constants, write_decay_csv};
use maxop_core::scan::{
    emit_plotdata, parse_dims, parse_exponents, parse_grid, run_scan, write_csv, Family, Operator, ScanConfig,
    ScanReport,
};
use maxop_core::Error;

/// Maximal-operator experiments on discretized grids.
#[derive(Parser, Debug)]
#[command(name = "maxop", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep dimensions and exponents, writing a norm-ratio CSV.
    Scan(ScanArgs),
    /// Decay constants of the dyadic multiplier pieces.
    Decay(DecayArgs),
    /// Run the quick property suite.
    Check,
    /// Sweep the Grushin operators M_K and the iterated maximal operator.
    Grushin(ScanArgs),
}

#[derive(Args, Debug, Default)]
struct ScanArgs {
    /// JSON configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    operator: Option<String>,
    /// Dimensions, e.g. `1,2,3` or `1..5`.
    #[arg(long = "d_range")]
    d_range: Option<String>,
    #[arg(long = "p_list")]
    p_list: Option<String>,
    #[arg(long = "q_list")]
    q_list: Option<String>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long = "n_members")]
    n_members: Option<usize>,
    /// `L,N`.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long = "radii_K")]
    radii_k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    l: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long = "d_prime")]
    d_prime: Option<usize>,
    #[arg(long = "n_mc")]
    n_mc: Option<usize>,
    #[arg(long = "nodes_per_annulus")]
    nodes_per_annulus: Option<usize>,
    /// CSV destination (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plot-data destination.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Write zero in the wall_ms column.
    #[arg(long = "no-timing")]
    no_timing: bool,
}

#[derive(Args, Debug)]
struct DecayArgs {
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long = "l_max", default_value_t = 8)]
    l_max: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Contract(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Csv(_) | Error::Json(_) | Error::Config(_) => Failure::Usage(e.to_string()),
            other => Failure::Contract(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Configuration from the optional file and flags; any error is a usage error.
fn build_config(args: &ScanArgs) -> Result<ScanConfig, Failure> {
    config_from_args(args).map_err(|e| Failure::Usage(e.to_string()))
}

fn config_from_args(args: &ScanArgs) -> Result<ScanConfig, Error> {
    let mut cfg = match &args.config {
        Some(path) => ScanConfig::from_file(path)?,
        None => ScanConfig::default(),
    };
    if let Some(s) = &args.operator {
        cfg.operator = s.parse::<Operator>()?;
    }
    if let Some(s) = &args.d_range {
        cfg.d_range = parse_dims(s)?;
    }
    if let Some(s) = &args.p_list {
        cfg.p_list = parse_exponents(s)?;
    }
    if let Some(s) = &args.q_list {
        cfg.q_list = parse_exponents(s)?;
    }
    if let Some(s) = &args.family {
        cfg.family = s.parse::<Family>()?;
    }
    if let Some(s) = &args.grid {
        cfg.grid = Some(parse_grid(s)?);
    }
    cfg.n_members = args.n_members.unwrap_or(cfg.n_members);
    cfg.radii_k = args.radii_k.unwrap_or(cfg.radii_k);
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    cfg.l = args.l.unwrap_or(cfg.l);
    cfg.k = args.k.unwrap_or(cfg.k);
    cfg.d_prime = args.d_prime.unwrap_or(cfg.d_prime);
    cfg.n_mc = args.n_mc.unwrap_or(cfg.n_mc);
    cfg.nodes_per_annulus = args.nodes_per_annulus.unwrap_or(cfg.nodes_per_annulus);
    cfg.validate()?;
    Ok(cfg)
}

fn write_report(report: &ScanReport, args: &ScanArgs) -> Result<(), Failure> {
    let report = if args.no_timing { report.without_timing() } else { report.clone() };
    match &args.out {
        Some(path) => write_csv(&report, BufWriter::new(File::create(path)?))?,
        None => write_csv(&report, io::stdout().lock())?,
    }
    if let Some(path) = &args.plot {
        emit_plotdata(&report, path)?;
    }
    Ok(())
}

/// Rows whose operator guarantees `ratio >= 1`.
fn dominated(report: &ScanReport) -> Vec<String> {
    report
        .rows
        .iter()
        .filter(|r| matches!(r.operator, Operator::Hl | Operator::Mk | Operator::MkIter))
        .filter(|r| r.ratio.is_finite() && r.ratio < 1.0 - 1e-12)
        .map(|r| format!("{} d={} p={} q={} ratio={}", r.operator, r.d, r.p, r.q, r.ratio))
        .collect()
}

fn finish_scan(report: ScanReport, args: &ScanArgs) -> Result<(), Failure> {
    for row in report.rows.iter().filter(|r| r.extra.starts_with("error=")) {
        eprintln!("warning: {} d={}: {}", row.operator, row.d, &row.extra["error=".len()..]);
    }
    write_report(&report, args)?;
    let bad = dominated(&report);
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Contract(format!("ratio below 1: {}", bad.join(", "))))
    }
}

fn scan(args: &ScanArgs) -> Result<(), Failure> {
    let cfg = build_config(args)?;
    finish_scan(run_scan(&cfg)?, args)
}

fn grushin(args: &ScanArgs) -> Result<(), Failure> {
    let base = build_config(args)?;
    let mut report = ScanReport::default();
    let ops = match &args.operator {
        Some(_) if base.operator.is_grushin() => vec![base.operator],
        Some(_) => return Err(Failure::Usage(format!("{} is not a Grushin operator", base.operator))),
        None => vec![Operator::Mk, Operator::MkIter],
    };
    for op in ops {
        let part = run_scan(&ScanConfig { operator: op, ..base.clone() })?;
        report.rows.extend(part.rows);
        for note in part.notes {
            if !report.notes.contains(&note) {
                report.notes.push(note);
            }
        }
    }
    report.sort();
    for note in &report.notes {
        eprintln!("note: {note}");
    }
    finish_scan(report, args)
}

fn decay(args: &DecayArgs) -> Result<(), Failure> {
    let rows = decay_constants(args.d, args.l_max).map_err(|e| Failure::Usage(e.to_string()))?;
    match &args.out {
        Some(path) => write_decay_csv(&rows, BufWriter::new(File::create(path)?))?,
        None => write_decay_csv(&rows, io::stdout().lock())?,
    }
    if rows.iter().all(|r| r.c1.is_finite() && r.c2.is_finite() && r.c3.is_finite()) {
        Ok(())
    } else {
        Err(Failure::Contract("non-finite decay constant".into()))
    }
}

fn check() -> Result<(), Failure> {
    let outcomes = run_checks();
    let mut out = io::stdout().lock();
    for c in &outcomes {
        writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
    }
    let failed = outcomes.iter().filter(|c| !c.passed).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Contract(format!("{failed} check(s) failed")))
    }
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("MAXOP_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::Usage(format!("MAXOP_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = configure_threads().and_then(|_| match &cli.command {
        Command::Scan(args) => scan(args),
        Command::Decay(args) => decay(args),
        Command::Check => check(),
        Command::Grushin(args) => grushin(args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Contract(msg)) => {
            eprintln!("contract failure: {msg}");
            ExitCode::from(2)
        }
    }
}
