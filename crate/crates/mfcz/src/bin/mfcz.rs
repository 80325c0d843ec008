//! Batch front end: `cz` runs the decomposition on a signal file, `scan`
//! runs the seeded scaling experiments, `check` runs the full invariant
//! suite. Exit codes: 0 pass, 1 usage/input error, 2 invariant violation.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use mfcz::check::{run_checks, CheckConfig};
use mfcz::czdecomp;
use mfcz::grid::FrequencySet;
use mfcz::io;
use mfcz::multifreq::{scaling_scan, variational_exponent, weak_type_corpus_scan, KRange, ScanConfig};

#[derive(Parser)]
#[command(name = "mfcz", version, about = "Multi-frequency decomposition and variation-norm toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a sampled signal at height lambda against a frequency set.
    Cz(CzArgs),
    /// Run a seeded operator-norm or weak-type scaling scan.
    Scan(ScanArgs),
    /// Run the full self-contained invariant suite.
    Check(CheckArgs),
}

#[derive(Args)]
struct CzArgs {
    /// Signal CSV with header x,re,im.
    #[arg(long)]
    signal: PathBuf,
    /// Comma-separated strictly increasing frequencies.
    #[arg(long)]
    xi: String,
    /// Decomposition height, > 0.
    #[arg(long)]
    lambda: f64,
    /// Output JSON path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    /// vmt: variational operator-norm scan; weak: weak-type scan.
    #[arg(long, default_value = "vmt", value_parser = ["vmt", "weak"])]
    mode: String,
    /// Comma-separated ascending N values.
    #[arg(long = "N", default_value = "2,4,8,16,32")]
    n: String,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 4.0)]
    q: f64,
    #[arg(long, default_value_t = 2.5)]
    r: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Grid length; must be a power of two.
    #[arg(long, default_value_t = 1 << 14)]
    grid: usize,
    /// Scale range lo:hi.
    #[arg(long, default_value = "3:10")]
    krange: String,
    /// CSV output path for the per-trial table; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// What goes to stdout: the fit summary (json) or the table (csv).
    #[arg(long, default_value = "json", value_parser = ["json", "csv"])]
    format: String,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Grid length for the decomposition corpus; must be a power of two.
    #[arg(long, default_value_t = 1 << 14)]
    grid: usize,
    /// Number of corpus signals in the decomposition checks.
    #[arg(long, default_value_t = 50)]
    signals: usize,
    /// Perturb one bad-piece sample; the suite must then fail.
    #[arg(long, default_value_t = false)]
    inject_fault: bool,
}

fn parse_f64_list(s: &str, name: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("cannot parse {name} entry {t:?}"))
        })
        .collect()
}

fn parse_usize_list(s: &str, name: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("cannot parse {name} entry {t:?}"))
        })
        .collect()
}

fn parse_krange(s: &str) -> Result<KRange, String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("krange must be lo:hi, got {s:?}"))?;
    let lo: i32 = lo.trim().parse().map_err(|_| format!("bad krange lo {lo:?}"))?;
    let hi: i32 = hi.trim().parse().map_err(|_| format!("bad krange hi {hi:?}"))?;
    KRange::new(lo, hi).map_err(|e| e.to_string())
}

fn check_grid(grid: usize) -> Result<(), String> {
    if grid < 2 || !grid.is_power_of_two() {
        return Err(format!("grid must be a power of two ≥ 2, got {grid}"));
    }
    Ok(())
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn cmd_cz(args: &CzArgs) -> ExitCode {
    if !(args.lambda > 0.0) {
        return usage(format!("lambda must be > 0, got {}", args.lambda));
    }
    let xi = match parse_f64_list(&args.xi, "xi").and_then(|v| FrequencySet::new(v).map_err(|e| e.to_string())) {
        Ok(x) => x,
        Err(e) => return usage(e),
    };
    let f = match io::read_signal_csv(&args.signal) {
        Ok(f) => f,
        Err(e) => return usage(e),
    };
    let out = match czdecomp::cz_decompose(&f, &xi, args.lambda) {
        Ok(o) => o,
        Err(e) => return usage(e),
    };
    let report = czdecomp::verify_bounds(&out);
    let json = match io::cz_output_json(&out) {
        Ok(j) => j,
        Err(e) => return usage(e),
    };
    let written = match &args.out {
        Some(path) => io::write_string(path, &json).map_err(|e| e.to_string()),
        None => {
            println!("{json}");
            Ok(())
        }
    };
    if let Err(e) = written {
        return usage(e);
    }
    if let Some(v) = report.violations.first() {
        eprintln!("invariant violation: {v}");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}

fn cmd_scan(args: &ScanArgs) -> ExitCode {
    if let Err(e) = check_grid(args.grid) {
        return usage(e);
    }
    let ns = match parse_usize_list(&args.n, "N") {
        Ok(v) => v,
        Err(e) => return usage(e),
    };
    let ks = match parse_krange(&args.krange) {
        Ok(k) => k,
        Err(e) => return usage(e),
    };
    let mut cfg = match ScanConfig::new(ns, args.trials, args.q, args.r, args.seed) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    cfg.grid_len = args.grid;
    cfg.ks = ks;
    let result = match args.mode.as_str() {
        "vmt" => scaling_scan(&cfg, variational_exponent(args.r, args.q) + 0.35),
        _ => weak_type_corpus_scan(&cfg, 0.5 + 0.35),
    };
    let result = match result {
        Ok(r) => r,
        Err(e) => return usage(e),
    };
    let summary_json = match io::scan_summary_json(&result.summary) {
        Ok(j) => j,
        Err(e) => return usage(e),
    };
    if let Some(path) = &args.out {
        if let Err(e) = io::write_scan_csv(path, &result.records) {
            return usage(e);
        }
        let json_path = path.with_extension("json");
        if let Err(e) = io::write_string(&json_path, &summary_json) {
            return usage(e);
        }
    }
    match args.format.as_str() {
        "csv" => {
            println!("N,trial,seed,S,A,D0,D1,sup_symbol_variation");
            for r in &result.records {
                println!(
                    "{},{},{},{},{},{},{},{}",
                    r.n, r.trial, r.seed, r.s, r.a, r.d0, r.d1, r.sup_symbol_variation
                );
            }
        }
        _ => println!("{summary_json}"),
    }
    eprintln!("exponent budget: {}", result.summary.exponent_budget);
    if result.summary.pass {
        ExitCode::SUCCESS
    } else {
        eprintln!(
            "invariant violation: fitted slope {:?} exceeds budget {}",
            result.summary.slope, result.summary.exponent_budget
        );
        ExitCode::from(2)
    }
}

fn cmd_check(args: &CheckArgs) -> ExitCode {
    if let Err(e) = check_grid(args.grid) {
        return usage(e);
    }
    if args.signals == 0 {
        return usage("signals must be ≥ 1");
    }
    let cfg = CheckConfig {
        seed: args.seed,
        grid: args.grid,
        cz_signals: args.signals,
        inject_fault: args.inject_fault,
    };
    let outcomes = run_checks(&cfg);
    let mut failed = false;
    for o in &outcomes {
        if o.pass {
            println!("PASS {}: {}", o.name, o.detail);
        } else {
            failed = true;
            println!("FAIL {} (seed {}): {}", o.name, o.seed, o.detail);
        }
    }
    if failed {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            return usage(e);
        }
    };
    match &cli.command {
        Command::Cz(args) => cmd_cz(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Check(args) => cmd_check(args),
    }
}
