//! `recip`: command-line front end for the reciprocity-law harness.

mod cache;
mod config;
mod registry;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Result};
use clap::{Parser, Subcommand};
use recip_core::laws::root_count;
use recip_core::modarith::{is_prime, sieve_primes};
use recip_core::{EtaSpec, Error, IntPoly, LawReport};

use cache::{CoefficientCache, Kind};
use config::{Format, RunConfig, RunFlags};
use registry::LawOutput;

#[derive(Parser)]
#[command(name = "recip", version, about = "Verify explicit reciprocity laws numerically")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distinct roots of a polynomial modulo primes, as `p,N_p` rows.
    Np {
        #[arg(long)]
        poly: String,
        #[arg(long, conflicts_with = "pmax", required_unless_present = "pmax")]
        p: Option<u64>,
        #[arg(long)]
        pmax: Option<u64>,
    },
    /// Coefficients of an eta product as `n,c_n` CSV.
    Eta {
        /// Factors `N^e` separated by spaces, e.g. "1^2 11^2".
        #[arg(long)]
        spec: String,
        #[arg(long)]
        terms: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "RECIP_CACHE_DIR")]
        cache_dir: Option<PathBuf>,
    },
    /// Run one law.
    Verify {
        law: String,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run every law with its default range.
    All {
        #[command(flatten)]
        flags: RunFlags,
    },
    /// List law ids.
    List,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Np { poly, p, pmax } => np(&poly, p, pmax),
        Command::Eta {
            spec,
            terms,
            out,
            cache_dir,
        } => eta(&spec, terms, out, cache_dir),
        Command::Verify { law, flags } => verify(&law, &flags),
        Command::All { flags } => all(&flags),
        Command::List => {
            for law in registry::LAWS {
                println!("{:<18}{}", law.id, law.about);
            }
            Ok(0)
        }
    }
}

/// Parse errors echo the input with a caret under the offending position.
fn annotate(text: &str, e: Error) -> anyhow::Error {
    match e {
        Error::Parse { pos, ref msg } => {
            anyhow!("{e}\n  {text}\n  {}^ {msg}", " ".repeat(pos.min(text.len())))
        }
        other => other.into(),
    }
}

fn np(text: &str, p: Option<u64>, pmax: Option<u64>) -> Result<u8> {
    let f = IntPoly::parse(text).map_err(|e| annotate(text, e))?;
    let primes: Vec<u64> = match (p, pmax) {
        (Some(p), _) if !is_prime(p) => bail!("{p} is not prime"),
        (Some(p), _) => vec![p],
        (None, Some(pmax)) => sieve_primes(pmax)?.primes().to_vec(),
        (None, None) => bail!("pass --p or --pmax"),
    };
    let mut out = std::io::stdout().lock();
    for p in primes {
        writeln!(out, "{p},{}", root_count(&f, p))?;
    }
    Ok(0)
}

fn eta(text: &str, terms: usize, out: Option<PathBuf>, cache_dir: Option<PathBuf>) -> Result<u8> {
    let spec = EtaSpec::parse(text).map_err(|e| annotate(text, e))?;
    if terms == 0 {
        bail!("--terms must be positive");
    }
    let cache = CoefficientCache::new(cache_dir, false, config::DEFAULT_SEED);
    let series = cache.get_or_compute(Kind::Eta, &spec.to_string(), terms, || {
        Ok(recip_core::qseries::eta_product(&spec, terms)?)
    })?;
    match out {
        Some(path) => fs::write(path, series.to_csv())?,
        None => print!("{}", series.to_csv()),
    }
    Ok(0)
}

fn setup(flags: &RunFlags) -> Result<(RunConfig, CoefficientCache)> {
    let cfg = RunConfig::resolve(flags)?;
    if let Some(jobs) = cfg.jobs {
        if jobs == 0 {
            bail!("--jobs must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| anyhow!("thread pool: {e}"))?;
    }
    let cache = CoefficientCache::new(cfg.cache_dir.clone(), cfg.verify_cache, cfg.seed);
    Ok((cfg, cache))
}

fn violations_csv(report: &LawReport) -> String {
    let mut s = String::from("law,p,expected,got\n");
    for v in &report.violations {
        s.push_str(&format!(
            "{},{},{},{}\n",
            csv_field(&report.law_id),
            v.p,
            csv_field(&v.expected),
            csv_field(&v.got)
        ));
    }
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn verify(id: &str, flags: &RunFlags) -> Result<u8> {
    let Some(law) = registry::find(id) else {
        bail!("unknown law `{id}`; valid ids: {}", registry::ids().join(", "));
    };
    let (cfg, cache) = setup(flags)?;
    let LawOutput { report, csv } = (law.run)(&cfg, &cache)?;
    match cfg.format {
        Format::Table => print!("{}", report.to_table()),
        Format::Json => println!("{}", report.to_json()),
        Format::Csv => print!("{}", csv.unwrap_or_else(|| violations_csv(&report))),
    }
    Ok(if report.passed { 0 } else { 1 })
}

fn all(flags: &RunFlags) -> Result<u8> {
    let (cfg, cache) = setup(flags)?;
    let mut failed = Vec::new();
    let mut reports = Vec::new();
    let mut rows = String::from("law,passed,checked,violations,seconds\n");
    let start = Instant::now();
    for law in registry::LAWS {
        let t = Instant::now();
        let report = match (law.run)(&cfg, &cache) {
            Ok(out) => out.report,
            Err(e) => {
                let mut r = LawReport::new(law.id, 0, 0);
                r.violate(0, "a completed run", format!("{e:#}"));
                r.finish()
            }
        };
        let secs = t.elapsed().as_secs_f64();
        if !report.passed {
            failed.push(law.id);
        }
        match cfg.format {
            Format::Table => println!(
                "{:<18}{:<6}{:>10} checked {:>4} violations {:>9.3}s",
                law.id,
                if report.passed { "PASS" } else { "FAIL" },
                report.checked,
                report.violations.len(),
                secs
            ),
            Format::Csv => rows.push_str(&format!(
                "{},{},{},{},{secs:.3}\n",
                law.id,
                report.passed,
                report.checked,
                report.violations.len()
            )),
            Format::Json => reports.push(report),
        }
        eprintln!("{}: {:.3}s", law.id, secs);
    }
    match cfg.format {
        Format::Table => println!("total {:.3}s", start.elapsed().as_secs_f64()),
        Format::Csv => print!("{rows}"),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&reports)?
        ),
    }
    if failed.is_empty() {
        Ok(0)
    } else {
        eprintln!("failing laws: {}", failed.join(", "));
        Ok(1)
    }
}
