use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "table" => Ok(Format::Table),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => bail!("unknown format `{other}` (table, json, csv)"),
        }
    }
}

/// Flags shared by `verify` and `all`. Every flag also reads `RECIP_<NAME>`.
#[derive(Debug, Clone, Default, Args)]
pub struct RunFlags {
    /// Largest prime (or index) examined; laws have their own defaults.
    #[arg(long, env = "RECIP_PMAX")]
    pub pmax: Option<u64>,
    /// Number of series terms, where a law takes one.
    #[arg(long, env = "RECIP_TRUNCATION")]
    pub truncation: Option<usize>,
    /// Numeric tolerance (functional equations, equidistribution).
    #[arg(long, env = "RECIP_TOLERANCE")]
    pub tolerance: Option<f64>,
    /// Histogram bins for sato-tate.
    #[arg(long, env = "RECIP_BINS")]
    pub bins: Option<usize>,
    #[arg(long, value_enum, env = "RECIP_FORMAT")]
    pub format: Option<Format>,
    /// Shorthand for `--format json`.
    #[arg(long)]
    pub json: bool,
    /// Directory for cached coefficient tables.
    #[arg(long, env = "RECIP_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Recompute a random 1% sample of every cache hit and compare.
    #[arg(long)]
    pub verify_cache: bool,
    #[arg(long, env = "RECIP_SEED")]
    pub seed: Option<u64>,
    /// Worker threads.
    #[arg(long, env = "RECIP_JOBS")]
    pub jobs: Option<usize>,
    /// Curve such as "y^2 + y = x^3 - x^2".
    #[arg(long, env = "RECIP_CURVE")]
    pub curve: Option<String>,
    /// Eta product matching `--curve`, e.g. "1^2 11^2".
    #[arg(long, env = "RECIP_ETA")]
    pub eta: Option<String>,
    /// Prime l for torsion-split and mu-split.
    #[arg(long, env = "RECIP_L")]
    pub l: Option<u64>,
    /// Level m for cyclotomic; all of 2..=30 when absent.
    #[arg(long)]
    pub m: Option<u64>,
    /// Polynomial for quad-residues and chebotarev.
    #[arg(long)]
    pub poly: Option<String>,
    /// Modulus D for quad-residues.
    #[arg(long)]
    pub modulus: Option<u64>,
    /// Config file (default ./recip.conf if present).
    #[arg(long, env = "RECIP_CONFIG")]
    pub config: Option<PathBuf>,
}

/// Settings after merging flags, environment, config file and defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub pmax: Option<u64>,
    pub truncation: Option<usize>,
    pub tolerance: Option<f64>,
    pub bins: usize,
    pub format: Format,
    pub cache_dir: Option<PathBuf>,
    pub verify_cache: bool,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub curve: Option<String>,
    pub eta: Option<String>,
    pub l: u64,
    pub m: Option<u64>,
    pub poly: Option<String>,
    pub modulus: Option<u64>,
}

pub const DEFAULT_SEED: u64 = 20_240_601;

/// `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected `key = value`", i + 1);
        };
        out.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(out)
}

fn from_file<T: std::str::FromStr>(file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    file.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|e| anyhow::anyhow!("config key `{key}`: {e}"))
        })
        .transpose()
}

impl RunConfig {
    pub fn resolve(flags: &RunFlags) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => load(path)?,
            None if Path::new("recip.conf").exists() => load(Path::new("recip.conf"))?,
            None => BTreeMap::new(),
        };
        const KNOWN: [&str; 13] = [
            "pmax", "truncation", "tolerance", "bins", "format", "cache_dir", "seed", "jobs",
            "curve", "eta", "l", "poly", "modulus",
        ];
        if let Some(k) = file.keys().find(|k| !KNOWN.contains(&k.as_str())) {
            bail!("unknown config key `{k}`");
        }
        let format = if flags.json {
            Format::Json
        } else {
            flags
                .format
                .or(from_file::<Format>(&file, "format")?)
                .unwrap_or(Format::Table)
        };
        let bins = flags.bins.or(from_file(&file, "bins")?).unwrap_or(40);
        if bins < 2 {
            bail!("bins must be at least 2");
        }
        Ok(RunConfig {
            pmax: flags.pmax.or(from_file(&file, "pmax")?),
            truncation: flags.truncation.or(from_file(&file, "truncation")?),
            tolerance: flags.tolerance.or(from_file(&file, "tolerance")?),
            bins,
            format,
            cache_dir: flags
                .cache_dir
                .clone()
                .or(from_file::<String>(&file, "cache_dir")?.map(PathBuf::from)),
            verify_cache: flags.verify_cache,
            seed: flags.seed.or(from_file(&file, "seed")?).unwrap_or(DEFAULT_SEED),
            jobs: flags.jobs.or(from_file(&file, "jobs")?),
            curve: flags.curve.clone().or(from_file(&file, "curve")?),
            eta: flags.eta.clone().or(from_file(&file, "eta")?),
            l: flags.l.or(from_file(&file, "l")?).unwrap_or(7),
            m: flags.m,
            poly: flags.poly.clone().or(from_file(&file, "poly")?),
            modulus: flags.modulus.or(from_file(&file, "modulus")?),
        })
    }

    pub fn pmax_or(&self, default: u64) -> u64 {
        self.pmax.unwrap_or(default)
    }
}

fn load(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    parse_config(&text)
}
