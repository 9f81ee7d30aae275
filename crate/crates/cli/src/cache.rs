use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Result;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use recip_core::QSeries;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Eta,
    Theta,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Eta => "eta",
            Kind::Theta => "theta",
        }
    }
}

/// Coefficient tables on disk, one file per `(kind, descriptor, truncation)`.
///
/// Each file is a header line followed by the `n,c_n` CSV of the series.
/// Unreadable or mismatched files are reported on stderr and recomputed.
#[derive(Debug, Clone)]
pub struct CoefficientCache {
    dir: Option<PathBuf>,
    verify: bool,
    seed: u64,
}

impl CoefficientCache {
    pub fn new(dir: Option<PathBuf>, verify: bool, seed: u64) -> Self {
        CoefficientCache { dir, verify, seed }
    }

    fn header(kind: Kind, descriptor: &str, truncation: usize) -> String {
        format!(
            "# recip-cache v{FORMAT_VERSION} kind={} descriptor={descriptor} truncation={truncation}",
            kind.name()
        )
    }

    pub fn path(&self, kind: Kind, descriptor: &str, truncation: usize) -> Option<PathBuf> {
        let slug: String = descriptor
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
            .collect();
        self.dir
            .as_ref()
            .map(|d| d.join(format!("{}-{slug}-{truncation}.csv", kind.name())))
    }

    /// The cached series, or `compute()` stored for next time.
    pub fn get_or_compute(
        &self,
        kind: Kind,
        descriptor: &str,
        truncation: usize,
        compute: impl Fn() -> Result<QSeries>,
    ) -> Result<QSeries> {
        let Some(path) = self.path(kind, descriptor, truncation) else {
            return compute();
        };
        let header = Self::header(kind, descriptor, truncation);
        match read(&path, &header, truncation) {
            Ok(Some(cached)) => {
                if !self.verify {
                    return Ok(cached);
                }
                let fresh = compute()?;
                if self.sample_matches(&cached, &fresh) {
                    return Ok(cached);
                }
                eprintln!("warning: cache file {} disagrees with a fresh computation; replacing it", path.display());
                store(&path, &header, &fresh);
                return Ok(fresh);
            }
            Ok(None) => {}
            Err(why) => eprintln!("warning: ignoring cache file {}: {why}", path.display()),
        }
        let fresh = compute()?;
        store(&path, &header, &fresh);
        Ok(fresh)
    }

    fn sample_matches(&self, cached: &QSeries, fresh: &QSeries) -> bool {
        let t = cached.truncation();
        if fresh.truncation() != t {
            return false;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let k = (t / 100).max(1).min(t);
        sample(&mut rng, t, k)
            .into_iter()
            .all(|n| cached.coeff(n) == fresh.coeff(n))
    }
}

fn read(path: &Path, header: &str, truncation: usize) -> Result<Option<QSeries>, String> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.to_string()),
    };
    let (first, body) = text.split_once('\n').ok_or("missing header")?;
    if first != header {
        return Err(format!("header `{first}` does not match `{header}`"));
    }
    let series = QSeries::from_csv(body).map_err(|e| e.to_string())?;
    if series.truncation() != truncation {
        return Err(format!("{} rows, expected {truncation}", series.truncation()));
    }
    Ok(Some(series))
}

fn store(path: &Path, header: &str, series: &QSeries) {
    let write = || -> std::io::Result<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, format!("{header}\n{}", series.to_csv()))?;
        fs::rename(&tmp, path)
    };
    if let Err(e) = write() {
        eprintln!("warning: could not write cache file {}: {e}", path.display());
    }
}
