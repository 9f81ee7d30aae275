use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{primes_up_to, LawReport};
use crate::ellcurve::{trace_table, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::polyring::{factor_degrees, IntPoly};
use crate::qseries::{eta_product, EtaSpec};

/// `(2/pi) * integral_{-1}^{x} sqrt(1 - t^2) dt`.
pub fn semicircle_cdf(x: f64) -> f64 {
    let x = x.clamp(-1.0, 1.0);
    0.5 + (x * (1.0 - x * x).sqrt() + x.asin()) / PI
}

/// Counts of samples in uniform bins on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl Histogram {
    pub fn uniform(bins: usize) -> Result<Self> {
        if bins < 2 {
            return Err(Error::Domain(format!("need at least 2 bins, got {bins}")));
        }
        let bin_edges = (0..=bins)
            .map(|i| -1.0 + 2.0 * i as f64 / bins as f64)
            .collect();
        Ok(Histogram {
            bin_edges,
            counts: vec![0; bins],
            total: 0,
        })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    /// Adds `x`, which must lie in `[-1, 1]`.
    pub fn add(&mut self, x: f64) {
        let bins = self.bins();
        let i = (((x + 1.0) / 2.0) * bins as f64).floor() as usize;
        self.counts[i.min(bins - 1)] += 1;
        self.total += 1;
    }

    /// Semicircle mass of bin `i` scaled by the total.
    pub fn expected(&self, i: usize) -> f64 {
        self.total as f64 * (semicircle_cdf(self.bin_edges[i + 1]) - semicircle_cdf(self.bin_edges[i]))
    }

    /// Samples in the lower and upper halves of the interval.
    pub fn halves(&self) -> (u64, u64) {
        let mid = self.bins() / 2;
        let lo = self.counts[..mid].iter().sum();
        let hi = self.counts[self.bins() - mid..].iter().sum();
        (lo, hi)
    }

    /// `bin_lo,bin_hi,count,expected`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("bin_lo,bin_hi,count,expected\n");
        for i in 0..self.bins() {
            let _ = writeln!(
                s,
                "{},{},{},{:.6}",
                self.bin_edges[i],
                self.bin_edges[i + 1],
                self.counts[i],
                self.expected(i)
            );
        }
        s
    }
}

/// Where the normalized traces come from.
#[derive(Debug, Clone, PartialEq)]
pub enum SatoTateSource {
    /// `a_p / (2 sqrt p)` over good primes, by direct point counting.
    Curve(WeierstrassCurve),
    /// `tau(p) / (2 p^{11/2})` from the coefficients of `Delta`.
    Delta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatoTateSpec {
    pub bins: usize,
    /// Bound on the sup distance between empirical and semicircle CDFs.
    pub tolerance: f64,
    /// Bound on `|#lower half - #upper half| / total`.
    pub symmetry_tolerance: f64,
}

impl Default for SatoTateSpec {
    fn default() -> Self {
        SatoTateSpec {
            bins: 40,
            tolerance: 0.05,
            symmetry_tolerance: 0.05,
        }
    }
}

/// Exact samples `(p, trace, weight)` meaning `t_p = trace / (2 p^{weight/2})`.
fn samples(source: &SatoTateSource, pmax: u64) -> Result<Vec<(u64, BigInt, u32)>> {
    let primes = primes_up_to(pmax);
    Ok(match source {
        SatoTateSource::Curve(e) => trace_table(e, &primes, true)
            .into_iter()
            .map(|r| (r.p, BigInt::from(r.a_p), 1))
            .collect(),
        SatoTateSource::Delta => {
            let delta = eta_product(&EtaSpec::parse("1^24")?, pmax as usize + 1)?;
            primes
                .iter()
                .map(|p| (p, delta.coeff(p as usize).clone(), 11))
                .collect()
        }
    })
}

/// Histogram of the normalized traces for primes up to `pmax`, with a report
/// on the Hasse or Deligne bound (checked exactly as `trace^2 <= 4 p^w`),
/// the Kolmogorov distance to the semicircle law and the balance between
/// the two halves of `[-1, 1]`.
pub fn sato_tate_histogram(
    source: &SatoTateSource,
    pmax: u64,
    spec: &SatoTateSpec,
) -> Result<(Histogram, LawReport)> {
    let mut hist = Histogram::uniform(spec.bins)?;
    let id = match source {
        SatoTateSource::Curve(e) => format!("sato-tate[{e}]"),
        SatoTateSource::Delta => "sato-tate[delta]".to_string(),
    };
    let mut report = LawReport::new(id, 2, pmax);
    let data = samples(source, pmax)?;
    let mut ts = Vec::with_capacity(data.len());
    for (p, trace, w) in &data {
        let bound = BigInt::from(4) * BigInt::from(*p).pow(*w);
        if &(trace * trace) > &bound {
            report.violate(*p, format!("|t_p| <= 1 (trace^2 <= {bound})"), trace);
            continue;
        }
        report.pass_one();
        let t = trace.to_f64().expect("finite") / (2.0 * (*p as f64).powf(*w as f64 / 2.0));
        let t = t.clamp(-1.0, 1.0);
        hist.add(t);
        ts.push(t);
    }
    ts.par_sort_by(|a, b| a.total_cmp(b));
    let n = ts.len() as f64;
    let discrepancy = ts
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let f = semicircle_cdf(t);
            (i as f64 / n - f).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    if discrepancy < spec.tolerance {
        report.pass_one();
    } else {
        report.violate(0, format!("discrepancy < {}", spec.tolerance), discrepancy);
    }
    let (lo, hi) = hist.halves();
    let imbalance = (lo as f64 - hi as f64).abs() / hist.total.max(1) as f64;
    if imbalance < spec.symmetry_tolerance {
        report.pass_one();
    } else {
        report.violate(0, format!("half imbalance < {}", spec.symmetry_tolerance), imbalance);
    }
    report.note("samples", hist.total);
    report.note("discrepancy", discrepancy);
    report.note("tolerance", spec.tolerance);
    report.note("lower_half", lo);
    report.note("upper_half", hi);
    report.note("half_imbalance", imbalance);
    report.note("bins", spec.bins as u64);
    Ok((hist, report.finish()))
}

/// Frequencies of the factorization patterns of `f mod p` over primes where
/// `f` stays squarefree, compared with `expected` (pattern as sorted degrees
/// to proportion) within `tolerance`.
pub fn chebotarev_proportions(
    f: &IntPoly,
    pmax: u64,
    expected: &BTreeMap<Vec<usize>, f64>,
    tolerance: f64,
) -> Result<LawReport> {
    let primes = primes_up_to(pmax);
    let patterns: Vec<Option<Vec<usize>>> = primes
        .primes()
        .par_iter()
        .map(|&p| factor_degrees(&f.reduce_mod_p(p)).ok())
        .collect();
    let mut counts: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    let mut ramified = Vec::new();
    for (&p, pat) in primes.primes().iter().zip(patterns) {
        match pat {
            Some(pat) => *counts.entry(pat).or_default() += 1,
            None => ramified.push(p),
        }
    }
    let total: u64 = counts.values().sum();
    let mut report = LawReport::new(format!("chebotarev[{f}]"), 2, pmax);
    let mut observed = serde_json::Map::new();
    for (pat, &want) in expected {
        let got = counts.get(pat).copied().unwrap_or(0) as f64 / total.max(1) as f64;
        observed.insert(format!("{pat:?}"), json!(got));
        let key = pat.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("+");
        if (got - want).abs() <= tolerance {
            report.pass_one();
        } else {
            report.violate(0, format!("{key}: {want:.4} +/- {tolerance}"), format!("{got:.4}"));
        }
    }
    for pat in counts.keys().filter(|p| !expected.contains_key(*p)) {
        report.violate(0, "a listed pattern", format!("{pat:?}"));
    }
    report.note("observed", observed);
    report.note("primes", total);
    report.note("ramified", ramified);
    report.note("tolerance", tolerance);
    Ok(report.finish())
}
