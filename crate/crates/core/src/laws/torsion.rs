use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::modular_laws::verify_elliptic_modularity_with;
use super::{primes_up_to, LawReport};
use crate::ellcurve::{count_affine, full_l_torsion_rational, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::modarith;
use crate::qseries::{eta_product, EtaSpec, QSeries};

/// Outcome of a complete-splitting scan for `Q(E[l])`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionScan {
    /// Good `p != l` with `p = 1` and `a_p = 2 (mod l)`.
    pub candidates: Vec<u64>,
    /// Candidates at which all of `E[l]` is rational over `F_p`.
    pub split: Vec<u64>,
    /// `"series"` when `a_p` was read from the eta product, `"direct"` otherwise.
    pub oracle: String,
}

/// Scan good primes `p <= pmax`, `p != l`, for complete splitting in `Q(E[l])`.
///
/// `a_p` comes from the `q`-expansion of `eta` once `a_p = c_p` has been
/// confirmed by direct counting for `p <= prefix`; if that check fails, every
/// `a_p` is counted directly. On the prefix, every good prime is also tested
/// for full `l`-torsion so that a split prime outside the candidate list
/// would be reported.
pub fn torsion_split_scan(
    e: &WeierstrassCurve,
    eta: &EtaSpec,
    l: u64,
    pmax: u64,
    prefix: u64,
) -> Result<(TorsionScan, LawReport)> {
    if !modarith::is_prime(l) {
        return Err(Error::Domain(format!("{l} is not prime")));
    }
    if pmax < l {
        return Err(Error::Domain(format!("pmax = {pmax} is below l = {l}")));
    }
    let series = eta_product(eta, pmax as usize + 1)?;
    let (scan, mut report) = torsion_split_scan_with(e, &series, l, pmax, prefix)?;
    report.note("eta", eta.to_string());
    Ok((scan, report))
}

/// As [`torsion_split_scan`] with a precomputed `q`-expansion.
pub fn torsion_split_scan_with(
    e: &WeierstrassCurve,
    series: &QSeries,
    l: u64,
    pmax: u64,
    prefix: u64,
) -> Result<(TorsionScan, LawReport)> {
    if !modarith::is_prime(l) {
        return Err(Error::Domain(format!("{l} is not prime")));
    }
    if pmax < l {
        return Err(Error::Domain(format!("pmax = {pmax} is below l = {l}")));
    }
    let prefix = prefix.min(pmax).max(2);
    let modularity = verify_elliptic_modularity_with(e, series, prefix)?;
    let use_series = modularity.passed;

    let primes: Vec<u64> = primes_up_to(pmax)
        .iter()
        .filter(|&p| p != l && !e.is_bad(p))
        .collect();
    let traces: Vec<i64> = primes
        .par_iter()
        .map(|&p| {
            if use_series {
                series.coeff_i64(p as usize).expect("coefficient fits in i64")
            } else {
                count_affine(e, p).expect("prime").a_p
            }
        })
        .collect();
    let li = l as i64;
    let candidates: Vec<u64> = primes
        .iter()
        .zip(&traces)
        .filter(|(&p, &a)| p % l == 1 && (a - 2).rem_euclid(li) == 0)
        .map(|(&p, _)| p)
        .collect();
    let split_flags: Vec<bool> = candidates
        .par_iter()
        .map(|&p| full_l_torsion_rational(e, p, l))
        .collect::<Result<_>>()?;
    let split: Vec<u64> = candidates
        .iter()
        .zip(&split_flags)
        .filter(|(_, &s)| s)
        .map(|(&p, _)| p)
        .collect();

    let mut report = LawReport::new(format!("torsion-split[l={l}]"), 2, pmax);
    let prefix_primes: Vec<u64> = primes.iter().copied().take_while(|&p| p <= prefix).collect();
    let prefix_flags: Vec<bool> = prefix_primes
        .par_iter()
        .map(|&p| full_l_torsion_rational(e, p, l))
        .collect::<Result<_>>()?;
    for (&p, &s) in prefix_primes.iter().zip(&prefix_flags) {
        let listed = candidates.binary_search(&p).is_ok();
        if s && !listed {
            report.violate(p, "split primes are candidates", "split but not a candidate");
        } else {
            report.pass_one();
        }
    }
    for &p in &split {
        if candidates.binary_search(&p).is_err() {
            report.violate(p, "split subset of candidates", "missing");
        }
    }
    report.note("curve", e.to_string());
    report.note("modularity_prefix", prefix);
    report.note("modularity_prefix_passed", use_series);
    if !use_series {
        report.note(
            "warning",
            format!(
                "a_p != c_p on the prefix ({} violations); traces counted directly",
                modularity.violations.len()
            ),
        );
    }
    report.note("candidates", candidates.clone());
    report.note("split", split.clone());
    let scan = TorsionScan {
        candidates,
        split,
        oracle: if use_series { "series" } else { "direct" }.to_string(),
    };
    Ok((scan, report.finish()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn level11() -> (WeierstrassCurve, EtaSpec) {
        (WeierstrassCurve::conductor_11(), EtaSpec::parse("1^2 11^2").unwrap())
    }

    #[test]
    fn nothing_below_113() {
        let (e, eta) = level11();
        let (scan, r) = torsion_split_scan(&e, &eta, 7, 100, 100).unwrap();
        assert!(scan.candidates.is_empty());
        assert!(scan.split.is_empty());
        assert!(r.passed);
    }

    #[test]
    fn first_split_prime() {
        let (e, eta) = level11();
        let (scan, r) = torsion_split_scan(&e, &eta, 7, 5000, 5000).unwrap();
        assert!(r.passed);
        assert_eq!(scan.split, vec![4831]);
        assert_eq!(scan.candidates[0], 113);
        assert_eq!(scan.oracle, "series");
    }

    #[test]
    fn wrong_series_falls_back_to_counting() {
        let e = WeierstrassCurve::conductor_11();
        let wrong = EtaSpec::parse("4^2 8^2").unwrap();
        let (scan, r) = torsion_split_scan(&e, &wrong, 7, 1200, 1200).unwrap();
        assert_eq!(scan.oracle, "direct");
        assert_eq!(scan.candidates[0], 113);
        assert!(r.summary.contains_key("warning"));
    }

    #[test]
    fn argument_checks() {
        let (e, eta) = level11();
        assert!(torsion_split_scan(&e, &eta, 6, 100, 100).is_err());
        assert!(torsion_split_scan(&e, &eta, 7, 5, 5).is_err());
    }
}
