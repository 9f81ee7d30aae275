//! Each reciprocity law as a runnable check producing a [`LawReport`].
//!
//! Both sides of every law are computed independently: root counts come from
//! `gcd(T^p - T, f)`, point counts from character sums, and the other side
//! from congruences, binary-form representations or `q`-expansions.

mod lfunc;
mod modular_laws;
mod report;
mod stats;
mod torsion;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::modarith::{self, legendre, modpow, qstar, qstar_symbol, sieve_primes, PrimeTable};
use crate::polyring::{count_distinct_roots, cyclotomic, euler_phi, IntPoly};
use crate::qseries::{QSeries, QuadForm};

pub use lfunc::{
    artin_elliptic, artin_quadratic, compare_l_coefficients, legendre_character_series, LocalFactor,
};
pub use modular_laws::{
    verify_cubic23, verify_elliptic_modularity, verify_elliptic_modularity_with,
    verify_eta12_signed_theta, verify_functional_equations, verify_hecke_suite,
    quadratic_gf_series, verify_quadratic_gf, verify_ramanujan, verify_theta_difference_level11,
    verify_theta_difference_level11_with, verify_weight1_form,
    TAU_SMALL_PRIMES,
};
pub use report::{LawReport, Violation};
pub use stats::{
    chebotarev_proportions, sato_tate_histogram, semicircle_cdf, Histogram, SatoTateSource,
    SatoTateSpec,
};
pub use torsion::{torsion_split_scan, torsion_split_scan_with, TorsionScan};

/// `N_p(f)` for an integer polynomial.
pub fn root_count(f: &IntPoly, p: u64) -> usize {
    count_distinct_roots(&f.reduce_mod_p(p))
        .expect("monic polynomial has positive degree")
        .distinct_roots
}

fn primes_up_to(pmax: u64) -> PrimeTable {
    sieve_primes(pmax).unwrap_or_else(|_| PrimeTable::empty())
}

/// Root counts for every prime of `primes`, in order.
fn root_counts(f: &IntPoly, primes: &[u64]) -> Vec<usize> {
    primes.par_iter().map(|&p| root_count(f, p)).collect()
}

/// Representations `n = a x^2 + b xy + c y^2`, searched over `|y| <= sqrt(n / c')`.
pub fn represent_binary(form: (i64, i64, i64), n: u64) -> Option<(i64, i64)> {
    let (a, b, c) = form;
    let n = n as i64;
    // a x^2 + bxy + c y^2 >= (4ac - b^2) y^2 / (4a)
    let disc = 4 * a * c - b * b;
    let ymax = ((4 * a * n) as f64 / disc as f64).sqrt() as i64 + 1;
    for y in 0..=ymax {
        // solve a x^2 + b y x + (c y^2 - n) = 0
        let d = b * b * y * y - 4 * a * (c * y * y - n);
        if d < 0 {
            continue;
        }
        let r = (d as f64).sqrt() as i64;
        for s in [r - 1, r, r + 1] {
            if s >= 0 && s * s == d {
                for num in [-b * y + s, -b * y - s] {
                    if num % (2 * a) == 0 {
                        let x = num / (2 * a);
                        if a * x * x + b * x * y + c * y * y == n {
                            return Some((x, y));
                        }
                    }
                }
            }
        }
    }
    None
}

/// Quadratic reciprocity for all odd prime pairs up to `pmax`, with the
/// symbols computed by Euler's criterion, plus `(q*/p) = (p/q)` for odd
/// `q <= 50`.
pub fn verify_quadratic_reciprocity(pmax: u64) -> Result<LawReport> {
    if pmax < 5 {
        return Err(Error::Domain("pmax must be >= 5".into()));
    }
    let primes = primes_up_to(pmax);
    let odd: Vec<u64> = primes.iter().filter(|&p| p != 2).collect();
    let mut report = LawReport::new("qr", 3, pmax);
    let mut pairs = 0u64;
    for (i, &p) in odd.iter().enumerate() {
        for &q in &odd[i + 1..] {
            let lhs = legendre(p as i64, q)?.value() * legendre(q as i64, p)?.value();
            let rhs = if ((p - 1) / 2 * ((q - 1) / 2)) % 2 == 0 { 1 } else { -1 };
            report.check(p * 1_000_000 + q, &rhs, &lhs);
            pairs += 1;
        }
    }
    let mut symbol_checks = 0u64;
    for &q in odd.iter().filter(|&&q| q <= 50) {
        for &p in odd.iter().filter(|&&p| p != q) {
            let artin = qstar_symbol(q, p)?.value();
            let hecke = legendre(p as i64, q)?.value();
            report.check(p, &hecke, &artin);
            symbol_checks += 1;
        }
    }
    report.note("pairs", pairs);
    report.note("qstar_symbol_checks", symbol_checks);
    Ok(report.finish())
}

/// Residues `r mod d` (coprime to `d`) whose primes all split completely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitResidues {
    pub split: BTreeSet<u64>,
    pub inert: BTreeSet<u64>,
    pub mixed: BTreeSet<u64>,
    pub undetermined: BTreeSet<u64>,
}

/// Classify primes `p <= pmax` coprime to `d` by `p mod d`. A class mixing
/// split and non-split primes would falsify a congruence law modulo `d`.
pub fn discover_split_residues(
    f: &IntPoly,
    d: u64,
    pmax: u64,
) -> Result<(SplitResidues, LawReport)> {
    if d < 2 {
        return Err(Error::Domain("modulus must be >= 2".into()));
    }
    let primes: Vec<u64> = primes_up_to(pmax)
        .iter()
        .filter(|&p| num_integer::gcd(p, d) == 1)
        .collect();
    let counts = root_counts(f, &primes);
    let deg = f.degree();
    let mut classes: BTreeMap<u64, (u64, u64)> = (1..d)
        .filter(|&r| num_integer::gcd(r, d) == 1)
        .map(|r| (r, (0, 0)))
        .collect();
    for (&p, &n) in primes.iter().zip(&counts) {
        let e = classes.get_mut(&(p % d)).expect("coprime residue");
        if n == deg {
            e.0 += 1;
        } else {
            e.1 += 1;
        }
    }
    let mut out = SplitResidues {
        split: BTreeSet::new(),
        inert: BTreeSet::new(),
        mixed: BTreeSet::new(),
        undetermined: BTreeSet::new(),
    };
    let mut report = LawReport::new(format!("split-residues[{f} mod {d}]"), 2, pmax);
    for (&r, &(s, n)) in &classes {
        match (s, n) {
            (0, 0) => {
                out.undetermined.insert(r);
            }
            (_, 0) => {
                out.split.insert(r);
                report.pass_one();
            }
            (0, _) => {
                out.inert.insert(r);
                report.pass_one();
            }
            _ => {
                out.mixed.insert(r);
                report.violate(r, "uniform class", format!("{s} split, {n} not split"));
            }
        }
    }
    report.note("modulus", d);
    report.note("primes_sampled", primes.len() as u64);
    report.note("split_residues", out.split.iter().copied().collect::<Vec<_>>());
    report.note("mixed_residues", out.mixed.iter().copied().collect::<Vec<_>>());
    if !out.undetermined.is_empty() {
        report.note(
            "warning_undetermined_residues",
            out.undetermined.iter().copied().collect::<Vec<_>>(),
        );
    }
    report.note(
        "split_set_closed_under_multiplication",
        is_multiplicatively_closed(&out.split, d),
    );
    Ok((out, report.finish()))
}

/// Whether `set` is closed under multiplication modulo `d`.
pub fn is_multiplicatively_closed(set: &BTreeSet<u64>, d: u64) -> bool {
    set.iter()
        .all(|&a| set.iter().all(|&b| set.contains(&(a * b % d))))
}

/// `N_p(Phi_m) = phi(m)` exactly when `p = 1 mod m`, for primes `p <= pmax`
/// not dividing `m`.
pub fn verify_cyclotomic_split(m: u64, pmax: u64) -> Result<LawReport> {
    if m < 2 {
        return Err(Error::Domain("m must be >= 2".into()));
    }
    let phi = cyclotomic(m)?;
    let deg = euler_phi(m) as usize;
    let primes: Vec<u64> = primes_up_to(pmax).iter().filter(|&p| m % p != 0).collect();
    let counts = root_counts(&phi, &primes);
    let mut report = LawReport::new(format!("cyclotomic[{m}]"), 2, pmax);
    let mut split = 0u64;
    for (&p, &n) in primes.iter().zip(&counts) {
        let law = p % m == 1;
        if law {
            split += 1;
        }
        report.check(p, &law, &(n == deg));
    }
    report.note("phi_m", deg as u64);
    report.note("split_primes", split);
    Ok(report.finish())
}

/// `N_p(T^3 - 2) = 3` exactly when `p = x^2 + 27 y^2`, for `p <= pmax`, `p != 2, 3`.
pub fn verify_gauss_cubic2(pmax: u64) -> Result<LawReport> {
    if pmax < 31 {
        return Err(Error::Domain("pmax must be >= 31".into()));
    }
    let f = IntPoly::new(vec![-2, 0, 0, 1])?;
    let primes: Vec<u64> = primes_up_to(pmax).iter().filter(|&p| p > 3).collect();
    let counts = root_counts(&f, &primes);
    let mut report = LawReport::new("gauss2", 5, pmax);
    let mut split = Vec::new();
    for (&p, &n) in primes.iter().zip(&counts) {
        let representable = represent_binary((1, 0, 27), p).is_some();
        if n == 3 {
            split.push(p);
        }
        report.check(p, &representable, &(n == 3));
    }
    report.note("split_count", split.len() as u64);
    report.note("first_split", split.iter().take(10).copied().collect::<Vec<_>>());
    Ok(report.finish())
}

/// `#{x in F_p^* : x^l = 1} = l` exactly when `p = 1 mod l`, with the kernel
/// counted by brute force.
pub fn mu_split_law(l: u64, pmax: u64) -> Result<LawReport> {
    if !modarith::is_prime(l) {
        return Err(Error::Domain(format!("{l} is not prime")));
    }
    let primes: Vec<u64> = primes_up_to(pmax).iter().filter(|&p| p != l).collect();
    let sizes: Vec<u64> = primes
        .par_iter()
        .map(|&p| (1..p).filter(|&x| modpow(x, l, p) == 1).count() as u64)
        .collect();
    let mut report = LawReport::new(format!("mu-split[{l}]"), 2, pmax);
    let mut split = 0u64;
    for (&p, &size) in primes.iter().zip(&sizes) {
        let expected = if p % l == 1 { l } else { 1 };
        if size == l {
            split += 1;
        }
        report.check(p, &expected, &size);
    }
    report.note("split_primes", split);
    Ok(report.finish())
}

/// Symbols `(q*/p)` for `p <= pmax`, used by the quadratic L-function comparison.
pub fn qstar_table(q: u64, pmax: u64) -> Result<Vec<(u64, i64)>> {
    qstar(q)?;
    primes_up_to(pmax)
        .iter()
        .map(|p| Ok((p, qstar_symbol(q, p)?.value())))
        .collect()
}

/// Theta series of `a x^2 + b xy + c y^2`.
pub(crate) fn binary_theta(a: i64, b: i64, c: i64, truncation: usize) -> Result<QSeries> {
    crate::qseries::theta_series(&QuadForm::binary(a, b, c)?, truncation)
}

pub(crate) fn summary_counts(counts: &BTreeMap<i64, u64>) -> serde_json::Value {
    json!(counts
        .iter()
        .map(|(k, v)| (k.to_string(), json!(v)))
        .collect::<serde_json::Map<_, _>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reciprocity_small_range() {
        let r = verify_quadratic_reciprocity(100).unwrap();
        assert!(r.passed);
        assert_eq!(r.summary["pairs"], 276); // C(24, 2) odd prime pairs
        assert!(verify_quadratic_reciprocity(3).is_err());
    }

    #[test]
    fn split_residue_examples() {
        let (s, r) = discover_split_residues(&IntPoly::parse("T^2 + 1").unwrap(), 4, 10_000).unwrap();
        assert!(r.passed);
        assert_eq!(s.split.into_iter().collect::<Vec<_>>(), vec![1]);
        let (s, _) =
            discover_split_residues(&IntPoly::parse("T^2 - T - 1").unwrap(), 5, 10_000).unwrap();
        assert_eq!(s.split.into_iter().collect::<Vec<_>>(), vec![1, 4]);
        // a modulus too small for the law shows mixed classes
        let (s, r) = discover_split_residues(&IntPoly::parse("T^2 - 11").unwrap(), 4, 2000).unwrap();
        assert!(!r.passed);
        assert!(!s.mixed.is_empty());
        // tiny range leaves classes undetermined
        let (s, r) = discover_split_residues(&IntPoly::parse("T^2 + 1").unwrap(), 100, 50).unwrap();
        assert!(!s.undetermined.is_empty());
        assert!(r.summary.contains_key("warning_undetermined_residues"));
    }

    #[test]
    fn closure_check() {
        let set: BTreeSet<u64> = [1, 5, 7, 9, 19, 25, 35, 37, 39, 43].into_iter().collect();
        assert!(is_multiplicatively_closed(&set, 44));
        let set: BTreeSet<u64> = [1, 3].into_iter().collect();
        assert!(!is_multiplicatively_closed(&set, 44));
    }

    #[test]
    fn cyclotomic_examples() {
        assert!(verify_cyclotomic_split(5, 10_000).unwrap().passed);
        assert!(verify_cyclotomic_split(4, 10_000).unwrap().passed);
        assert!(verify_cyclotomic_split(12, 1000).unwrap().passed);
        assert!(verify_cyclotomic_split(1, 100).is_err());
    }

    #[test]
    fn gauss_examples() {
        assert_eq!(represent_binary((1, 0, 27), 31), Some((2, 1)));
        assert_eq!(represent_binary((1, 0, 27), 7), None);
        assert_eq!(represent_binary((1, 0, 27), 5), None);
        assert_eq!(root_count(&IntPoly::parse("T^3 - 2").unwrap(), 31), 3);
        assert_eq!(root_count(&IntPoly::parse("T^3 - 2").unwrap(), 5), 1);
        assert!(verify_gauss_cubic2(2000).unwrap().passed);
        assert!(verify_gauss_cubic2(30).is_err());
    }

    #[test]
    fn binary_representations() {
        assert_eq!(represent_binary((1, 1, 6), 59), Some((5, 2)));
        assert_eq!(represent_binary((2, 1, 3), 59), None);
        assert!(represent_binary((1, 1, 6), 2).is_none());
        for n in 1..400u64 {
            let brute = (-30i64..=30)
                .flat_map(|x| (-30i64..=30).map(move |y| (x, y)))
                .any(|(x, y)| x * x + x * y + 6 * y * y == n as i64);
            assert_eq!(represent_binary((1, 1, 6), n).is_some(), brute, "n = {n}");
        }
    }

    #[test]
    fn mu_split_examples() {
        let r = mu_split_law(7, 2000).unwrap();
        assert!(r.passed);
        let size = |p: u64, l: u64| (1..p).filter(|&x| modpow(x, l, p) == 1).count();
        assert_eq!(size(29, 7), 7);
        assert_eq!(size(13, 7), 1);
        assert!(mu_split_law(2, 1000).unwrap().passed);
        assert!(mu_split_law(4, 100).is_err());
    }

    #[test]
    fn qstar_table_matches_supplement() {
        let t = qstar_table(5, 20).unwrap();
        assert_eq!(t[0], (2, -1));
        assert_eq!(t[2], (5, 0));
        assert_eq!(t[4], (11, 1));
    }
}
