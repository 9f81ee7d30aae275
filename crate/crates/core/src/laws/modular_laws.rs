use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::json;

use super::{binary_theta, primes_up_to, represent_binary, root_count, root_counts, summary_counts};
use super::LawReport;
use crate::ellcurve::{trace_table, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::modarith::{legendre, modpow};
use crate::polyring::IntPoly;
use crate::qseries::{
    check_hecke, check_modularity, check_strong_multiplicativity, eta_product, signed_theta,
    theta_series, Character, EtaSpec, HeckeSpec, ModularitySpec, QSeries, QuadForm,
    SignedThetaRule,
};

/// `tau(p)` for the primes up to 17.
pub const TAU_SMALL_PRIMES: [(u64, i64); 7] = [
    (2, -24),
    (3, 252),
    (5, 4830),
    (7, -16744),
    (11, 534612),
    (13, -577738),
    (17, -6905934),
];

fn coeff(c: &QSeries, n: u64) -> i64 {
    c.coeff_i64(n as usize).expect("coefficient fits in i64")
}

/// `(q - q^2 - q^3 + q^4) / (1 - q^5)`.
pub fn quadratic_gf_series(truncation: usize) -> Result<QSeries> {
    let num = QSeries::from_terms(5, &[(1, 1), (2, -1), (3, -1), (4, 1)]);
    let den = QSeries::from_terms(6, &[(0, 1), (5, -1)]);
    QSeries::expand_rational_gf(&num, &den, truncation)
}

/// `N_p(T^2 - T - 1) = 1 + a_p` for every `p <= pmax`, `a_n` from the
/// rational generating function.
pub fn verify_quadratic_gf(pmax: u64) -> Result<LawReport> {
    let f = IntPoly::new(vec![-1, -1, 1])?;
    let series = quadratic_gf_series(pmax as usize + 1)?;
    let primes = primes_up_to(pmax);
    let counts = root_counts(&f, primes.primes());
    let mut report = LawReport::new("gf-quadratic", 2, pmax);
    for (&p, &n) in primes.primes().iter().zip(&counts) {
        report.check(p, &(1 + coeff(&series, p)), &(n as i64));
    }
    report.note(
        "head",
        series.coeffs().iter().take(10).map(|c| c.to_string()).collect::<Vec<_>>(),
    );
    Ok(report.finish())
}

/// The `T^3 - T - 1` law: `N_p = 1 + a_p` with `a_n` from `eta_{1,23}` at
/// every `p <= pmax`, `a_p = (B_p - C_p)/2` at every `p != 23`, and the
/// quadratic-residue dichotomy with its binary-form refinement.
pub fn verify_cubic23(pmax: u64) -> Result<LawReport> {
    if pmax < 23 {
        return Err(Error::Domain("pmax must be >= 23".into()));
    }
    let t = pmax as usize + 1;
    let f = IntPoly::new(vec![-1, -1, 0, 1])?;
    let eta = eta_product(&EtaSpec::parse("1 23")?, t)?;
    let bc = binary_theta(1, 1, 6, t)?.halved_difference(&binary_theta(2, 1, 3, t)?, 2)?;
    let primes = primes_up_to(pmax);
    let counts = root_counts(&f, primes.primes());

    let mut report = LawReport::new("cubic23", 2, pmax);
    let mut by_ap: BTreeMap<i64, u64> = BTreeMap::new();
    let mut good = 0u64;
    for (&p, &n) in primes.primes().iter().zip(&counts) {
        let n = n as i64;
        let a = coeff(&eta, p);
        report.check(p, &(1 + a), &n);
        if p == 23 {
            report.note("n_23", n);
            report.note("a_23", a);
            continue;
        }
        report.check(p, &a, &coeff(&bc, p));
        good += 1;
        *by_ap.entry(a).or_default() += 1;
        let square = legendre(p as i64, 23)?.value() == 1;
        let principal = represent_binary((1, 1, 6), p).is_some();
        let other = represent_binary((2, 1, 3), p).is_some();
        if !square {
            report.check(p, &1, &n);
            report.check(p, &false, &(principal || other));
        } else {
            let expected = match (principal, other) {
                (true, false) => 3,
                (false, true) => 0,
                _ => {
                    report.violate(p, "exactly one of the two forms", format!("{principal}, {other}"));
                    continue;
                }
            };
            report.check(p, &expected, &n);
        }
    }
    let first_split = primes
        .primes()
        .iter()
        .zip(&counts)
        .find(|(_, &n)| n == 3)
        .map(|(&p, _)| p);
    if let Some(p) = first_split {
        report.note("first_split", p);
        if let Some((x, y)) = represent_binary((1, 1, 6), p) {
            report.note("first_split_representation", vec![x, y]);
        }
    }
    report.note("a_p_counts", summary_counts(&by_ap));
    let share = |k: i64| by_ap.get(&k).copied().unwrap_or(0) as f64 / good.max(1) as f64;
    report.note(
        "proportions",
        json!({ "-1": share(-1), "0": share(0), "2": share(2) }),
    );
    Ok(report.finish())
}

/// Weight-one law for a cubic `f`: `N_p(f) = 1 + b_p` with `b_n` from
/// `(theta(x^2+xy+8y^2) - theta(2x^2+xy+4y^2)) / 2` at every prime where
/// `f` is squarefree. The excluded primes are found by the ramification check.
pub fn verify_weight1_form(f: &IntPoly, pmax: u64) -> Result<LawReport> {
    if pmax < 31 {
        return Err(Error::Domain("pmax must be >= 31".into()));
    }
    let t = pmax as usize + 1;
    let b = binary_theta(1, 1, 8, t)?.halved_difference(&binary_theta(2, 1, 4, t)?, 2)?;
    let primes = primes_up_to(pmax);
    let bad = f.ramified_among(primes.primes());
    let good: Vec<u64> = primes.iter().filter(|p| !bad.contains(p)).collect();
    let counts = root_counts(f, &good);
    let mut report = LawReport::new("weight1", 2, pmax);
    for (&p, &n) in good.iter().zip(&counts) {
        report.check(p, &(1 + coeff(&b, p)), &(n as i64));
    }
    report.note("polynomial", f.to_string());
    report.note("detected_bad_primes", bad.clone());
    report.note(
        "bad_prime_values",
        bad.iter()
            .map(|&p| json!({ "p": p, "n_p": root_count(f, p), "b_p": coeff(&b, p) }))
            .collect::<Vec<_>>(),
    );
    Ok(report.finish())
}

/// `a_p = c_p` at every good `p <= pmax`, counting points directly and
/// reading `c_p` from the eta product.
pub fn verify_elliptic_modularity(
    e: &WeierstrassCurve,
    spec: &EtaSpec,
    pmax: u64,
) -> Result<LawReport> {
    let series = eta_product(spec, pmax as usize + 1)?;
    let mut report = verify_elliptic_modularity_with(e, &series, pmax)?;
    report.note("eta", spec.to_string());
    Ok(report)
}

/// As [`verify_elliptic_modularity`] with a precomputed series.
pub fn verify_elliptic_modularity_with(
    e: &WeierstrassCurve,
    series: &QSeries,
    pmax: u64,
) -> Result<LawReport> {
    if pmax < 2 {
        return Err(Error::Domain("pmax must be >= 2".into()));
    }
    if series.truncation() <= pmax as usize {
        return Err(Error::Config(format!(
            "series truncation {} does not reach p = {pmax}",
            series.truncation()
        )));
    }
    let primes = primes_up_to(pmax);
    let mut report = LawReport::new(format!("modularity[{e}]"), 2, pmax);
    let mut bad_rows = Vec::new();
    for rec in trace_table(e, &primes, false) {
        let c = coeff(series, rec.p);
        if rec.bad {
            bad_rows.push(json!({ "p": rec.p, "a_p": rec.a_p, "c_p": c }));
        } else {
            report.check(rec.p, &c, &rec.a_p);
        }
    }
    report.note("curve", e.to_string());
    report.note("bad_primes", bad_rows);
    Ok(report.finish())
}

/// Level 11 via quaternary theta series: `a_p = (B_p - C_p)/4` at good
/// `p <= pmax`, and `(B_p - C_p)/4 = c_p` at every `p <= pmax`.
pub fn verify_theta_difference_level11(pmax: u64) -> Result<LawReport> {
    let t = pmax as usize + 1;
    let b = theta_series(&QuadForm::level11_b(), t)?;
    let c = theta_series(&QuadForm::level11_c(), t)?;
    let eta = eta_product(&EtaSpec::parse("1^2 11^2")?, t)?;
    verify_theta_difference_level11_with(&b, &c, &eta, pmax)
}

/// As [`verify_theta_difference_level11`] with precomputed `B`, `C` and
/// `eta_{1^2,11^2}` series.
pub fn verify_theta_difference_level11_with(
    b: &QSeries,
    c: &QSeries,
    eta: &QSeries,
    pmax: u64,
) -> Result<LawReport> {
    let t = pmax as usize + 1;
    if [b, c, eta].iter().any(|s| s.truncation() < t) {
        return Err(Error::Config(format!("series must reach index {pmax}")));
    }
    let (b, c, eta) = (&b.truncate(t), &c.truncate(t), &eta.truncate(t));
    let quarter = b.halved_difference(c, 4)?;
    let e = WeierstrassCurve::conductor_11();
    let primes = primes_up_to(pmax);
    let mut report = LawReport::new("theta11", 2, pmax);
    for rec in trace_table(&e, &primes, false) {
        let q = coeff(&quarter, rec.p);
        report.check(rec.p, &coeff(eta, rec.p), &q);
        if !rec.bad {
            report.check(rec.p, &q, &rec.a_p);
        }
    }
    report.note("b_head", b.coeffs().iter().take(18).map(|x| x.to_string()).collect::<Vec<_>>());
    report.note("c_head", c.coeffs().iter().take(18).map(|x| x.to_string()).collect::<Vec<_>>());
    Ok(report.finish())
}

/// `tau(p) = 1 + p^11 (mod 691)` for `p <= pmax`, plus the small-prime table.
pub fn verify_ramanujan(pmax: u64) -> Result<LawReport> {
    if pmax < 2 {
        return Err(Error::Domain("pmax must be >= 2".into()));
    }
    let delta = eta_product(&EtaSpec::parse("1^24")?, pmax as usize + 1)?;
    let modulus = BigInt::from(691);
    let primes = primes_up_to(pmax);
    let mut report = LawReport::new("ramanujan", 2, pmax);
    for p in primes.iter() {
        let tau = delta.coeff(p as usize);
        let lhs = ((tau % &modulus + &modulus) % &modulus).to_u64().expect("residue");
        let rhs = (1 + modpow(p, 11, 691)) % 691;
        report.check(p, &rhs, &lhs);
    }
    for &(p, tau) in TAU_SMALL_PRIMES.iter().filter(|(p, _)| *p <= pmax) {
        report.check(p, &BigInt::from(tau), delta.coeff(p as usize));
    }
    report.note("modulus", 691u64);
    Ok(report.finish())
}

/// The Hecke relations for the eta products of levels 11, 32, 36 and for
/// `Delta`, and strong multiplicativity of the `T^2 - T - 1` series.
pub fn verify_hecke_suite(truncation: usize) -> Result<LawReport> {
    let cases: [(&str, u32, u64); 4] = [
        ("1^2 11^2", 2, 11),
        ("4^2 8^2", 2, 32),
        ("6^4", 2, 36),
        ("1^24", 12, 1),
    ];
    let mut report = LawReport::new("hecke", 1, truncation.saturating_sub(1) as u64);
    let parts: Vec<Result<LawReport>> = cases
        .par_iter()
        .map(|&(spec, w, level)| {
            let series = eta_product(&EtaSpec::parse(spec)?, truncation)?;
            let mut r = check_hecke(&series, &HeckeSpec::new(w, level))?;
            r.law_id = format!("eta[{spec}]");
            Ok(r)
        })
        .collect();
    for part in parts {
        report.absorb(part?);
    }
    let mut gf = check_strong_multiplicativity(&quadratic_gf_series(truncation)?)?;
    gf.law_id = "gf[T^2 - T - 1]".into();
    report.absorb(gf);
    Ok(report.finish())
}

/// `q prod (1 - q^{12k})^2` against its signed theta expression, to `truncation`.
pub fn verify_eta12_signed_theta(truncation: usize) -> Result<LawReport> {
    verify_signed_theta(&SignedThetaRule::eta_12_squared(), truncation)
}

pub(crate) fn verify_signed_theta(rule: &SignedThetaRule, truncation: usize) -> Result<LawReport> {
    let eta = eta_product(&EtaSpec::parse("12^2")?, truncation)?;
    let theta = signed_theta(rule, truncation)?;
    let mut report = LawReport::new("eta12", 0, truncation.saturating_sub(1) as u64);
    for n in 0..truncation {
        report.check(n as u64, eta.coeff(n), theta.coeff(n));
    }
    Ok(report.finish())
}

/// Functional equations of `eta_{1,23}` (weight 1, character `(./23)`) and
/// `eta_{1^2,11^2}` (weight 2) at the default test points, doubling the
/// truncation until the tail bound is met.
pub fn verify_functional_equations(tolerance: f64) -> Result<LawReport> {
    let cases = [
        (
            "1 23",
            ModularitySpec::new(23, 1).with_character(Character::legendre(23)?),
        ),
        ("1^2 11^2", ModularitySpec::new(11, 2)),
    ];
    let mut report = LawReport::new("modular-symmetry", 11, 23);
    for (spec_text, mut spec) in cases {
        spec.tolerance = tolerance;
        let eta = EtaSpec::parse(spec_text)?;
        let mut t = 64usize;
        let mut part = loop {
            let series = eta_product(&eta, t)?;
            match check_modularity(&series, &spec) {
                Err(Error::Precision(_)) if t < 1 << 16 => t *= 2,
                other => break other?,
            }
        };
        part.law_id = format!("eta[{spec_text}]");
        report.absorb(part);
    }
    Ok(report.finish())
}

/// `a_p` for every prime up to `pmax` by direct counting, as `(p, a_p)`.
pub(crate) fn direct_traces(e: &WeierstrassCurve, pmax: u64) -> Vec<(u64, i64)> {
    trace_table(e, &primes_up_to(pmax), false)
        .into_iter()
        .map(|r| (r.p, r.a_p))
        .collect()
}
