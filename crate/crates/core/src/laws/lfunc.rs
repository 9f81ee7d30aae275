use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::modular_laws::direct_traces;
use super::{primes_up_to, LawReport};
use crate::ellcurve::WeierstrassCurve;
use crate::error::{Error, Result};
use crate::modarith::{legendre, qstar_symbol};
use crate::qseries::QSeries;

/// Euler factor at one prime, as a polynomial in `u = p^{-s}` whose inverse
/// is expanded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocalFactor {
    /// `1 - a u`.
    Linear(i64),
    /// `1 - trace u + norm u^2`.
    Quadratic { trace: i64, norm: i64 },
}

impl LocalFactor {
    /// Coefficients of `u^0 .. u^k_max` in `1 / factor`.
    fn inverse_series(&self, k_max: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::from(1)];
        for k in 1..=k_max {
            let next = match *self {
                LocalFactor::Linear(a) => &out[k - 1] * a,
                LocalFactor::Quadratic { trace, norm } => {
                    let two_back = if k >= 2 { &out[k - 2] * norm } else { BigInt::from(0) };
                    &out[k - 1] * trace - two_back
                }
            };
            out.push(next);
        }
        out
    }
}

/// `prod_p (1 - (q*/p) p^{-s})^{-1}` for primes up to `x`.
pub fn artin_quadratic(q: u64, x: u64) -> Result<Vec<(u64, LocalFactor)>> {
    primes_up_to(x)
        .iter()
        .map(|p| Ok((p, LocalFactor::Linear(qstar_symbol(q, p)?.value()))))
        .collect()
}

/// Local factors of an elliptic curve from point counts: `1 - a_p u + p u^2`
/// at good primes, `1 - a_p u` at bad ones.
pub fn artin_elliptic(e: &WeierstrassCurve, x: u64) -> Vec<(u64, LocalFactor)> {
    direct_traces(e, x)
        .into_iter()
        .map(|(p, a)| {
            let factor = if e.is_bad(p) {
                LocalFactor::Linear(a)
            } else {
                LocalFactor::Quadratic {
                    trace: a,
                    norm: p as i64,
                }
            };
            (p, factor)
        })
        .collect()
}

/// `sum_n (n/q) q^n`, the Dirichlet series of the Legendre character.
pub fn legendre_character_series(q: u64, truncation: usize) -> Result<QSeries> {
    let mut c = vec![0i64; truncation];
    for (n, slot) in c.iter_mut().enumerate().skip(1) {
        *slot = legendre(n as i64, q)?.value();
    }
    QSeries::from_i64(&c)
}

/// Expand the Euler product into Dirichlet coefficients `b_1 .. b_x` and
/// compare with `hecke` at every `n <= x` with no prime factor in `excluded`.
pub fn compare_l_coefficients(
    artin: &[(u64, LocalFactor)],
    hecke: &QSeries,
    x: usize,
    excluded: &BTreeSet<u64>,
) -> Result<LawReport> {
    if x == 0 {
        return Err(Error::Domain("X must be >= 1".into()));
    }
    if hecke.truncation() <= x {
        return Err(Error::Config(format!(
            "series truncation {} does not reach n = {x}",
            hecke.truncation()
        )));
    }
    let factors: BTreeMap<u64, LocalFactor> = artin.iter().copied().collect();
    let mut report = LawReport::new("L-compare", 1, x as u64);
    // b[n] assembled from the smallest prime power dividing n
    let mut b: Vec<Option<BigInt>> = vec![None; x + 1];
    b[1] = Some(BigInt::from(1));
    let mut spf = vec![0u64; x + 1];
    for i in 2..=x {
        if spf[i] == 0 {
            for j in (i..=x).step_by(i) {
                if spf[j] == 0 {
                    spf[j] = i as u64;
                }
            }
        }
    }
    let mut local_cache: BTreeMap<u64, Vec<BigInt>> = BTreeMap::new();
    let mut missing = BTreeSet::new();
    for n in 2..=x {
        let p = spf[n];
        let (mut m, mut k) = (n, 0usize);
        while m % p as usize == 0 {
            m /= p as usize;
            k += 1;
        }
        let Some(factor) = factors.get(&p) else {
            missing.insert(p);
            continue;
        };
        let local = local_cache.entry(p).or_insert_with(|| {
            let mut kmax = 0;
            let mut pk = 1usize;
            while pk.saturating_mul(p as usize) <= x {
                pk *= p as usize;
                kmax += 1;
            }
            factor.inverse_series(kmax)
        });
        b[n] = b[m].as_ref().map(|bm| bm * &local[k]);
    }
    let mut compared = 0u64;
    for n in 1..=x {
        let mut m = n;
        let mut skip = false;
        while m > 1 {
            let p = spf[m];
            if excluded.contains(&p) {
                skip = true;
                break;
            }
            m /= p as usize;
        }
        if skip {
            continue;
        }
        match &b[n] {
            Some(v) => {
                report.check(n as u64, hecke.coeff(n), v);
                compared += 1;
            }
            None => report.violate(n as u64, hecke.coeff(n), "no local factor"),
        }
    }
    report.note("compared", compared);
    report.note("excluded", excluded.iter().copied().collect::<Vec<_>>());
    if !missing.is_empty() {
        report.note("primes_without_factor", missing.into_iter().collect::<Vec<_>>());
    }
    Ok(report.finish())
}
