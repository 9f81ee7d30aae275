use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::QSeries;
use crate::error::{Error, Result};

/// Eta-product exponents: `q * prod_i prod_{k>=1} (1 - q^{N_i k})^{e_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EtaSpec {
    factors: Vec<(u64, u32)>,
}

impl EtaSpec {
    /// Levels must be distinct and positive; exponents positive. Factors are
    /// stored in ascending level order.
    pub fn new(mut factors: Vec<(u64, u32)>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Domain("eta spec needs at least one factor".into()));
        }
        if factors.iter().any(|&(n, e)| n == 0 || e == 0) {
            return Err(Error::Domain("levels and exponents must be positive".into()));
        }
        factors.sort_unstable();
        if factors.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Domain("eta levels must be distinct".into()));
        }
        Ok(EtaSpec { factors })
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Parse `1^2 11^2`; a bare level means exponent 1.
    pub fn parse(text: &str) -> Result<Self> {
        let mut factors = Vec::new();
        let mut offset = 0usize;
        for token in text.split_whitespace() {
            let pos = text[offset..].find(token).unwrap() + offset;
            offset = pos + token.len();
            let bad = |msg: &str| Error::Parse {
                pos,
                msg: format!("{msg} in `{token}`"),
            };
            let (level, exp) = match token.split_once('^') {
                Some((l, e)) => (l, e),
                None => (token, "1"),
            };
            let level: u64 = level.parse().map_err(|_| bad("bad level"))?;
            let exp: u32 = exp.parse().map_err(|_| bad("bad exponent"))?;
            factors.push((level, exp));
        }
        if factors.is_empty() {
            return Err(Error::Parse {
                pos: 0,
                msg: "empty eta spec".into(),
            });
        }
        EtaSpec::new(factors).map_err(|e| Error::Parse {
            pos: 0,
            msg: e.to_string(),
        })
    }
}

impl fmt::Display for EtaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(n, e)| format!("{n}^{e}"))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Exponents `j(3j-1)/2` with signs `(-1)^j` of Euler's pentagonal series,
/// below `limit`, in ascending order.
fn pentagonal_terms(limit: usize) -> Vec<(usize, i8)> {
    let mut out = vec![(0usize, 1i8)];
    let mut j = 1usize;
    loop {
        let a = j * (3 * j - 1) / 2;
        if a >= limit {
            break;
        }
        let sign = if j % 2 == 0 { 1 } else { -1 };
        out.push((a, sign));
        let b = j * (3 * j + 1) / 2;
        if b < limit {
            out.push((b, sign));
        }
        j += 1;
    }
    out
}

trait Coeff: Clone {
    fn zero_value() -> Self;
    fn one_value() -> Self;
    fn add_signed(&self, other: &Self, sign: i8) -> Option<Self>;
}

impl Coeff for i128 {
    fn zero_value() -> Self {
        0
    }
    fn one_value() -> Self {
        1
    }
    fn add_signed(&self, other: &Self, sign: i8) -> Option<Self> {
        if sign > 0 {
            self.checked_add(*other)
        } else {
            self.checked_sub(*other)
        }
    }
}

impl Coeff for BigInt {
    fn zero_value() -> Self {
        Zero::zero()
    }
    fn one_value() -> Self {
        One::one()
    }
    fn add_signed(&self, other: &Self, sign: i8) -> Option<Self> {
        Some(if sign > 0 { self + other } else { self - other })
    }
}

/// `prod_i prod_k (1 - q^{N_i k})^{e_i}` to `len` terms, each factor applied
/// as one sparse multiplication by the pentagonal series in `q^{N_i}`.
fn pentagonal_product<C: Coeff>(spec: &EtaSpec, len: usize) -> Option<Vec<C>> {
    let mut c = vec![C::zero_value(); len];
    c[0] = C::one_value();
    for &(level, exp) in &spec.factors {
        let level = level as usize;
        let terms: Vec<(usize, i8)> = pentagonal_terms(len.div_ceil(level))
            .into_iter()
            .map(|(a, s)| (a * level, s))
            .filter(|&(a, _)| a < len)
            .collect();
        for _ in 0..exp {
            for n in (0..len).rev() {
                let mut acc = c[n].clone();
                for &(shift, sign) in terms.iter().skip(1) {
                    if shift > n {
                        break;
                    }
                    acc = acc.add_signed(&c[n - shift], sign)?;
                }
                c[n] = acc;
            }
        }
    }
    Some(c)
}

fn shift_by_q(prod: Vec<BigInt>, truncation: usize) -> QSeries {
    let mut coeffs = Vec::with_capacity(truncation);
    coeffs.push(BigInt::zero());
    coeffs.extend(prod.into_iter().take(truncation - 1));
    QSeries { coeffs }
}

/// `q * prod_i prod_{k>=1} (1 - q^{N_i k})^{e_i}` truncated at `truncation`.
///
/// Uses Euler's pentagonal series for each `prod_k (1 - q^{Nk})`, in checked
/// 128-bit arithmetic with an arbitrary-precision retry on overflow.
pub fn eta_product(spec: &EtaSpec, truncation: usize) -> Result<QSeries> {
    if truncation < 2 {
        return Err(Error::Domain("eta product truncation must be >= 2".into()));
    }
    let len = truncation - 1;
    let prod: Vec<BigInt> = match pentagonal_product::<i128>(spec, len) {
        Some(c) => c.into_iter().map(BigInt::from).collect(),
        None => pentagonal_product::<BigInt>(spec, len).expect("bigint arithmetic cannot overflow"),
    };
    Ok(shift_by_q(prod, truncation))
}

/// Reference construction: multiply by each `(1 - q^{Nk})` in turn.
pub fn eta_product_naive(spec: &EtaSpec, truncation: usize) -> Result<QSeries> {
    if truncation < 2 {
        return Err(Error::Domain("eta product truncation must be >= 2".into()));
    }
    let len = truncation - 1;
    let mut c = vec![BigInt::zero(); len];
    c[0] = BigInt::one();
    for &(level, exp) in &spec.factors {
        let level = level as usize;
        let mut shift = level;
        while shift < len {
            for _ in 0..exp {
                for n in (shift..len).rev() {
                    let prev = c[n - shift].clone();
                    c[n] -= prev;
                }
            }
            shift += level;
        }
    }
    Ok(shift_by_q(c, truncation))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eta(s: &str, t: usize) -> QSeries {
        eta_product(&EtaSpec::parse(s).unwrap(), t).unwrap()
    }

    fn coeffs(s: &QSeries) -> Vec<i64> {
        (0..s.truncation()).map(|n| s.coeff_i64(n).unwrap()).collect()
    }

    #[test]
    fn spec_parsing() {
        let s = EtaSpec::parse("11^2 1^2").unwrap();
        assert_eq!(s.factors(), &[(1, 2), (11, 2)]);
        assert_eq!(s.to_string(), "1^2 11^2");
        assert_eq!(EtaSpec::parse("1 23").unwrap().factors(), &[(1, 1), (23, 1)]);
        assert!(matches!(EtaSpec::parse(""), Err(Error::Parse { .. })));
        assert!(matches!(EtaSpec::parse("   "), Err(Error::Parse { .. })));
        assert!(matches!(EtaSpec::parse("1^2 x^2"), Err(Error::Parse { pos: 4, .. })));
        assert!(EtaSpec::parse("1^2 1^3").is_err());
        assert!(EtaSpec::parse("0^2").is_err());
        assert!(EtaSpec::parse("4^0").is_err());
    }

    #[test]
    fn pentagonal_series_small() {
        // prod (1 - q^k) = 1 - q - q^2 + q^5 + q^7 - q^12 - q^15 + ...
        let terms = pentagonal_terms(16);
        assert_eq!(
            terms,
            vec![(0, 1), (1, -1), (2, -1), (5, 1), (7, 1), (12, -1), (15, -1)]
        );
    }

    #[test]
    fn eta_1_23_expansion() {
        let mut expect = vec![0i64; 25];
        for (n, c) in [(1, 1), (2, -1), (3, -1), (6, 1), (8, 1), (13, -1), (16, -1), (23, 1), (24, -1)] {
            expect[n] = c;
        }
        assert_eq!(coeffs(&eta("1^1 23^1", 25)), expect);
    }

    #[test]
    fn eta_level_11_head() {
        // (1-q)^2 (1-q^2)^2 (1-q^3)^2 (1-q^4)^2 expanded by hand to q^4
        assert_eq!(coeffs(&eta("1^2 11^2", 6)), vec![0, 1, -2, -1, 2, 1]);
    }

    #[test]
    fn eta_level_32_head() {
        assert_eq!(coeffs(&eta("4^2 8^2", 6)), vec![0, 1, 0, 0, 0, -2]);
    }

    #[test]
    fn delta_small_primes() {
        let d = eta("1^24", 18);
        let want = [(2, -24), (3, 252), (5, 4830), (7, -16744), (11, 534612), (13, -577738), (17, -6905934)];
        for (p, tau) in want {
            assert_eq!(d.coeff_i64(p), Some(tau), "tau({p})");
        }
    }

    #[test]
    fn pentagonal_matches_naive() {
        for s in ["1^1 23^1", "1^2 11^2", "4^2 8^2", "6^4", "12^2", "1^24", "2^3 3^5 7^1"] {
            let spec = EtaSpec::parse(s).unwrap();
            assert_eq!(
                eta_product(&spec, 1000).unwrap(),
                eta_product_naive(&spec, 1000).unwrap(),
                "{s}"
            );
        }
    }

    #[test]
    fn bigint_path_matches_i128_path() {
        let spec = EtaSpec::parse("1^24").unwrap();
        let a: Vec<BigInt> = pentagonal_product::<i128>(&spec, 300)
            .unwrap()
            .into_iter()
            .map(BigInt::from)
            .collect();
        let b = pentagonal_product::<BigInt>(&spec, 300).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        // prod (1-q^k)^100 has coefficients far beyond 2^127 by n = 1000
        let spec = EtaSpec::parse("1^100").unwrap();
        assert!(pentagonal_product::<i128>(&spec, 1000).is_none());
        let fast = eta_product(&spec, 1000).unwrap();
        assert_eq!(fast.truncate(200), eta_product_naive(&spec, 200).unwrap());
        assert!(fast.coeffs().iter().any(|c| c.bits() > 128));
    }

    #[test]
    fn truncation_edge() {
        assert!(eta_product(&EtaSpec::parse("1").unwrap(), 1).is_err());
        assert_eq!(coeffs(&eta("1", 2)), vec![0, 1]);
    }
}
