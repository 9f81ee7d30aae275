use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow};
use serde::{Deserialize, Serialize};

use super::QSeries;
use crate::error::{Error, Result};
use crate::laws::LawReport;
use crate::modarith::{self, legendre, prime_divisors};

/// Quadratic character `d -> (d/q)` for an odd prime `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Character {
    pub modulus: u64,
}

impl Character {
    pub fn legendre(q: u64) -> Result<Self> {
        if q == 2 || !modarith::is_prime(q) {
            return Err(Error::Domain(format!("character modulus {q} is not an odd prime")));
        }
        Ok(Character { modulus: q })
    }

    pub fn eval(&self, d: i64) -> i64 {
        legendre(d, self.modulus)
            .expect("modulus validated at construction")
            .value()
    }
}

/// Weight, level and nebentypus of a candidate Hecke eigenform.
///
/// At primes dividing `level` the relation checked is `c_{p^r} = c_p^r`;
/// elsewhere `c_{p^r} = c_{p^{r-1}} c_p - chi(p) p^{w-1} c_{p^{r-2}}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeckeSpec {
    pub weight: u32,
    pub level: u64,
    pub character: Option<Character>,
}

impl HeckeSpec {
    pub fn new(weight: u32, level: u64) -> Self {
        HeckeSpec {
            weight,
            level,
            character: None,
        }
    }

    pub fn with_character(mut self, character: Character) -> Self {
        self.character = Some(character);
        self
    }
}

fn require_normalized(c: &QSeries) -> Result<()> {
    if c.truncation() < 2 || !c.coeff(1).is_one() {
        let got = c
            .coeffs()
            .get(1)
            .map(|x| x.to_string())
            .unwrap_or_else(|| "missing".into());
        return Err(Error::NotNormalized(got));
    }
    Ok(())
}

fn primes_below(t: usize) -> Vec<u64> {
    if t < 3 {
        return Vec::new();
    }
    modarith::sieve_primes(t as u64 - 1)
        .map(|table| table.primes().to_vec())
        .unwrap_or_default()
}

/// Coprime multiplicativity and the prime-power recursion over every index
/// below the truncation.
pub fn check_hecke(c: &QSeries, spec: &HeckeSpec) -> Result<LawReport> {
    require_normalized(c)?;
    let t = c.truncation();
    let bad = prime_divisors(spec.level);
    let mut report = LawReport::new("hecke", 1, t.saturating_sub(1) as u64);
    report.note("weight", spec.weight);
    report.note("level", spec.level);
    report.note("truncation", t as u64);

    let mut pairs = 0u64;
    for m in 2..t {
        if m * (m + 1) >= t {
            break;
        }
        for m2 in m + 1..t {
            let n = m * m2;
            if n >= t {
                break;
            }
            if m.gcd(&m2) != 1 {
                continue;
            }
            pairs += 1;
            let expected = c.coeff(m) * c.coeff(m2);
            report.check(n as u64, &expected, c.coeff(n));
        }
    }
    report.note("coprime_pairs", pairs);

    let mut powers = 0u64;
    for p in primes_below(t) {
        let pu = p as usize;
        let is_bad = bad.contains(&p);
        let chi = match spec.character {
            Some(ch) => ch.eval(p as i64),
            None => 1,
        };
        let multiplier = BigInt::from(chi) * BigInt::from(p).pow(spec.weight.saturating_sub(1));
        let mut prev2 = BigInt::one();
        let mut prev = c.coeff(pu).clone();
        let mut r = 2u32;
        while let Some(n) = pu.checked_pow(r).filter(|&n| n < t) {
            let expected = if is_bad {
                c.coeff(pu).pow(r)
            } else {
                &prev * c.coeff(pu) - &multiplier * &prev2
            };
            report.check(n as u64, &expected, c.coeff(n));
            powers += 1;
            prev2 = prev;
            prev = c.coeff(n).clone();
            r += 1;
        }
    }
    report.note("prime_powers", powers);
    Ok(report.finish())
}

/// `c_{mm'} = c_m c_{m'}` for all `m, m' >= 2` with `mm'` below the truncation.
pub fn check_strong_multiplicativity(c: &QSeries) -> Result<LawReport> {
    require_normalized(c)?;
    let t = c.truncation();
    let mut report = LawReport::new("strong-multiplicativity", 1, t.saturating_sub(1) as u64);
    for m in 2..t {
        if m * m >= t {
            break;
        }
        for m2 in m..t {
            let n = m * m2;
            if n >= t {
                break;
            }
            let expected = c.coeff(m) * c.coeff(m2);
            report.check(n as u64, &expected, c.coeff(n));
        }
    }
    Ok(report.finish())
}
