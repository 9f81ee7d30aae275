//! Primes, modular exponentiation and residue symbols.
//!
//! Residue arithmetic is done in `u64` with products widened to `u128`, so
//! every modulus below `2^63` is safe. The Legendre symbol is computed by
//! Euler's criterion and never by reciprocity, which keeps the reciprocity
//! checks in [`crate::laws`] non-circular.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// All primes up to a limit, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }

    /// Primes in the closed interval `[lo, hi]`.
    pub fn range(&self, lo: u64, hi: u64) -> &[u64] {
        let a = self.primes.partition_point(|&p| p < lo);
        let b = self.primes.partition_point(|&p| p <= hi);
        &self.primes[a..b.max(a)]
    }

    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }

    /// A table holding no primes. Useful as an explicit "nothing to do" input.
    pub fn empty() -> Self {
        PrimeTable {
            limit: 1,
            primes: Vec::new(),
        }
    }
}

/// Sieve of Eratosthenes.
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::EmptyRange(limit));
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    Ok(PrimeTable { limit, primes })
}

/// Trial division. Meant for validating inputs, not for large numbers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime divisors of `n`, ascending.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[inline]
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod modulus` by square-and-multiply.
pub fn modpow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mulmod(result, b, modulus);
        }
        b = mulmod(b, b, modulus);
        exp >>= 1;
    }
    result
}

/// Reduce a signed integer into `[0, m)`.
#[inline]
pub fn reduce(a: i64, m: u64) -> u64 {
    a.rem_euclid(m as i64) as u64
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm, if it exists.
pub fn modinv(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Value of a Legendre-type symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ResidueSymbol {
    Minus,
    Zero,
    Plus,
}

impl ResidueSymbol {
    pub fn value(self) -> i64 {
        match self {
            ResidueSymbol::Minus => -1,
            ResidueSymbol::Zero => 0,
            ResidueSymbol::Plus => 1,
        }
    }

    pub fn from_sign(v: i64) -> Self {
        match v.signum() {
            -1 => ResidueSymbol::Minus,
            0 => ResidueSymbol::Zero,
            _ => ResidueSymbol::Plus,
        }
    }
}

impl std::ops::Mul for ResidueSymbol {
    type Output = ResidueSymbol;
    fn mul(self, rhs: Self) -> Self {
        ResidueSymbol::from_sign(self.value() * rhs.value())
    }
}

fn require_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not an odd prime")));
    }
    Ok(())
}

/// `(a/p)` for an odd prime `p`, by Euler's criterion `a^((p-1)/2) mod p`.
pub fn legendre(a: i64, p: u64) -> Result<ResidueSymbol> {
    require_odd_prime(p)?;
    Ok(euler_criterion(reduce(a, p), p))
}

/// Euler's criterion without the primality check. `a` must already be reduced.
#[inline]
pub(crate) fn euler_criterion(a: u64, p: u64) -> ResidueSymbol {
    if a == 0 {
        return ResidueSymbol::Zero;
    }
    if modpow(a, (p - 1) / 2, p) == 1 {
        ResidueSymbol::Plus
    } else {
        ResidueSymbol::Minus
    }
}

/// `q* = (-1)^((q-1)/2) q`, always `1 mod 4`.
pub fn qstar(q: u64) -> Result<i64> {
    require_odd_prime(q)?;
    let q = q as i64;
    Ok(if q % 4 == 1 { q } else { -q })
}

/// `(q*/p)` for an odd prime `q` and any prime `p`.
///
/// For `p = 2` this is `(-1)^((q^2-1)/8)`; for `p = q` it is 0.
pub fn qstar_symbol(q: u64, p: u64) -> Result<ResidueSymbol> {
    let qs = qstar(q)?;
    if !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    if p == q {
        return Ok(ResidueSymbol::Zero);
    }
    if p == 2 {
        let e = (q * q - 1) / 8;
        return Ok(if e % 2 == 0 {
            ResidueSymbol::Plus
        } else {
            ResidueSymbol::Minus
        });
    }
    legendre(qs, p)
}

/// Quadratic character of `F_p` backed by a table of squares.
///
/// Agrees with [`legendre`] everywhere; used in counting loops that query the
/// same prime `O(p)` times.
#[derive(Debug, Clone)]
pub struct QuadraticCharacter {
    p: u64,
    is_square: Vec<bool>,
}

impl QuadraticCharacter {
    pub fn new(p: u64) -> Self {
        let mut is_square = vec![false; p as usize];
        for y in 0..=p / 2 {
            is_square[mulmod(y, y, p) as usize] = true;
        }
        QuadraticCharacter { p, is_square }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Symbol of a residue already reduced into `[0, p)`, as -1, 0 or 1.
    #[inline]
    pub fn chi(&self, a: u64) -> i64 {
        if a == 0 {
            0
        } else if self.is_square[a as usize] {
            1
        } else {
            -1
        }
    }
}
