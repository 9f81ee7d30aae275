//! Monic integer polynomials and their reductions modulo primes.
//!
//! `N_p(f)` here always means the number of *distinct* roots of `f mod p` in
//! `F_p`, computed as `deg gcd(T^p - T, f)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modarith::{self, modinv, mulmod, prime_divisors};

/// Monic polynomial with integer coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntPoly {
    coeffs: Vec<i64>,
}

impl IntPoly {
    /// Build from coefficients `c_0, c_1, ..., c_n`. Requires `n > 0` and `c_n = 1`.
    pub fn new(mut coeffs: Vec<i64>) -> Result<Self> {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0 {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::Domain("polynomial must have positive degree".into()));
        }
        if *coeffs.last().unwrap() != 1 {
            return Err(Error::Domain("polynomial must be monic".into()));
        }
        Ok(IntPoly { coeffs })
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval_mod(&self, x: u64, p: u64) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| (mulmod(acc, x, p) + modarith::reduce(c, p)) % p)
    }

    /// `f(T)` with every coefficient reduced modulo `p`.
    pub fn reduce_mod_p(&self, p: u64) -> ModPoly {
        ModPoly::new(p, self.coeffs.iter().map(|&c| modarith::reduce(c, p)).collect())
    }

    /// Primes `p` at which `f mod p` has a repeated factor, among `primes`.
    pub fn ramified_among(&self, primes: &[u64]) -> Vec<u64> {
        primes
            .iter()
            .copied()
            .filter(|&p| !self.reduce_mod_p(p).is_squarefree())
            .collect()
    }

    /// Whether `f` has nonzero discriminant, checked as squarefreeness modulo
    /// the first hundred primes above its degree.
    pub fn is_separable(&self) -> bool {
        let deg = self.degree() as u64;
        (deg + 1..)
            .filter(|&n| modarith::is_prime(n))
            .take(100)
            .any(|p| self.reduce_mod_p(p).is_squarefree())
    }

    /// Parse text such as `T^3 - T - 1` or `x^2 + 3*x + 2`.
    pub fn parse(text: &str) -> Result<Self> {
        parse_poly(text)
    }

    fn mul(&self, other: &IntPoly) -> Option<Vec<i64>> {
        let mut out = vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].checked_add(a.checked_mul(b)?)?;
            }
        }
        Some(out)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (deg, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.unsigned_abs();
            match deg {
                0 => write!(f, "{a}")?,
                _ => {
                    if a != 1 {
                        write!(f, "{a}*")?;
                    }
                    if deg == 1 {
                        write!(f, "T")?;
                    } else {
                        write!(f, "T^{deg}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn parse_poly(text: &str) -> Result<IntPoly> {
    let bytes = text.as_bytes();
    let mut pos = 0usize;
    let mut var: Option<u8> = None;
    let mut coeffs: Vec<i64> = Vec::new();
    let err = |pos: usize, msg: &str| Error::Parse {
        pos,
        msg: msg.to_string(),
    };
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let read_int = |pos: &mut usize| -> Option<u64> {
        let start = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if start == *pos {
            None
        } else {
            text[start..*pos].parse().ok()
        }
    };

    skip_ws(&mut pos);
    if pos == bytes.len() {
        return Err(err(pos, "empty polynomial"));
    }
    let mut first = true;
    while pos < bytes.len() {
        skip_ws(&mut pos);
        let mut sign = 1i64;
        if pos < bytes.len() && (bytes[pos] == b'+' || bytes[pos] == b'-') {
            if bytes[pos] == b'-' {
                sign = -1;
            }
            pos += 1;
            skip_ws(&mut pos);
        } else if !first {
            return Err(err(pos, "expected '+' or '-'"));
        }
        first = false;
        let term_start = pos;
        let coef = read_int(&mut pos);
        skip_ws(&mut pos);
        let mut has_star = false;
        if coef.is_some() && pos < bytes.len() && bytes[pos] == b'*' {
            has_star = true;
            pos += 1;
            skip_ws(&mut pos);
        }
        let mut degree = 0usize;
        if pos < bytes.len() && bytes[pos].is_ascii_alphabetic() {
            let v = bytes[pos];
            match var {
                None => var = Some(v),
                Some(w) if w != v => return Err(err(pos, "more than one variable")),
                _ => {}
            }
            pos += 1;
            degree = 1;
            skip_ws(&mut pos);
            if pos < bytes.len() && bytes[pos] == b'^' {
                pos += 1;
                skip_ws(&mut pos);
                let at = pos;
                degree = read_int(&mut pos).ok_or_else(|| err(at, "expected exponent"))? as usize;
                if degree > 10_000 {
                    return Err(err(at, "exponent too large"));
                }
            }
        } else if has_star {
            return Err(err(pos, "expected variable after '*'"));
        } else if coef.is_none() {
            return Err(err(term_start, "expected term"));
        }
        let c = coef.unwrap_or(1);
        let c = i64::try_from(c).map_err(|_| err(term_start, "coefficient too large"))? * sign;
        if coeffs.len() <= degree {
            coeffs.resize(degree + 1, 0);
        }
        coeffs[degree] = coeffs[degree]
            .checked_add(c)
            .ok_or_else(|| err(term_start, "coefficient overflow"))?;
        skip_ws(&mut pos);
    }
    while coeffs.len() > 1 && *coeffs.last().unwrap() == 0 {
        coeffs.pop();
    }
    if coeffs.len() < 2 {
        return Err(err(0, "polynomial must have positive degree"));
    }
    if *coeffs.last().unwrap() != 1 {
        return Err(err(0, "polynomial must be monic"));
    }
    let f = IntPoly { coeffs };
    if !f.is_separable() {
        return Err(err(0, "polynomial has a repeated factor (zero discriminant)"));
    }
    Ok(f)
}

/// Polynomial over `F_p`, lowest degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModPoly {
    p: u64,
    coeffs: Vec<u64>,
}

impl ModPoly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        ModPoly { p, coeffs }
    }

    pub fn zero(p: u64) -> Self {
        ModPoly { p, coeffs: vec![] }
    }

    pub fn monomial(p: u64, deg: usize) -> Self {
        let mut coeffs = vec![0; deg + 1];
        coeffs[deg] = 1 % p;
        ModPoly::new(p, coeffs)
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn lead(&self) -> u64 {
        *self.coeffs.last().unwrap_or(&0)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let p = self.p;
        self.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| (mulmod(acc, x, p) + c) % p)
    }

    fn check(&self, other: &ModPoly) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch(self.p, other.p));
        }
        Ok(())
    }

    pub fn sub(&self, other: &ModPoly) -> Result<ModPoly> {
        self.check(other)?;
        let p = self.p;
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                (a + p - b) % p
            })
            .collect();
        Ok(ModPoly::new(p, c))
    }

    pub fn mul(&self, other: &ModPoly) -> Result<ModPoly> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(ModPoly::zero(self.p));
        }
        let p = self.p;
        let mut out = vec![0u128; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u128 * b as u128) % p as u128;
            }
        }
        Ok(ModPoly::new(p, out.into_iter().map(|c| c as u64).collect()))
    }

    /// Quotient and remainder. Fails on a zero divisor.
    pub fn div_rem(&self, divisor: &ModPoly) -> Result<(ModPoly, ModPoly)> {
        self.check(divisor)?;
        let p = self.p;
        let dd = divisor
            .degree()
            .ok_or_else(|| Error::Domain("division by zero polynomial".into()))?;
        let inv = modinv(divisor.lead(), p)
            .ok_or_else(|| Error::Domain("leading coefficient not invertible".into()))?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((ModPoly::zero(p), self.clone()));
        }
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = mulmod(rem[i], inv, p);
            if c == 0 {
                continue;
            }
            quot[i - dd] = c;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                let idx = i - dd + j;
                rem[idx] = (rem[idx] + p - mulmod(c, d, p)) % p;
            }
        }
        Ok((ModPoly::new(p, quot), ModPoly::new(p, rem)))
    }

    pub fn rem(&self, divisor: &ModPoly) -> Result<ModPoly> {
        Ok(self.div_rem(divisor)?.1)
    }

    pub fn make_monic(&self) -> ModPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = modinv(self.lead(), self.p).expect("nonzero residue mod prime is invertible");
        ModPoly::new(
            self.p,
            self.coeffs.iter().map(|&c| mulmod(c, inv, self.p)).collect(),
        )
    }

    pub fn derivative(&self) -> ModPoly {
        let p = self.p;
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mulmod(c, i as u64 % p, p))
            .collect();
        ModPoly::new(p, c)
    }

    /// `gcd(f, f') = 1`.
    pub fn is_squarefree(&self) -> bool {
        match poly_gcd(self, &self.derivative()) {
            Ok(g) => g.degree() == Some(0),
            Err(_) => false,
        }
    }

    /// `self^e mod modulus`.
    pub fn pow_mod(&self, mut e: u64, modulus: &ModPoly) -> Result<ModPoly> {
        let mut base = self.rem(modulus)?;
        let mut acc = ModPoly::new(self.p, vec![1]).rem(modulus)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?.rem(modulus)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?.rem(modulus)?;
            }
        }
        Ok(acc)
    }
}

impl fmt::Display for ModPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0 (mod {})", self.p);
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(d, &c)| match (d, c) {
                (0, c) => format!("{c}"),
                (1, 1) => "T".to_string(),
                (1, c) => format!("{c}T"),
                (d, 1) => format!("T^{d}"),
                (d, c) => format!("{c}T^{d}"),
            })
            .collect();
        write!(f, "{} (mod {})", terms.join(" + "), self.p)
    }
}

/// Monic gcd over `F_p` by Euclid's algorithm.
pub fn poly_gcd(a: &ModPoly, b: &ModPoly) -> Result<ModPoly> {
    a.check(b)?;
    if a.is_zero() && b.is_zero() {
        return Err(Error::Domain("gcd of two zero polynomials".into()));
    }
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_zero() {
        let r = x.rem(&y)?;
        x = y;
        y = r;
    }
    Ok(x.make_monic())
}

/// `T^p mod f` in `F_p[T]/(f)`.
pub fn frobenius_power(f: &ModPoly) -> Result<ModPoly> {
    if f.degree().unwrap_or(0) < 1 {
        return Err(Error::Domain("frobenius_power needs deg f >= 1".into()));
    }
    ModPoly::monomial(f.p, 1).pow_mod(f.p, f)
}

/// `N_p(f)`: distinct roots of `f` in `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootCount {
    pub p: u64,
    pub distinct_roots: usize,
}

/// `deg gcd(T^p - T, f)`.
pub fn count_distinct_roots(f: &ModPoly) -> Result<RootCount> {
    let frob = frobenius_power(f)?;
    let x = ModPoly::monomial(f.p, 1);
    let h = frob.sub(&x)?;
    let distinct_roots = if h.is_zero() {
        f.degree().unwrap()
    } else {
        poly_gcd(&h, f)?.degree().unwrap_or(0)
    };
    Ok(RootCount {
        p: f.p,
        distinct_roots,
    })
}

/// Roots by evaluating at every element of `F_p`.
pub fn brute_force_roots(f: &ModPoly) -> usize {
    (0..f.p).filter(|&x| f.eval(x) == 0).count()
}

/// Degrees of the irreducible factors of a squarefree `f`, ascending.
pub fn factor_degrees(f: &ModPoly) -> Result<Vec<usize>> {
    let n = f
        .degree()
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::Domain("factor_degrees needs deg f >= 1".into()))?;
    if !f.is_squarefree() {
        return Err(Error::NotSquarefree(f.p));
    }
    let p = f.p;
    let x = ModPoly::monomial(p, 1);
    let mut rest = f.make_monic();
    let mut h = x.clone();
    let mut out = Vec::with_capacity(n);
    let mut d = 0usize;
    while rest.degree().unwrap_or(0) > 0 {
        d += 1;
        if 2 * d > rest.degree().unwrap() {
            out.push(rest.degree().unwrap());
            break;
        }
        h = h.pow_mod(p, &rest)?;
        let g = poly_gcd(&h.sub(&x)?, &rest)?;
        let gd = g.degree().unwrap_or(0);
        if gd > 0 {
            out.extend(std::iter::repeat(d).take(gd / d));
            rest = rest.div_rem(&g)?.0;
            h = h.rem(&rest)?;
        }
    }
    out.sort_unstable();
    Ok(out)
}

pub fn euler_phi(m: u64) -> u64 {
    prime_divisors(m)
        .into_iter()
        .fold(m, |acc, q| acc / q * (q - 1))
}

fn divisors(m: u64) -> Vec<u64> {
    (1..=m).filter(|d| m % d == 0).collect()
}

/// Exact division in `Z[T]` by a monic divisor. `None` if the remainder is nonzero.
fn exact_div_monic(num: &[i64], den: &[i64]) -> Option<Vec<i64>> {
    let dd = den.len() - 1;
    if num.len() <= dd {
        return None;
    }
    let mut rem = num.to_vec();
    let mut quot = vec![0i64; num.len() - dd];
    for i in (dd..num.len()).rev() {
        let c = rem[i];
        quot[i - dd] = c;
        for (j, &d) in den.iter().enumerate() {
            rem[i - dd + j] = rem[i - dd + j].checked_sub(c.checked_mul(d)?)?;
        }
    }
    rem.iter().all(|&r| r == 0).then_some(quot)
}

/// `Phi_m`, by dividing `T^m - 1` by `Phi_d` for every proper divisor `d` of `m`.
pub fn cyclotomic(m: u64) -> Result<IntPoly> {
    if m == 0 {
        return Err(Error::Domain("cyclotomic level must be >= 1".into()));
    }
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in divisors(m).into_iter().filter(|&d| d < m) {
        let phi_d = cyclotomic(d)?;
        num = exact_div_monic(&num, phi_d.coeffs()).ok_or_else(|| {
            Error::Domain(format!("Phi_{d} does not divide T^{m} - 1 exactly"))
        })?;
    }
    IntPoly::new(num)
}

/// `prod_{d | m} Phi_d` as an integer polynomial.
pub fn cyclotomic_product(m: u64) -> Result<Vec<i64>> {
    let mut acc = IntPoly { coeffs: vec![1] };
    for d in divisors(m) {
        let phi = cyclotomic(d)?;
        let c = acc
            .mul(&phi)
            .ok_or_else(|| Error::Domain("coefficient overflow".into()))?;
        acc = IntPoly { coeffs: c };
    }
    Ok(acc.coeffs)
}
