//! Long Weierstrass curves `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`
//! reduced modulo primes.
//!
//! Affine solutions are counted in `O(p)` by completing the square in `y`:
//! for odd `p` the number of `y` above `x` is `1 + (D(x)/p)` with
//! `D(x) = (a1 x + a3)^2 + 4 (x^3 + a2 x^2 + a4 x + a6)`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modarith::{self, modinv, prime_divisors, reduce, PrimeTable, QuadraticCharacter};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeierstrassCurve {
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a4: i64,
    pub a6: i64,
    bad_primes: Vec<u64>,
}

impl WeierstrassCurve {
    /// Curve with explicitly configured bad primes. Every configured prime
    /// must divide the discriminant.
    pub fn new(coeffs: [i64; 5], mut bad_primes: Vec<u64>) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = coeffs;
        let mut e = WeierstrassCurve {
            a1,
            a2,
            a3,
            a4,
            a6,
            bad_primes: vec![],
        };
        let disc = e.discriminant();
        if disc == 0 {
            return Err(Error::Domain("singular curve: discriminant is 0".into()));
        }
        bad_primes.sort_unstable();
        bad_primes.dedup();
        if let Some(p) = bad_primes.iter().find(|&&p| disc % p as i128 != 0) {
            return Err(Error::Domain(format!(
                "configured bad prime {p} does not divide the discriminant {disc}"
            )));
        }
        e.bad_primes = bad_primes;
        Ok(e)
    }

    /// Curve whose bad primes are all primes dividing its discriminant.
    pub fn with_discriminant_primes(coeffs: [i64; 5]) -> Result<Self> {
        let e = WeierstrassCurve::new(coeffs, vec![])?;
        let bad = discriminant_primes(e.discriminant());
        WeierstrassCurve::new(coeffs, bad)
    }

    /// `y^2 + y = x^3 - x^2`, conductor 11.
    pub fn conductor_11() -> Self {
        WeierstrassCurve::new([0, -1, 1, 0, 0], vec![11]).unwrap()
    }

    /// `y^2 = x^3 - x`, conductor 32.
    pub fn conductor_32() -> Self {
        WeierstrassCurve::new([0, 0, 0, -1, 0], vec![2]).unwrap()
    }

    /// `y^2 = x^3 + 1`, conductor 36.
    pub fn conductor_36() -> Self {
        WeierstrassCurve::new([0, 0, 0, 0, 1], vec![2, 3]).unwrap()
    }

    /// `y^2 + y = x^3 - x`, conductor 37.
    pub fn conductor_37() -> Self {
        WeierstrassCurve::new([0, 0, 1, -1, 0], vec![37]).unwrap()
    }

    /// `y^2 + y = x^3 + x^2 - x - 1`, bad only at 101.
    pub fn conductor_101() -> Self {
        WeierstrassCurve::new([0, 1, 1, -1, -1], vec![101]).unwrap()
    }

    pub fn coeffs(&self) -> [i64; 5] {
        [self.a1, self.a2, self.a3, self.a4, self.a6]
    }

    pub fn bad_primes(&self) -> &[u64] {
        &self.bad_primes
    }

    pub fn is_bad(&self, p: u64) -> bool {
        self.bad_primes.contains(&p)
    }

    pub fn discriminant(&self) -> i128 {
        let (a1, a2, a3, a4, a6) = (
            self.a1 as i128,
            self.a2 as i128,
            self.a3 as i128,
            self.a4 as i128,
            self.a6 as i128,
        );
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    }

    pub fn reduce(&self, p: u64) -> ReducedCurve {
        ReducedCurve {
            p,
            a1: reduce(self.a1, p),
            a2: reduce(self.a2, p),
            a3: reduce(self.a3, p),
            a4: reduce(self.a4, p),
            a6: reduce(self.a6, p),
        }
    }

    /// Parse `y^2 + y = x^3 - x^2`, `y^2 + x*y = x^3 + 2*x + 1`, ... Bad primes
    /// are taken from a known-curve table or else from the discriminant.
    pub fn parse(text: &str) -> Result<Self> {
        let coeffs = parse_curve(text)?;
        let known = [
            WeierstrassCurve::conductor_11(),
            WeierstrassCurve::conductor_32(),
            WeierstrassCurve::conductor_36(),
            WeierstrassCurve::conductor_37(),
            WeierstrassCurve::conductor_101(),
        ];
        if let Some(e) = known.into_iter().find(|e| e.coeffs() == coeffs) {
            return Ok(e);
        }
        WeierstrassCurve::with_discriminant_primes(coeffs).map_err(|e| Error::Parse {
            pos: 0,
            msg: e.to_string(),
        })
    }
}

fn discriminant_primes(disc: i128) -> Vec<u64> {
    let mut n = disc.unsigned_abs();
    let mut out = Vec::new();
    let mut d = 2u128;
    while d * d <= n && d < 1_000_000 {
        if n % d == 0 {
            out.push(d as u64);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        // the remaining cofactor is prime if trial division got past its root
        out.extend(prime_divisors(n as u64));
    }
    out
}

impl fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn term(out: &mut String, c: i64, mono: &str) {
            if c == 0 {
                return;
            }
            let sign = if c < 0 { "-" } else { "+" };
            let a = c.unsigned_abs();
            let body = match (a, mono) {
                (a, "") => a.to_string(),
                (1, m) => m.to_string(),
                (a, m) => format!("{a}*{m}"),
            };
            out.push_str(&format!(" {sign} {body}"));
        }
        let mut lhs = String::from("y^2");
        term(&mut lhs, self.a1, "x*y");
        term(&mut lhs, self.a3, "y");
        let mut rhs = String::from("x^3");
        term(&mut rhs, self.a2, "x^2");
        term(&mut rhs, self.a4, "x");
        term(&mut rhs, self.a6, "");
        write!(f, "{lhs} = {rhs}")
    }
}

/// Monomial `x^i y^j` to coefficient, for one side of the equation.
fn parse_side(text: &str, base: usize) -> Result<BTreeMap<(u32, u32), i64>> {
    let bytes = text.as_bytes();
    let mut pos = 0usize;
    let mut out = BTreeMap::new();
    let err = |pos: usize, msg: &str| Error::Parse {
        pos: base + pos,
        msg: msg.to_string(),
    };
    let skip = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let int = |pos: &mut usize| -> Option<i64> {
        let s = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        (s != *pos).then(|| text[s..*pos].parse().ok()).flatten()
    };
    skip(&mut pos);
    if pos == bytes.len() {
        return Err(err(pos, "empty side"));
    }
    let mut first = true;
    while pos < bytes.len() {
        skip(&mut pos);
        let mut sign = 1i64;
        if pos < bytes.len() && (bytes[pos] == b'+' || bytes[pos] == b'-') {
            if bytes[pos] == b'-' {
                sign = -1;
            }
            pos += 1;
            skip(&mut pos);
        } else if !first {
            return Err(err(pos, "expected '+' or '-'"));
        }
        first = false;
        let start = pos;
        let coef = int(&mut pos);
        let (mut ex, mut ey) = (0u32, 0u32);
        let mut any_var = false;
        loop {
            skip(&mut pos);
            let save = pos;
            if pos < bytes.len() && bytes[pos] == b'*' {
                pos += 1;
                skip(&mut pos);
            }
            if pos < bytes.len() && matches!(bytes[pos], b'x' | b'X' | b'y' | b'Y') {
                let is_x = bytes[pos].eq_ignore_ascii_case(&b'x');
                pos += 1;
                skip(&mut pos);
                let mut e = 1u32;
                if pos < bytes.len() && bytes[pos] == b'^' {
                    pos += 1;
                    skip(&mut pos);
                    let at = pos;
                    e = int(&mut pos).ok_or_else(|| err(at, "expected exponent"))? as u32;
                }
                if is_x {
                    ex += e;
                } else {
                    ey += e;
                }
                any_var = true;
            } else {
                if save != pos {
                    return Err(err(pos, "expected x or y after '*'"));
                }
                break;
            }
        }
        if coef.is_none() && !any_var {
            return Err(err(start, "expected term"));
        }
        *out.entry((ex, ey)).or_insert(0) += sign * coef.unwrap_or(1);
    }
    Ok(out)
}

fn parse_curve(text: &str) -> Result<[i64; 5]> {
    let (lhs, rhs) = text.split_once('=').ok_or(Error::Parse {
        pos: 0,
        msg: "expected `=`".into(),
    })?;
    let mut total = parse_side(lhs, 0)?;
    for (k, v) in parse_side(rhs, lhs.len() + 1)? {
        *total.entry(k).or_insert(0) -= v;
    }
    total.retain(|_, v| *v != 0);
    let get = |k: (u32, u32)| total.get(&k).copied().unwrap_or(0);
    if get((0, 2)) != 1 || get((3, 0)) != -1 {
        return Err(Error::Parse {
            pos: 0,
            msg: "expected long Weierstrass form y^2 + ... = x^3 + ...".into(),
        });
    }
    let allowed = [(0, 2), (1, 1), (0, 1), (3, 0), (2, 0), (1, 0), (0, 0)];
    if let Some(k) = total.keys().find(|k| !allowed.contains(k)) {
        return Err(Error::Parse {
            pos: 0,
            msg: format!("monomial x^{} y^{} not allowed in Weierstrass form", k.0, k.1),
        });
    }
    Ok([
        get((1, 1)),
        -get((2, 0)),
        get((0, 1)),
        -get((1, 0)),
        -get((0, 0)),
    ])
}

/// Point of a reduced curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurvePoint {
    Infinity,
    Affine { x: u64, y: u64 },
}

/// Coefficients reduced modulo a prime `p < 2^32`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReducedCurve {
    pub p: u64,
    pub a1: u64,
    pub a2: u64,
    pub a3: u64,
    pub a4: u64,
    pub a6: u64,
}

impl ReducedCurve {
    fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }
    fn div(&self, a: u64, b: u64) -> u64 {
        self.mul(a, modinv(b, self.p).expect("nonzero denominator"))
    }

    /// `y^2 + a1 xy + a3 y - (x^3 + a2 x^2 + a4 x + a6)` at `(x, y)`.
    pub fn equation(&self, x: u64, y: u64) -> u64 {
        let lhs = self.add(self.mul(y, y), self.mul(y, self.add(self.mul(self.a1, x), self.a3)));
        self.sub(lhs, self.rhs(x))
    }

    fn rhs(&self, x: u64) -> u64 {
        let x2 = self.mul(x, x);
        let t = self.add(self.mul(x2, x), self.mul(self.a2, x2));
        self.add(t, self.add(self.mul(self.a4, x), self.a6))
    }

    /// `(a1 x + a3)^2 + 4 rhs(x)`: twice `y` plus `a1 x + a3`, squared.
    fn completed_square(&self, x: u64) -> u64 {
        let h = self.add(self.mul(self.a1, x), self.a3);
        self.add(self.mul(h, h), self.mul(4 % self.p, self.rhs(x)))
    }

    pub fn contains(&self, pt: &CurvePoint) -> bool {
        match *pt {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => x < self.p && y < self.p && self.equation(x, y) == 0,
        }
    }

    pub fn neg(&self, pt: &CurvePoint) -> CurvePoint {
        match *pt {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => {
                let h = self.add(self.mul(self.a1, x), self.a3);
                CurvePoint::Affine {
                    x,
                    y: self.sub(self.sub(0, y), h),
                }
            }
        }
    }

    /// Chord-and-tangent addition on the long form.
    pub fn point_add(&self, pt: &CurvePoint, qt: &CurvePoint) -> CurvePoint {
        let (x1, y1, x2, y2) = match (*pt, *qt) {
            (CurvePoint::Infinity, q) => return q,
            (p, CurvePoint::Infinity) => return p,
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => {
                (x1, y1, x2, y2)
            }
        };
        let (lambda, nu) = if x1 == x2 {
            let h = self.add(self.mul(self.a1, x2), self.a3);
            if self.add(self.add(y1, y2), h) == 0 {
                return CurvePoint::Infinity;
            }
            let den = self.add(self.add(self.mul(2, y1), self.mul(self.a1, x1)), self.a3);
            let x1sq = self.mul(x1, x1);
            let num_l = self.sub(
                self.add(
                    self.add(self.mul(3, x1sq), self.mul(self.mul(2, self.a2), x1)),
                    self.a4,
                ),
                self.mul(self.a1, y1),
            );
            let num_n = self.sub(
                self.add(
                    self.add(self.sub(0, self.mul(x1sq, x1)), self.mul(self.a4, x1)),
                    self.mul(2, self.a6),
                ),
                self.mul(self.a3, y1),
            );
            (self.div(num_l, den), self.div(num_n, den))
        } else {
            let den = self.sub(x2, x1);
            (
                self.div(self.sub(y2, y1), den),
                self.div(self.sub(self.mul(y1, x2), self.mul(y2, x1)), den),
            )
        };
        let x3 = self.sub(
            self.sub(
                self.sub(self.add(self.mul(lambda, lambda), self.mul(self.a1, lambda)), self.a2),
                x1,
            ),
            x2,
        );
        let y3 = self.sub(
            self.sub(self.sub(0, self.mul(self.add(lambda, self.a1), x3)), nu),
            self.a3,
        );
        CurvePoint::Affine { x: x3, y: y3 }
    }

    /// `k P` by double-and-add.
    pub fn scalar_mul(&self, mut k: u64, pt: &CurvePoint) -> CurvePoint {
        let mut acc = CurvePoint::Infinity;
        let mut base = *pt;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.point_add(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.point_add(&base, &base);
            }
        }
        acc
    }

    /// Affine solutions over `F_p`.
    pub fn count_affine(&self) -> u64 {
        let p = self.p;
        if p <= 3 {
            return (0..p)
                .flat_map(|x| (0..p).map(move |y| (x, y)))
                .filter(|&(x, y)| self.equation(x, y) == 0)
                .count() as u64;
        }
        let chi = QuadraticCharacter::new(p);
        let total: i64 = (0..p).map(|x| 1 + chi.chi(self.completed_square(x))).sum();
        total as u64
    }

    /// Every affine point, calling `visit` until it returns `false`.
    pub fn for_each_point(&self, mut visit: impl FnMut(CurvePoint) -> bool) {
        let p = self.p;
        if p <= 3 {
            for x in 0..p {
                for y in 0..p {
                    if self.equation(x, y) == 0 && !visit(CurvePoint::Affine { x, y }) {
                        return;
                    }
                }
            }
            return;
        }
        // sqrt_of[s] = some r with r^2 = s, or p if s is a nonsquare
        let mut sqrt_of = vec![p; p as usize];
        for r in 0..=p / 2 {
            sqrt_of[(r * r % p) as usize] = r;
        }
        let inv2 = modinv(2, p).unwrap();
        for x in 0..p {
            let r = sqrt_of[self.completed_square(x) as usize];
            if r == p {
                continue;
            }
            // 2y + a1 x + a3 = +-r
            let h = self.add(self.mul(self.a1, x), self.a3);
            let y1 = self.mul(self.sub(r, h), inv2);
            if !visit(CurvePoint::Affine { x, y: y1 }) {
                return;
            }
            if r != 0 {
                let y2 = self.mul(self.sub(self.sub(0, r), h), inv2);
                if !visit(CurvePoint::Affine { x, y: y2 }) {
                    return;
                }
            }
        }
    }
}

/// `a_p = p - n_affine`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub p: u64,
    pub n_affine: u64,
    pub a_p: i64,
    pub bad: bool,
}

impl TraceRecord {
    /// `|a_p| <= 2 sqrt(p)`, compared exactly as `a_p^2 <= 4p`.
    pub fn within_hasse(&self) -> bool {
        (self.a_p as i128).pow(2) <= 4 * self.p as i128
    }

    /// `#E(F_p) = p + 1 - a_p`, counting the point at infinity.
    pub fn group_order(&self) -> u64 {
        self.n_affine + 1
    }
}

fn check_prime(p: u64) -> Result<()> {
    if !modarith::is_prime(p) || p >= 1 << 32 {
        return Err(Error::Domain(format!("{p} is not a prime below 2^32")));
    }
    Ok(())
}

pub fn count_affine(e: &WeierstrassCurve, p: u64) -> Result<TraceRecord> {
    check_prime(p)?;
    let n_affine = e.reduce(p).count_affine();
    Ok(TraceRecord {
        p,
        n_affine,
        a_p: p as i64 - n_affine as i64,
        bad: e.is_bad(p),
    })
}

/// Records for every prime of the table, in table order.
pub fn trace_table(e: &WeierstrassCurve, primes: &PrimeTable, skip_bad: bool) -> Vec<TraceRecord> {
    primes
        .primes()
        .par_iter()
        .filter(|&&p| !(skip_bad && e.is_bad(p)))
        .map(|&p| count_affine(e, p).expect("table entries are prime"))
        .collect()
}

/// Whether all of `E[l]` is rational over `F_p`, i.e. `#E_p[l] = l^2`.
pub fn full_l_torsion_rational(e: &WeierstrassCurve, p: u64, l: u64) -> Result<bool> {
    check_prime(p)?;
    if !modarith::is_prime(l) {
        return Err(Error::Domain(format!("{l} is not prime")));
    }
    if e.is_bad(p) || p == l {
        return Err(Error::Domain(format!(
            "p = {p} must be a good prime different from l = {l}"
        )));
    }
    if (p - 1) % l != 0 {
        return Ok(false);
    }
    let rec = count_affine(e, p)?;
    if rec.group_order() % (l * l) != 0 {
        return Ok(false);
    }
    Ok(l_torsion_size(&e.reduce(p), l, l * l) == l * l)
}

/// `#{P : l P = O}`, stopping early once `cap` is reached.
pub fn l_torsion_size(curve: &ReducedCurve, l: u64, cap: u64) -> u64 {
    let mut count = 1u64; // the point at infinity
    curve.for_each_point(|pt| {
        if curve.scalar_mul(l, &pt) == CurvePoint::Infinity {
            count += 1;
        }
        count < cap
    });
    count
}
