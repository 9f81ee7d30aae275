//! Truncated `q`-expansions with exact integer coefficients.
//!
//! A [`QSeries`] of truncation `T` holds `c_0, ..., c_{T-1}`; nothing past
//! `q^{T-1}` is ever read or produced. All series arithmetic is exact.

mod eta;
mod hecke;
mod modular;
mod theta;

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use eta::{eta_product, eta_product_naive, EtaSpec};
pub use hecke::{check_hecke, check_strong_multiplicativity, Character, HeckeSpec};
pub use modular::{
    check_modularity, default_matrices, default_taus, evaluate_at_tau, Evaluation, Matrix2,
    ModularitySpec, TAIL_TOLERANCE,
};
pub use theta::{signed_theta, theta_series, Congruence, QuadForm, SignedThetaRule};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QSeries {
    coeffs: Vec<BigInt>,
}

impl QSeries {
    /// Series with the given coefficients; truncation is their count.
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Domain("truncation must be positive".into()));
        }
        Ok(QSeries { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        QSeries::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(truncation: usize) -> Self {
        QSeries {
            coeffs: vec![BigInt::zero(); truncation.max(1)],
        }
    }

    pub fn one(truncation: usize) -> Self {
        let mut s = QSeries::zero(truncation);
        s.coeffs[0] = BigInt::one();
        s
    }

    /// Sparse series from `(exponent, coefficient)` pairs; exponents past the
    /// truncation are dropped.
    pub fn from_terms(truncation: usize, terms: &[(usize, i64)]) -> Self {
        let mut s = QSeries::zero(truncation);
        for &(n, c) in terms {
            if n < s.truncation() {
                s.coeffs[n] += c;
            }
        }
        s
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &BigInt {
        &self.coeffs[n]
    }

    /// Coefficient as `i64`, if it fits.
    pub fn coeff_i64(&self, n: usize) -> Option<i64> {
        self.coeffs.get(n).and_then(|c| c.to_i64())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Same coefficients cut down to a shorter truncation.
    pub fn truncate(&self, truncation: usize) -> QSeries {
        QSeries {
            coeffs: self.coeffs[..truncation.min(self.truncation()).max(1)].to_vec(),
        }
    }

    fn check(&self, other: &QSeries) -> Result<()> {
        if self.truncation() != other.truncation() {
            return Err(Error::TruncationMismatch(
                self.truncation(),
                other.truncation(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &QSeries) -> Result<QSeries> {
        self.check(other)?;
        Ok(QSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &QSeries) -> Result<QSeries> {
        self.check(other)?;
        Ok(QSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Cauchy product truncated at the common truncation.
    pub fn mul(&self, other: &QSeries) -> Result<QSeries> {
        self.check(other)?;
        let t = self.truncation();
        let mut out = vec![BigInt::zero(); t];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..t - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Ok(QSeries { coeffs: out })
    }

    /// Power-series quotient `numerator / denominator` to `truncation` terms.
    ///
    /// The denominator's constant term must be `+1` or `-1`.
    pub fn expand_rational_gf(
        numerator: &QSeries,
        denominator: &QSeries,
        truncation: usize,
    ) -> Result<QSeries> {
        let d0 = denominator.coeffs[0].clone();
        if d0.abs() != BigInt::one() {
            return Err(Error::NonUnitConstant(d0.to_string()));
        }
        let get = |s: &QSeries, n: usize| s.coeffs.get(n).cloned().unwrap_or_default();
        let mut out: Vec<BigInt> = Vec::with_capacity(truncation);
        for n in 0..truncation {
            let mut acc = get(numerator, n);
            for k in 1..=n.min(denominator.truncation() - 1) {
                let dk = &denominator.coeffs[k];
                if !dk.is_zero() {
                    acc -= dk * &out[n - k];
                }
            }
            out.push(&acc * &d0);
        }
        QSeries::new(out)
    }

    /// `(self - other) / divisor` with the constant term forced to 0.
    pub fn halved_difference(&self, other: &QSeries, divisor: u32) -> Result<QSeries> {
        self.check(other)?;
        if divisor != 2 && divisor != 4 {
            return Err(Error::Domain(format!("divisor must be 2 or 4, got {divisor}")));
        }
        let d = BigInt::from(divisor);
        let mut coeffs = Vec::with_capacity(self.truncation());
        coeffs.push(BigInt::zero());
        for n in 1..self.truncation() {
            let diff = &self.coeffs[n] - &other.coeffs[n];
            let (q, r) = diff.div_rem(&d);
            if !r.is_zero() {
                return Err(Error::Indivisible { index: n, divisor });
            }
            coeffs.push(q);
        }
        Ok(QSeries { coeffs })
    }

    /// CSV rows `n,c_n` under a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,c_n\n");
        for (n, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(s, "{n},{c}");
        }
        s
    }

    /// Inverse of [`QSeries::to_csv`].
    pub fn from_csv(text: &str) -> Result<QSeries> {
        let mut lines = text.lines();
        let bad = |line: usize, msg: &str| Error::Parse {
            pos: line,
            msg: msg.to_string(),
        };
        if lines.next().map(str::trim) != Some("n,c_n") {
            return Err(bad(0, "missing `n,c_n` header"));
        }
        let mut coeffs = Vec::new();
        for (i, line) in lines.enumerate() {
            let (n, c) = line.split_once(',').ok_or_else(|| bad(i + 1, "expected `n,c_n`"))?;
            let n: usize = n.trim().parse().map_err(|_| bad(i + 1, "bad index"))?;
            if n != coeffs.len() {
                return Err(bad(i + 1, "indices must be consecutive from 0"));
            }
            coeffs.push(c.trim().parse().map_err(|_| bad(i + 1, "bad coefficient"))?);
        }
        QSeries::new(coeffs)
    }
}
