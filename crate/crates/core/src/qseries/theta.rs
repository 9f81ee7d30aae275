use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::QSeries;
use crate::error::{Error, Result};

/// Integral positive-definite quadratic form stored by its doubled Gram
/// matrix `G`, so that `Q(v) = v^T G v / 2` and `G` has even diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadForm {
    arity: usize,
    gram: Vec<i64>,
}

impl QuadForm {
    pub fn from_gram(arity: usize, gram: Vec<i64>) -> Result<Self> {
        if arity == 0 || gram.len() != arity * arity {
            return Err(Error::Domain("gram matrix has the wrong shape".into()));
        }
        for i in 0..arity {
            if gram[i * arity + i] % 2 != 0 {
                return Err(Error::Domain("gram diagonal must be even".into()));
            }
            for j in 0..arity {
                if gram[i * arity + j] != gram[j * arity + i] {
                    return Err(Error::Domain("gram matrix must be symmetric".into()));
                }
            }
        }
        let form = QuadForm { arity, gram };
        if !form.leading_minors_positive() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(form)
    }

    /// `a x^2 + b xy + c y^2`.
    pub fn binary(a: i64, b: i64, c: i64) -> Result<Self> {
        QuadForm::from_gram(2, vec![2 * a, b, b, 2 * c])
    }

    /// Orthogonal sum of two forms.
    pub fn direct_sum(&self, other: &QuadForm) -> Result<Self> {
        let n = self.arity + other.arity;
        let mut gram = vec![0i64; n * n];
        for i in 0..self.arity {
            for j in 0..self.arity {
                gram[i * n + j] = self.gram[i * self.arity + j];
            }
        }
        for i in 0..other.arity {
            for j in 0..other.arity {
                gram[(i + self.arity) * n + j + self.arity] = other.gram[i * other.arity + j];
            }
        }
        QuadForm::from_gram(n, gram)
    }

    /// `x^2+xy+3y^2 + u^2+uv+3v^2`.
    pub fn level11_b() -> Self {
        let f = QuadForm::binary(1, 1, 3).unwrap();
        f.direct_sum(&f).unwrap()
    }

    /// `2(x^2+y^2+u^2+v^2) + 2xu + xv + yu - 2yv` in coordinates `(x, y, u, v)`.
    pub fn level11_c() -> Self {
        QuadForm::from_gram(
            4,
            vec![
                4, 0, 2, 1, //
                0, 4, 1, -2, //
                2, 1, 4, 0, //
                1, -2, 0, 4,
            ],
        )
        .unwrap()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn gram(&self) -> &[i64] {
        &self.gram
    }

    pub fn value(&self, v: &[i64]) -> i64 {
        let n = self.arity;
        let mut twice = 0i64;
        for i in 0..n {
            let mut row = 0i64;
            for j in 0..n {
                row += self.gram[i * n + j] * v[j];
            }
            twice += v[i] * row;
        }
        twice / 2
    }

    /// Bareiss elimination on the Gram matrix; every pivot is a leading
    /// principal minor.
    fn leading_minors_positive(&self) -> bool {
        let n = self.arity;
        let mut m: Vec<i128> = self.gram.iter().map(|&x| x as i128).collect();
        let mut prev = 1i128;
        for k in 0..n {
            let pivot = m[k * n + k];
            if pivot <= 0 {
                return false;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    m[i * n + j] = (m[i * n + j] * pivot - m[i * n + k] * m[k * n + j]) / prev;
                }
            }
            prev = pivot;
        }
        true
    }

    /// Coefficients `d_i`, `mu_ij` with `Q(v) = sum_i d_i (v_i + sum_{j>i} mu_ij v_j)^2`.
    fn completed_squares(&self) -> Vec<f64> {
        let n = self.arity;
        let mut q: Vec<f64> = self.gram.iter().map(|&x| x as f64 / 2.0).collect();
        for i in 0..n {
            for j in i + 1..n {
                q[j * n + i] = q[i * n + j];
                q[i * n + j] /= q[i * n + i];
            }
            for k in i + 1..n {
                for l in k..n {
                    q[k * n + l] -= q[k * n + i] * q[i * n + l];
                }
            }
        }
        q
    }

    /// Calls `visit(v, Q(v))` for every `v` with `Q(v) < bound`, split by the
    /// value of the last coordinate so the halves can run in parallel.
    fn for_each_below<A, F>(&self, bound: u64, init: impl Fn() -> A + Sync, visit: F) -> Vec<A>
    where
        A: Send,
        F: Fn(&mut A, &[i64], u64) + Sync,
    {
        let n = self.arity;
        let q = self.completed_squares();
        // Q takes integer values, so Q(v) < bound means Q(v) <= bound - 1; the
        // slack only widens the float search box.
        let budget = bound.saturating_sub(1) as f64 + 0.5;
        let last = n - 1;
        let r = (budget / q[last * n + last]).sqrt().floor() as i64 + 1;
        (-r..=r)
            .into_par_iter()
            .map(|top| {
                let mut acc = init();
                let mut v = vec![0i64; n];
                v[last] = top;
                let used = q[last * n + last] * (top as f64) * (top as f64);
                if used <= budget {
                    self.descend(&q, last, budget - used, &mut v, bound, &mut acc, &visit);
                }
                acc
            })
            .collect()
    }

    #[allow(clippy::too_many_arguments)]
    fn descend<A, F>(
        &self,
        q: &[f64],
        level: usize,
        remaining: f64,
        v: &mut [i64],
        bound: u64,
        acc: &mut A,
        visit: &F,
    ) where
        F: Fn(&mut A, &[i64], u64),
    {
        if level == 0 {
            let value = self.value(v);
            if value >= 0 && (value as u64) < bound {
                visit(acc, v, value as u64);
            }
            return;
        }
        let n = self.arity;
        let i = level - 1;
        let center: f64 = -(i + 1..n).map(|j| q[i * n + j] * v[j] as f64).sum::<f64>();
        let radius = (remaining.max(0.0) / q[i * n + i]).sqrt() + 1e-7;
        let lo = (center - radius).ceil() as i64;
        let hi = (center + radius).floor() as i64;
        for x in lo..=hi {
            let t = x as f64 - center;
            let rest = remaining - q[i * n + i] * t * t;
            if rest < -1e-7 {
                continue;
            }
            v[i] = x;
            self.descend(q, i, rest, v, bound, acc, visit);
        }
        v[i] = 0;
    }
}

/// `sum_v q^{Q(v)}` truncated at `truncation`.
pub fn theta_series(form: &QuadForm, truncation: usize) -> Result<QSeries> {
    if truncation == 0 {
        return Err(Error::Domain("truncation must be positive".into()));
    }
    let parts = form.for_each_below(
        truncation as u64,
        || vec![0u64; truncation],
        |acc, _, n| acc[n as usize] += 1,
    );
    let mut total = vec![0u64; truncation];
    for part in parts {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    QSeries::new(total.into_iter().map(BigInt::from).collect())
}

/// Linear congruence `sum_i coeffs[i] * v_i = residue (mod modulus)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Congruence {
    pub coeffs: Vec<i64>,
    pub modulus: i64,
    pub residue: i64,
}

impl Congruence {
    pub fn new(coeffs: Vec<i64>, modulus: i64, residue: i64) -> Self {
        Congruence {
            coeffs,
            modulus,
            residue,
        }
    }

    fn holds(&self, v: &[i64]) -> bool {
        let s: i64 = self.coeffs.iter().zip(v).map(|(a, b)| a * b).sum();
        (s - self.residue).rem_euclid(self.modulus) == 0
    }
}

/// Lattice sum `sum (-1)^{<s, v>} q^{Q(v)}` over the vectors satisfying every
/// congruence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedThetaRule {
    pub form: QuadForm,
    pub congruences: Vec<Congruence>,
    pub sign: Vec<i64>,
}

impl SignedThetaRule {
    /// All vectors, all signs `+`.
    pub fn unrestricted(form: QuadForm) -> Self {
        let n = form.arity();
        SignedThetaRule {
            form,
            congruences: vec![],
            sign: vec![0; n],
        }
    }

    /// Sum over `x = 1 (3)`, `y = 0 (3)`, `x + y` odd of `(-1)^y q^{x^2+y^2}`,
    /// which equals `q prod (1 - q^{12k})^2`.
    pub fn eta_12_squared() -> Self {
        Self::twelve_rule(1)
    }

    /// The same sum with `x + y` even instead. It does not reproduce
    /// `q prod (1 - q^{12k})^2`; kept to document that reading.
    pub fn eta_12_squared_even_parity() -> Self {
        Self::twelve_rule(0)
    }

    fn twelve_rule(parity: i64) -> Self {
        SignedThetaRule {
            form: QuadForm::binary(1, 0, 1).unwrap(),
            congruences: vec![
                Congruence::new(vec![1, 0], 3, 1),
                Congruence::new(vec![0, 1], 3, 0),
                Congruence::new(vec![1, 1], 2, parity),
            ],
            sign: vec![0, 1],
        }
    }

    fn weight(&self, v: &[i64]) -> i64 {
        if !self.congruences.iter().all(|c| c.holds(v)) {
            return 0;
        }
        let s: i64 = self.sign.iter().zip(v).map(|(a, b)| a * b).sum();
        if s.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }
}

pub fn signed_theta(rule: &SignedThetaRule, truncation: usize) -> Result<QSeries> {
    if truncation < 2 {
        return Err(Error::Domain("signed theta truncation must be >= 2".into()));
    }
    if rule.sign.len() != rule.form.arity()
        || rule
            .congruences
            .iter()
            .any(|c| c.coeffs.len() != rule.form.arity() || c.modulus <= 0)
    {
        return Err(Error::Domain("rule does not match the form's arity".into()));
    }
    let parts = rule.form.for_each_below(
        truncation as u64,
        || vec![0i64; truncation],
        |acc, v, n| acc[n as usize] += rule.weight(v),
    );
    let mut total = vec![0i64; truncation];
    for part in parts {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    QSeries::from_i64(&total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::{eta_product, EtaSpec};

    /// Box enumeration with a fixed radius.
    fn brute_theta(form: &QuadForm, truncation: usize, radius: i64) -> Vec<i64> {
        let n = form.arity();
        let mut out = vec![0i64; truncation];
        let mut v = vec![-radius; n];
        loop {
            let q = form.value(&v);
            if (q as usize) < truncation {
                out[q as usize] += 1;
            }
            let mut i = 0;
            while i < n {
                v[i] += 1;
                if v[i] <= radius {
                    break;
                }
                v[i] = -radius;
                i += 1;
            }
            if i == n {
                break;
            }
        }
        out
    }

    fn as_i64(s: &QSeries) -> Vec<i64> {
        (0..s.truncation()).map(|n| s.coeff_i64(n).unwrap()).collect()
    }

    #[test]
    fn positive_definiteness() {
        assert!(QuadForm::binary(1, 1, 6).is_ok());
        assert_eq!(QuadForm::binary(1, 3, 1), Err(Error::NotPositiveDefinite));
        assert_eq!(QuadForm::binary(-1, 0, 1), Err(Error::NotPositiveDefinite));
        assert_eq!(QuadForm::binary(1, 2, 1), Err(Error::NotPositiveDefinite));
        assert!(QuadForm::from_gram(2, vec![2, 1, 0, 2]).is_err());
        assert!(QuadForm::from_gram(2, vec![1, 0, 0, 2]).is_err());
        let c = QuadForm::level11_c();
        assert_eq!(c.value(&[1, 0, 1, 0]), 2 + 2 + 2);
        assert_eq!(c.value(&[0, 1, 0, 1]), 2 + 2 - 2);
    }

    #[test]
    fn binary_head() {
        let b = theta_series(&QuadForm::binary(1, 1, 6).unwrap(), 3).unwrap();
        assert_eq!(as_i64(&b), vec![1, 2, 0]);
    }

    #[test]
    fn quaternary_heads() {
        let b = theta_series(&QuadForm::level11_b(), 18).unwrap();
        assert_eq!(
            &as_i64(&b)[..8],
            &[1, 4, 4, 8, 20, 16, 32, 16]
        );
        assert_eq!(&as_i64(&b)[11..18], &[4, 64, 40, 64, 56, 68, 40]);
        let c = theta_series(&QuadForm::level11_c(), 18).unwrap();
        assert_eq!(&as_i64(&c)[..8], &[1, 0, 12, 12, 12, 12, 24, 24]);
        assert_eq!(&as_i64(&c)[11..18], &[0, 72, 24, 48, 60, 84, 48]);
    }

    #[test]
    fn enumeration_matches_box_oracle() {
        let forms = [
            QuadForm::binary(1, 1, 6).unwrap(),
            QuadForm::binary(2, 1, 3).unwrap(),
            QuadForm::binary(1, 1, 8).unwrap(),
            QuadForm::binary(2, 1, 4).unwrap(),
            QuadForm::binary(1, 0, 27).unwrap(),
            QuadForm::binary(1, 0, 1).unwrap(),
            QuadForm::level11_b(),
            QuadForm::level11_c(),
        ];
        for f in &forms {
            let radius = if f.arity() == 2 { 30 } else { 12 };
            let oracle = brute_theta(f, 51, radius);
            // radius large enough: widening it changes nothing
            assert_eq!(oracle, brute_theta(f, 51, radius + 3));
            assert_eq!(as_i64(&theta_series(f, 51).unwrap()), oracle, "{f:?}");
        }
    }

    #[test]
    fn eta_12_signed_theta_identity() {
        let lhs = signed_theta(&SignedThetaRule::eta_12_squared(), 500).unwrap();
        let rhs = eta_product(&EtaSpec::parse("12^2").unwrap(), 500).unwrap();
        assert_eq!(lhs, rhs);
        let even = signed_theta(&SignedThetaRule::eta_12_squared_even_parity(), 500).unwrap();
        assert_ne!(even, rhs);
        assert_eq!(even.coeff_i64(1), Some(0));
    }

    #[test]
    fn empty_and_unrestricted_rules() {
        let form = QuadForm::binary(1, 0, 1).unwrap();
        let empty = SignedThetaRule {
            form: form.clone(),
            congruences: vec![
                Congruence::new(vec![1, 0], 2, 0),
                Congruence::new(vec![1, 0], 2, 1),
            ],
            sign: vec![0, 0],
        };
        assert!(signed_theta(&empty, 50).unwrap().is_zero());
        let plain = signed_theta(&SignedThetaRule::unrestricted(form.clone()), 50).unwrap();
        assert_eq!(plain.coeff_i64(1), Some(4));
        assert_eq!(plain, theta_series(&form, 50).unwrap());
    }

    #[test]
    fn weight_one_difference_is_even() {
        let a = theta_series(&QuadForm::binary(1, 1, 8).unwrap(), 2000).unwrap();
        let b = theta_series(&QuadForm::binary(2, 1, 4).unwrap(), 2000).unwrap();
        assert!(a.halved_difference(&b, 2).is_ok());
    }
}
