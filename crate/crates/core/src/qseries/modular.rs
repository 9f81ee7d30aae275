use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{Character, QSeries};
use crate::error::{Error, Result};
use crate::laws::LawReport;
use crate::modarith::modinv;

/// Truncation is accepted when `|q|^T * max|c_n| < TAIL_TOLERANCE`.
pub const TAIL_TOLERANCE: f64 = 1e-15;

/// Value of a truncated Fourier series with its tail estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    /// `max|c_n| |q|^T / (1 - |q|)`, the tail if later coefficients stay
    /// below the largest one seen.
    pub tail_bound: f64,
}

/// `sum_n c_n e^{2 pi i tau n}` over the stored coefficients.
pub fn evaluate_at_tau(c: &QSeries, tau: Complex64) -> Result<Evaluation> {
    if tau.im <= 0.0 {
        return Err(Error::Domain("tau must lie in the upper half-plane".into()));
    }
    let t = c.truncation();
    let abs_q = (-2.0 * PI * tau.im).exp();
    let max_coeff = c
        .coeffs()
        .iter()
        .map(|x| x.abs().to_f64().unwrap_or(f64::INFINITY))
        .fold(0.0f64, f64::max);
    if max_coeff == 0.0 {
        return Ok(Evaluation {
            value: Complex64::zero(),
            tail_bound: 0.0,
        });
    }
    let q_to_t = (t as f64 * (-2.0 * PI * tau.im)).exp();
    if !(q_to_t * max_coeff < TAIL_TOLERANCE) {
        return Err(Error::Precision(format!(
            "truncation {t} too short at Im(tau) = {:.4}: |q|^T max|c| = {:.3e}; \
             increase the truncation or Im(tau)",
            tau.im,
            q_to_t * max_coeff
        )));
    }
    let mut value = Complex64::zero();
    for (n, cn) in c.coeffs().iter().enumerate() {
        if cn.is_zero() {
            continue;
        }
        let phase = Complex64::new(0.0, 2.0 * PI * n as f64) * tau;
        value += phase.exp() * cn.to_f64().unwrap_or(f64::NAN);
    }
    Ok(Evaluation {
        value,
        tail_bound: max_coeff * q_to_t / (1.0 - abs_q),
    })
}

/// Integer matrix `(a b; c d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Matrix2 {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Matrix2 { a, b, c, d }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn act(&self, tau: Complex64) -> Complex64 {
        (tau * self.a as f64 + self.b as f64) / (tau * self.c as f64 + self.d as f64)
    }

    pub fn automorphy(&self, tau: Complex64) -> Complex64 {
        tau * self.c as f64 + self.d as f64
    }
}

impl std::fmt::Display for Matrix2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

/// `(1 1; 0 1)`, `(1 0; N 1)` and up to two matrices `(a b; N d)` with small
/// `d > 1` coprime to `N`.
pub fn default_matrices(level: u64) -> Vec<Matrix2> {
    let n = level as i64;
    let mut out = vec![Matrix2::new(1, 1, 0, 1), Matrix2::new(1, 0, n, 1)];
    if level > 1 {
        for d in [2i64, 3, 5, 7, 11, 13].into_iter().filter(|&d| n % d != 0).take(2) {
            let a = modinv(d as u64, level).expect("coprime") as i64;
            let b = (a * d - 1) / n;
            out.push(Matrix2::new(a, b, n, d));
        }
    }
    out
}

/// Test points for one matrix. With `c != 0` they are `(-d + s + i)/c` for
/// `s in {0, 1/4}`, where `|c tau + d|` is close to 1 and so `tau` and its
/// image have comparable imaginary parts.
pub fn default_taus(m: &Matrix2) -> Vec<Complex64> {
    if m.c == 0 {
        vec![Complex64::new(0.0, 1.0), Complex64::new(0.25, 1.0 / 3.0)]
    } else {
        let c = m.c as f64;
        let d = m.d as f64;
        vec![
            Complex64::new(-d / c, 1.0 / c),
            Complex64::new((0.25 - d) / c, 1.0 / c),
        ]
    }
}

/// Functional equation `F(g tau) = chi(d) (c tau + d)^k F(tau)` for `g` in
/// `Gamma_0(N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModularitySpec {
    pub level: u64,
    pub weight: i32,
    pub character: Option<Character>,
    pub matrices: Vec<Matrix2>,
    /// Explicit test points; empty means [`default_taus`] per matrix.
    #[serde(default)]
    pub taus: Vec<Complex64Ser>,
    pub tolerance: f64,
}

/// Serializable complex number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Complex64Ser {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Complex64Ser {
    fn from(z: Complex64) -> Self {
        Complex64Ser { re: z.re, im: z.im }
    }
}

impl From<Complex64Ser> for Complex64 {
    fn from(z: Complex64Ser) -> Self {
        Complex64::new(z.re, z.im)
    }
}

impl ModularitySpec {
    pub fn new(level: u64, weight: i32) -> Self {
        ModularitySpec {
            level,
            weight,
            character: None,
            matrices: default_matrices(level),
            taus: Vec::new(),
            tolerance: 1e-8,
        }
    }

    pub fn with_character(mut self, character: Character) -> Self {
        self.character = Some(character);
        self
    }

    /// Every `(matrix, tau)` pair that will be evaluated.
    pub fn test_points(&self) -> Vec<(Matrix2, Complex64)> {
        let mut out = Vec::new();
        for m in &self.matrices {
            let taus: Vec<Complex64> = if self.taus.is_empty() {
                default_taus(m)
            } else {
                self.taus.iter().map(|&z| z.into()).collect()
            };
            for tau in taus {
                out.push((*m, tau));
            }
        }
        out
    }

    /// Smallest imaginary part among test points and their images.
    pub fn min_imaginary_part(&self) -> f64 {
        self.test_points()
            .iter()
            .flat_map(|(m, tau)| [tau.im, m.act(*tau).im])
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn check_modularity(c: &QSeries, spec: &ModularitySpec) -> Result<LawReport> {
    let mut report = LawReport::new("modularity", spec.level, spec.level);
    report.note("weight", spec.weight as i64);
    report.note("truncation", c.truncation() as u64);
    let mut max_err = 0.0f64;
    for (m, tau) in spec.test_points() {
        if m.det() != 1 || m.c.rem_euclid(spec.level as i64) != 0 {
            return Err(Error::Domain(format!(
                "{m} is not in Gamma_0({})",
                spec.level
            )));
        }
        let lhs = evaluate_at_tau(c, m.act(tau))?;
        let base = evaluate_at_tau(c, tau)?;
        let chi = spec.character.map_or(1.0, |ch| ch.eval(m.d) as f64);
        let rhs = base.value * m.automorphy(tau).powi(spec.weight) * chi;
        let err = (lhs.value - rhs).norm() / base.value.norm();
        max_err = max_err.max(err);
        if !(err < spec.tolerance) {
            report.violate(
                m.c as u64,
                format!("rel err < {:e} at {m}, tau = {tau}", spec.tolerance),
                format!("{err:.3e}"),
            );
        } else {
            report.pass_one();
        }
    }
    report.note("max_relative_error", max_err);
    report.note("tolerance", spec.tolerance);
    Ok(report.finish())
}
