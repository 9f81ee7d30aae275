//! Computation and machine verification of explicit reciprocity laws.
//!
//! The crate is organised bottom-up:
//!
//! * [`modarith`]: prime tables, modular exponentiation, residue symbols.
//! * [`polyring`]: monic integer polynomials, reduction mod `p`, root counts
//!   and factor-degree patterns, cyclotomic polynomials.
//! * [`qseries`]: truncated `q`-expansions with exact integer coefficients
//!   (eta products, theta series, Hecke relations, numeric modularity).
//! * [`ellcurve`]: long Weierstrass curves over `F_p`, traces of Frobenius,
//!   group law and rational `l`-torsion.
//! * [`laws`]: the verification harness producing [`LawReport`]s.

pub mod ellcurve;
pub mod error;
pub mod laws;
pub mod modarith;
pub mod polyring;
pub mod qseries;

pub use ellcurve::{CurvePoint, ReducedCurve, TraceRecord, WeierstrassCurve};
pub use error::{Error, Result};
pub use laws::{Histogram, LawReport, Violation};
pub use modarith::{PrimeTable, ResidueSymbol};
pub use polyring::{IntPoly, ModPoly, RootCount};
pub use qseries::{EtaSpec, QSeries, QuadForm, SignedThetaRule};
