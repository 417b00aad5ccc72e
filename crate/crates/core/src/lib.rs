//! Exact p-adic zeta integrals as rational functions of `t = q^{-s}`.
//!
//! The crate is organised bottom-up:
//!
//! * [`scalar`], [`poly`], [`ratfun`], [`laurent`]: exact arithmetic in
//!   `Q(ζ_m)` and factored rational functions of one variable.
//! * [`lattice`]: sums `Σ_{x∈ℕⁿ} φ(x)·t^{d·x}` for exponential-polynomial `φ`.
//! * [`cell`]: integrals of `|f|^s` over rectilinear cells, reduced to lattice sums.
//! * [`oracle`]: brute-force enumeration over `Z/p^k` and truncated lattice sums.
//! * [`distributions`]: Laurent coefficients of the determinant zeta integral
//!   and the action of `GL_n × GL_n` on them.
//! * [`orbits`]: rank orbits on `M_{m,n}`, admissibility and classification.
//! * [`koszul`], [`invariance`]: Ext over `Z[Zⁿ]` and generalized invariance on `Zⁿ`.
//! * [`selftest`]: the acceptance checks, shared by the test suite and the CLI.

pub mod cell;
pub mod distributions;
pub mod error;
pub mod invariance;
pub mod koszul;
pub mod lattice;
pub mod laurent;
pub mod linalg;
pub mod oracle;
pub mod orbits;
pub mod poly;
pub mod ratfun;
pub mod scalar;
pub mod selftest;
mod series;

pub use error::{Error, Result};
pub use laurent::{laurent_at, LaurentSeries};
pub use poly::Poly;
pub use ratfun::{ratfun_arith, ArithOp, FactoredRatFun};
pub use scalar::{Ctx, CycloRational, Rational, UnitScalar};
