//! Lattice sums `Z_φ(t) = Σ_{x∈ℕⁿ} φ(x)·t^{d·x}` for `φ` a finite sum of
//! `c·Π_i C(x_i, k_i)·u_i^{x_i}`.
//!
//! Each term factors over coordinates, and each coordinate is a shifted
//! geometric series `Σ_x C(x,k) w^x = w^k / (1 - w)^{k+1}` in `w = u·t^d`.

use std::fmt;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratfun::FactoredRatFun;
use crate::scalar::{parse_rational, Ctx, CycloRational, Rational, UnitScalar};
use crate::series::binomial;

/// One coordinate factor `C(x, k)·u^x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coord {
    pub k: u32,
    pub u: UnitScalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeTerm {
    pub coeff: CycloRational,
    pub coords: Vec<Coord>,
}

impl LatticeTerm {
    pub fn order(&self) -> u32 {
        self.coords.iter().map(|c| c.k).sum()
    }

    /// Value at a lattice point.
    pub fn eval(&self, x: &[u64], ctx: &Ctx) -> CycloRational {
        let mut acc = self.coeff.clone();
        for (c, &xi) in self.coords.iter().zip(x) {
            let b = binomial(xi, c.k as u64);
            if b.is_zero() {
                return ctx.zero();
            }
            acc = acc.scale(&Rational::from_integer(b));
            acc = &acc * &ctx.embed(ctx.pow(c.u, xi as i64));
        }
        acc
    }
}

/// An element of the space of exponential polynomials on `ℤⁿ`, in the binomial basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeFunction {
    dim: usize,
    terms: Vec<LatticeTerm>,
}

/// The character `x ↦ t^{d·x}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentVector(pub Vec<u32>);

impl ExponentVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl LatticeFunction {
    pub fn new(dim: usize, terms: Vec<LatticeTerm>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.coords.len() != dim) {
            return Err(Error::Precondition(format!(
                "term has {} coordinates in a {dim}-dimensional lattice function",
                t.coords.len()
            )));
        }
        Ok(LatticeFunction { dim, terms })
    }

    /// `c·Π u_i^{x_i}` with all binomial degrees zero.
    pub fn exponential(coeff: CycloRational, bases: &[UnitScalar]) -> Self {
        let coords = bases.iter().map(|&u| Coord { k: 0, u }).collect();
        LatticeFunction { dim: bases.len(), terms: vec![LatticeTerm { coeff, coords }] }
    }

    /// `c·Π x_i^{p_i} u_i^{x_i}`, rewritten in the binomial basis through
    /// `x^p = Σ_j S(p, j)·j!·C(x, j)` (Stirling numbers of the second kind).
    pub fn from_monomial(coeff: CycloRational, powers: &[u32], bases: &[UnitScalar]) -> Result<Self> {
        if powers.len() != bases.len() {
            return Err(Error::Precondition("powers and bases differ in length".into()));
        }
        let mut terms = vec![LatticeTerm { coeff, coords: Vec::new() }];
        for (&p, &u) in powers.iter().zip(bases) {
            let expansion = stirling_binomial_coeffs(p);
            let mut next = Vec::new();
            for t in &terms {
                for (j, c) in expansion.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let mut coords = t.coords.clone();
                    coords.push(Coord { k: j as u32, u });
                    next.push(LatticeTerm { coeff: t.coeff.scale(c), coords });
                }
            }
            terms = next;
        }
        Ok(LatticeFunction { dim: powers.len(), terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[LatticeTerm] {
        &self.terms
    }

    /// Maximal total binomial degree over terms.
    pub fn order(&self) -> u32 {
        self.terms.iter().map(LatticeTerm::order).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[u64], ctx: &Ctx) -> CycloRational {
        self.terms.iter().fold(ctx.zero(), |acc, t| &acc + &t.eval(x, ctx))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Precondition("dimension mismatch".into()));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(LatticeFunction { dim: self.dim, terms })
    }

    /// `(x, y) ↦ self(x)·other(y)` on `ℕ^{n₁+n₂}`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let mut coords = a.coords.clone();
                coords.extend(b.coords.iter().copied());
                terms.push(LatticeTerm { coeff: &a.coeff * &b.coeff, coords });
            }
        }
        LatticeFunction { dim: self.dim + other.dim, terms }
    }

    /// Multiply every base `u_i` by `c` (the fold used by cell integrals).
    pub fn twist_bases(&self, c: UnitScalar, ctx: &Ctx) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| LatticeTerm {
                coeff: t.coeff.clone(),
                coords: t.coords.iter().map(|co| Coord { k: co.k, u: ctx.mul(co.u, c) }).collect(),
            })
            .collect();
        LatticeFunction { dim: self.dim, terms }
    }

    fn check_levels(&self, ctx: &Ctx) -> Result<()> {
        for t in &self.terms {
            if t.coeff.level() != ctx.m {
                return Err(Error::Config(format!(
                    "coefficient at level {} in a level-{} context",
                    t.coeff.level(),
                    ctx.m
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> LatticeJson {
        LatticeJson {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| TermJson {
                    coeff: if t.coeff.level() == 1 {
                        CoeffJson::Rational(t.coeff.coeffs()[0].to_string())
                    } else {
                        CoeffJson::Cyclotomic(t.coeff.to_strings())
                    },
                    coords: t.coords.clone(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &LatticeJson, ctx: &Ctx) -> Result<Self> {
        let terms = j
            .terms
            .iter()
            .map(|t| {
                let coeff = match &t.coeff {
                    CoeffJson::Rational(s) => ctx.scalar(parse_rational(s)?),
                    CoeffJson::Cyclotomic(v) => CycloRational::from_strings(ctx.m, v)?,
                };
                let coords = t
                    .coords
                    .iter()
                    .map(|c| Coord { k: c.k, u: ctx.unit(c.u.root_index as i64, c.u.q_exponent) })
                    .collect();
                Ok(LatticeTerm { coeff, coords })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(j.dim, terms)
    }
}

/// Coefficients `S(p, j)·j!` of `x^p` in the basis `C(x, j)`, `j = 0..=p`.
fn stirling_binomial_coeffs(p: u32) -> Vec<Rational> {
    // S(n, k) = k S(n-1, k) + S(n-1, k-1)
    let p = p as usize;
    let mut s = vec![vec![Rational::zero(); p + 1]; p + 1];
    s[0][0] = Rational::from_integer(1.into());
    for n in 1..=p {
        for k in 1..=n {
            s[n][k] = &s[n - 1][k] * Rational::from_integer((k as i64).into()) + &s[n - 1][k - 1];
        }
    }
    let mut fact = Rational::from_integer(1.into());
    (0..=p)
        .map(|j| {
            if j > 0 {
                fact = &fact * Rational::from_integer((j as i64).into());
            }
            &s[p][j] * &fact
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffJson {
    Rational(String),
    Cyclotomic(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: CoeffJson,
    pub coords: Vec<Coord>,
}

/// Wire form `{dim, terms: [{coeff, coords: [{k, u: {j, a}}]}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub dim: usize,
    pub terms: Vec<TermJson>,
}

/// A `(term, coordinate)` pair whose coordinate series cannot converge, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub term: usize,
    pub coordinate: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SummabilityReport {
    pub summable: bool,
    pub violations: Vec<Violation>,
}

impl fmt::Display for SummabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.summable {
            return write!(f, "summable");
        }
        let parts: Vec<String> =
            self.violations.iter().map(|v| format!("term {} coordinate {}", v.term, v.coordinate)).collect();
        write!(f, "|u| >= 1 on a coordinate with d = 0: {}", parts.join(", "))
    }
}

fn check_dims(phi: &LatticeFunction, d: &ExponentVector) -> Result<()> {
    if phi.dim != d.dim() {
        return Err(Error::Precondition(format!(
            "lattice function has dimension {} but exponent vector has {}",
            phi.dim,
            d.dim()
        )));
    }
    Ok(())
}

/// Per-term summability: every coordinate with `d_i = 0` needs `|u_i| < 1`.
///
/// Terms with zero coefficient are ignored. Cancellation between different
/// terms is not detected, so this is sufficient but stricter than necessary.
pub fn check_summability(phi: &LatticeFunction, d: &ExponentVector) -> Result<SummabilityReport> {
    check_dims(phi, d)?;
    let mut violations = Vec::new();
    for (ti, t) in phi.terms.iter().enumerate() {
        if t.coeff.is_zero() {
            continue;
        }
        for (ci, c) in t.coords.iter().enumerate() {
            if d.0[ci] == 0 && c.u.magnitude_exponent() >= 0 {
                violations.push(Violation { term: ti + 1, coordinate: ci + 1 });
            }
        }
    }
    Ok(SummabilityReport { summable: violations.is_empty(), violations })
}

/// An exact rational or `-∞`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Abscissa {
    NegInfinity,
    Finite(Rational),
}

impl Abscissa {
    /// Whether `Re(s) = s0` lies strictly inside the half-plane of convergence.
    pub fn is_below(&self, s0: &Rational) -> bool {
        match self {
            Abscissa::NegInfinity => true,
            Abscissa::Finite(a) => a < s0,
        }
    }

    pub fn max(self, other: Self) -> Self {
        std::cmp::max(self, other)
    }
}

impl fmt::Display for Abscissa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Abscissa::NegInfinity => write!(f, "-inf"),
            Abscissa::Finite(a) => write!(f, "{a}"),
        }
    }
}

impl Serialize for Abscissa {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Least `σ` with absolute convergence for `Re(s) > σ`:
/// the max of `a_i / d_i` over coordinates with `d_i > 0`.
pub fn convergence_abscissa(phi: &LatticeFunction, d: &ExponentVector) -> Result<Abscissa> {
    require_summable(phi, d)?;
    let mut best = Abscissa::NegInfinity;
    for t in phi.terms.iter().filter(|t| !t.coeff.is_zero()) {
        for (c, &di) in t.coords.iter().zip(&d.0) {
            if di > 0 {
                let a = Rational::new(c.u.q_exponent.into(), (di as i64).into());
                best = best.max(Abscissa::Finite(a));
            }
        }
    }
    Ok(best)
}

fn require_summable(phi: &LatticeFunction, d: &ExponentVector) -> Result<()> {
    let report = check_summability(phi, d)?;
    if !report.summable {
        return Err(Error::Divergence(report.to_string()));
    }
    Ok(())
}

/// `Σ_{x∈ℕ} C(x, k)·(u·t^d)^x = (u t^d)^k / (1 - u t^d)^{k+1}`.
///
/// With `d = 0` the sum is the constant `u^k/(1-u)^{k+1}` and needs `|u| < 1`.
pub fn sum_binom_geom(ctx: &Ctx, k: u32, u: UnitScalar, d: u32) -> Result<FactoredRatFun> {
    let uk = ctx.embed(ctx.pow(u, k as i64));
    if d == 0 {
        if u.magnitude_exponent() >= 0 {
            return Err(Error::Divergence(format!("Σ C(x,{k})·({u})^x diverges: |u| ≥ 1 with d = 0")));
        }
        let one_minus = &ctx.one() - &ctx.embed(u);
        let c = &uk * &one_minus.pow(-(k as i64 + 1));
        return Ok(FactoredRatFun::constant(*ctx, c));
    }
    let geo = FactoredRatFun::inverse_factor(*ctx, u, d, k + 1)?;
    Ok(geo.scale(&uk).shift_t((k * d) as i64))
}

/// The lattice sum as a factored rational function of `t`.
pub fn zeta_lattice(ctx: &Ctx, phi: &LatticeFunction, d: &ExponentVector) -> Result<FactoredRatFun> {
    phi.check_levels(ctx)?;
    require_summable(phi, d)?;
    let pieces: Vec<FactoredRatFun> = phi
        .terms
        .par_iter()
        .filter(|t| !t.coeff.is_zero())
        .map(|t| {
            let mut acc = FactoredRatFun::constant(*ctx, t.coeff.clone());
            for (c, &di) in t.coords.iter().zip(&d.0) {
                acc = acc.mul(&sum_binom_geom(ctx, c.k, c.u, di)?)?;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    pieces.iter().try_fold(FactoredRatFun::zero(*ctx), |acc, p| acc.add(p))
}

/// `|c|` for a rational coefficient, used by tail bounds.
pub(crate) fn rational_abs(c: &CycloRational) -> Rational {
    match c.as_rational() {
        Some(r) => r.abs(),
        None => c.abs_bound(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::scalar::{int, rat};

    fn q(n: u64) -> Ctx {
        Ctx::rational(n)
    }

    #[test]
    fn elementary_sums() {
        let ctx = q(2);
        let geo = sum_binom_geom(&ctx, 0, UnitScalar::ONE, 1).unwrap();
        assert_eq!(geo, FactoredRatFun::inverse_factor(ctx, UnitScalar::ONE, 1, 1).unwrap());
        let k1 = sum_binom_geom(&ctx, 1, ctx.qp(-1), 1).unwrap();
        let expected =
            FactoredRatFun::from_parts(ctx, 1, Poly::constant(ctx.scalar(rat(1, 2))), [(ctx.qp(-1), 1, 2)]).unwrap();
        assert_eq!(k1.to_text(), expected.to_text());
        let c = sum_binom_geom(&ctx, 2, ctx.qp(-1), 0).unwrap();
        assert_eq!(c, FactoredRatFun::constant(ctx, ctx.int(2)));
        assert!(matches!(sum_binom_geom(&ctx, 0, ctx.qp(0), 0), Err(Error::Divergence(_))));
    }

    #[test]
    fn zeta_examples() {
        let ctx = q(2);
        let phi = LatticeFunction::exponential(ctx.one(), &[UnitScalar::ONE]);
        let z = zeta_lattice(&ctx, &phi, &ExponentVector(vec![1])).unwrap();
        assert_eq!(z, FactoredRatFun::inverse_factor(ctx, UnitScalar::ONE, 1, 1).unwrap());

        let phi = LatticeFunction::exponential(ctx.one(), &[ctx.qp(-1)]);
        let z = zeta_lattice(&ctx, &phi, &ExponentVector(vec![1])).unwrap();
        assert_eq!(z.to_text(), "t^0 * (1*t^0) / (1 - z^0*q^-1*t^1)^1");

        let ctx = q(3);
        let phi = LatticeFunction::exponential(ctx.one(), &[ctx.qp(-1), ctx.qp(-1)]);
        let z = zeta_lattice(&ctx, &phi, &ExponentVector(vec![1, 2])).unwrap();
        assert_eq!(z.to_text(), "t^0 * (1*t^0) / (1 - z^0*q^-1*t^1)^1 * (1 - z^0*q^-1*t^2)^1");
    }

    #[test]
    fn summability_diagnostics() {
        let ctx = Ctx::new(2, 3).unwrap();
        let up = LatticeFunction::exponential(ctx.one(), &[ctx.qp(2)]);
        assert!(check_summability(&up, &ExponentVector(vec![1])).unwrap().summable);
        let down = LatticeFunction::exponential(ctx.one(), &[ctx.qp(-1)]);
        assert!(check_summability(&down, &ExponentVector(vec![0])).unwrap().summable);
        let root = LatticeFunction::exponential(ctx.one(), &[ctx.unit(1, 0)]);
        let rep = check_summability(&root, &ExponentVector(vec![0])).unwrap();
        assert!(!rep.summable);
        assert_eq!(rep.violations, vec![Violation { term: 1, coordinate: 1 }]);
        assert!(rep.to_string().contains("coordinate 1"));
        match zeta_lattice(&ctx, &root, &ExponentVector(vec![0])) {
            Err(Error::Divergence(msg)) => assert!(msg.contains("coordinate 1")),
            other => panic!("expected divergence, got {other:?}"),
        }
        assert!(check_summability(&root, &ExponentVector(vec![0, 1])).is_err());
    }

    #[test]
    fn abscissae() {
        let ctx = q(2);
        let phi = LatticeFunction::exponential(ctx.one(), &[ctx.qp(-1)]);
        assert_eq!(convergence_abscissa(&phi, &ExponentVector(vec![1])).unwrap(), Abscissa::Finite(int(-1)));
        assert_eq!(convergence_abscissa(&phi, &ExponentVector(vec![0])).unwrap(), Abscissa::NegInfinity);
        let phi = LatticeFunction::exponential(ctx.one(), &[ctx.qp(1), ctx.qp(-1)]);
        assert_eq!(convergence_abscissa(&phi, &ExponentVector(vec![1, 2])).unwrap(), Abscissa::Finite(int(1)));
        let phi = LatticeFunction::exponential(ctx.one(), &[ctx.qp(1)]);
        assert_eq!(convergence_abscissa(&phi, &ExponentVector(vec![2])).unwrap(), Abscissa::Finite(rat(1, 2)));
        assert_eq!(Abscissa::Finite(int(1)).to_string(), "1");
        assert_eq!(Abscissa::NegInfinity.to_string(), "-inf");
    }

    #[test]
    fn monomial_basis_conversion() {
        let ctx = q(3);
        let phi = LatticeFunction::from_monomial(ctx.int(2), &[3, 1], &[ctx.qp(-1), UnitScalar::ONE]).unwrap();
        for x in 0..5u64 {
            for y in 0..4u64 {
                let direct = ctx.scalar(int(2 * (x * x * x * y) as i64) * crate::scalar::q_pow(3, -(x as i64)));
                assert_eq!(phi.eval(&[x, y], &ctx), direct);
            }
        }
        assert_eq!(phi.order(), 4);
    }

    #[test]
    fn json_schema() {
        let ctx = q(2);
        let text =
            r#"{"dim":2,"terms":[{"coeff":"3/2","coords":[{"k":1,"u":{"j":0,"a":-1}},{"k":0,"u":{"j":0,"a":2}}]}]}"#;
        let j: LatticeJson = serde_json::from_str(text).unwrap();
        let phi = LatticeFunction::from_json(&j, &ctx).unwrap();
        assert_eq!(phi.order(), 1);
        assert_eq!(serde_json::to_string(&phi.to_json()).unwrap(), text);
        let bad = r#"{"dim":1,"terms":[{"coeff":"1","coords":[]}]}"#;
        assert!(LatticeFunction::from_json(&serde_json::from_str(bad).unwrap(), &ctx).is_err());
    }
}
