//! Exact scalars: rationals, elements of the cyclotomic field `Q(ζ_m)`, and
//! the multiplicative subgroup `ζ_m^Z · q^Z` that every pole location lives in.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parse `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// `q^a` for an integer exponent of either sign.
pub fn q_pow(q: u64, a: i64) -> Rational {
    let base = BigInt::from(q);
    let mag = num_traits::pow(base, a.unsigned_abs() as usize);
    if a >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    }
}

pub fn euler_phi(m: u32) -> usize {
    let mut n = m;
    let mut result = m;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result as usize
}

// Dense polynomials over Q, lowest degree first. Only used for field arithmetic here.

fn trim(p: &mut Vec<Rational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn qpoly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Quotient and remainder of `a / b`, `b` nonzero.
fn qpoly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let mut b = b.to_vec();
    trim(&mut b);
    let db = b.len() - 1;
    let lead = b[db].clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut quo = vec![Rational::zero(); r.len() - db];
    for i in (db..r.len()).rev() {
        if r[i].is_zero() {
            continue;
        }
        let c = &r[i] / &lead;
        for (j, bj) in b.iter().enumerate() {
            let idx = i - db + j;
            r[idx] = &r[idx] - &c * bj;
        }
        quo[i - db] = c;
    }
    trim(&mut r);
    trim(&mut quo);
    (quo, r)
}

fn cyclotomic_uncached(m: u32) -> Vec<Rational> {
    // x^m - 1 divided by Φ_d for every proper divisor d.
    let mut p = vec![Rational::zero(); m as usize + 1];
    p[0] = -Rational::one();
    p[m as usize] = Rational::one();
    for d in 1..m {
        if m.is_multiple_of(d) {
            let (q, r) = qpoly_divrem(&p, &cyclotomic(d));
            debug_assert!(r.is_empty());
            p = q;
        }
    }
    p
}

static CYCLOTOMIC: Lazy<RwLock<HashMap<u32, Arc<Vec<Rational>>>>> = Lazy::new(|| RwLock::new(HashMap::new()));

/// The m-th cyclotomic polynomial, lowest degree first, monic of degree φ(m).
pub fn cyclotomic(m: u32) -> Arc<Vec<Rational>> {
    if let Some(p) = CYCLOTOMIC.read().unwrap().get(&m) {
        return p.clone();
    }
    let p = Arc::new(cyclotomic_uncached(m));
    CYCLOTOMIC.write().unwrap().insert(m, p.clone());
    p
}

/// An element of `Q(ζ_m)` in the power basis `1, ζ, …, ζ^{φ(m)-1}`.
///
/// Level-1 elements are plain rationals. Arithmetic between different levels
/// is a programming error and panics; user-facing entry points validate
/// levels beforehand and report [`Error::Config`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycloRational {
    m: u32,
    coeffs: Vec<Rational>,
}

impl CycloRational {
    /// Build from arbitrary power-basis coefficients; the vector is reduced
    /// modulo the cyclotomic polynomial.
    pub fn new(m: u32, coeffs: Vec<Rational>) -> Self {
        assert!(m >= 1, "cyclotomic level must be positive");
        let mut c = CycloRational { m, coeffs };
        c.reduce();
        c
    }

    pub fn zero(m: u32) -> Self {
        CycloRational { m, coeffs: vec![Rational::zero(); euler_phi(m)] }
    }

    pub fn one(m: u32) -> Self {
        Self::from_rational(m, Rational::one())
    }

    pub fn from_rational(m: u32, r: Rational) -> Self {
        let mut c = Self::zero(m);
        c.coeffs[0] = r;
        c
    }

    pub fn from_int(m: u32, n: i64) -> Self {
        Self::from_rational(m, int(n))
    }

    /// `ζ_m^j`.
    pub fn root_power(m: u32, j: i64) -> Self {
        let j = j.rem_euclid(m as i64) as usize;
        let mut v = vec![Rational::zero(); j + 1];
        v[j] = Rational::one();
        Self::new(m, v)
    }

    pub fn level(&self) -> u32 {
        self.m
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The value as a rational, if it lies in `Q`.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// Upper bound on the complex absolute value: `Σ |c_i|`.
    pub fn abs_bound(&self) -> Rational {
        self.coeffs.iter().map(|c| c.abs()).fold(Rational::zero(), |a, b| a + b)
    }

    fn reduce(&mut self) {
        let phi = euler_phi(self.m);
        if self.coeffs.len() > phi {
            if self.m == 1 {
                let s = self.coeffs.iter().fold(Rational::zero(), |a, b| a + b);
                self.coeffs = vec![s];
                return;
            }
            let modulus = cyclotomic(self.m);
            for i in (phi..self.coeffs.len()).rev() {
                if self.coeffs[i].is_zero() {
                    continue;
                }
                let c = std::mem::take(&mut self.coeffs[i]);
                for j in 0..phi {
                    if !modulus[j].is_zero() {
                        let idx = i - phi + j;
                        self.coeffs[idx] = &self.coeffs[idx] - &c * &modulus[j];
                    }
                }
            }
            self.coeffs.truncate(phi);
        }
        self.coeffs.resize(phi, Rational::zero());
    }

    fn check_level(&self, other: &Self) {
        assert_eq!(self.m, other.m, "cyclotomic level mismatch");
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CycloRational { m: self.m, coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(r) = self.as_rational() {
            return Some(Self::from_rational(self.m, r.recip()));
        }
        // Extended Euclid: s·a + t·Φ = g, g a nonzero constant since Φ is irreducible.
        let modulus = cyclotomic(self.m);
        let mut r0 = modulus.to_vec();
        let mut r1 = self.coeffs.clone();
        trim(&mut r1);
        let mut s0: Vec<Rational> = Vec::new();
        let mut s1: Vec<Rational> = vec![Rational::one()];
        while r1.len() > 1 {
            let (q, r) = qpoly_divrem(&r0, &r1);
            let qs = qpoly_mul(&q, &s1);
            let n = s0.len().max(qs.len());
            let mut s2 = vec![Rational::zero(); n];
            for (i, c) in s0.iter().enumerate() {
                s2[i] += c;
            }
            for (i, c) in qs.iter().enumerate() {
                s2[i] -= c;
            }
            trim(&mut s2);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        let g = r1[0].clone();
        let s = s1.into_iter().map(|c| c / &g).collect();
        Some(Self::new(self.m, s))
    }

    pub fn pow(&self, e: i64) -> Self {
        let mut base = if e < 0 { self.inv().expect("zero to a negative power") } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.m);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Canonical text: the rational for level 1, otherwise `[c0, c1, …]`.
    pub fn to_canonical(&self) -> String {
        if self.m == 1 {
            return self.coeffs[0].to_string();
        }
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!("[{}]", parts.join(", "))
    }

    pub fn parse_canonical(m: u32, s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let coeffs = inner.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
            if coeffs.len() != euler_phi(m) {
                return Err(Error::Parse(format!(
                    "expected {} coefficients for level {m}, got {}",
                    euler_phi(m),
                    coeffs.len()
                )));
            }
            Ok(Self::new(m, coeffs))
        } else {
            Ok(Self::from_rational(m, parse_rational(s)?))
        }
    }

    /// Coefficients as `"p/q"` strings, the JSON encoding.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }

    pub fn from_strings(m: u32, v: &[String]) -> Result<Self> {
        if v.len() != euler_phi(m) {
            return Err(Error::Parse(format!("expected {} coefficients for level {m}, got {}", euler_phi(m), v.len())));
        }
        let coeffs = v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        Ok(Self::new(m, coeffs))
    }
}

impl fmt::Debug for CycloRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_canonical())
    }
}

impl fmt::Display for CycloRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_canonical())
    }
}

impl<'a> Add<&'a CycloRational> for &'a CycloRational {
    type Output = CycloRational;
    fn add(self, rhs: &CycloRational) -> CycloRational {
        self.check_level(rhs);
        CycloRational { m: self.m, coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a CycloRational> for &'a CycloRational {
    type Output = CycloRational;
    fn sub(self, rhs: &CycloRational) -> CycloRational {
        self.check_level(rhs);
        CycloRational { m: self.m, coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl<'a> Mul<&'a CycloRational> for &'a CycloRational {
    type Output = CycloRational;
    fn mul(self, rhs: &CycloRational) -> CycloRational {
        self.check_level(rhs);
        if self.coeffs.len() == 1 {
            return CycloRational { m: self.m, coeffs: vec![&self.coeffs[0] * &rhs.coeffs[0]] };
        }
        CycloRational::new(self.m, qpoly_mul(&self.coeffs, &rhs.coeffs))
    }
}

impl Neg for &CycloRational {
    type Output = CycloRational;
    fn neg(self) -> CycloRational {
        CycloRational { m: self.m, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Add for CycloRational {
    type Output = CycloRational;
    fn add(self, rhs: CycloRational) -> CycloRational {
        &self + &rhs
    }
}

impl Sub for CycloRational {
    type Output = CycloRational;
    fn sub(self, rhs: CycloRational) -> CycloRational {
        &self - &rhs
    }
}

impl Mul for CycloRational {
    type Output = CycloRational;
    fn mul(self, rhs: CycloRational) -> CycloRational {
        &self * &rhs
    }
}

impl Neg for CycloRational {
    type Output = CycloRational;
    fn neg(self) -> CycloRational {
        -&self
    }
}

/// `ζ_m^j · q^a`. The root index is kept reduced mod `m` by the [`Ctx`] that builds it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct UnitScalar {
    #[serde(rename = "j")]
    pub root_index: u32,
    #[serde(rename = "a")]
    pub q_exponent: i64,
}

impl UnitScalar {
    pub const ONE: UnitScalar = UnitScalar { root_index: 0, q_exponent: 0 };

    pub fn is_one(&self) -> bool {
        *self == Self::ONE
    }

    /// `log_q |u|`.
    pub fn magnitude_exponent(&self) -> i64 {
        self.q_exponent
    }
}

impl fmt::Display for UnitScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z^{}*q^{}", self.root_index, self.q_exponent)
    }
}

/// The working field: residue cardinality `q` and cyclotomic level `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ctx {
    pub q: u64,
    pub m: u32,
}

impl Ctx {
    pub fn new(q: u64, m: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::Config(format!("q must be at least 2, got {q}")));
        }
        if m < 1 {
            return Err(Error::Config("cyclotomic level must be positive".into()));
        }
        Ok(Ctx { q, m })
    }

    /// Level-1 context, the common case.
    pub fn rational(q: u64) -> Self {
        Self::new(q, 1).expect("q >= 2")
    }

    pub fn ensure_same(&self, other: &Ctx) -> Result<()> {
        if self != other {
            return Err(Error::Config(format!(
                "mismatched fields: (q={}, m={}) vs (q={}, m={})",
                self.q, self.m, other.q, other.m
            )));
        }
        Ok(())
    }

    pub fn unit(&self, j: i64, a: i64) -> UnitScalar {
        UnitScalar { root_index: j.rem_euclid(self.m as i64) as u32, q_exponent: a }
    }

    /// `q^a`.
    pub fn qp(&self, a: i64) -> UnitScalar {
        self.unit(0, a)
    }

    pub fn mul(&self, x: UnitScalar, y: UnitScalar) -> UnitScalar {
        self.unit(x.root_index as i64 + y.root_index as i64, x.q_exponent + y.q_exponent)
    }

    pub fn inv(&self, x: UnitScalar) -> UnitScalar {
        self.unit(-(x.root_index as i64), -x.q_exponent)
    }

    pub fn pow(&self, x: UnitScalar, e: i64) -> UnitScalar {
        let m = self.m as i64;
        let j = ((x.root_index as i64 % m) * e.rem_euclid(m)).rem_euclid(m);
        self.unit(j, x.q_exponent * e)
    }

    pub fn embed(&self, x: UnitScalar) -> CycloRational {
        CycloRational::root_power(self.m, x.root_index as i64).scale(&q_pow(self.q, x.q_exponent))
    }

    pub fn zero(&self) -> CycloRational {
        CycloRational::zero(self.m)
    }

    pub fn one(&self) -> CycloRational {
        CycloRational::one(self.m)
    }

    pub fn scalar(&self, r: Rational) -> CycloRational {
        CycloRational::from_rational(self.m, r)
    }

    pub fn int(&self, n: i64) -> CycloRational {
        CycloRational::from_int(self.m, n)
    }

    /// Parse `z^j*q^a` (either factor may be omitted; `1` is the identity).
    pub fn parse_unit(&self, s: &str) -> Result<UnitScalar> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a unit scalar: {s:?}"));
        let (mut j, mut a) = (0i64, 0i64);
        if s == "1" {
            return Ok(UnitScalar::ONE);
        }
        for part in s.split('*') {
            let part = part.trim();
            if let Some(e) = part.strip_prefix("z^") {
                j = e.parse().map_err(|_| bad())?;
            } else if let Some(e) = part.strip_prefix("q^") {
                a = e.parse().map_err(|_| bad())?;
            } else if part == "z" {
                j = 1;
            } else if part == "q" {
                a = 1;
            } else {
                return Err(bad());
            }
        }
        Ok(self.unit(j, a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials() {
        let ints = |m: u32| -> Vec<i64> { cyclotomic(m).iter().map(|c| c.to_integer().try_into().unwrap()).collect() };
        assert_eq!(ints(1), vec![-1, 1]);
        assert_eq!(ints(2), vec![1, 1]);
        assert_eq!(ints(3), vec![1, 1, 1]);
        assert_eq!(ints(4), vec![1, 0, 1]);
        assert_eq!(ints(6), vec![1, -1, 1]);
        assert_eq!(ints(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(1), 1);
    }

    #[test]
    fn root_of_unity_has_order_m() {
        for m in [3u32, 4, 5, 8, 12] {
            let z = CycloRational::root_power(m, 1);
            assert!(z.pow(m as i64).is_one());
            assert!(!z.pow(m as i64 - 1).is_one());
            assert!(z.pow(-1).pow(-1) == z);
        }
    }

    #[test]
    fn inverse_in_cyclotomic_field() {
        let m = 5;
        let x = CycloRational::new(m, vec![int(2), int(-1), rat(1, 3), int(0)]);
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
        assert!(CycloRational::zero(m).inv().is_none());
    }

    #[test]
    fn one_minus_root_is_invertible() {
        let z = CycloRational::root_power(4, 1);
        let a = &CycloRational::one(4) - &z;
        assert!((&a * &a.inv().unwrap()).is_one());
    }

    #[test]
    fn unit_scalar_law() {
        let ctx = Ctx::new(3, 4).unwrap();
        let x = ctx.unit(3, -2);
        let y = ctx.unit(2, 5);
        let xy = ctx.mul(x, y);
        assert_eq!(xy, ctx.unit(1, 3));
        assert_eq!(ctx.embed(xy), &ctx.embed(x) * &ctx.embed(y));
        assert!(ctx.mul(x, ctx.inv(x)).is_one());
        assert_eq!(ctx.pow(x, 3), ctx.unit(9, -6));
        assert_eq!(ctx.embed(ctx.qp(-2)).as_rational().unwrap(), &rat(1, 9));
    }

    #[test]
    fn canonical_text_round_trip() {
        let x = CycloRational::new(3, vec![rat(-1, 2), int(7)]);
        assert_eq!(x.to_canonical(), "[-1/2, 7]");
        assert_eq!(CycloRational::parse_canonical(3, &x.to_canonical()).unwrap(), x);
        let r = CycloRational::from_rational(1, rat(-3, 4));
        assert_eq!(CycloRational::parse_canonical(1, "-3/4").unwrap(), r);
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn unit_parsing() {
        let ctx = Ctx::new(2, 6).unwrap();
        assert_eq!(ctx.parse_unit("z^7*q^-1").unwrap(), ctx.unit(1, -1));
        assert_eq!(ctx.parse_unit("q^2").unwrap(), ctx.qp(2));
        assert_eq!(ctx.parse_unit("1").unwrap(), UnitScalar::ONE);
        assert!(ctx.parse_unit("w^2").is_err());
        assert!(Ctx::new(1, 1).is_err());
    }
}
