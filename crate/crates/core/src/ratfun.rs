//! Rational functions of `t = q^{-s}` kept in factored form
//! `t^v · P(t) / Π (1 - u·t^d)^e` with every base `u` in `ζ_m^Z · q^Z`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::{Ctx, CycloRational, Rational, UnitScalar};
use crate::series;

/// The key of a denominator factor `(1 - base·t^t_degree)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DenomFactor {
    pub base: UnitScalar,
    pub t_degree: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
}

/// `t^t_power · numerator(t) / Π (1 - u·t^d)^e`.
///
/// Values are not normalized automatically; call [`FactoredRatFun::normalize`]
/// to cancel factors that divide the numerator. Equality ([`PartialEq`]) is
/// value equality decided by cross-multiplication, so two differently
/// factored representations of one function compare equal.
#[derive(Clone, Serialize, Deserialize)]
#[serde(into = "RatFunJson", try_from = "RatFunJson")]
pub struct FactoredRatFun {
    ctx: Ctx,
    t_power: i64,
    numerator: Poly,
    denom: BTreeMap<DenomFactor, u32>,
}

impl FactoredRatFun {
    pub fn zero(ctx: Ctx) -> Self {
        FactoredRatFun { ctx, t_power: 0, numerator: Poly::zero(), denom: BTreeMap::new() }
    }

    pub fn one(ctx: Ctx) -> Self {
        Self::constant(ctx, ctx.one())
    }

    pub fn constant(ctx: Ctx, c: CycloRational) -> Self {
        Self::monomial(ctx, c, 0)
    }

    /// `c·t^v`.
    pub fn monomial(ctx: Ctx, c: CycloRational, v: i64) -> Self {
        if c.is_zero() {
            return Self::zero(ctx);
        }
        FactoredRatFun { ctx, t_power: v, numerator: Poly::constant(c), denom: BTreeMap::new() }
    }

    /// `1 / (1 - u·t^d)^e`.
    pub fn inverse_factor(ctx: Ctx, u: UnitScalar, d: u32, e: u32) -> Result<Self> {
        Self::from_parts(ctx, 0, Poly::constant(ctx.one()), [(u, d, e)])
    }

    pub fn from_poly(ctx: Ctx, p: Poly) -> Self {
        let mut r = FactoredRatFun { ctx, t_power: 0, numerator: p, denom: BTreeMap::new() };
        r.canonical_zero();
        r
    }

    /// Build from raw parts. Factors are given as `(u, d, e)`; repeated
    /// `(u, d)` keys accumulate their multiplicities.
    pub fn from_parts(
        ctx: Ctx,
        t_power: i64,
        numerator: Poly,
        factors: impl IntoIterator<Item = (UnitScalar, u32, u32)>,
    ) -> Result<Self> {
        let mut denom = BTreeMap::new();
        for (u, d, e) in factors {
            if d == 0 {
                return Err(Error::Domain("denominator factor needs t-degree ≥ 1".into()));
            }
            if e == 0 {
                continue;
            }
            let u = ctx.unit(u.root_index as i64, u.q_exponent);
            *denom.entry(DenomFactor { base: u, t_degree: d }).or_insert(0) += e;
        }
        for (_, c) in numerator.terms() {
            if c.level() != ctx.m {
                return Err(Error::Config(format!(
                    "numerator coefficient at level {} in a level-{} context",
                    c.level(),
                    ctx.m
                )));
            }
        }
        let mut r = FactoredRatFun { ctx, t_power, numerator, denom };
        r.canonical_zero();
        Ok(r)
    }

    fn canonical_zero(&mut self) {
        if self.numerator.is_zero() {
            self.t_power = 0;
            self.denom.clear();
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn t_power(&self) -> i64 {
        self.t_power
    }

    pub fn numerator(&self) -> &Poly {
        &self.numerator
    }

    /// Denominator factors `(u, d, e)` in canonical order.
    pub fn factors(&self) -> impl Iterator<Item = (UnitScalar, u32, u32)> + '_ {
        self.denom.iter().map(|(k, e)| (k.base, k.t_degree, *e))
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// Largest multiplicity among the denominator factors.
    pub fn max_multiplicity(&self) -> u32 {
        self.denom.values().copied().max().unwrap_or(0)
    }

    fn factor_poly(&self, k: &DenomFactor) -> Poly {
        Poly::one_minus(&self.ctx, k.base, k.t_degree)
    }

    fn denom_poly(&self, denom: &BTreeMap<DenomFactor, u32>) -> Poly {
        let mut acc = Poly::constant(self.ctx.one());
        for (k, e) in denom {
            acc = acc.mul(&self.factor_poly(k).pow(*e, &self.ctx));
        }
        acc
    }

    /// Move powers of `t` dividing the numerator into the prefactor.
    fn pull_t(&self) -> Self {
        let mut r = self.clone();
        if let Some(low) = r.numerator.low_degree() {
            if low > 0 {
                r.numerator = r.numerator.shift_down(low);
                r.t_power += low as i64;
            }
        }
        r.canonical_zero();
        r
    }

    /// Cancel every denominator factor that divides the numerator exactly and
    /// pull powers of `t` out of the numerator.
    pub fn normalize(&self) -> Self {
        let mut r = self.pull_t();
        if r.is_zero() {
            return r;
        }
        let keys: Vec<DenomFactor> = r.denom.keys().copied().collect();
        for k in keys {
            let f = r.factor_poly(&k);
            loop {
                let e = r.denom[&k];
                if e == 0 {
                    break;
                }
                match r.numerator.div_exact(&f) {
                    Some(q) => {
                        r.numerator = q;
                        r.denom.insert(k, e - 1);
                    }
                    None => break,
                }
            }
            if r.denom[&k] == 0 {
                r.denom.remove(&k);
            }
        }
        r
    }

    /// Bring both operands over the factor-wise lcm of their denominators.
    /// Returns the two numerators, the common t-power and the common denominator.
    fn common_form(&self, other: &Self) -> (Poly, Poly, i64, BTreeMap<DenomFactor, u32>) {
        let mut lcm = self.denom.clone();
        for (k, e) in &other.denom {
            let slot = lcm.entry(*k).or_insert(0);
            *slot = (*slot).max(*e);
        }
        let v = self.t_power.min(other.t_power);
        let lift = |r: &Self| -> Poly {
            let mut missing = BTreeMap::new();
            for (k, e) in &lcm {
                let have = r.denom.get(k).copied().unwrap_or(0);
                if *e > have {
                    missing.insert(*k, *e - have);
                }
            }
            r.numerator.mul(&r.denom_poly(&missing)).shift_up((r.t_power - v) as u32)
        };
        (lift(self), lift(other), v, lcm)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.ctx.ensure_same(&other.ctx)?;
        if self.is_zero() {
            return Ok(other.normalize());
        }
        if other.is_zero() {
            return Ok(self.normalize());
        }
        let (a, b, v, denom) = self.common_form(other);
        let r = FactoredRatFun { ctx: self.ctx, t_power: v, numerator: a.add(&b), denom };
        Ok(r.normalize())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.ctx.ensure_same(&other.ctx)?;
        let mut denom = self.denom.clone();
        for (k, e) in &other.denom {
            *denom.entry(*k).or_insert(0) += e;
        }
        let mut r = FactoredRatFun {
            ctx: self.ctx,
            t_power: self.t_power + other.t_power,
            numerator: self.numerator.mul(&other.numerator),
            denom,
        };
        r.canonical_zero();
        Ok(r.normalize())
    }

    pub fn neg(&self) -> Self {
        FactoredRatFun { numerator: self.numerator.neg(), ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &CycloRational) -> Self {
        let mut r = FactoredRatFun { numerator: self.numerator.scale(c), ..self.clone() };
        r.canonical_zero();
        r
    }

    /// Multiply by `t^k`.
    pub fn shift_t(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        FactoredRatFun { t_power: self.t_power + k, ..self.clone() }
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::one(self.ctx);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Value equality by cross-multiplication of cleared forms.
    pub fn equals(&self, other: &Self) -> bool {
        if self.ctx != other.ctx {
            return false;
        }
        let (a, b, _, _) = self.common_form(other);
        a == b
    }

    /// Taylor coefficients of `t^0..=t^order`.
    pub fn series_coeffs(&self, order: usize) -> Result<Vec<CycloRational>> {
        let r = self.pull_t();
        let ctx = &r.ctx;
        if r.is_zero() {
            return Ok(vec![ctx.zero(); order + 1]);
        }
        if r.t_power < 0 {
            return Err(Error::Domain(format!("pole of order {} at t = 0", -r.t_power)));
        }
        let v = r.t_power as usize;
        let mut out = vec![ctx.zero(); order + 1];
        if v > order {
            return Ok(out);
        }
        let len = order + 1 - v;
        let mut acc = series::truncate(r.numerator.to_dense(ctx), len, ctx);
        for (k, e) in &r.denom {
            // (1 - u t^d)^{-e} = Σ_i C(e+i-1, i) u^i t^{d·i}
            let u = ctx.embed(k.base);
            let d = k.t_degree as usize;
            let mut f = vec![ctx.zero(); len];
            let mut upow = ctx.one();
            let mut i = 0usize;
            while i * d < len {
                let b = series::binomial(*e as u64 + i as u64 - 1, i as u64);
                f[i * d] = upow.scale(&Rational::from_integer(b));
                upow = &upow * &u;
                i += 1;
            }
            acc = series::mul(&acc, &f, len, ctx);
        }
        for (j, c) in acc.into_iter().enumerate() {
            out[j + v] = c;
        }
        Ok(out)
    }

    /// Order of the pole at `t = 1/a0`; zero at a regular point.
    pub fn pole_order(&self, a0: UnitScalar) -> u32 {
        let ctx = &self.ctx;
        let r = self.pull_t();
        if r.is_zero() {
            return 0;
        }
        // (1 - u t^d) has a simple zero at 1/a0 exactly when u·a0^{-d} = 1.
        let vanishing: u32 = r
            .denom
            .iter()
            .filter(|(k, _)| ctx.mul(k.base, ctx.pow(a0, -(k.t_degree as i64))).is_one())
            .map(|(_, e)| *e)
            .sum();
        if vanishing == 0 {
            return 0;
        }
        let root = ctx.embed(ctx.inv(a0));
        let mut num = r.numerator.clone();
        let mut zeros = 0;
        while zeros < vanishing {
            let (quo, value) = num.synthetic_div(&root, ctx);
            if !value.is_zero() {
                break;
            }
            num = quo;
            zeros += 1;
        }
        vanishing - zeros
    }

    /// Substitute `t ↦ c·t`.
    pub fn rescale_t(&self, c: UnitScalar) -> Self {
        let ctx = &self.ctx;
        let cv = ctx.embed(c);
        let numerator = self.numerator.substitute_scaled(&cv).scale(&cv.pow(self.t_power));
        let denom = self
            .denom
            .iter()
            .map(|(k, e)| {
                let base = ctx.mul(k.base, ctx.pow(c, k.t_degree as i64));
                (DenomFactor { base, t_degree: k.t_degree }, *e)
            })
            .collect();
        let mut r = FactoredRatFun { ctx: *ctx, t_power: self.t_power, numerator, denom };
        r.canonical_zero();
        r
    }

    /// Exact value at a point of the working field.
    pub fn evaluate(&self, t: &CycloRational) -> Result<CycloRational> {
        let r = self.normalize();
        let ctx = &r.ctx;
        if r.is_zero() {
            return Ok(ctx.zero());
        }
        if t.is_zero() {
            return match r.t_power {
                v if v < 0 => Err(Error::Domain("pole at t = 0".into())),
                0 => Ok(r.denom_free_value_at_zero()),
                _ => Ok(ctx.zero()),
            };
        }
        let mut den = ctx.one();
        for (k, e) in &r.denom {
            let f = r.factor_poly(k).eval(t, ctx);
            if f.is_zero() {
                return Err(Error::Domain(format!("pole at t = {t}")));
            }
            den = &den * &f.pow(*e as i64);
        }
        let num = &r.numerator.eval(t, ctx) * &t.pow(r.t_power);
        Ok(&num * &den.inv().expect("checked nonzero"))
    }

    fn denom_free_value_at_zero(&self) -> CycloRational {
        self.numerator.coeff(0).cloned().unwrap_or_else(|| self.ctx.zero())
    }

    /// Canonical text `t^v * (num) / (1 - u*t^d)^e * …`.
    pub fn to_text(&self) -> String {
        let num = if self.numerator.is_zero() {
            "0".to_string()
        } else {
            self.numerator.terms().map(|(e, c)| format!("{}*t^{}", c.to_canonical(), e)).collect::<Vec<_>>().join(" + ")
        };
        let den = if self.denom.is_empty() {
            "1".to_string()
        } else {
            self.denom
                .iter()
                .map(|(k, e)| format!("(1 - {}*t^{})^{}", k.base, k.t_degree, e))
                .collect::<Vec<_>>()
                .join(" * ")
        };
        format!("t^{} * ({}) / {}", self.t_power, num, den)
    }

    pub fn parse_text(ctx: Ctx, s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("{why} in {s:?}"));
        let rest = s.trim().strip_prefix("t^").ok_or_else(|| bad("missing t^ prefix"))?;
        let (v, rest) = rest.split_once(" * (").ok_or_else(|| bad("missing numerator"))?;
        let t_power: i64 = v.parse().map_err(|_| bad("bad t-power"))?;
        let (num, den) = rest.split_once(") / ").ok_or_else(|| bad("missing denominator"))?;
        let mut numerator = Poly::zero();
        if num != "0" {
            for term in num.split(" + ") {
                let (c, e) = term.rsplit_once("*t^").ok_or_else(|| bad("bad numerator term"))?;
                let e: u32 = e.parse().map_err(|_| bad("bad exponent"))?;
                numerator.add_term(e, CycloRational::parse_canonical(ctx.m, c)?);
            }
        }
        let mut factors = Vec::new();
        if den != "1" {
            for f in den.split(" * ") {
                let inner = f.strip_prefix("(1 - ").ok_or_else(|| bad("bad factor"))?;
                let (body, e) = inner.rsplit_once(")^").ok_or_else(|| bad("bad factor"))?;
                let (u, d) = body.rsplit_once("*t^").ok_or_else(|| bad("bad factor"))?;
                let u = ctx.parse_unit(u)?;
                let d: u32 = d.parse().map_err(|_| bad("bad factor degree"))?;
                let e: u32 = e.parse().map_err(|_| bad("bad multiplicity"))?;
                if e == 0 {
                    return Err(bad("zero multiplicity"));
                }
                factors.push((u, d, e));
            }
        }
        Self::from_parts(ctx, t_power, numerator, factors)
    }
}

pub fn ratfun_arith(lhs: &FactoredRatFun, rhs: &FactoredRatFun, op: ArithOp) -> Result<FactoredRatFun> {
    match op {
        ArithOp::Add => lhs.add(rhs),
        ArithOp::Mul => lhs.mul(rhs),
    }
}

impl PartialEq for FactoredRatFun {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl fmt::Display for FactoredRatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for FactoredRatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[q={}, m={}] {}", self.ctx.q, self.ctx.m, self.to_text())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: u32,
    coeff: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct FactorJson {
    u: UnitScalar,
    d: u32,
    e: u32,
}

#[derive(Serialize, Deserialize)]
struct RatFunJson {
    q: u64,
    m: u32,
    t_power: i64,
    numerator: Vec<TermJson>,
    denominator: Vec<FactorJson>,
}

impl From<FactoredRatFun> for RatFunJson {
    fn from(r: FactoredRatFun) -> Self {
        RatFunJson {
            q: r.ctx.q,
            m: r.ctx.m,
            t_power: r.t_power,
            numerator: r.numerator.terms().map(|(exp, c)| TermJson { exp, coeff: c.to_strings() }).collect(),
            denominator: r.factors().map(|(u, d, e)| FactorJson { u, d, e }).collect(),
        }
    }
}

impl TryFrom<RatFunJson> for FactoredRatFun {
    type Error = Error;
    fn try_from(j: RatFunJson) -> Result<Self> {
        let ctx = Ctx::new(j.q, j.m)?;
        let mut numerator = Poly::zero();
        for t in j.numerator {
            numerator.add_term(t.exp, CycloRational::from_strings(ctx.m, &t.coeff)?);
        }
        if j.denominator.iter().any(|f| f.e == 0) {
            return Err(Error::Parse("zero multiplicity in denominator".into()));
        }
        let factors = j.denominator.into_iter().map(|f| (f.u, f.d, f.e));
        FactoredRatFun::from_parts(ctx, j.t_power, numerator, factors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn q2() -> Ctx {
        Ctx::rational(2)
    }

    fn r(ctx: Ctx, x: Rational) -> CycloRational {
        ctx.scalar(x)
    }

    /// `c / Π (1 - q^a t^d)^e` with level-1 bases.
    fn simple(ctx: Ctx, c: Rational, factors: &[(i64, u32, u32)]) -> FactoredRatFun {
        FactoredRatFun::from_parts(
            ctx,
            0,
            Poly::constant(r(ctx, c)),
            factors.iter().map(|&(a, d, e)| (ctx.qp(a), d, e)),
        )
        .unwrap()
    }

    fn rationals(v: &[CycloRational]) -> Vec<Rational> {
        v.iter().map(|c| c.as_rational().unwrap().clone()).collect()
    }

    #[test]
    fn telescoping_sum_is_one() {
        let ctx = q2();
        let a = simple(ctx, int(1), &[(0, 1, 1)]);
        let b = a.shift_t(1).neg();
        let s = ratfun_arith(&a, &b, ArithOp::Add).unwrap();
        assert_eq!(s.factors().count(), 0);
        assert_eq!(s.to_text(), "t^0 * (1*t^0) / 1");
    }

    #[test]
    fn product_merges_multiplicities() {
        let ctx = q2();
        let a = simple(ctx, int(1), &[(0, 1, 1)]);
        let p = ratfun_arith(&a, &a, ArithOp::Mul).unwrap();
        assert_eq!(p.factors().collect::<Vec<_>>(), vec![(UnitScalar::ONE, 1, 2)]);
    }

    #[test]
    fn sum_over_distinct_factors() {
        let ctx = q2();
        let a = simple(ctx, int(1), &[(-1, 1, 1)]);
        let b = simple(ctx, int(1), &[(0, 1, 1)]);
        let s = a.add(&b).unwrap();
        let expected = FactoredRatFun::from_parts(
            ctx,
            0,
            Poly::from_dense(vec![ctx.int(2), r(ctx, rat(-3, 2))]),
            [(ctx.qp(-1), 1, 1), (ctx.qp(0), 1, 1)],
        )
        .unwrap();
        assert_eq!(s.to_text(), expected.to_text());
        // Hand-check against the separately expanded geometric series.
        let lhs = rationals(&s.series_coeffs(10).unwrap());
        let rhs: Vec<Rational> = (0..=10).map(|j| rat(1, 1 << j) + int(1)).collect();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn series_examples() {
        let ctx = q2();
        let geo = simple(ctx, int(1), &[(0, 1, 1)]);
        assert_eq!(rationals(&geo.series_coeffs(3).unwrap()), vec![int(1); 4]);
        let d = simple(ctx, int(1), &[(0, 1, 2)]).shift_t(1);
        assert_eq!(rationals(&d.series_coeffs(4).unwrap()), (0..5).map(int).collect::<Vec<_>>());
        let h = simple(ctx, rat(1, 2), &[(-1, 1, 1)]);
        assert_eq!(rationals(&h.series_coeffs(2).unwrap()), vec![rat(1, 2), rat(1, 4), rat(1, 8)]);
        let pole = geo.shift_t(-1);
        assert!(matches!(pole.series_coeffs(3), Err(Error::Domain(_))));
        // t^{-1} · t(1+t) has no pole once the t is pulled out.
        let fine =
            FactoredRatFun::from_parts(ctx, -1, Poly::from_dense(vec![ctx.zero(), ctx.one(), ctx.one()]), []).unwrap();
        assert_eq!(rationals(&fine.series_coeffs(2).unwrap()), vec![int(1), int(1), int(0)]);
    }

    #[test]
    fn series_of_single_factor_matches_closed_form() {
        let ctx = Ctx::rational(3);
        let u = ctx.qp(-1);
        let f = FactoredRatFun::inverse_factor(ctx, u, 3, 1).unwrap();
        let s = f.series_coeffs(12).unwrap();
        for (j, c) in s.iter().enumerate() {
            let expected = if j % 3 == 0 { ctx.embed(ctx.pow(u, j as i64 / 3)) } else { ctx.zero() };
            assert_eq!(c, &expected, "coefficient {j}");
        }
    }

    #[test]
    fn pole_orders() {
        let ctx = q2();
        let one = UnitScalar::ONE;
        let f =
            FactoredRatFun::from_parts(ctx, 0, Poly::from_dense(vec![ctx.one(), ctx.one()]), [(one, 1, 3)]).unwrap();
        assert_eq!(f.pole_order(one), 3);
        let g = simple(ctx, int(1), &[(-1, 1, 1)]);
        assert_eq!(g.pole_order(one), 0);
        assert_eq!(g.pole_order(ctx.qp(-1)), 1);
        let h = FactoredRatFun::from_parts(ctx, 0, Poly::one_minus(&ctx, one, 1), [(one, 1, 2)]).unwrap();
        assert_eq!(h.pole_order(one), 1);
        assert_eq!(h.normalize().factors().collect::<Vec<_>>(), vec![(one, 1, 1)]);
        // (1 - t^2) vanishes at t = 1 and t = -1.
        let sq = simple(ctx, int(1), &[(0, 2, 1)]);
        assert_eq!(sq.pole_order(one), 1);
        let num = Poly::from_dense(vec![ctx.int(-1), ctx.zero(), ctx.one()]);
        let gone = FactoredRatFun::from_parts(ctx, 0, num, [(one, 1, 1)]).unwrap();
        assert_eq!(gone.pole_order(one), 0);
    }

    #[test]
    fn pole_at_root_of_unity() {
        let ctx = Ctx::new(2, 4).unwrap();
        let z = ctx.unit(1, 0);
        let f = FactoredRatFun::inverse_factor(ctx, z, 1, 2).unwrap();
        assert_eq!(f.pole_order(z), 2);
        assert_eq!(f.pole_order(UnitScalar::ONE), 0);
        // 1 - t^4 vanishes at every fourth root of unity.
        let g = FactoredRatFun::inverse_factor(ctx, UnitScalar::ONE, 4, 1).unwrap();
        for j in 0..4 {
            assert_eq!(g.pole_order(ctx.unit(j, 0)), 1);
        }
    }

    #[test]
    fn rescaling_examples() {
        let ctx = q2();
        let geo = simple(ctx, int(1), &[(0, 1, 1)]);
        assert_eq!(geo.rescale_t(ctx.qp(-1)).to_text(), simple(ctx, int(1), &[(-1, 1, 1)]).to_text());
        let ctx3 = Ctx::rational(3);
        let t2 = FactoredRatFun::monomial(ctx3, ctx3.one(), 2);
        assert_eq!(t2.rescale_t(ctx3.qp(1)), FactoredRatFun::monomial(ctx3, ctx3.int(9), 2));
        let a = simple(ctx, rat(1, 2), &[(0, 1, 1), (-1, 1, 1)]);
        let b = simple(ctx, rat(1, 2), &[(-1, 1, 1), (-2, 1, 1)]);
        let scaled = a.rescale_t(ctx.qp(-1));
        assert_eq!(scaled, b);
        assert_eq!(scaled.series_coeffs(8).unwrap(), b.series_coeffs(8).unwrap());
    }

    #[test]
    fn evaluation() {
        let ctx = q2();
        let f = simple(ctx, int(1), &[(0, 1, 1)]);
        assert_eq!(f.evaluate(&r(ctx, rat(1, 3))).unwrap(), r(ctx, rat(3, 2)));
        assert!(matches!(f.evaluate(&ctx.one()), Err(Error::Domain(_))));
        assert!(matches!(f.shift_t(-2).evaluate(&ctx.zero()), Err(Error::Domain(_))));
        assert_eq!(f.evaluate(&ctx.zero()).unwrap(), ctx.one());
    }

    #[test]
    fn mismatched_contexts_are_config_errors() {
        let a = FactoredRatFun::one(Ctx::rational(2));
        let b = FactoredRatFun::one(Ctx::rational(3));
        assert!(matches!(a.add(&b), Err(Error::Config(_))));
        assert!(matches!(ratfun_arith(&a, &b, ArithOp::Mul), Err(Error::Config(_))));
    }

    #[test]
    fn text_and_json_forms() {
        let ctx = Ctx::new(2, 3).unwrap();
        let num = Poly::from_dense(vec![CycloRational::new(3, vec![rat(1, 2), int(-1)]), ctx.zero(), ctx.int(-3)]);
        let f = FactoredRatFun::from_parts(ctx, -1, num, [(ctx.unit(2, -1), 1, 2), (ctx.qp(0), 3, 1)]).unwrap();
        let text = f.to_text();
        assert_eq!(text, "t^-1 * ([1/2, -1]*t^0 + [-3, 0]*t^2) / (1 - z^0*q^0*t^3)^1 * (1 - z^2*q^-1*t^1)^2");
        let back = FactoredRatFun::parse_text(ctx, &text).unwrap();
        assert_eq!(back.to_text(), text);
        let json = serde_json::to_string(&f).unwrap();
        let from_json: FactoredRatFun = serde_json::from_str(&json).unwrap();
        assert_eq!(serde_json::to_string(&from_json).unwrap(), json);
        assert_eq!(from_json.to_text(), text);
        let zero = FactoredRatFun::zero(ctx);
        assert_eq!(zero.to_text(), "t^0 * (0) / 1");
        assert!(FactoredRatFun::parse_text(ctx, &zero.to_text()).unwrap().is_zero());
        assert!(FactoredRatFun::parse_text(ctx, "t^0 * (1*t^0) / (1 - q^0*t^1)^0").is_err());
    }
}
