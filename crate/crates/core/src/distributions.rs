//! Laurent coefficients of the determinant zeta integral
//! `Z_r(φ, s) = ∫ φ(x)·|det x|^{s + r - n} dx` on `M_n(R)`, for `φ` in the
//! span of the dilation indicators `1_{π^a M_n(R)}`.

use std::fmt;

use crate::error::{Error, Result};
use crate::laurent::{laurent_at, LaurentSeries};
use crate::poly::Poly;
use crate::ratfun::FactoredRatFun;
use crate::scalar::{Ctx, CycloRational, UnitScalar};

/// `∫_{M_n(R)} |det x|^s dx = Π_{i=1}^n (1 - q^{-i}) / (1 - q^{-i}·t)`.
pub fn igusa_det_product(ctx: &Ctx, n: u32) -> Result<FactoredRatFun> {
    let mut num = ctx.one();
    for i in 1..=n as i64 {
        num = &num * &(&ctx.one() - &ctx.embed(ctx.qp(-i)));
    }
    FactoredRatFun::from_parts(*ctx, 0, Poly::constant(num), (1..=n as i64).map(|i| (ctx.qp(-i), 1, 1)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZetaFamily {
    pub n: u32,
    pub r: i64,
    pub ctx: Ctx,
    /// `Z_r(1_{M_n(R)}, s)`.
    pub base: FactoredRatFun,
}

/// The twist `|det|^{r-n}` is the substitution `t ↦ q^{n-r}·t`.
pub fn zeta_family_build(n: u32, r: i64, q: u64) -> Result<ZetaFamily> {
    if n == 0 {
        return Err(Error::Precondition("matrix size must be positive".into()));
    }
    let ctx = Ctx::new(q, 1)?;
    let base = igusa_det_product(&ctx, n)?.rescale_t(ctx.qp(n as i64 - r));
    Ok(ZetaFamily { n, r, ctx, base })
}

impl ZetaFamily {
    /// `x ↦ π^a x` scales Haar measure by `q^{-a n²}` and `|det|` by `q^{-a n}`, so
    /// `Z_r(1_{π^a M_n(R)}) = (q^{-r}·t)^{a n}·Z_r(1_{M_n(R)})`.
    pub fn zeta(&self, phi: &TestFunction) -> Result<FactoredRatFun> {
        let ctx = &self.ctx;
        let mut acc = FactoredRatFun::zero(*ctx);
        for (c, a) in &phi.terms {
            let an = *a as i64 * self.n as i64;
            let scale = c * &ctx.embed(ctx.qp(-self.r * an));
            acc = acc.add(&self.base.scale(&scale).shift_t(an))?;
        }
        Ok(acc)
    }

    /// `i₀ = -(pole order at t = 1/a0)`.
    pub fn lowest_index(&self, a0: UnitScalar) -> i64 {
        -(self.base.pole_order(a0) as i64)
    }
}

/// Finite combination `Σ c_k·1_{π^{a_k} M_n(R)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestFunction {
    pub terms: Vec<(CycloRational, u32)>,
}

impl TestFunction {
    pub fn dilate(ctx: &Ctx, a: u32) -> Self {
        TestFunction { terms: vec![(ctx.one(), a)] }
    }

    /// Parse `D0`, `3*D2`, `1/2*D1 + -1*D0`, ...
    pub fn parse(ctx: &Ctx, s: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for part in s.split('+').map(str::trim) {
            let (coeff, sym) = match part.rsplit_once('*') {
                Some((c, d)) => (CycloRational::parse_canonical(ctx.m, c.trim())?, d.trim()),
                None => (ctx.one(), part),
            };
            let a = sym
                .strip_prefix('D')
                .and_then(|x| x.parse::<u32>().ok())
                .ok_or_else(|| Error::Parse(format!("expected D<a>, got {sym:?}")))?;
            terms.push((coeff, a));
        }
        Ok(TestFunction { terms })
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if c.is_one() {
                write!(f, "D{a}")?;
            } else {
                write!(f, "{}*D{a}", c.to_canonical())?;
            }
        }
        Ok(())
    }
}

/// Effect of `(g₁, g₂)` on the zeta integral: `Z ↦ c·t^v·Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupElementAction {
    pub v: i64,
    pub c: UnitScalar,
}

impl GroupElementAction {
    pub fn compose(&self, other: &Self, ctx: &Ctx) -> Self {
        GroupElementAction { v: self.v + other.v, c: ctx.mul(self.c, other.c) }
    }

    pub fn apply(&self, z: &FactoredRatFun) -> FactoredRatFun {
        z.scale(&z.ctx().embed(self.c)).shift_t(self.v)
    }

    /// `(1 - g)·z`.
    pub fn one_minus(&self, z: &FactoredRatFun) -> Result<FactoredRatFun> {
        z.sub(&self.apply(z))
    }
}

pub fn laurent_table(f: &ZetaFamily, phi: &TestFunction, a0: UnitScalar, max_index: i64) -> Result<LaurentSeries> {
    laurent_at(&f.zeta(phi)?, a0, max_index)
}

#[derive(Clone, Debug)]
pub struct RecurrenceEntry {
    pub phi: String,
    pub index: i64,
    /// Index-`i` coefficient of `(1 - g)·Z(φ)`.
    pub lhs: CycloRational,
    /// Index-`(i-1)` coefficient of `Z(φ)`.
    pub rhs: CycloRational,
}

impl RecurrenceEntry {
    pub fn passed(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[derive(Clone, Debug)]
pub struct RecurrenceReport {
    pub entries: Vec<RecurrenceEntry>,
}

impl RecurrenceReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(RecurrenceEntry::passed)
    }
}

/// `(1 - g)·Z_i = Z_{i-1}` for `g` acting by `a0·t`.
pub fn action_recurrence_check(
    f: &ZetaFamily,
    g: &GroupElementAction,
    a0: UnitScalar,
    phis: &[TestFunction],
    indices: std::ops::RangeInclusive<i64>,
) -> Result<RecurrenceReport> {
    // (1 - c t^v) = (1 - (a0 t)^v) is a pure shift in w = 1 - a0 t only for v = 1.
    if g.v != 1 || g.c != a0 {
        return Err(Error::Precondition(format!(
            "action must be c·t with c = a0 = {a0}; got c = {}, v = {}",
            g.c, g.v
        )));
    }
    let hi = *indices.end();
    let mut entries = Vec::new();
    for phi in phis {
        let z = f.zeta(phi)?;
        let before = laurent_at(&z, a0, hi)?;
        let after = laurent_at(&g.one_minus(&z)?, a0, hi)?;
        for i in indices.clone() {
            entries.push(RecurrenceEntry {
                phi: phi.to_string(),
                index: i,
                lhs: after.coeff(i).expect("inside window"),
                rhs: before.coeff(i - 1).expect("inside window"),
            });
        }
    }
    Ok(RecurrenceReport { entries })
}

/// Least `j` such that `(1 - g)^{j+1}` kills the index-`i` coefficient on
/// `Dilate(0..=n+1)`, where `g` acts by `a0·t`.
pub fn invariance_order_check(f: &ZetaFamily, a0: UnitScalar, i: i64) -> Result<u32> {
    let i0 = f.lowest_index(a0);
    if i < i0 {
        return Err(Error::Precondition(format!("index {i} is below i0 = {i0}")));
    }
    let g = GroupElementAction { v: 1, c: a0 };
    let class: Vec<_> = (0..=f.n + 1).map(|a| TestFunction::dilate(&f.ctx, a)).collect();
    let zs = class.iter().map(|phi| f.zeta(phi)).collect::<Result<Vec<_>>>()?;
    let mut current = zs;
    for j in 0.. {
        current = current.iter().map(|z| g.one_minus(z)).collect::<Result<Vec<_>>>()?;
        let mut killed = true;
        for z in &current {
            if !laurent_at(z, a0, i)?.coeff(i).expect("inside window").is_zero() {
                killed = false;
                break;
            }
        }
        if killed {
            return Ok(j);
        }
        if j as i64 > i - i0 + 64 {
            break;
        }
    }
    Err(Error::Inconclusive(format!("index {i} not annihilated")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn pole_one(f: &ZetaFamily) -> u32 {
        f.base.pole_order(UnitScalar::ONE)
    }

    #[test]
    fn family_examples() {
        let f = zeta_family_build(1, 0, 2).unwrap();
        let ctx = f.ctx;
        let expect = FactoredRatFun::inverse_factor(ctx, UnitScalar::ONE, 1, 1).unwrap().scale(&ctx.scalar(rat(1, 2)));
        assert_eq!(f.base, expect);
        assert_eq!(pole_one(&f), 1);

        let f = zeta_family_build(2, 0, 2).unwrap();
        let expect = FactoredRatFun::from_parts(
            ctx,
            0,
            Poly::constant(ctx.scalar(rat(3, 8))),
            [(ctx.qp(1), 1, 1), (UnitScalar::ONE, 1, 1)],
        )
        .unwrap();
        assert_eq!(f.base, expect);

        let f = zeta_family_build(1, 1, 2).unwrap();
        let expect = FactoredRatFun::inverse_factor(ctx, ctx.qp(-1), 1, 1).unwrap().scale(&ctx.scalar(rat(1, 2)));
        assert_eq!(f.base, expect);
        assert_eq!(pole_one(&f), 0);
    }

    #[test]
    fn tables() {
        let f = zeta_family_build(1, 0, 2).unwrap();
        let ctx = f.ctx;
        let l = laurent_table(&f, &TestFunction::dilate(&ctx, 0), UnitScalar::ONE, 3).unwrap();
        assert_eq!(l.coeff(-1), Some(ctx.scalar(rat(1, 2))));
        assert!((0..=3).all(|i| l.coeff(i).unwrap().is_zero()));

        let l = laurent_table(&f, &TestFunction::dilate(&ctx, 1), UnitScalar::ONE, 3).unwrap();
        assert_eq!(l.coeff(-1), Some(ctx.scalar(rat(1, 2))));
        assert_eq!(l.coeff(0), Some(ctx.scalar(rat(-1, 2))));
        assert!((1..=3).all(|i| l.coeff(i).unwrap().is_zero()));

        let f = zeta_family_build(1, 1, 2).unwrap();
        let l = laurent_table(&f, &TestFunction::dilate(&ctx, 0), UnitScalar::ONE, 4).unwrap();
        let got: Vec<_> = (-1..=4).map(|i| l.coeff(i).unwrap()).collect();
        let want: Vec<_> = [0, 1, -1, 1, -1, 1].iter().map(|&x| ctx.int(x)).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn twisted_dilation_matches_substitution() {
        // Z_r(1_{πM}) for n = 1 directly: Σ_{j≥1} (1 - 1/q) q^{-j}·q^{-j(r-1)}·t^j.
        let f = zeta_family_build(1, 2, 3).unwrap();
        let ctx = f.ctx;
        let z = f.zeta(&TestFunction::dilate(&ctx, 1)).unwrap();
        let series = z.series_coeffs(6).unwrap();
        for (j, c) in series.iter().enumerate() {
            let expect =
                if j == 0 { ctx.zero() } else { ctx.scalar(rat(2, 3)).scale(&crate::scalar::q_pow(3, -2 * j as i64)) };
            assert_eq!(c, &expect, "j = {j}");
        }
    }

    #[test]
    fn recurrence_examples() {
        for n in [1, 2] {
            let f = zeta_family_build(n, 0, 2).unwrap();
            let ctx = f.ctx;
            let g = GroupElementAction { v: 1, c: UnitScalar::ONE };
            let phis = vec![TestFunction::dilate(&ctx, 0)];
            let rep = action_recurrence_check(&f, &g, UnitScalar::ONE, &phis, -1..=3).unwrap();
            assert!(rep.passed());
            assert_eq!(rep.entries.len(), 5);
            if n == 1 {
                assert_eq!(rep.entries[1].lhs, ctx.scalar(rat(1, 2)));
            }
        }
        let f = zeta_family_build(1, 0, 2).unwrap();
        let bad = GroupElementAction { v: 2, c: UnitScalar::ONE };
        assert!(matches!(action_recurrence_check(&f, &bad, UnitScalar::ONE, &[], 0..=1), Err(Error::Precondition(_))));
    }

    #[test]
    fn double_application_clears_simple_pole() {
        let f = zeta_family_build(1, 0, 2).unwrap();
        let g = GroupElementAction { v: 1, c: UnitScalar::ONE };
        let z = f.zeta(&TestFunction::dilate(&f.ctx, 0)).unwrap();
        let twice = g.one_minus(&g.one_minus(&z).unwrap()).unwrap();
        assert!(laurent_at(&twice, UnitScalar::ONE, 0).unwrap().coeff(0).unwrap().is_zero());
    }

    #[test]
    fn invariance_orders() {
        let f = zeta_family_build(2, 1, 2).unwrap();
        assert_eq!(invariance_order_check(&f, UnitScalar::ONE, -1).unwrap(), 0);
        assert_eq!(invariance_order_check(&f, UnitScalar::ONE, 0).unwrap(), 1);
        assert!(invariance_order_check(&f, UnitScalar::ONE, -2).is_err());
        let f = zeta_family_build(2, 3, 2).unwrap();
        assert_eq!(invariance_order_check(&f, UnitScalar::ONE, 0).unwrap(), 0);
    }

    #[test]
    fn test_function_text() {
        let ctx = Ctx::rational(2);
        let phi = TestFunction::parse(&ctx, "1/2*D1 + D0").unwrap();
        assert_eq!(phi.terms, vec![(ctx.scalar(rat(1, 2)), 1), (ctx.one(), 0)]);
        assert_eq!(phi.to_string(), "1/2*D1 + D0");
        assert!(TestFunction::parse(&ctx, "E1").is_err());
    }
}
