//! Laurent expansion of a [`FactoredRatFun`] in `w = 1 - a0·t`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ratfun::FactoredRatFun;
use crate::scalar::{Ctx, CycloRational, Rational, UnitScalar};
use crate::series;

/// Coefficients `c_i` of `Σ_i c_i (1 - a0·t)^i` for `i` in `min_index..=max_index`.
///
/// Every index below `min_index` has coefficient zero. When the function has
/// a pole at `t = 1/a0` the stored window always reaches index `-1`, so the
/// principal part is complete.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    ctx: Ctx,
    center: UnitScalar,
    min_index: i64,
    max_index: i64,
    coeffs: Vec<CycloRational>,
}

impl LaurentSeries {
    pub fn center(&self) -> UnitScalar {
        self.center
    }

    pub fn min_index(&self) -> i64 {
        self.min_index
    }

    pub fn max_index(&self) -> i64 {
        self.max_index
    }

    pub fn coeffs(&self) -> &[CycloRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(CycloRational::is_zero)
    }

    /// Coefficient at index `i`; `None` above the stored window.
    pub fn coeff(&self, i: i64) -> Option<CycloRational> {
        if i > self.max_index {
            None
        } else if i < self.min_index {
            Some(self.ctx.zero())
        } else {
            Some(self.coeffs[(i - self.min_index) as usize].clone())
        }
    }

    /// Pole order read off the window (0 when regular).
    pub fn pole_order(&self) -> u32 {
        if self.is_zero() {
            0
        } else {
            (-self.min_index).max(0) as u32
        }
    }

    pub fn to_json(&self) -> LaurentJson {
        LaurentJson {
            q: self.ctx.q,
            m: self.ctx.m,
            center: self.center,
            min_index: self.min_index,
            max_index: self.max_index,
            coeffs: self.coeffs.iter().map(CycloRational::to_strings).collect(),
        }
    }

    pub fn from_json(j: &LaurentJson) -> Result<Self> {
        let ctx = Ctx::new(j.q, j.m)?;
        let coeffs = j.coeffs.iter().map(|c| CycloRational::from_strings(ctx.m, c)).collect::<Result<Vec<_>>>()?;
        if coeffs.len() as i64 != j.max_index - j.min_index + 1 {
            return Err(crate::Error::Parse("coefficient window length mismatch".into()));
        }
        Ok(LaurentSeries { ctx, center: j.center, min_index: j.min_index, max_index: j.max_index, coeffs })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaurentJson {
    pub q: u64,
    pub m: u32,
    pub center: UnitScalar,
    pub min_index: i64,
    pub max_index: i64,
    pub coeffs: Vec<Vec<String>>,
}

/// Expand `r` around `t = 1/a0` in powers of `w = 1 - a0·t`, up to `w^max_index`.
pub fn laurent_at(r: &FactoredRatFun, a0: UnitScalar, max_index: i64) -> Result<LaurentSeries> {
    let ctx = *r.ctx();
    let r = r.normalize();
    // t = b(1 - w) with b = 1/a0.
    let b = ctx.inv(a0);
    let bv = ctx.embed(b);

    // Numerator as an exact polynomial in w.
    let mut num_w: Vec<CycloRational> = Vec::new();
    for (e, c) in r.numerator().terms() {
        let coeff = c * &bv.pow(e as i64);
        let expansion = series::one_minus_w_pow(e as i64, e as usize + 1, &ctx);
        if num_w.len() < expansion.len() {
            num_w.resize(expansion.len(), ctx.zero());
        }
        for (i, x) in expansion.iter().enumerate() {
            num_w[i] = &num_w[i] + &(x * &coeff);
        }
    }
    let Some(order) = num_w.iter().position(|c| !c.is_zero()) else {
        let hi = max_index.max(0);
        return Ok(LaurentSeries {
            ctx,
            center: a0,
            min_index: 0,
            max_index: hi,
            coeffs: vec![ctx.zero(); (hi + 1) as usize],
        });
    };

    let mut vanishing = 0i64;
    let mut regular: Vec<(CycloRational, u32, u32)> = Vec::new();
    let mut singular: Vec<(u32, u32)> = Vec::new();
    for (u, d, e) in r.factors() {
        let c = ctx.mul(u, ctx.pow(b, d as i64));
        if c.is_one() {
            vanishing += e as i64;
            singular.push((d, e));
        } else {
            regular.push((ctx.embed(c), d, e));
        }
    }

    let min_index = order as i64 - vanishing;
    let top = if min_index < 0 { max_index.max(-1) } else { max_index.max(min_index) };
    let len = (top - min_index + 1) as usize;

    let mut acc = series::truncate(num_w[order..].to_vec(), len, &ctx);
    // t^v = b^v (1 - w)^v
    let tv = series::one_minus_w_pow(r.t_power(), len, &ctx);
    acc = series::mul(&acc, &tv, len, &ctx);
    let bpow = bv.pow(r.t_power());
    acc.iter_mut().for_each(|c| *c = &*c * &bpow);

    for (c, d, e) in regular {
        // 1 - c(1 - w)^d
        let mut f = series::one_minus_w_pow(d as i64, len.max(d as usize + 1), &ctx);
        f.iter_mut().for_each(|x| *x = -(&*x * &c));
        f[0] = &f[0] + &ctx.one();
        let inv = series::inv(&f, len, &ctx).expect("regular factor has nonzero constant term");
        acc = series::mul(&acc, &series::pow(&inv, e, len, &ctx), len, &ctx);
    }
    for (d, e) in singular {
        // 1 - (1 - w)^d = w·h(w), h(w) = Σ_{i=1}^{d} (-1)^{i+1} C(d, i) w^{i-1}
        let h: Vec<CycloRational> = (1..=d as u64)
            .map(|i| {
                let c = Rational::from_integer(series::binomial(d as u64, i));
                ctx.scalar(if i % 2 == 1 { c } else { -c })
            })
            .collect();
        let inv = series::inv(&h, len, &ctx).expect("h(0) = d is nonzero");
        acc = series::mul(&acc, &series::pow(&inv, e, len, &ctx), len, &ctx);
    }

    Ok(LaurentSeries { ctx, center: a0, min_index, max_index: top, coeffs: acc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::scalar::{int, rat};

    fn coeffs(l: &LaurentSeries) -> Vec<Rational> {
        l.coeffs().iter().map(|c| c.as_rational().unwrap().clone()).collect()
    }

    #[test]
    fn simple_pole_at_one() {
        let ctx = Ctx::rational(2);
        let f = FactoredRatFun::inverse_factor(ctx, UnitScalar::ONE, 1, 1).unwrap();
        let l = laurent_at(&f, UnitScalar::ONE, 3).unwrap();
        assert_eq!(l.min_index(), -1);
        assert_eq!(coeffs(&l), vec![int(1), int(0), int(0), int(0), int(0)]);
        assert_eq!(l.pole_order(), 1);
        assert_eq!(l.coeff(-5).unwrap(), ctx.zero());
        assert!(l.coeff(4).is_none());
    }

    #[test]
    fn regular_point_alternating() {
        let ctx = Ctx::rational(2);
        let f = FactoredRatFun::inverse_factor(ctx, ctx.qp(-1), 1, 1).unwrap().scale(&ctx.scalar(rat(1, 2)));
        let l = laurent_at(&f, UnitScalar::ONE, 4).unwrap();
        assert_eq!(l.min_index(), 0);
        assert_eq!(coeffs(&l), vec![int(1), int(-1), int(1), int(-1), int(1)]);
    }

    #[test]
    fn two_factors() {
        let ctx = Ctx::rational(2);
        let f = FactoredRatFun::from_parts(
            ctx,
            0,
            Poly::constant(ctx.one()),
            [(UnitScalar::ONE, 1, 1), (ctx.qp(-1), 1, 1)],
        )
        .unwrap();
        let l = laurent_at(&f, UnitScalar::ONE, 2).unwrap();
        assert_eq!(l.min_index(), -1);
        assert_eq!(coeffs(&l), vec![int(2), int(-2), int(2), int(-2)]);
    }

    #[test]
    fn numerator_zero_raises_min_index() {
        let ctx = Ctx::rational(3);
        // (1 - t)^2 / (1 - t^2) = (1 - t)/(1 + t): a simple zero at t = 1.
        let num = Poly::one_minus(&ctx, UnitScalar::ONE, 1).pow(2, &ctx);
        let f = FactoredRatFun::from_parts(ctx, 0, num, [(UnitScalar::ONE, 2, 1)]).unwrap();
        let l = laurent_at(&f, UnitScalar::ONE, 3).unwrap();
        assert_eq!(l.min_index(), 1);
        // w / (2 - w) = w/2 + w^2/4 + …
        assert_eq!(coeffs(&l), vec![rat(1, 2), rat(1, 4), rat(1, 8)]);
        assert_eq!(l.pole_order(), 0);
    }

    #[test]
    fn negative_t_power() {
        let ctx = Ctx::rational(2);
        // t^{-1}/(1 - t) at a0 = 1: (1-w)^{-1} w^{-1} = w^{-1} + 1 + w + …
        let f = FactoredRatFun::inverse_factor(ctx, UnitScalar::ONE, 1, 1).unwrap().shift_t(-1);
        let l = laurent_at(&f, UnitScalar::ONE, 2).unwrap();
        assert_eq!(coeffs(&l), vec![int(1); 4]);
    }

    #[test]
    fn json_round_trip() {
        let ctx = Ctx::rational(2);
        let f = FactoredRatFun::inverse_factor(ctx, UnitScalar::ONE, 2, 2).unwrap();
        let l = laurent_at(&f, UnitScalar::ONE, 2).unwrap();
        let j = serde_json::to_string(&l.to_json()).unwrap();
        let back = LaurentSeries::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, l);
    }
}
