use igusa_core::scalar::rat;
use igusa_core::{laurent_at, ratfun_arith, ArithOp, Ctx, CycloRational, FactoredRatFun, Poly, UnitScalar};
use proptest::prelude::*;

#[derive(Clone, Debug)]
struct Shape {
    q: u64,
    m: u32,
    t_power: i64,
    num: Vec<(i64, i64, i64)>,
    factors: Vec<(i64, i64, u32, u32)>,
}

fn shape(min_t_power: i64) -> impl Strategy<Value = Shape> {
    (
        2u64..=3,
        prop::sample::select(vec![1u32, 2, 3, 4]),
        min_t_power..=2,
        prop::collection::vec((-5i64..=5, 1i64..=4, 0i64..4), 1..4),
        prop::collection::vec((0i64..4, -2i64..=2, 1u32..=3, 1u32..=2), 0..3),
    )
        .prop_map(|(q, m, t_power, num, factors)| Shape { q, m, t_power, num, factors })
}

fn ctx_of(s: &Shape) -> Ctx {
    Ctx::new(s.q, s.m).unwrap()
}

fn build(ctx: &Ctx, s: &Shape) -> FactoredRatFun {
    let coeffs = s.num.iter().map(|&(n, d, j)| &ctx.scalar(rat(n, d)) * &ctx.embed(ctx.unit(j, 0))).collect();
    let factors = s.factors.iter().map(|&(j, a, d, e)| (ctx.unit(j, a), d, e));
    FactoredRatFun::from_parts(*ctx, s.t_power, Poly::from_dense(coeffs), factors).unwrap()
}

/// Same shape as `b` but at the context of `a`.
fn pair(a: &Shape, b: &Shape) -> (Ctx, FactoredRatFun, FactoredRatFun) {
    let ctx = ctx_of(a);
    (ctx, build(&ctx, a), build(&ctx, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn doubling_doubles_series(s in shape(0)) {
        let ctx = ctx_of(&s);
        let r = build(&ctx, &s);
        let twice = ratfun_arith(&r, &r, ArithOp::Add).unwrap();
        let a = twice.series_coeffs(12).unwrap();
        let b = r.series_coeffs(12).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x, &(y + y));
        }
    }

    #[test]
    fn ring_laws(a in shape(-2), b in shape(-2), c in shape(-2)) {
        let ctx = ctx_of(&a);
        let (x, y, z) = (build(&ctx, &a), build(&ctx, &b), build(&ctx, &c));
        prop_assert_eq!(x.add(&y).unwrap(), y.add(&x).unwrap());
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
        prop_assert_eq!(x.add(&y).unwrap().add(&z).unwrap(), x.add(&y.add(&z).unwrap()).unwrap());
        let lhs = x.mul(&y.add(&z).unwrap()).unwrap();
        let rhs = x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(x.sub(&x).unwrap().is_zero());
    }

    #[test]
    fn series_of_product(a in shape(0), b in shape(0)) {
        let (ctx, x, y) = pair(&a, &b);
        let p = x.mul(&y).unwrap().series_coeffs(10).unwrap();
        let (sx, sy) = (x.series_coeffs(10).unwrap(), y.series_coeffs(10).unwrap());
        for j in 0..10 {
            let mut acc = ctx.zero();
            for i in 0..=j {
                acc = &acc + &(&sx[i] * &sy[j - i]);
            }
            prop_assert_eq!(&p[j], &acc);
        }
    }

    #[test]
    fn pole_orders_add(a in shape(-1), b in shape(-1), j in 0i64..4, e1 in 0u32..3, e2 in 0u32..3, a_exp in -1i64..=1) {
        let (ctx, x, y) = pair(&a, &b);
        let a0 = ctx.unit(j, a_exp);
        let root = ctx.embed(ctx.inv(a0));
        let regular = |r: &FactoredRatFun| !r.normalize().numerator().eval(&root, &ctx).is_zero();
        prop_assume!(regular(&x) && regular(&y));
        let x = x.mul(&FactoredRatFun::inverse_factor(ctx, a0, 1, e1).unwrap()).unwrap();
        let y = y.mul(&FactoredRatFun::inverse_factor(ctx, a0, 1, e2).unwrap()).unwrap();
        let px = x.pole_order(a0);
        let py = y.pole_order(a0);
        prop_assert!(px >= e1 && py >= e2);
        prop_assert_eq!(x.mul(&y).unwrap().pole_order(a0), px + py);
    }

    #[test]
    fn rescale_round_trip(s in shape(-2), j in 0i64..4, a in -2i64..=2) {
        let ctx = ctx_of(&s);
        let r = build(&ctx, &s);
        let c = ctx.unit(j, a);
        prop_assert_eq!(r.rescale_t(c).rescale_t(ctx.inv(c)), r);
    }

    #[test]
    fn geometric_factor_series(q in 2u64..=3, j in 0i64..3, a in -2i64..=2, d in 1u32..=4) {
        let ctx = Ctx::new(q, 3).unwrap();
        let u = ctx.unit(j, a);
        let s = FactoredRatFun::inverse_factor(ctx, u, d, 1).unwrap().series_coeffs(16).unwrap();
        for (i, c) in s.iter().enumerate() {
            let want = if i % d as usize == 0 { ctx.embed(ctx.pow(u, (i / d as usize) as i64)) } else { ctx.zero() };
            prop_assert_eq!(c, &want);
        }
    }

    #[test]
    fn laurent_shift_law(s in shape(-1), j in 0i64..4, a_exp in -1i64..=1, e in 0u32..3) {
        let ctx = ctx_of(&s);
        let a0 = ctx.unit(j, a_exp);
        let r = build(&ctx, &s).mul(&FactoredRatFun::inverse_factor(ctx, a0, 1, e).unwrap()).unwrap();
        let lin = FactoredRatFun::from_poly(ctx, Poly::one_minus(&ctx, a0, 1));
        let before = laurent_at(&r, a0, 6).unwrap();
        let after = laurent_at(&r.mul(&lin).unwrap(), a0, 6).unwrap();
        for i in -4..=6 {
            prop_assert_eq!(after.coeff(i).unwrap(), before.coeff(i - 1).unwrap());
        }
    }

    #[test]
    fn finite_laurent_window_resums(
        q in 2u64..=3,
        coeffs in prop::collection::vec(-4i64..=4, 1..5),
        e in 0u32..4,
        a_exp in -1i64..=1,
        sample in (1i64..=7, 2i64..=9),
    ) {
        // P(t)/(1 - a0 t)^e has a finite expansion in w = 1 - a0 t.
        let ctx = Ctx::rational(q);
        let a0 = ctx.qp(a_exp);
        let p = Poly::from_dense(coeffs.iter().map(|&c| ctx.int(c)).collect());
        let r = FactoredRatFun::from_parts(ctx, 0, p, [(a0, 1, e)]).unwrap();
        let l = laurent_at(&r, a0, coeffs.len() as i64).unwrap();
        let t = ctx.scalar(rat(sample.0, sample.1));
        let w = &ctx.one() - &(&ctx.embed(a0) * &t);
        prop_assume!(!w.is_zero());
        let mut sum = ctx.zero();
        for i in l.min_index()..=l.max_index() {
            sum = &sum + &(&l.coeff(i).unwrap() * &w.pow(i));
        }
        prop_assert_eq!(sum, r.evaluate(&t).unwrap());
    }

    #[test]
    fn text_and_json_round_trip(s in shape(-2)) {
        let ctx = ctx_of(&s);
        let r = build(&ctx, &s).normalize();
        let text = r.to_text();
        let back = FactoredRatFun::parse_text(ctx, &text).unwrap();
        prop_assert_eq!(back.to_text(), text);
        prop_assert_eq!(&back, &r);
        let json = serde_json::to_string(&r).unwrap();
        let back: FactoredRatFun = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }

    #[test]
    fn laurent_json_round_trip(s in shape(-1), j in 0i64..4) {
        let ctx = ctx_of(&s);
        let l = laurent_at(&build(&ctx, &s), ctx.unit(j, 0), 3).unwrap();
        let json = serde_json::to_string(&l.to_json()).unwrap();
        let back = igusa_core::LaurentSeries::from_json(&serde_json::from_str(&json).unwrap()).unwrap();
        prop_assert_eq!(back, l);
    }

    #[test]
    fn evaluation_is_a_ring_map(a in shape(-1), b in shape(-1), sample in (1i64..=5, 7i64..=11)) {
        let (ctx, x, y) = pair(&a, &b);
        let t = ctx.scalar(rat(sample.0, sample.1));
        let (Ok(vx), Ok(vy)) = (x.evaluate(&t), y.evaluate(&t)) else { return Ok(()); };
        prop_assert_eq!(x.add(&y).unwrap().evaluate(&t).unwrap(), &vx + &vy);
        prop_assert_eq!(x.mul(&y).unwrap().evaluate(&t).unwrap(), &vx * &vy);
    }
}

#[test]
fn unit_scalar_in_cyclotomic_context() {
    let ctx = Ctx::new(2, 4).unwrap();
    // ζ₄² = -1
    assert_eq!(ctx.embed(ctx.unit(2, 0)), CycloRational::from_int(4, -1));
    assert_eq!(ctx.mul(ctx.unit(3, 1), ctx.unit(2, -1)), ctx.unit(1, 0));
    assert!(UnitScalar::ONE.is_one());
}
