//! Dense truncated power series over the working field. Internal helpers for
//! Taylor and Laurent expansion.

use crate::scalar::{Ctx, CycloRational, Rational};
use num_bigint::BigInt;
use num_traits::One;

pub(crate) type Series = Vec<CycloRational>;

pub(crate) fn truncate(mut a: Series, len: usize, ctx: &Ctx) -> Series {
    a.resize(len, ctx.zero());
    a
}

pub(crate) fn mul(a: &[CycloRational], b: &[CycloRational], len: usize, ctx: &Ctx) -> Series {
    let mut out = vec![ctx.zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if y.is_zero() {
                continue;
            }
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

/// Reciprocal of a series with invertible constant term.
pub(crate) fn inv(a: &[CycloRational], len: usize, ctx: &Ctx) -> Option<Series> {
    let c0 = a.first()?.inv()?;
    let mut out = vec![ctx.zero(); len];
    if len == 0 {
        return Some(out);
    }
    out[0] = c0.clone();
    for k in 1..len {
        let mut acc = ctx.zero();
        for j in 1..=k.min(a.len().saturating_sub(1)) {
            if a[j].is_zero() {
                continue;
            }
            acc = &acc + &(&a[j] * &out[k - j]);
        }
        out[k] = -(&acc * &c0);
    }
    Some(out)
}

pub(crate) fn pow(a: &[CycloRational], e: u32, len: usize, ctx: &Ctx) -> Series {
    let mut acc = truncate(vec![ctx.one()], len, ctx);
    for _ in 0..e {
        acc = mul(&acc, a, len, ctx);
    }
    acc
}

pub(crate) fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `(1 - w)^v` for any integer `v`, truncated.
pub(crate) fn one_minus_w_pow(v: i64, len: usize, ctx: &Ctx) -> Series {
    (0..len as u64)
        .map(|i| {
            let c = if v >= 0 {
                let b = binomial(v as u64, i);
                if i % 2 == 1 {
                    -b
                } else {
                    b
                }
            } else {
                // (1-w)^{-k} = Σ C(k+i-1, i) w^i
                binomial((-v) as u64 + i - 1, i)
            };
            ctx.scalar(Rational::from_integer(c))
        })
        .collect()
}
