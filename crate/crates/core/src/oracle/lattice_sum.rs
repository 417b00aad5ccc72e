//! Brute-force lattice sums. Nothing here uses the closed-form geometric
//! identities of [`crate::lattice`]; infinite one-dimensional sums are
//! recovered exactly from partial sums by annihilating their
//! polynomial-times-geometric error term.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{self, ExponentVector, LatticeFunction};
use crate::scalar::{q_pow, Ctx, CycloRational, Rational};
use crate::series::binomial;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SumMode {
    /// Value at `s = s0` to within `tolerance`.
    AtPoint { s0: i64, tolerance: Rational },
    /// Exact coefficients of `t^0..=t^max_j`.
    Coefficients { max_j: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SumResult {
    AtPoint { partial_sum: CycloRational, tail_bound: Rational, box_size: u64 },
    Coefficients(Vec<CycloRational>),
}

/// `Σ_{x=0}^{upto} C(x, k)·u^x`.
fn partial_sum(k: u32, u: &CycloRational, upto: u64, ctx: &Ctx) -> CycloRational {
    let mut acc = ctx.zero();
    let mut upow = ctx.one();
    for x in 0..=upto {
        let b = binomial(x, k as u64);
        if !b.is_zero() {
            acc = &acc + &upow.scale(&Rational::from_integer(b));
        }
        upow = &upow * u;
    }
    acc
}

/// `Σ_{x≥0} C(x, k)·u^x` for `|u| < 1`, from the partial sums `s_0..s_{k+1}`.
///
/// `s_N - L = u^N·P(N)` with `deg P ≤ k`, so `(E - u)^{k+1}` kills it and
/// `Σ_i C(k+1, i)(-u)^{k+1-i} s_i = L·(1 - u)^{k+1}`.
pub fn infinite_sum(k: u32, u: &CycloRational, ctx: &Ctx) -> CycloRational {
    let mut lhs = ctx.zero();
    for i in 0..=k + 1 {
        let c = Rational::from_integer(binomial(k as u64 + 1, i as u64));
        let w = (-u).pow((k + 1 - i) as i64);
        lhs = &lhs + &(&w * &partial_sum(k, u, i as u64, ctx)).scale(&c);
    }
    let denom = (&ctx.one() - u).pow(k as i64 + 1);
    &lhs * &denom.inv().expect("u != 1")
}

/// All `y ∈ ℕ^len` with `Σ w_i y_i ≤ cap`, each with its weight.
fn points_below(weights: &[u32], cap: usize) -> Vec<(Vec<u64>, usize)> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(weights.len());
    fn rec(weights: &[u32], cap: usize, used: usize, cur: &mut Vec<u64>, out: &mut Vec<(Vec<u64>, usize)>) {
        let Some((&w, rest)) = weights.split_first() else {
            out.push((cur.clone(), used));
            return;
        };
        let mut y = 0u64;
        while used + (y as usize) * (w as usize) <= cap {
            cur.push(y);
            rec(rest, cap, used + y as usize * w as usize, cur, out);
            cur.pop();
            y += 1;
        }
    }
    rec(weights, cap, 0, &mut cur, &mut out);
    out
}

fn coefficients(phi: &LatticeFunction, d: &ExponentVector, max_j: usize, ctx: &Ctx) -> Vec<CycloRational> {
    let positive: Vec<usize> = (0..d.dim()).filter(|&i| d.0[i] > 0).collect();
    let weights: Vec<u32> = positive.iter().map(|&i| d.0[i]).collect();
    let points = points_below(&weights, max_j);
    let mut out = vec![ctx.zero(); max_j + 1];
    for term in phi.terms().iter().filter(|t| !t.coeff.is_zero()) {
        // Coordinates with d_i = 0 contribute the same infinite factor to every j.
        let mut flat = term.coeff.clone();
        for (i, c) in term.coords.iter().enumerate() {
            if d.0[i] == 0 {
                flat = &flat * &infinite_sum(c.k, &ctx.embed(c.u), ctx);
            }
        }
        for (y, j) in &points {
            let mut v = flat.clone();
            for (slot, &i) in positive.iter().enumerate() {
                let c = term.coords[i];
                let b = binomial(y[slot], c.k as u64);
                if b.is_zero() {
                    v = ctx.zero();
                    break;
                }
                v = &v.scale(&Rational::from_integer(b)) * &ctx.embed(ctx.pow(c.u, y[slot] as i64));
            }
            out[*j] = &out[*j] + &v;
        }
    }
    out
}

fn at_point(phi: &LatticeFunction, d: &ExponentVector, s0: i64, tolerance: &Rational, ctx: &Ctx) -> Result<SumResult> {
    let abscissa = lattice::convergence_abscissa(phi, d)?;
    if !abscissa.is_below(&Rational::from_integer(s0.into())) {
        return Err(Error::Divergence(format!("s0 = {s0} is not above the abscissa {abscissa}")));
    }
    if tolerance <= &Rational::zero() {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    let terms: Vec<_> = phi.terms().iter().filter(|t| !t.coeff.is_zero()).collect();
    let mut box_size = 8u64;
    loop {
        let mut value = ctx.zero();
        let mut tail = Rational::zero();
        for term in &terms {
            let mut v = term.coeff.clone();
            let mut fulls = Vec::new();
            let mut tails = Vec::new();
            for (c, &di) in term.coords.iter().zip(&d.0) {
                // u·t^{d} at t = q^{-s0}; its modulus r = q^{a - s0·d} < 1.
                let shift = ctx.qp(-s0 * di as i64);
                let w = ctx.embed(ctx.mul(c.u, shift));
                v = &v * &partial_sum(c.k, &w, box_size, ctx);
                let r = ctx.scalar(q_pow(ctx.q, c.u.q_exponent - s0 * di as i64));
                let full = infinite_sum(c.k, &r, ctx).as_rational().expect("rational").clone();
                let part = partial_sum(c.k, &r, box_size, ctx).as_rational().expect("rational").clone();
                tails.push(&full - &part);
                fulls.push(full);
            }
            value = &value + &v;
            // Points outside the box have some coordinate above box_size.
            let cabs = lattice::rational_abs(&term.coeff);
            for (i, ti) in tails.iter().enumerate() {
                let others =
                    fulls.iter().enumerate().filter(|(j, _)| *j != i).fold(Rational::one(), |acc, (_, f)| acc * f);
                tail += &cabs * ti * others;
            }
        }
        if &tail < tolerance {
            return Ok(SumResult::AtPoint { partial_sum: value, tail_bound: tail, box_size });
        }
        if box_size >= 1 << 14 {
            return Err(Error::Resource(format!("tail bound still {tail} at box size {box_size}")));
        }
        box_size *= 2;
    }
}

pub fn truncated_lattice_sum(
    ctx: &Ctx,
    phi: &LatticeFunction,
    d: &ExponentVector,
    mode: &SumMode,
) -> Result<SumResult> {
    let report = lattice::check_summability(phi, d)?;
    if !report.summable {
        return Err(Error::Divergence(report.to_string()));
    }
    match mode {
        SumMode::Coefficients { max_j } => Ok(SumResult::Coefficients(coefficients(phi, d, *max_j, ctx))),
        SumMode::AtPoint { s0, tolerance } => at_point(phi, d, *s0, tolerance, ctx),
    }
}
