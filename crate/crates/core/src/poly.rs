use std::collections::BTreeMap;

use crate::scalar::{Ctx, CycloRational, UnitScalar};

/// Sparse univariate polynomial in `t` with cyclotomic coefficients.
///
/// Zero coefficients are never stored, so the empty map is the zero polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: BTreeMap<u32, CycloRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: CycloRational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: CycloRational, exp: u32) -> Self {
        let mut p = Poly::zero();
        p.add_term(exp, c);
        p
    }

    /// `1 - u·t^d`.
    pub fn one_minus(ctx: &Ctx, u: UnitScalar, d: u32) -> Self {
        let mut p = Poly::constant(ctx.one());
        p.add_term(d, -ctx.embed(u));
        p
    }

    pub fn from_dense(c: Vec<CycloRational>) -> Self {
        let mut p = Poly::zero();
        for (i, x) in c.into_iter().enumerate() {
            p.add_term(i as u32, x);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn low_degree(&self) -> Option<u32> {
        self.coeffs.keys().next().copied()
    }

    pub fn coeff(&self, exp: u32) -> Option<&CycloRational> {
        self.coeffs.get(&exp)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &CycloRational)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn add_term(&mut self, exp: u32, c: CycloRational) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.remove(&exp) {
            Some(old) => {
                let s = &old + &c;
                if !s.is_zero() {
                    self.coeffs.insert(exp, s);
                }
            }
            None => {
                self.coeffs.insert(exp, c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &other.coeffs {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &CycloRational) -> Poly {
        let mut out = Poly::zero();
        for (e, x) in &self.coeffs {
            out.add_term(*e, x * c);
        }
        out
    }

    pub fn pow(&self, k: u32, ctx: &Ctx) -> Poly {
        let mut acc = Poly::constant(ctx.one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiply by `t^k`.
    pub fn shift_up(&self, k: u32) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }

    /// Divide by `t^k`; the caller guarantees `k ≤ low_degree`.
    pub fn shift_down(&self, k: u32) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|(e, c)| (e - k, c.clone())).collect() }
    }

    /// Replace `t` by `c·t`.
    pub fn substitute_scaled(&self, c: &CycloRational) -> Poly {
        let mut out = Poly::zero();
        for (e, x) in &self.coeffs {
            out.add_term(*e, x * &c.pow(*e as i64));
        }
        out
    }

    pub fn eval(&self, x: &CycloRational, ctx: &Ctx) -> CycloRational {
        // Horner over the dense range.
        let Some(deg) = self.degree() else {
            return ctx.zero();
        };
        let mut acc = ctx.zero();
        for e in (0..=deg).rev() {
            acc = &acc * x;
            if let Some(c) = self.coeffs.get(&e) {
                acc = &acc + c;
            }
        }
        acc
    }

    /// Dense coefficient vector `0..=deg`.
    pub fn to_dense(&self, ctx: &Ctx) -> Vec<CycloRational> {
        let Some(deg) = self.degree() else {
            return Vec::new();
        };
        (0..=deg).map(|e| self.coeffs.get(&e).cloned().unwrap_or_else(|| ctx.zero())).collect()
    }

    /// Exact division; `None` when the remainder is nonzero. The divisor must be nonzero.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(divisor);
        r.is_zero().then_some(q)
    }

    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let db = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = divisor.coeffs[&db].inv().expect("nonzero leading coefficient");
        let mut rem = self.clone();
        let mut quo = Poly::zero();
        while let Some(dr) = rem.degree() {
            if dr < db {
                break;
            }
            let c = &rem.coeffs[&dr] * &lead_inv;
            let shift = dr - db;
            for (e, x) in &divisor.coeffs {
                rem.add_term(e + shift, -(&c * x));
            }
            quo.add_term(shift, c);
        }
        (quo, rem)
    }

    /// Synthetic division by `(t - root)`: returns the quotient and `P(root)`.
    pub fn synthetic_div(&self, root: &CycloRational, ctx: &Ctx) -> (Poly, CycloRational) {
        let dense = self.to_dense(ctx);
        if dense.is_empty() {
            return (Poly::zero(), ctx.zero());
        }
        let mut quo = vec![ctx.zero(); dense.len() - 1];
        let mut carry = ctx.zero();
        for i in (0..dense.len()).rev() {
            let v = &dense[i] + &(&carry * root);
            if i == 0 {
                carry = v;
            } else {
                quo[i - 1] = v.clone();
                carry = v;
            }
        }
        (Poly::from_dense(quo), carry)
    }
}
