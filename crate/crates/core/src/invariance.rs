//! Generalized invariance under translations of `Zⁿ`, tested on a box.
//!
//! `f` is invariant of order `k` when every product of `k + 1` operators
//! `(τ_{e_j} - 1)` kills it, i.e. when it is a polynomial of total degree `≤ k`.
//! Both characterisations are checked independently.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Ctx, CycloRational, Rational};

/// Exact values of `f` on `[0, b]ⁿ`, row-major with the last coordinate fastest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxFunction {
    pub n: usize,
    pub b: u32,
    pub values: Vec<Rational>,
}

impl BoxFunction {
    pub fn new(n: usize, b: u32, values: Vec<Rational>) -> Result<Self> {
        let len = (b as usize + 1).checked_pow(n as u32).ok_or_else(|| Error::Resource("box too large".into()))?;
        if values.len() != len {
            return Err(Error::Precondition(format!("expected {len} values on [0,{b}]^{n}, got {}", values.len())));
        }
        Ok(BoxFunction { n, b, values })
    }

    pub fn from_fn(n: usize, b: u32, f: impl Fn(&[u32]) -> Rational) -> Self {
        let values = box_points(n, b).iter().map(|x| f(x)).collect();
        BoxFunction { n, b, values }
    }
}

fn box_points(n: usize, b: u32) -> Vec<Vec<u32>> {
    let mut pts = vec![vec![]];
    for _ in 0..n {
        pts = pts.into_iter().flat_map(|p| (0..=b).map(move |x| [p.clone(), vec![x]].concat())).collect();
    }
    pts
}

/// Non-increasing sequences of `len` directions from `0..n`.
fn multisets(n: usize, len: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return vec![vec![]];
    }
    multisets(n, len - 1)
        .into_iter()
        .flat_map(|m| {
            let start = m.last().copied().unwrap_or(0);
            (start..n).map(move |d| [m.clone(), vec![d]].concat())
        })
        .collect()
}

/// Forward difference along `dir` of an array with per-axis extents `ext`.
fn difference(values: &[Rational], ext: &[usize], dir: usize) -> (Vec<Rational>, Vec<usize>) {
    let stride: usize = ext[dir + 1..].iter().product();
    let mut new_ext = ext.to_vec();
    new_ext[dir] -= 1;
    let len: usize = new_ext.iter().product();
    let mut out = Vec::with_capacity(len);
    for idx in 0..len {
        // map the index in the shrunken array back to the original one
        let mut rem = idx;
        let mut orig = 0;
        let mut mult = 1;
        for axis in (0..ext.len()).rev() {
            let c = rem % new_ext[axis];
            rem /= new_ext[axis];
            orig += c * mult;
            mult *= ext[axis];
        }
        out.push(&values[orig + stride] - &values[orig]);
    }
    (out, new_ext)
}

fn by_differences(f: &BoxFunction, k: u32) -> bool {
    let ext = vec![f.b as usize + 1; f.n];
    multisets(f.n, k as usize + 1).iter().all(|dirs| {
        let (mut v, mut e) = (f.values.clone(), ext.clone());
        for &d in dirs {
            (v, e) = difference(&v, &e, d);
        }
        v.iter().all(|x| x == &Rational::from_integer(0.into()))
    })
}

fn monomial(x: &[u32], exps: &[u32]) -> Rational {
    x.iter().zip(exps).fold(Rational::from_integer(1.into()), |acc, (&xi, &e)| {
        acc * Rational::from_integer(num_bigint::BigInt::from(xi).pow(e))
    })
}

/// Fit the unique polynomial of degree `≤ k` through the simplex
/// `{x : Σx ≤ k}` and compare it with `f` on the whole box.
fn by_interpolation(f: &BoxFunction, k: u32) -> bool {
    let ctx = Ctx::rational(2);
    let pts: Vec<Vec<u32>> = box_points(f.n, f.b).into_iter().collect();
    let index = |x: &[u32]| x.iter().fold(0usize, |acc, &c| acc * (f.b as usize + 1) + c as usize);
    let simplex: Vec<&Vec<u32>> = pts.iter().filter(|x| x.iter().sum::<u32>() <= k).collect();
    // exponent vectors of total degree ≤ k are the simplex points themselves
    let exps = simplex.clone();
    let a =
        Matrix::from_rows(simplex.iter().map(|x| exps.iter().map(|e| ctx.scalar(monomial(x, e))).collect()).collect());
    let rhs: Vec<CycloRational> = simplex.iter().map(|x| ctx.scalar(f.values[index(x)].clone())).collect();
    let coeffs = a.solve(&rhs).expect("simplex points are unisolvent");
    let coeffs: Vec<Rational> = coeffs.iter().map(|c| c.as_rational().expect("rational").clone()).collect();
    pts.iter().all(|x| {
        let p = exps.iter().zip(&coeffs).fold(Rational::from_integer(0.into()), |acc, (e, c)| acc + c * monomial(x, e));
        p == f.values[index(x)]
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct InvarianceVerdict {
    pub by_differences: bool,
    pub by_interpolation: bool,
}

pub fn invariance_tests(f: &BoxFunction, k: u32) -> Result<InvarianceVerdict> {
    if f.b < k + 1 {
        return Err(Error::Inconclusive(format!("box [0,{}] is too small for order {k}", f.b)));
    }
    Ok(InvarianceVerdict { by_differences: by_differences(f, k), by_interpolation: by_interpolation(f, k) })
}

pub fn finite_order_invariance_check(f: &BoxFunction, k: u32) -> Result<bool> {
    let v = invariance_tests(f, k)?;
    if v.by_differences != v.by_interpolation {
        return Err(Error::Inconclusive(format!("difference and interpolation tests disagree: {v:?}")));
    }
    Ok(v.by_differences)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn examples() {
        let sq = BoxFunction::from_fn(1, 5, |x| int(x[0] as i64 * x[0] as i64));
        assert!(finite_order_invariance_check(&sq, 2).unwrap());
        assert!(!finite_order_invariance_check(&sq, 1).unwrap());
        let exp = BoxFunction::from_fn(1, 5, |x| int(1 << x[0]));
        assert!(!finite_order_invariance_check(&exp, 3).unwrap());
        let xy = BoxFunction::from_fn(2, 4, |x| int(x[0] as i64 * x[1] as i64));
        assert!(finite_order_invariance_check(&xy, 2).unwrap());
        assert!(!finite_order_invariance_check(&xy, 1).unwrap());
    }

    #[test]
    fn small_boxes_are_inconclusive() {
        let f = BoxFunction::from_fn(1, 2, |_| int(1));
        assert!(matches!(finite_order_invariance_check(&f, 2), Err(Error::Inconclusive(_))));
        assert!(BoxFunction::new(2, 2, vec![int(0); 8]).is_err());
    }

    #[test]
    fn fourth_difference_of_powers_of_two() {
        let (v, e) =
            (0..4).fold(((0..6).map(|x| int(1 << x)).collect::<Vec<_>>(), vec![6]), |(v, e), _| difference(&v, &e, 0));
        assert_eq!(e, vec![2]);
        assert_eq!(v[0], int(1));
    }

    #[test]
    fn directions() {
        assert_eq!(multisets(2, 2), vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(multisets(3, 3).len(), 10);
    }
}
