//! Dense exact matrices over `Q(ζ_m)`.

use crate::scalar::{Ctx, CycloRational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<CycloRational>,
}

impl Matrix {
    pub fn zeros(ctx: &Ctx, rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![ctx.zero(); rows * cols] }
    }

    pub fn identity(ctx: &Ctx, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m.set(i, i, ctx.one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<CycloRational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> &CycloRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CycloRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = self.get(i, 0) * other.get(0, j);
                for k in 1..self.cols {
                    let a = self.get(i, k);
                    if !a.is_zero() {
                        acc = &acc + &(a * other.get(k, j));
                    }
                }
                out.push(acc);
            }
        }
        Matrix { rows: self.rows, cols: other.cols, data: out }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: &CycloRational) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    /// Rank by fraction-free (Bareiss) elimination.
    pub fn rank(&self) -> usize {
        let (rows, cols) = (self.rows, self.cols);
        if rows == 0 || cols == 0 {
            return 0;
        }
        let mut a = self.data.clone();
        let one = {
            let m = a[0].level();
            CycloRational::one(m)
        };
        let mut prev = one;
        let mut rank = 0;
        for col in 0..cols {
            let Some(p) = (rank..rows).find(|&r| !a[r * cols + col].is_zero()) else {
                continue;
            };
            if p != rank {
                for j in 0..cols {
                    a.swap(p * cols + j, rank * cols + j);
                }
            }
            let pivot = a[rank * cols + col].clone();
            let prev_inv = prev.inv().expect("previous pivot is nonzero");
            for i in rank + 1..rows {
                let lead = a[i * cols + col].clone();
                for j in col..cols {
                    let v = &(&a[i * cols + j] * &pivot) - &(&lead * &a[rank * cols + j]);
                    a[i * cols + j] = &v * &prev_inv;
                }
            }
            prev = pivot;
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }

    /// The unique `x` with `self·x = b`, or `None` when `self` is singular.
    pub fn solve(&self, b: &[CycloRational]) -> Option<Vec<CycloRational>> {
        let n = self.rows;
        assert_eq!(n, self.cols);
        assert_eq!(n, b.len());
        let w = n + 1;
        let mut a: Vec<CycloRational> = Vec::with_capacity(n * w);
        for (row, bi) in self.data.chunks(n).zip(b) {
            a.extend_from_slice(row);
            a.push(bi.clone());
        }
        for col in 0..n {
            let p = (col..n).find(|&r| !a[r * w + col].is_zero())?;
            for j in 0..w {
                a.swap(p * w + j, col * w + j);
            }
            let inv = a[col * w + col].inv()?;
            for j in col..w {
                a[col * w + j] = &a[col * w + j] * &inv;
            }
            for i in 0..n {
                if i == col || a[i * w + col].is_zero() {
                    continue;
                }
                let f = a[i * w + col].clone();
                for j in col..w {
                    let v = &a[i * w + j] - &(&f * &a[col * w + j]);
                    a[i * w + j] = v;
                }
            }
        }
        Some((0..n).map(|i| a[i * w + n].clone()).collect())
    }
}
