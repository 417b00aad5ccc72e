//! `Ext^i_{Z[Zⁿ]}(χ₁, V)` for a character `χ₁` and a finite-dimensional
//! module `V`, as the cohomology of the Koszul complex of the commuting
//! operators `A_j = χ₁(e_j)⁻¹·g_j - 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Ctx, UnitScalar};
use crate::series::binomial;

#[derive(Clone, Debug)]
pub struct LambdaModule {
    ctx: Ctx,
    dim: usize,
    gens: Vec<Matrix>,
}

impl LambdaModule {
    /// `gens[j]` is the action of the `j`-th standard generator of `Zⁿ`.
    pub fn new(ctx: Ctx, dim: usize, gens: Vec<Matrix>) -> Result<Self> {
        for (j, g) in gens.iter().enumerate() {
            if g.rows != dim || g.cols != dim {
                return Err(Error::Precondition(format!("generator {j} is not {dim}×{dim}")));
            }
            if g.rank() != dim {
                return Err(Error::Precondition(format!("generator {j} is singular")));
            }
        }
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                if gens[i].mul(&gens[j]) != gens[j].mul(&gens[i]) {
                    return Err(Error::Precondition(format!("generators {i} and {j} do not commute")));
                }
            }
        }
        Ok(LambdaModule { ctx, dim, gens })
    }

    /// `dim` copies of the character `chi`.
    pub fn scalar(ctx: Ctx, dim: usize, chi: &[UnitScalar]) -> Self {
        let gens = chi.iter().map(|&u| Matrix::identity(&ctx, dim).scale(&ctx.embed(u))).collect();
        LambdaModule { ctx, dim, gens }
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gens(&self) -> &[Matrix] {
        &self.gens
    }

    /// `V ⊗ χ`.
    pub fn twist(&self, chi: &[UnitScalar]) -> Result<Self> {
        if chi.len() != self.rank() {
            return Err(Error::Precondition("character rank differs from module rank".into()));
        }
        let gens = self.gens.iter().zip(chi).map(|(g, &u)| g.scale(&self.ctx.embed(u))).collect();
        Ok(LambdaModule { ctx: self.ctx, dim: self.dim, gens })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtProfile {
    pub dims: Vec<usize>,
}

impl ExtProfile {
    pub fn euler_characteristic(&self) -> i64 {
        self.dims.iter().enumerate().map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }
}

/// Subsets of `0..n` of size `i`, as bitmasks in increasing order.
fn subsets(n: usize, i: usize) -> Vec<u32> {
    (0u32..1 << n).filter(|s| s.count_ones() as usize == i).collect()
}

/// Matrix of `d: Λ^i ⊗ V → Λ^{i+1} ⊗ V`, `e_S ⊗ v ↦ Σ_{j∉S} ±e_{S∪j} ⊗ A_j v`.
fn differential(ctx: &Ctx, ops: &[Matrix], dim: usize, i: usize) -> Matrix {
    let n = ops.len();
    let src = subsets(n, i);
    let dst = subsets(n, i + 1);
    let mut d = Matrix::zeros(ctx, dst.len() * dim, src.len() * dim);
    for (si, &s) in src.iter().enumerate() {
        for (j, op) in ops.iter().enumerate() {
            if s & (1 << j) != 0 {
                continue;
            }
            let t = s | (1 << j);
            let ti = dst.binary_search(&t).expect("subset listed");
            // e_j ∧ e_S: move e_j past the smaller indices of S.
            let sign = if (s & ((1 << j) - 1)).count_ones() % 2 == 0 { ctx.one() } else { -&ctx.one() };
            for r in 0..dim {
                for c in 0..dim {
                    let a = op.get(r, c);
                    if !a.is_zero() {
                        d.set(ti * dim + r, si * dim + c, a * &sign);
                    }
                }
            }
        }
    }
    d
}

pub fn koszul_ext_dims(chi1: &[UnitScalar], m2: &LambdaModule) -> Result<ExtProfile> {
    let n = m2.rank();
    if chi1.len() != n {
        return Err(Error::Precondition(format!("character has {} values, module has rank {n}", chi1.len())));
    }
    let ctx = &m2.ctx;
    let id = Matrix::identity(ctx, m2.dim);
    let minus_one = -&ctx.one();
    let ops: Vec<Matrix> =
        chi1.iter().zip(&m2.gens).map(|(&u, g)| g.scale(&ctx.embed(ctx.inv(u))).add(&id.scale(&minus_one))).collect();
    let ranks: Vec<usize> = (0..n).map(|i| differential(ctx, &ops, m2.dim, i).rank()).collect();
    let dims = (0..=n)
        .map(|i| {
            let chain = binomial(n as u64, i as u64);
            let chain = usize::try_from(chain).expect("small") * m2.dim;
            let out = if i < n { ranks[i] } else { 0 };
            let inc = if i > 0 { ranks[i - 1] } else { 0 };
            chain - out - inc
        })
        .collect();
    Ok(ExtProfile { dims })
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub trial: u64,
    pub dim: usize,
    pub chi1: Vec<UnitScalar>,
    pub chi2: Vec<UnitScalar>,
    pub dims: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub equal_characters: u64,
    pub distinct_characters: u64,
    pub counterexamples: Vec<Counterexample>,
}

impl ScanReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Random commuting unipotent generators: polynomials `1 + Σ c_k N^k` in one
/// strictly upper-triangular `N`.
fn random_unipotent(ctx: &Ctx, n: usize, dim: usize, rng: &mut ChaCha8Rng) -> Vec<Matrix> {
    let mut nil = Matrix::zeros(ctx, dim, dim);
    for i in 0..dim {
        for j in i + 1..dim {
            nil.set(i, j, ctx.int(rng.gen_range(-2..=2)));
        }
    }
    let mut powers = vec![Matrix::identity(ctx, dim)];
    for k in 1..dim {
        powers.push(powers[k - 1].mul(&nil));
    }
    (0..n)
        .map(|_| {
            let mut g = powers[0].clone();
            for p in &powers[1..] {
                g = g.add(&p.scale(&ctx.int(rng.gen_range(-2..=2))));
            }
            g
        })
        .collect()
}

fn scan_trial(n: usize, trial: u64, trial_seed: u64) -> Result<(bool, Option<Counterexample>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    let q = if rng.gen_bool(0.5) { 2 } else { 3 };
    let m = [1, 1, 2, 3, 4][rng.gen_range(0..5)];
    let ctx = Ctx::new(q, m)?;
    let dim = rng.gen_range(1..=5);
    let unit = |rng: &mut ChaCha8Rng| ctx.unit(rng.gen_range(0..m as i64), rng.gen_range(-2..=2));
    let chi2: Vec<UnitScalar> = (0..n).map(|_| unit(&mut rng)).collect();
    let equal = rng.gen_bool(0.5);
    let chi1: Vec<UnitScalar> = if equal {
        chi2.clone()
    } else {
        let mut c = chi2.clone();
        let j = rng.gen_range(0..n);
        let shift = if rng.gen_bool(0.5) {
            ctx.qp(if rng.gen_bool(0.5) { 1 } else { -1 })
        } else {
            loop {
                let u = unit(&mut rng);
                if !u.is_one() {
                    break u;
                }
            }
        };
        c[j] = ctx.mul(c[j], shift);
        for slot in c.iter_mut() {
            if rng.gen_bool(0.3) {
                *slot = unit(&mut rng);
            }
        }
        c
    };
    let module = LambdaModule::new(ctx, dim, random_unipotent(&ctx, n, dim, &mut rng))?.twist(&chi2)?;
    let profile = koszul_ext_dims(&chi1, &module)?;
    let ok = profile.euler_characteristic() == 0 && if chi1 == chi2 { profile.dims[0] >= 1 } else { profile.is_zero() };
    let same = chi1 == chi2;
    let cx = (!ok).then_some(Counterexample { trial, dim, chi1, chi2, dims: profile.dims });
    Ok((same, cx))
}

/// Random unipotent `V` twisted by `χ₂` against random `χ₁`: Ext vanishes
/// when `χ₁ ≠ χ₂`, and `Hom ≠ 0` when they agree.
pub fn vanishing_dichotomy_scan(n: usize, trials: u64, seed: u64) -> Result<ScanReport> {
    if n == 0 || trials == 0 {
        return Err(Error::Precondition("rank and trial count must be positive".into()));
    }
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..trials).map(|_| master.gen()).collect();
    let results = seeds.par_iter().enumerate().map(|(t, &s)| scan_trial(n, t as u64, s)).collect::<Result<Vec<_>>>()?;
    let equal_characters = results.iter().filter(|(e, _)| *e).count() as u64;
    Ok(ScanReport {
        n,
        trials,
        seed,
        equal_characters,
        distinct_characters: trials - equal_characters,
        counterexamples: results.into_iter().filter_map(|(_, c)| c).collect(),
    })
}
