//! The acceptance checks. Each criterion compares library output against an
//! expectation computed another way (enumeration, direct summation, or
//! elementary rational arithmetic) and must also finish within its time budget.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cell::tate_integral;
use crate::distributions::{
    action_recurrence_check, invariance_order_check, laurent_table, zeta_family_build, GroupElementAction, TestFunction,
};
use crate::error::Result;
use crate::invariance::{invariance_tests, BoxFunction};
use crate::koszul::{koszul_ext_dims, vanishing_dichotomy_scan, LambdaModule};
use crate::lattice::{zeta_lattice, Coord, ExponentVector, LatticeFunction, LatticeTerm};
use crate::oracle::{det_zeta_series_check, truncated_lattice_sum, SumMode, SumResult, DEFAULT_BUDGET};
use crate::orbits::{
    classify_distribution_space, orbit_admissible, CharacterPair, KCharacter, LineGenerator, SpaceKind,
};
use crate::ratfun::FactoredRatFun;
use crate::scalar::{q_pow, rat, Ctx, Rational, UnitScalar};

#[derive(Clone, Debug)]
pub struct SelftestConfig {
    pub seed: u64,
    pub cache_dir: Option<PathBuf>,
    pub budget: u64,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig { seed: 20240611, cache_dir: None, budget: DEFAULT_BUDGET }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
    pub budget_ms: u128,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {}. {} ({} ms / {} ms): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed_ms,
            self.budget_ms,
            self.detail
        )
    }
}

pub const CRITERIA: [(u32, &str, u64); 8] = [
    (1, "Tate integral has a simple pole", 1),
    (2, "determinant zeta series matches enumeration", 60),
    (3, "lattice zeta matches brute-force sums", 30),
    (4, "pole classification of the twisted determinant zeta", 5),
    (5, "action recurrence and invariance order", 5),
    (6, "distribution space classification tables", 1),
    (7, "Ext vanishing dichotomy", 10),
    (8, "generalized invariance equals polynomials", 5),
];

/// Outcome of a check before timing: `Ok(detail)` or `Err(failure)`.
type Check = std::result::Result<String, String>;

fn fail<T>(msg: impl Into<String>) -> std::result::Result<T, String> {
    Err(msg.into())
}

fn lift<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| format!("{} error: {e}", e.kind()))
}

pub fn run_criterion(id: u32, cfg: &SelftestConfig) -> CriterionResult {
    let (id, name, secs) = CRITERIA[(id - 1) as usize];
    let start = Instant::now();
    let outcome = match id {
        1 => tate_pole(),
        2 => det_formula(cfg),
        3 => lattice_oracle(cfg.seed),
        4 => pole_classification(),
        5 => action_recurrence(),
        6 => classification_tables(),
        7 => ext_dichotomy(cfg.seed),
        8 => invariance_polynomials(cfg.seed),
        _ => unreachable!(),
    };
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(secs);
    let (mut passed, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if elapsed >= budget {
        passed = false;
        detail = format!("over time budget; {detail}");
    }
    CriterionResult { id, name, passed, detail, elapsed_ms: elapsed.as_millis(), budget_ms: budget.as_millis() }
}

pub fn run_all(cfg: &SelftestConfig) -> Vec<CriterionResult> {
    (1..=8).map(|id| run_criterion(id, cfg)).collect()
}

fn tate_pole() -> Check {
    let ctx = Ctx::rational(2);
    let z = lift(tate_integral(&ctx))?;
    let half = ctx.scalar(rat(1, 2));
    let expected = lift(FactoredRatFun::inverse_factor(ctx, ctx.qp(-1), 1, 1))?.scale(&half);
    if z != expected {
        return fail(format!("got {z}"));
    }
    // ∫_R |x|^s dx = Σ_j (1 - 1/q)·q^{-j}·t^j, shell by shell
    let series = lift(z.series_coeffs(12))?;
    for (j, c) in series.iter().enumerate() {
        if c.as_rational() != Some(&(rat(1, 2) * q_pow(2, -(j as i64)))) {
            return fail(format!("t^{j} coefficient {c}"));
        }
    }
    let order = z.pole_order(ctx.qp(-1));
    if order != 1 {
        return fail(format!("pole order {order} at t = 2"));
    }
    Ok(format!("{z}, simple pole at t = 2"))
}

fn det_formula(cfg: &SelftestConfig) -> Check {
    let cases = [(1, 2, 6), (1, 3, 6), (1, 5, 6), (2, 2, 4), (2, 3, 3), (3, 2, 2)];
    let mut coefficients = 0;
    for (n, p, k) in cases {
        let rep = lift(det_zeta_series_check(n, p, k, cfg.cache_dir.as_deref(), cfg.budget))?;
        if let Some(e) = rep.entries.iter().find(|e| !e.pass) {
            return fail(format!("n={n} p={p} k={k} j={}: enumerated {} vs formula {}", e.j, e.enumerated, e.symbolic));
        }
        coefficients += rep.entries.len();
    }
    Ok(format!("{} cases, {coefficients} coefficients equal", cases.len()))
}

/// A random summable instance: `n ≤ 3`, each term of order `≤ 3`, bases
/// `ζ^j q^a` with `a ∈ -3..=2` (and `a < 0` wherever `d_i = 0`), `d_i ≤ 3`.
pub fn random_lattice_instance(rng: &mut ChaCha8Rng) -> (Ctx, LatticeFunction, ExponentVector) {
    let q = [2, 3][rng.gen_range(0..2)];
    let m = [1, 1, 2, 3][rng.gen_range(0..4)];
    let ctx = Ctx::new(q, m).expect("valid context");
    let dim = rng.gen_range(1..=3);
    let d = ExponentVector((0..dim).map(|_| rng.gen_range(0..=3)).collect());
    let terms = (0..rng.gen_range(1..=3))
        .map(|_| {
            let mut budget = 3u32;
            let coords = (0..dim)
                .map(|i| {
                    let k = rng.gen_range(0..=budget);
                    budget -= k;
                    let a = if d.0[i] == 0 { rng.gen_range(-3..=-1) } else { rng.gen_range(-3..=2) };
                    Coord { k, u: ctx.unit(rng.gen_range(0..m as i64), a) }
                })
                .collect();
            let coeff = ctx.scalar(rat(rng.gen_range(-4..=4), rng.gen_range(1..=3)));
            LatticeTerm { coeff, coords }
        })
        .collect();
    let phi = LatticeFunction::new(dim, terms).expect("consistent dimensions");
    (ctx, phi, d)
}

fn lattice_oracle(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x3);
    for case in 0..50 {
        let (ctx, phi, d) = random_lattice_instance(&mut rng);
        let symbolic = lift(zeta_lattice(&ctx, &phi, &d).and_then(|z| z.series_coeffs(31)))?;
        let SumResult::Coefficients(brute) =
            lift(truncated_lattice_sum(&ctx, &phi, &d, &SumMode::Coefficients { max_j: 30 }))?
        else {
            return fail("oracle returned the wrong mode");
        };
        if let Some(j) = (0..=30).find(|&j| symbolic[j] != brute[j]) {
            return fail(format!("case {case} (d = {:?}) t^{j}: {} vs {}", d.0, symbolic[j], brute[j]));
        }
    }
    Ok("50 instances, coefficients t^0..t^30 equal".into())
}

/// Residue at `t = 1` of `Π_i (1 - q^{-i}) / (1 - q^{n-r-i} t)` in `w = 1 - t`:
/// the factor with `i = n - r` becomes `w`, the others are evaluated at `t = 1`.
fn expected_residue(n: i64, r: i64, q: u64) -> Option<Rational> {
    let star = n - r;
    if !(1..=n).contains(&star) {
        return None;
    }
    let mut v = Rational::one();
    for i in 1..=n {
        v *= Rational::one() - q_pow(q, -i);
        if i != star {
            v /= Rational::one() - q_pow(q, star - i);
        }
    }
    Some(v)
}

fn pole_classification() -> Check {
    let mut cases = 0;
    for n in 1..=3u32 {
        for q in [2u64, 3] {
            for r in -1..=n as i64 {
                let f = lift(zeta_family_build(n, r, q))?;
                let expected = expected_residue(n as i64, r, q);
                let order = f.base.pole_order(UnitScalar::ONE);
                if order != u32::from(expected.is_some()) {
                    return fail(format!("n={n} q={q} r={r}: pole order {order}"));
                }
                let table = lift(laurent_table(&f, &TestFunction::dilate(&f.ctx, 0), UnitScalar::ONE, 0))?;
                let res = table.coeff(-1).expect("window reaches -1");
                let want = expected.unwrap_or_else(Rational::zero);
                if res.as_rational() != Some(&want) {
                    return fail(format!("n={n} q={q} r={r}: residue {res}, expected {want}"));
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} families; pole and residue exactly where 0 ≤ r < n"))
}

fn action_recurrence() -> Check {
    let mut checked = 0;
    let mut orders = 0;
    for n in 1..=2u32 {
        for q in [2u64, 3] {
            for r in -1..=n as i64 {
                let f = lift(zeta_family_build(n, r, q))?;
                let phis: Vec<_> = (0..=2).map(|a| TestFunction::dilate(&f.ctx, a)).collect();
                let g = GroupElementAction { v: 1, c: UnitScalar::ONE };
                let rep = lift(action_recurrence_check(&f, &g, UnitScalar::ONE, &phis, -1..=3))?;
                if let Some(e) = rep.entries.iter().find(|e| !e.passed()) {
                    return fail(format!("n={n} q={q} r={r} {} i={}: {} vs {}", e.phi, e.index, e.lhs, e.rhs));
                }
                checked += rep.entries.len();
                let i0 = f.lowest_index(UnitScalar::ONE);
                for i in i0..=3 {
                    let j = lift(invariance_order_check(&f, UnitScalar::ONE, i))?;
                    if j as i64 > i - i0 {
                        return fail(format!("n={n} q={q} r={r} i={i}: order {j} > {}", i - i0));
                    }
                    orders += 1;
                }
            }
        }
    }
    Ok(format!("{checked} recurrence identities, {orders} order bounds"))
}

fn classification_tables() -> Check {
    let chars: Vec<KCharacter> =
        (-5..=5i64).flat_map(|e| [KCharacter::unramified(e), KCharacter::finite(2, 1, e)]).collect();
    let mut count = 0;
    for m in 1..=4u32 {
        for n in 1..=4u32 {
            for c1 in &chars {
                for c2 in &chars {
                    let pair = CharacterPair::new(c1.clone(), c2.clone());
                    let rep = lift(classify_distribution_space(m, n, &pair))?;
                    let lower: Vec<u32> =
                        (0..m.min(n)).filter(|&r| orbit_admissible(m, n, r, &pair).unwrap_or(false)).collect();
                    let any = !rep.admissible_orbits.is_empty();
                    let expected = if m != n {
                        // at most one extreme orbit can be admissible
                        match rep.admissible_orbits.as_slice() {
                            [] => SpaceKind::Zero,
                            [0] => SpaceKind::Line { generator: LineGenerator::Delta },
                            [r] if *r == m.min(n) => SpaceKind::Line { generator: LineGenerator::Haar },
                            other => return fail(format!("{m}×{n} {pair:?}: admissible {other:?}")),
                        }
                    } else if !c1.mul(c2).is_trivial() {
                        SpaceKind::Zero
                    } else if lower.is_empty() {
                        SpaceKind::ZetaTower { i0: 0 }
                    } else {
                        SpaceKind::ZetaTower { i0: -1 }
                    };
                    if rep.space_kind != expected {
                        return fail(format!("{m}×{n} ({c1}, {c2}): {:?}, expected {expected:?}", rep.space_kind));
                    }
                    if (rep.space_kind == SpaceKind::Zero) == any {
                        return fail(format!("{m}×{n} ({c1}, {c2}): Zero disagrees with admissibility"));
                    }
                    if rep.invariant_dim != u32::from(expected != SpaceKind::Zero) {
                        return fail(format!("{m}×{n} ({c1}, {c2}): invariant_dim {}", rep.invariant_dim));
                    }
                    count += 1;
                }
            }
            if m != n {
                let delta = CharacterPair::new(KCharacter::trivial(), KCharacter::trivial());
                let haar = CharacterPair::new(KCharacter::unramified(n as i64), KCharacter::unramified(-(m as i64)));
                let kinds = (
                    lift(classify_distribution_space(m, n, &delta))?.space_kind,
                    lift(classify_distribution_space(m, n, &haar))?.space_kind,
                );
                if kinds
                    != (
                        SpaceKind::Line { generator: LineGenerator::Delta },
                        SpaceKind::Line { generator: LineGenerator::Haar },
                    )
                {
                    return fail(format!("{m}×{n}: lines {kinds:?}"));
                }
            }
        }
    }
    Ok(format!("{count} (m, n, χ₁, χ₂) cells consistent"))
}

fn pascal_row(n: usize) -> Vec<usize> {
    let mut row = vec![1usize];
    for _ in 0..n {
        let mut next = vec![1; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row
}

fn ext_dichotomy(seed: u64) -> Check {
    let mut total = 0;
    for n in 1..=3 {
        let ctx = Ctx::rational(2);
        let triv = vec![UnitScalar::ONE; n];
        let p = lift(koszul_ext_dims(&triv, &LambdaModule::scalar(ctx, 1, &triv)))?;
        if p.dims != pascal_row(n) || p.euler_characteristic() != 0 {
            return fail(format!("n={n}: trivial profile {:?}", p.dims));
        }
        let rep = lift(vanishing_dichotomy_scan(n, 100, seed ^ n as u64))?;
        if let Some(c) = rep.counterexamples.first() {
            return fail(format!("n={n} trial {}: dims {:?}", c.trial, c.dims));
        }
        total += rep.trials;
    }
    Ok(format!("{total} trials, no counterexamples; trivial profiles binomial"))
}

fn random_polynomial_box(rng: &mut ChaCha8Rng, n: usize, k: u32, b: u32) -> BoxFunction {
    let mut monomials: Vec<(Vec<u32>, Rational)> = Vec::new();
    let mut exps = vec![vec![]];
    for _ in 0..n {
        exps = exps.into_iter().flat_map(|e: Vec<u32>| (0..=k).map(move |x| [e.clone(), vec![x]].concat())).collect();
    }
    for e in exps.into_iter().filter(|e| e.iter().sum::<u32>() <= k) {
        monomials.push((e, rat(rng.gen_range(-6..=6), rng.gen_range(1..=4))));
    }
    BoxFunction::from_fn(n, b, |x| {
        monomials.iter().fold(Rational::zero(), |acc, (e, c)| {
            acc + c * x
                .iter()
                .zip(e)
                .fold(Rational::one(), |p, (&xi, &ei)| p * Rational::from_integer(num_bigint::BigInt::from(xi).pow(ei)))
        })
    })
}

fn invariance_polynomials(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x8);
    let mut runs = 0;
    for n in 1..=2usize {
        for k in 0..=3u32 {
            let b = k + 2;
            for trial in 0..120 {
                let (f, must_hold) = if trial < 100 {
                    let len = (b as usize + 1).pow(n as u32);
                    let values = (0..len).map(|_| rat(rng.gen_range(-5..=5), 1)).collect();
                    (lift(BoxFunction::new(n, b, values))?, false)
                } else {
                    (random_polynomial_box(&mut rng, n, k, b), true)
                };
                let v = lift(invariance_tests(&f, k))?;
                if v.by_differences != v.by_interpolation {
                    return fail(format!("n={n} k={k} trial {trial}: tests disagree {v:?}"));
                }
                if must_hold && !v.by_differences {
                    return fail(format!("n={n} k={k} trial {trial}: polynomial rejected"));
                }
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} functions, both tests agree"))
}
