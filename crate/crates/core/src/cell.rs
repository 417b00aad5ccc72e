//! Igusa integrals `∫ |f|^s dμ` over rectilinear cells `(R_m)ⁿ`.
//!
//! `R_m` is the disjoint union of the shells `π^r(1 + π^m R)`, each of Haar
//! mass `q^{-r-m}` (with `R` normalised to mass 1). A simple measure has a
//! density that is an exponential polynomial in the valuations, and an
//! order-monomial `f` satisfies `|f(x)| = q^{c - Σ d_i val(x_i)}` on the cell.
//! The integral is therefore
//!
//! `q^{-mn} · t^{-c} · Σ_{x∈ℕⁿ} φ(x) q^{-Σx_i} t^{d·x}`,
//!
//! which is a lattice sum after folding `q^{-1}` into every base.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, Abscissa, ExponentVector, LatticeFunction, LatticeJson};
use crate::ratfun::FactoredRatFun;
use crate::scalar::{parse_rational, q_pow, Ctx, CycloRational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectilinearCell {
    pub level: u32,
    pub dim: usize,
}

impl RectilinearCell {
    pub fn new(level: u32, dim: usize) -> Result<Self> {
        if level == 0 {
            return Err(Error::Domain("cell level must be at least 1".into()));
        }
        Ok(RectilinearCell { level, dim })
    }
}

/// `density(val(x))·μ` restricted to the cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleMeasure {
    pub cell: RectilinearCell,
    pub density: LatticeFunction,
}

impl SimpleMeasure {
    pub fn new(cell: RectilinearCell, density: LatticeFunction) -> Result<Self> {
        if density.dim() != cell.dim {
            return Err(Error::Precondition(format!(
                "density has dimension {} on a {}-dimensional cell",
                density.dim(),
                cell.dim
            )));
        }
        Ok(SimpleMeasure { cell, density })
    }

    /// The restricted Haar measure itself (density ≡ 1).
    pub fn haar(ctx: &Ctx, cell: RectilinearCell) -> Self {
        let bases = vec![crate::UnitScalar::ONE; cell.dim];
        SimpleMeasure { cell, density: LatticeFunction::exponential(ctx.one(), &bases) }
    }

    /// Density with the shell masses `q^{-x_i}` folded into the bases.
    fn folded(&self, ctx: &Ctx) -> LatticeFunction {
        self.density.twist_bases(ctx.qp(-1), ctx)
    }

    fn angular_mass(&self, ctx: &Ctx) -> CycloRational {
        ctx.scalar(q_pow(ctx.q, -((self.cell.level as i64) * self.cell.dim as i64)))
    }
}

/// `|f(x)| = q^{c - Σ d_i val(x_i)}` on the cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderMonomial {
    pub c: i64,
    pub d: Vec<i64>,
}

impl OrderMonomial {
    /// Largest value of `log_q |f|` on the cell, reached at `val(x) = 0`.
    pub fn max_log_abs(&self) -> i64 {
        self.c
    }

    fn exponents(&self) -> Result<ExponentVector> {
        self.d
            .iter()
            .map(|&di| {
                u32::try_from(di).map_err(|_| Error::Domain(format!("negative exponent {di} in order monomial")))
            })
            .collect::<Result<Vec<_>>>()
            .map(ExponentVector)
    }
}

fn validate(mu: &SimpleMeasure, f: &OrderMonomial) -> Result<ExponentVector> {
    if f.d.len() != mu.cell.dim {
        return Err(Error::Precondition(format!(
            "monomial has {} exponents on a {}-dimensional cell",
            f.d.len(),
            mu.cell.dim
        )));
    }
    f.exponents()
}

/// `∫_{(R_m)ⁿ} |f|^s dμ` as a rational function of `t`.
///
/// With `bounded` set, `|f| ≤ 1` on the cell is required (`c ≤ 0`).
pub fn zeta_cell(ctx: &Ctx, mu: &SimpleMeasure, f: &OrderMonomial, bounded: bool) -> Result<FactoredRatFun> {
    let d = validate(mu, f)?;
    if bounded && f.max_log_abs() > 0 {
        return Err(Error::Domain(format!("|f| reaches q^{} > 1 on the cell", f.max_log_abs())));
    }
    let sum = lattice::zeta_lattice(ctx, &mu.folded(ctx), &d)?;
    // q^{cs} = t^{-c}
    Ok(sum.scale(&mu.angular_mass(ctx)).shift_t(-f.c))
}

/// Abscissa of convergence of [`zeta_cell`].
pub fn zeta_cell_abscissa(ctx: &Ctx, mu: &SimpleMeasure, f: &OrderMonomial) -> Result<Abscissa> {
    let d = validate(mu, f)?;
    lattice::convergence_abscissa(&mu.folded(ctx), &d)
}

/// Total (signed) mass `q^{-mn} Σ_x φ(x) q^{-Σx_i}` of the measure.
pub fn cell_total_mass(ctx: &Ctx, mu: &SimpleMeasure) -> Result<CycloRational> {
    let zero = ExponentVector(vec![0; mu.cell.dim]);
    let sum = lattice::zeta_lattice(ctx, &mu.folded(ctx), &zero)?;
    let value = sum.evaluate(&ctx.zero())?;
    Ok(&value * &mu.angular_mass(ctx))
}

/// One piece of a disjoint cell decomposition, weighted by a scalar
/// (e.g. the number of angular-component classes it stands for).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellPiece {
    pub weight: CycloRational,
    pub measure: SimpleMeasure,
    pub monomial: OrderMonomial,
}

/// Sum of [`zeta_cell`] over a caller-supplied disjoint list of cells.
pub fn zeta_cells(ctx: &Ctx, pieces: &[CellPiece], bounded: bool) -> Result<FactoredRatFun> {
    let mut acc = FactoredRatFun::zero(*ctx);
    for p in pieces {
        let z = zeta_cell(ctx, &p.measure, &p.monomial, bounded)?;
        acc = acc.add(&z.scale(&p.weight))?;
    }
    Ok(acc)
}

pub fn zeta_cells_abscissa(ctx: &Ctx, pieces: &[CellPiece]) -> Result<Abscissa> {
    pieces
        .iter()
        .try_fold(Abscissa::NegInfinity, |acc, p| Ok(acc.max(zeta_cell_abscissa(ctx, &p.measure, &p.monomial)?)))
}

/// `∫_R |x|^s dx`: the punctured disc is `q - 1` unit translates of the cell `R_1`.
pub fn tate_integral(ctx: &Ctx) -> Result<FactoredRatFun> {
    let cell = RectilinearCell::new(1, 1)?;
    let piece = CellPiece {
        weight: ctx.int(ctx.q as i64 - 1),
        measure: SimpleMeasure::haar(ctx, cell),
        monomial: OrderMonomial { c: 0, d: vec![1] },
    };
    zeta_cells(ctx, &[piece], true)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PieceJson {
    #[serde(default = "one_string")]
    pub weight: String,
    pub level: u32,
    pub density: LatticeJson,
    pub monomial: OrderMonomial,
}

fn one_string() -> String {
    "1".into()
}

/// Input of the `cell-zeta` command.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellsJson {
    pub pieces: Vec<PieceJson>,
    #[serde(default)]
    pub bounded: bool,
}

impl CellsJson {
    pub fn to_pieces(&self, ctx: &Ctx) -> Result<Vec<CellPiece>> {
        self.pieces
            .iter()
            .map(|p| {
                let density = LatticeFunction::from_json(&p.density, ctx)?;
                let cell = RectilinearCell::new(p.level, density.dim())?;
                Ok(CellPiece {
                    weight: ctx.scalar(parse_rational(&p.weight)?),
                    measure: SimpleMeasure::new(cell, density)?,
                    monomial: p.monomial.clone(),
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::scalar::{int, rat};

    fn shell_sum(q: u64, m: u32, terms: usize) -> crate::Rational {
        // Σ_{r<terms} q^{-r-m}
        (0..terms as i64).map(|r| q_pow(q, -r - m as i64)).fold(int(0), |a, b| a + b)
    }

    #[test]
    fn cell_examples() {
        let ctx = Ctx::rational(2);
        let f = OrderMonomial { c: 0, d: vec![1] };
        let mu1 = SimpleMeasure::haar(&ctx, RectilinearCell::new(1, 1).unwrap());
        let z1 = zeta_cell(&ctx, &mu1, &f, true).unwrap();
        let expected =
            FactoredRatFun::from_parts(ctx, 0, Poly::constant(ctx.scalar(rat(1, 2))), [(ctx.qp(-1), 1, 1)]).unwrap();
        assert_eq!(z1, expected);
        // Shell-by-shell: coefficient of t^r is q^{-r-1}.
        let s = z1.series_coeffs(6).unwrap();
        for (r, c) in s.iter().enumerate() {
            assert_eq!(c.as_rational().unwrap(), &q_pow(2, -(r as i64) - 1));
        }

        let mu2 = SimpleMeasure::haar(&ctx, RectilinearCell::new(2, 1).unwrap());
        let z2 = zeta_cell(&ctx, &mu2, &f, true).unwrap();
        assert_eq!(z2, expected.scale(&ctx.scalar(rat(1, 2))));

        let g = OrderMonomial { c: 1, d: vec![1] };
        let z3 = zeta_cell(&ctx, &mu1, &g, false).unwrap();
        assert_eq!(z3, expected.shift_t(-1));
        assert!(matches!(zeta_cell(&ctx, &mu1, &g, true), Err(Error::Domain(_))));
    }

    #[test]
    fn masses() {
        let ctx = Ctx::rational(2);
        let mu1 = SimpleMeasure::haar(&ctx, RectilinearCell::new(1, 1).unwrap());
        let mu2 = SimpleMeasure::haar(&ctx, RectilinearCell::new(2, 1).unwrap());
        assert_eq!(cell_total_mass(&ctx, &mu1).unwrap(), ctx.one());
        assert_eq!(cell_total_mass(&ctx, &mu2).unwrap(), ctx.scalar(rat(1, 2)));
        // Partial shell sums approach the exact mass from below.
        assert!(shell_sum(2, 1, 40) < int(1));
        assert!(int(1) - shell_sum(2, 1, 40) < q_pow(2, -39));

        let heavy = SimpleMeasure::new(
            RectilinearCell::new(1, 1).unwrap(),
            LatticeFunction::exponential(ctx.one(), &[ctx.qp(1)]),
        )
        .unwrap();
        assert!(matches!(cell_total_mass(&ctx, &heavy), Err(Error::Divergence(_))));
    }

    #[test]
    fn tate_integral_has_simple_pole() {
        for q in [2u64, 3, 7] {
            let ctx = Ctx::rational(q);
            let z = tate_integral(&ctx).unwrap();
            let expected = FactoredRatFun::from_parts(
                ctx,
                0,
                Poly::constant(ctx.scalar(int(1) - q_pow(q, -1))),
                [(ctx.qp(-1), 1, 1)],
            )
            .unwrap();
            assert_eq!(z, expected);
            assert_eq!(z.pole_order(ctx.qp(-1)), 1);
        }
    }

    #[test]
    fn negative_exponents_are_rejected() {
        let ctx = Ctx::rational(2);
        let mu = SimpleMeasure::haar(&ctx, RectilinearCell::new(1, 1).unwrap());
        let f = OrderMonomial { c: 0, d: vec![-1] };
        assert!(matches!(zeta_cell(&ctx, &mu, &f, false), Err(Error::Domain(_))));
        assert!(RectilinearCell::new(0, 1).is_err());
    }

    #[test]
    fn json_input() {
        let ctx = Ctx::rational(2);
        let text = r#"{"pieces":[{"weight":"1","level":1,"density":{"dim":1,"terms":[{"coeff":"1","coords":[{"k":0,"u":{"j":0,"a":0}}]}]},"monomial":{"c":0,"d":[1]}}],"bounded":true}"#;
        let cells: CellsJson = serde_json::from_str(text).unwrap();
        let pieces = cells.to_pieces(&ctx).unwrap();
        let z = zeta_cells(&ctx, &pieces, cells.bounded).unwrap();
        assert_eq!(z.to_text(), "t^0 * (1/2*t^0) / (1 - z^0*q^-1*t^1)^1");
        assert_eq!(zeta_cells_abscissa(&ctx, &pieces).unwrap(), Abscissa::Finite(int(-1)));
    }
}
