//! Rank orbits of `GL_m × GL_n` on `M_{m,n}` and the distributions
//! transforming by a character pair `(χ₁, χ₂)`.
//!
//! Characters are `χ_f·|·|^e` with `χ_f` of finite order. The finite part is
//! stored as a label in `Q/Z` (so `fin<m>^j` is `j/m mod 1`); only equality
//! and triviality are ever tested.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::distributions::zeta_family_build;
use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Rational, UnitScalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KCharacter {
    finite: Rational,
    pub exponent: Rational,
}

fn frac_part(r: &Rational) -> Rational {
    r - r.floor()
}

impl KCharacter {
    pub fn new(finite: Rational, exponent: Rational) -> Self {
        KCharacter { finite: frac_part(&finite), exponent }
    }

    /// `|·|^e`.
    pub fn unramified(e: i64) -> Self {
        KCharacter { finite: Rational::zero(), exponent: Rational::from_integer(e.into()) }
    }

    pub fn trivial() -> Self {
        Self::unramified(0)
    }

    /// The finite-order character of label `j/order`.
    pub fn finite(order: u32, j: i64, e: i64) -> Self {
        Self::new(Rational::new(j.into(), order.into()), Rational::from_integer(e.into()))
    }

    pub fn finite_label(&self) -> &Rational {
        &self.finite
    }

    pub fn is_trivial(&self) -> bool {
        self.finite.is_zero() && self.exponent.is_zero()
    }

    pub fn is_unramified(&self) -> bool {
        self.finite.is_zero()
    }

    /// `Some(e)` when `self = |·|^e` with `e` an integer.
    pub fn integral_power(&self) -> Option<i64> {
        (self.finite.is_zero() && self.exponent.is_integer())
            .then(|| i64::try_from(self.exponent.to_integer()).ok())
            .flatten()
    }

    pub fn is_power(&self, e: i64) -> bool {
        self.integral_power() == Some(e)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(&self.finite + &other.finite, &self.exponent + &other.exponent)
    }

    pub fn inv(&self) -> Self {
        Self::new(-&self.finite, -&self.exponent)
    }
}

impl fmt::Display for KCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.finite.is_zero() {
            write!(f, "triv:{}", self.exponent)
        } else {
            write!(f, "fin{}^{}:{}", self.finite.denom(), self.finite.numer(), self.exponent)
        }
    }
}

/// `triv:<e>` or `fin<m>^<j>:<e>`, with `e` an exact rational.
impl FromStr for KCharacter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("character {s:?}: expected triv:<e> or fin<m>^<j>:<e>"));
        let (label, exp) = s.trim().split_once(':').ok_or_else(bad)?;
        let exponent = parse_rational(exp).map_err(|_| bad())?;
        if label == "triv" {
            return Ok(KCharacter { finite: Rational::zero(), exponent });
        }
        let (m, j) = label.strip_prefix("fin").and_then(|x| x.split_once('^')).ok_or_else(bad)?;
        let m: u32 = m.parse().map_err(|_| bad())?;
        let j: i64 = j.parse().map_err(|_| bad())?;
        if m == 0 {
            return Err(bad());
        }
        Ok(Self::new(Rational::new(j.into(), m.into()), exponent))
    }
}

impl Serialize for KCharacter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CharacterPair {
    pub chi1: KCharacter,
    pub chi2: KCharacter,
}

impl CharacterPair {
    pub fn new(chi1: KCharacter, chi2: KCharacter) -> Self {
        CharacterPair { chi1, chi2 }
    }

    /// `(χ₂⁻¹, χ₁⁻¹)`, the pair seen through `x ↦ xᵀ`.
    pub fn transpose(&self) -> Self {
        CharacterPair { chi1: self.chi2.inv(), chi2: self.chi1.inv() }
    }
}

/// The orbit `O_r` of rank-`r` matrices, with the exponents of `|Δ_{G_r}|⁻¹`
/// on the determinant blocks of its stabilizer (absent when a block is empty).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitDatum {
    pub m: u32,
    pub n: u32,
    pub r: u32,
    pub codim: u32,
    pub x_block: Option<i64>,
    pub w1_block: Option<i64>,
    pub w2_block: Option<i64>,
}

pub fn stabilizer_modular_data(m: u32, n: u32, r: u32) -> Result<OrbitDatum> {
    if r > m.min(n) {
        return Err(Error::Precondition(format!("rank {r} out of range for {m}×{n}")));
    }
    let (mi, ni, ri) = (m as i64, n as i64, r as i64);
    Ok(OrbitDatum {
        m,
        n,
        r,
        codim: (m - r) * (n - r),
        x_block: (r >= 1).then_some(ni - mi),
        w1_block: (r < m).then_some(ri),
        w2_block: (r < n).then_some(-ri),
    })
}

/// `O_r` carries a `(χ₁, χ₂)`-equivariant distribution iff the pair restricts
/// to the modulus character on every block of the stabilizer.
pub fn orbit_admissible(m: u32, n: u32, r: u32, pair: &CharacterPair) -> Result<bool> {
    let d = stabilizer_modular_data(m, n, r)?;
    let x_ok = d.x_block.is_none_or(|e| pair.chi1.mul(&pair.chi2).is_power(e));
    let w1_ok = d.w1_block.is_none_or(|e| pair.chi1.is_power(e));
    let w2_ok = d.w2_block.is_none_or(|e| pair.chi2.is_power(e));
    Ok(x_ok && w1_ok && w2_ok)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LineGenerator {
    /// Point mass at the zero matrix.
    Delta,
    /// Haar measure on `M_{m,n}`.
    Haar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceKind {
    Zero,
    Line {
        generator: LineGenerator,
    },
    /// Spanned by the Laurent coefficients `Z_{χ,i}`, `i ≥ i0`.
    ZetaTower {
        i0: i64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub m: u32,
    pub n: u32,
    pub pair: CharacterPair,
    pub orbits: Vec<OrbitDatum>,
    pub admissible_orbits: Vec<u32>,
    pub space_kind: SpaceKind,
    pub invariant_dim: u32,
    pub notes: Vec<String>,
}

pub fn classify_distribution_space(m: u32, n: u32, pair: &CharacterPair) -> Result<ClassificationReport> {
    if m == 0 || n == 0 {
        return Err(Error::Precondition("matrix sizes must be positive".into()));
    }
    let mut orbits = Vec::new();
    let mut admissible_orbits = Vec::new();
    for r in 0..=m.min(n) {
        orbits.push(stabilizer_modular_data(m, n, r)?);
        if orbit_admissible(m, n, r, pair)? {
            admissible_orbits.push(r);
        }
    }
    let mut notes = Vec::new();
    let space_kind = if m != n {
        if pair.chi1.is_trivial() && pair.chi2.is_trivial() {
            SpaceKind::Line { generator: LineGenerator::Delta }
        } else if pair.chi1.is_power(n as i64) && pair.chi2.is_power(-(m as i64)) {
            SpaceKind::Line { generator: LineGenerator::Haar }
        } else {
            SpaceKind::Zero
        }
    } else if !pair.chi1.mul(&pair.chi2).is_trivial() {
        notes.push("χ₁χ₂ ≠ 1".into());
        SpaceKind::Zero
    } else {
        match pair.chi1.integral_power() {
            Some(r) if (0..n as i64).contains(&r) => {
                notes.push(format!("χ₁ = |·|^{r}: simple pole at t = 1, residue on O_{r}"));
                SpaceKind::ZetaTower { i0: -1 }
            }
            _ => SpaceKind::ZetaTower { i0: 0 },
        }
    };
    let invariant_dim = u32::from(space_kind != SpaceKind::Zero);
    Ok(ClassificationReport { m, n, pair: pair.clone(), orbits, admissible_orbits, space_kind, invariant_dim, notes })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PoleAdmissibilityReport {
    pub n: u32,
    pub r_twist: i64,
    pub q: u64,
    pub pole_order: u32,
    /// Orbits `r < n` admissible for `(|·|^{r_twist}, |·|^{-r_twist})`.
    pub admissible_lower: Vec<u32>,
    pub pass: bool,
}

pub fn cross_check_pole_vs_admissibility(n: u32, r_twist: i64, q: u64) -> Result<PoleAdmissibilityReport> {
    let family = zeta_family_build(n, r_twist, q)?;
    let pole_order = family.base.pole_order(UnitScalar::ONE);
    let pair = CharacterPair::new(KCharacter::unramified(r_twist), KCharacter::unramified(-r_twist));
    let mut admissible_lower = Vec::new();
    for r in 0..n {
        if orbit_admissible(n, n, r, &pair)? {
            admissible_lower.push(r);
        }
    }
    let expected = u32::from(!admissible_lower.is_empty());
    Ok(PoleAdmissibilityReport { n, r_twist, q, pole_order, pass: pole_order == expected, admissible_lower })
}
