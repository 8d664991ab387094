//! Weak Jacobi forms: a truncated two-variable expansion tagged with
//! weight, index, character, and the finite reflection group that acts on
//! the abelian variable.
//!
//! Construction validates integrality (q-exponents in nonnegative integers,
//! z-exponent vectors integral against the lattice basis). The elliptic and
//! group equivariance laws are checked on demand over all stored
//! coefficients; both return a report counting the verified identities.

use crate::error::KernelError;
use crate::rat::{rat_i, Rat};
use crate::series::QZSeries;
use num_traits::Zero;
use std::fmt;

/// The two linear characters of the acting group that occur here.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Character {
    Trivial,
    Determinant,
}

impl Character {
    pub fn mul(self, other: Character) -> Character {
        if self == other {
            Character::Trivial
        } else {
            Character::Determinant
        }
    }

    /// Value on a group element of the given determinant (always +-1).
    pub fn sign(self, det: i64) -> i64 {
        match self {
            Character::Trivial => 1,
            Character::Determinant => det,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Character::Trivial => "trivial",
            Character::Determinant => "determinant",
        }
    }

    pub fn parse(s: &str) -> Result<Character, KernelError> {
        match s {
            "trivial" => Ok(Character::Trivial),
            "determinant" => Ok(Character::Determinant),
            _ => Err(KernelError::Parse(format!("unknown character {s:?}"))),
        }
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One generator of the acting group: its matrix on lattice basis
/// coordinates, the induced action on z-exponent vectors (the inverse
/// transpose), and its determinant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupGen {
    pub label: String,
    pub basis_matrix: Vec<Vec<i64>>,
    pub d_action: Vec<Vec<i64>>,
    pub det: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupGenerators {
    pub name: String,
    pub rank: usize,
    pub gens: Vec<GroupGen>,
}

/// Outcome of an invariance check: how many identities were testable at
/// the stored truncation, and which ones failed.
#[derive(Clone, Debug)]
pub struct InvarianceReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl InvarianceReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for InvarianceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            write!(f, "ok ({} identities checked)", self.checked)
        } else {
            write!(
                f,
                "{} of {} identities failed; first: {}",
                self.failures.len(),
                self.checked,
                self.failures[0]
            )
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JacobiForm {
    pub series: QZSeries,
    pub weight: i64,
    pub index: i64,
    pub character: Character,
    pub group: GroupGenerators,
}

impl JacobiForm {
    /// Wrap a series after validating the integrality constraints: every
    /// stored q-exponent is a nonnegative integer (n24 in 24Z>=0) and every
    /// z-exponent vector is integral (even in half units). The latter is
    /// exactly invariance under translating z by lattice vectors.
    pub fn new(
        series: QZSeries,
        weight: i64,
        index: i64,
        character: Character,
        group: GroupGenerators,
    ) -> Result<Self, KernelError> {
        if group.rank != series.lat.rank {
            return Err(KernelError::DimensionMismatch(format!(
                "group rank {} vs lattice rank {}",
                group.rank, series.lat.rank
            )));
        }
        for (n24, d2, _) in series.iter_terms() {
            if n24 < 0 || n24 % 24 != 0 {
                return Err(KernelError::IntegralityViolation(format!(
                    "q-exponent {n24}/24 is not a nonnegative integer"
                )));
            }
            if let Some(i) = (0..d2.len()).find(|&i| d2[i] % 2 != 0) {
                return Err(KernelError::IntegralityViolation(format!(
                    "z-exponent {}/2 in slot {i} is not integral",
                    d2[i]
                )));
            }
        }
        Ok(JacobiForm {
            series,
            weight,
            index,
            character,
            group,
        })
    }

    pub fn scale(&self, c: &Rat) -> JacobiForm {
        JacobiForm {
            series: self.series.scale(c),
            ..self.clone()
        }
    }

    pub fn mul(&self, other: &JacobiForm) -> Result<JacobiForm, KernelError> {
        if self.group != other.group {
            return Err(KernelError::LatticeMismatch(format!(
                "cannot multiply forms over {} and {}",
                self.group.name, other.group.name
            )));
        }
        Ok(JacobiForm {
            series: self.series.mul(&other.series),
            weight: self.weight + other.weight,
            index: self.index + other.index,
            character: self.character.mul(other.character),
            group: self.group.clone(),
        })
    }

    /// Multiply by a one-variable modular form: the weight adds, index and
    /// character are untouched.
    pub fn mul_modular(&self, m: &crate::qseries::ModularForm) -> JacobiForm {
        JacobiForm {
            series: self.series.mul_qseries(&m.series),
            weight: self.weight + m.weight,
            ..self.clone()
        }
    }

    pub fn add(&self, other: &JacobiForm) -> Result<JacobiForm, KernelError> {
        if self.group != other.group
            || self.weight != other.weight
            || self.index != other.index
            || self.character != other.character
        {
            return Err(KernelError::IndexMismatch(format!(
                "cannot add weight {} index {} to weight {} index {}",
                self.weight, self.index, other.weight, other.index
            )));
        }
        Ok(JacobiForm {
            series: self.series.add(&other.series),
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &JacobiForm) -> Result<JacobiForm, KernelError> {
        self.add(&other.scale(&rat_i(-1)))
    }

    /// Verify the index-t elliptic law on every stored coefficient, for
    /// shifts of z by b*tau over all signed basis vectors b. A coefficient
    /// whose image lands at a negative q-power must vanish; images at or
    /// beyond the truncation are skipped, everything else must match.
    pub fn check_elliptic(&self) -> InvarianceReport {
        let lat = &self.series.lat;
        let rank = lat.rank;
        let t = self.index;
        let g = &lat.gram_normalized;
        let mut shifts: Vec<Vec<i64>> = Vec::new();
        for i in 0..rank {
            let mut c = vec![0i64; rank];
            c[i] = 1;
            shifts.push(c.clone());
            c[i] = -1;
            shifts.push(c);
        }
        let mut checked = 0usize;
        let mut failures = Vec::new();
        for (n24, d2, coeff) in self.series.iter_terms() {
            for c in &shifts {
                let gc: Vec<i64> = (0..rank)
                    .map(|i| (0..rank).map(|j| g[i][j] * c[j]).sum())
                    .collect();
                let ctgc: i64 = (0..rank).map(|i| c[i] * gc[i]).sum();
                let dc: i64 = (0..rank).map(|i| d2[i] * c[i]).sum();
                let n24p = n24 + 12 * t * ctgc + 12 * dc;
                let d2p: Vec<i64> = (0..rank).map(|i| d2[i] + 2 * t * gc[i]).collect();
                if n24p < 0 {
                    checked += 1;
                    if !coeff.is_zero() {
                        failures.push(format!(
                            "coefficient at q^{}/24 maps to negative q-power {}",
                            n24,
                            n24p / 24
                        ));
                    }
                } else if n24p < self.series.trunc24 {
                    checked += 1;
                    if &self.series.coefficient(n24p, &d2p) != coeff {
                        failures.push(format!(
                            "elliptic law broken between q-exponents {n24}/24 and {n24p}/24"
                        ));
                    }
                }
            }
        }
        InvarianceReport { checked, failures }
    }

    /// Verify equivariance under every group generator: applying the
    /// generator's exponent action must reproduce the series up to the
    /// character value.
    pub fn check_group_invariance(&self) -> InvarianceReport {
        let mut failures = Vec::new();
        let mut checked = 0usize;
        for g in &self.group.gens {
            checked += 1;
            let transformed = self.series.apply_d_matrix(&g.d_action);
            let expect = match self.character.sign(g.det) {
                1 => self.series.clone(),
                s => self.series.scale(&rat_i(s)),
            };
            if transformed != expect {
                failures.push(format!("generator {} breaks equivariance", g.label));
            }
        }
        InvarianceReport { checked, failures }
    }
}
