//! Commutative-semigroup images of words: a table assigns an element to
//! every (letter, position) pair, and a word maps to the sum over its
//! entries. The image is additive over disjoint concatenation, so
//! semigroup translations indexed through it satisfy the composition law
//! exactly.

use std::ops::Add;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::ramsey::SearchOutcome;
use crate::sequence::WordSequence;
use crate::space::{Point, Space};
use crate::word::{LocatedWord, Position, Subst, Symbol, VariableWord};

use super::refine::{find_recurrent_point, RecurrentPoint, RefineParams};
use super::system::{Scalar, WordSystem};
use super::DynError;

/// An element of one of the catalog carriers.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SemiElem {
    Int(BigInt),
    Rat(BigRational),
    /// Residue in a cyclic group; the modulus lives in the table.
    Cyc(u64),
    Vec(Vec<i64>),
}

impl SemiElem {
    fn zero_like(&self) -> SemiElem {
        match self {
            SemiElem::Int(_) => SemiElem::Int(BigInt::zero()),
            SemiElem::Rat(_) => SemiElem::Rat(BigRational::zero()),
            SemiElem::Cyc(_) => SemiElem::Cyc(0),
            SemiElem::Vec(v) => SemiElem::Vec(vec![0; v.len()]),
        }
    }
}

/// How table entries are produced.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum ElementRule {
    /// `y(v, n) = v` with the sign of the position's side.
    SignedLetter,
    /// `y(v, n) = p[v]·y_n` on the positive side, `q[v]·y_n` on the
    /// negative side, with `y_n = |n|` (index) or `1`.
    PqBase { p: Vec<i64>, q: Vec<i64>, index_base: bool },
    /// Explicit entries keyed by stored letter and signed position.
    Table { entries: Vec<(u64, Position, SemiElem)> },
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "carrier", rename_all = "kebab-case")]
pub enum Carrier {
    Integers,
    Rationals,
    Cyclic { modulus: u64 },
    Vectors { dim: usize },
}

/// The element family `y(letter, position)` over a carrier.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct SemigroupTable {
    pub carrier: Carrier,
    #[serde(flatten)]
    pub rule: ElementRule,
}

impl SemigroupTable {
    fn scalar_element(&self, value: i64) -> SemiElem {
        match &self.carrier {
            Carrier::Integers => SemiElem::Int(BigInt::from(value)),
            Carrier::Rationals => SemiElem::Rat(BigRational::from(BigInt::from(value))),
            Carrier::Cyclic { modulus } => {
                SemiElem::Cyc(value.rem_euclid(*modulus as i64) as u64)
            }
            Carrier::Vectors { dim } => {
                let mut v = vec![0i64; *dim];
                if *dim > 0 {
                    v[0] = value;
                }
                SemiElem::Vec(v)
            }
        }
    }

    /// `y(letter, position)`: `letter` is the stored value, the side
    /// comes from the position's sign.
    pub fn element(&self, letter: u64, position: Position) -> Result<SemiElem, DynError> {
        match &self.rule {
            ElementRule::SignedLetter => {
                let signed = if position > 0 { letter as i64 } else { -(letter as i64) };
                Ok(self.scalar_element(signed))
            }
            ElementRule::PqBase { p, q, index_base } => {
                let coeffs = if position > 0 { p } else { q };
                let c = coeffs.get(letter as usize - 1).copied().ok_or(
                    DynError::MissingTableEntry { letter: letter as i64, position },
                )?;
                let base = if *index_base { position.unsigned_abs() as i64 } else { 1 };
                Ok(self.scalar_element(c * base))
            }
            ElementRule::Table { entries } => entries
                .iter()
                .find(|(l, n, _)| *l == letter && *n == position)
                .map(|(_, _, e)| e.clone())
                .ok_or(DynError::MissingTableEntry { letter: letter as i64, position }),
        }
    }

    pub fn add(&self, a: &SemiElem, b: &SemiElem) -> Result<SemiElem, DynError> {
        match (a, b) {
            (SemiElem::Int(x), SemiElem::Int(y)) => Ok(SemiElem::Int(x.clone().add(y))),
            (SemiElem::Rat(x), SemiElem::Rat(y)) => Ok(SemiElem::Rat(x + y)),
            (SemiElem::Cyc(x), SemiElem::Cyc(y)) => match &self.carrier {
                Carrier::Cyclic { modulus } => Ok(SemiElem::Cyc((x + y) % modulus)),
                _ => Err(DynError::Mismatch("cyclic element off-carrier".into())),
            },
            (SemiElem::Vec(x), SemiElem::Vec(y)) if x.len() == y.len() => {
                Ok(SemiElem::Vec(x.iter().zip(y).map(|(a, b)| a + b).collect()))
            }
            _ => Err(DynError::Mismatch("semigroup element kinds differ".into())),
        }
    }
}

/// The additive image of a word: the sum of `y(letter, position)` over
/// its entries.
pub fn semigroup_phi(table: &SemigroupTable, w: &LocatedWord) -> Result<SemiElem, DynError> {
    let mut acc: Option<SemiElem> = None;
    for (&p, &v) in w.entries() {
        let e = table.element(v, p)?;
        acc = Some(match acc {
            None => e,
            Some(a) => table.add(&a, &e)?,
        });
    }
    Ok(acc.expect("words are nonempty"))
}

/// Image of a variable word at a substitution choice.
pub fn semigroup_phi_at(
    table: &SemigroupTable,
    vw: &VariableWord,
    i: u64,
    j: u64,
) -> Result<SemiElem, DynError> {
    let mut acc: Option<SemiElem> = None;
    for (&p, &sym) in vw.entries() {
        let letter = match sym {
            Symbol::Letter(v) => v,
            Symbol::Variable => {
                if p > 0 {
                    i
                } else {
                    j
                }
            }
        };
        let e = table.element(letter, p)?;
        acc = Some(match acc {
            None => e,
            Some(a) => table.add(&a, &e)?,
        });
    }
    Ok(acc.expect("words are nonempty"))
}

fn sub_elem(table: &SemigroupTable, a: &SemiElem, b: &SemiElem) -> Result<SemiElem, DynError> {
    // Catalog carriers are groups, so differences exist.
    match (a, b) {
        (SemiElem::Int(x), SemiElem::Int(y)) => Ok(SemiElem::Int(x - y)),
        (SemiElem::Rat(x), SemiElem::Rat(y)) => Ok(SemiElem::Rat(x - y)),
        (SemiElem::Cyc(x), SemiElem::Cyc(y)) => match &table.carrier {
            Carrier::Cyclic { modulus } => Ok(SemiElem::Cyc((x + modulus - y % modulus) % modulus)),
            _ => Err(DynError::Mismatch("cyclic element off-carrier".into())),
        },
        (SemiElem::Vec(x), SemiElem::Vec(y)) if x.len() == y.len() => {
            Ok(SemiElem::Vec(x.iter().zip(y).map(|(a, b)| a - b).collect()))
        }
        _ => Err(DynError::Mismatch("semigroup element kinds differ".into())),
    }
}

fn scale_elem(table: &SemigroupTable, a: &SemiElem, k: u64) -> Result<SemiElem, DynError> {
    let mut acc = a.zero_like();
    for _ in 0..k {
        acc = table.add(&acc, a)?;
    }
    Ok(acc)
}

/// The step form of a witness term: base value plus per-letter
/// increments, when the term's image is affine in the substitution
/// letters.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct TermDecomposition {
    /// Value at the smallest substitution `(1, 1)`.
    pub alpha: SemiElem,
    /// Increment per positive-side letter step.
    pub beta: SemiElem,
    /// Increment per negative-side letter step, two-sided words only.
    pub gamma: Option<SemiElem>,
    /// Whether `alpha + (i−1)·beta + (j−1)·gamma` reproduced every legal
    /// substitution image.
    pub affine_verified: bool,
}

/// Decomposes the substitution images of a sequence term and re-verifies
/// the affine form by direct evaluation over the legal letter range.
pub fn decompose_term(
    table: &SemigroupTable,
    seq: &WordSequence,
    slot: usize,
) -> Result<TermDecomposition, DynError> {
    let term = seq
        .term(slot)
        .ok_or_else(|| DynError::Mismatch(format!("no term in slot {slot}")))?;
    let (p_bound, q_bound) = seq.slot_bounds(slot)?;
    let two_sided = q_bound.is_some();
    let alpha = semigroup_phi_at(table, term, 1, 1)?;
    let beta = if p_bound >= 2 {
        sub_elem(table, &semigroup_phi_at(table, term, 2, 1)?, &alpha)?
    } else {
        alpha.zero_like()
    };
    let gamma = if two_sided {
        let qb = q_bound.unwrap();
        Some(if qb >= 2 {
            sub_elem(table, &semigroup_phi_at(table, term, 1, 2)?, &alpha)?
        } else {
            alpha.zero_like()
        })
    } else {
        None
    };
    let mut affine_verified = true;
    for i in 1..=p_bound {
        for j in 1..=q_bound.unwrap_or(1) {
            let direct = semigroup_phi_at(table, term, i, j)?;
            let mut predicted = table.add(&alpha, &scale_elem(table, &beta, i - 1)?)?;
            if let Some(g) = &gamma {
                predicted = table.add(&predicted, &scale_elem(table, g, j - 1)?)?;
            }
            if direct != predicted {
                affine_verified = false;
            }
        }
    }
    Ok(TermDecomposition { alpha, beta, gamma, affine_verified })
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct SemigroupRecurrence {
    pub point: RecurrentPoint,
    pub decomposition: Vec<TermDecomposition>,
}

/// Runs the recurrence search for the translation system indexed through
/// the semigroup image, then reports the step decomposition of every
/// witness term.
pub fn semigroup_recurrence(
    space: &Space,
    table: &SemigroupTable,
    scale: &Scalar,
    base: &WordSequence,
    start: &Point,
    params: &RefineParams,
) -> Result<SearchOutcome<SemigroupRecurrence>, DynError> {
    let sys = WordSystem::Phi { table: table.clone(), scale: scale.clone() };
    let point = match find_recurrent_point(space, &sys, base, start, params)? {
        SearchOutcome::Found { witness } => witness,
        SearchOutcome::Exhausted { examined, complete } => {
            return Ok(SearchOutcome::Exhausted { examined, complete })
        }
    };
    let mut decomposition = Vec::with_capacity(point.prefix.len());
    for slot in 1..=point.prefix.len() {
        decomposition.push(decompose_term(table, &point.prefix, slot)?);
    }
    Ok(SearchOutcome::Found {
        witness: SemigroupRecurrence { point, decomposition },
    })
}

/// Substitutes into a prefix term and applies the system: used to
/// re-verify decompositions externally.
pub fn phi_of_substitution(
    table: &SemigroupTable,
    seq: &WordSequence,
    slot: usize,
    sub: Subst,
) -> Result<SemiElem, DynError> {
    let term = seq
        .term(slot)
        .ok_or_else(|| DynError::Mismatch(format!("no term in slot {slot}")))?;
    let inst = term.substitute(sub, seq.domination())?;
    semigroup_phi(table, inst.as_constant().expect("constant substitution"))
}
