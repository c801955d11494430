//! Bounded partition searches: color the constant words, then look for a
//! variable word (or an extraction prefix) all of whose substitutions land
//! in one color class. Budgets make every search finite; witnesses are
//! re-verified before they are returned.

pub mod hindman;
pub mod search;
pub mod universe;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{Codec, CodecError};
use crate::sequence::SequenceError;
use crate::space::{Point, Region, Space};
use crate::word::{LocatedWord, Word, WordError};

pub use hindman::{hindman_finite_check, HindmanReport};
pub use search::{
    search_monochromatic_extraction, search_monochromatic_substitutions,
    substitution_instances, verify_monochromatic_prefix, ExtractionWitness, SubstitutionWitness,
};

/// Hard cap on configured color counts.
pub const MAX_COLORS: u32 = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ColoringError {
    #[error("net value of a word is not covered by any set")]
    Uncovered(String),
    #[error("no table entry for word {0} and no default color")]
    MissingEntry(String),
    #[error("coloring declares {0} colors; the cap is {MAX_COLORS}")]
    TooManyColors(u32),
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error(transparent)]
    Codec(#[from] CodecError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Anything that assigns one of finitely many colors to every constant
/// word of the examined universe.
pub trait Coloring: Sync {
    fn color_count(&self) -> u32;
    /// 1-based color index.
    fn color(&self, w: &LocatedWord) -> Result<u32, ColoringError>;
}

/// Serializable coloring rules.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ColorRule {
    /// Everything gets color 1.
    Constant,
    /// Color `1 + (decoded value mod modulus)`; rationals go through
    /// their floor first.
    DecodedResidue {
        #[serde(flatten)]
        codec: Codec,
        modulus: u32,
    },
    /// Color 1 when the position is in the domain, 2 otherwise.
    HasPosition { position: i32 },
    /// Color `1 + (domain size mod modulus)`.
    LengthResidue { modulus: u32 },
    /// Explicit table with an optional default.
    Table {
        entries: Vec<(Word, u32)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        default: Option<u32>,
    },
}

/// A coloring from the serializable catalog.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(try_from = "CatalogRepr", into = "CatalogRepr")]
pub struct CatalogColoring {
    colors: u32,
    rule: ColorRule,
}

#[derive(Serialize, Deserialize)]
struct CatalogRepr {
    colors: u32,
    rule: ColorRule,
}

impl TryFrom<CatalogRepr> for CatalogColoring {
    type Error = ColoringError;
    fn try_from(r: CatalogRepr) -> Result<Self, ColoringError> {
        CatalogColoring::new(r.colors, r.rule)
    }
}

impl From<CatalogColoring> for CatalogRepr {
    fn from(c: CatalogColoring) -> CatalogRepr {
        CatalogRepr { colors: c.colors, rule: c.rule }
    }
}

impl CatalogColoring {
    pub fn new(colors: u32, rule: ColorRule) -> Result<Self, ColoringError> {
        if colors == 0 || colors > MAX_COLORS {
            return Err(ColoringError::TooManyColors(colors));
        }
        match &rule {
            ColorRule::DecodedResidue { modulus, .. } | ColorRule::LengthResidue { modulus } => {
                if *modulus == 0 {
                    return Err(ColoringError::ZeroModulus);
                }
                if *modulus > colors {
                    return Err(ColoringError::TooManyColors(*modulus));
                }
            }
            _ => {}
        }
        Ok(CatalogColoring { colors, rule })
    }

    pub fn rule(&self) -> &ColorRule {
        &self.rule
    }
}

impl Coloring for CatalogColoring {
    fn color_count(&self) -> u32 {
        self.colors
    }

    fn color(&self, w: &LocatedWord) -> Result<u32, ColoringError> {
        match &self.rule {
            ColorRule::Constant => Ok(1),
            ColorRule::DecodedResidue { codec, modulus } => {
                let q = codec.decode(w)?;
                let floored = q.floor().to_integer();
                let m = num_bigint::BigInt::from(*modulus);
                let residue = ((floored % &m) + &m) % &m;
                Ok(1 + residue.to_u32().expect("residue below modulus"))
            }
            ColorRule::HasPosition { position } => {
                Ok(if w.entries().contains_key(position) { 1 } else { 2 })
            }
            ColorRule::LengthResidue { modulus } => Ok(1 + (w.len() as u32) % modulus),
            ColorRule::Table { entries, default } => {
                let key = w.to_word();
                for (word, color) in entries {
                    if *word == key {
                        return Ok(*color);
                    }
                }
                default.ok_or_else(|| {
                    ColoringError::MissingEntry(serde_json::to_string(&key).unwrap_or_default())
                })
            }
        }
    }
}

/// Least-index coloring induced by a word-to-point net over a list of
/// sets (closed balls or finite ball intersections): the color of `w` is
/// the first set containing `net(w)`.
pub struct NetColoring<'a, N>
where
    N: Fn(&LocatedWord) -> Point + Sync,
{
    space: &'a Space,
    sets: Vec<Region>,
    net: N,
}

/// Builds the least-index coloring from a net and a covering list of sets.
pub fn coloring_from_net<N>(space: &Space, sets: Vec<Region>, net: N) -> NetColoring<'_, N>
where
    N: Fn(&LocatedWord) -> Point + Sync,
{
    NetColoring { space, sets, net }
}

impl<'a, N> Coloring for NetColoring<'a, N>
where
    N: Fn(&LocatedWord) -> Point + Sync,
{
    fn color_count(&self) -> u32 {
        self.sets.len() as u32
    }

    fn color(&self, w: &LocatedWord) -> Result<u32, ColoringError> {
        let p = (self.net)(w);
        for (i, set) in self.sets.iter().enumerate() {
            if set.contains(self.space, &p) {
                return Ok(i as u32 + 1);
            }
        }
        Err(ColoringError::Uncovered(
            serde_json::to_string(&w.to_word()).unwrap_or_default(),
        ))
    }
}

/// Resource bounds for a search. The seed only matters for operations
/// that sample; the deterministic scans ignore it.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Candidate domains stay within `±window`.
    pub window: u32,
    /// Picks per extraction plan.
    pub max_plan_depth: u32,
    /// Candidates examined before giving up.
    pub max_candidates: u64,
    pub seed: u64,
}

impl SearchBudget {
    pub fn new(window: u32, max_plan_depth: u32, max_candidates: u64, seed: u64) -> Self {
        SearchBudget { window, max_plan_depth, max_candidates, seed }
    }
}

/// Outcome of a bounded search. `Exhausted` reports how much of the
/// universe was examined and whether that was all of it.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SearchOutcome<T> {
    Found {
        #[serde(flatten)]
        witness: T,
    },
    Exhausted {
        examined: u64,
        complete: bool,
    },
}

impl<T> SearchOutcome<T> {
    pub fn found(&self) -> Option<&T> {
        match self {
            SearchOutcome::Found { witness } => Some(witness),
            SearchOutcome::Exhausted { .. } => None,
        }
    }

    pub fn is_found(&self) -> bool {
        self.found().is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domination::{BoundRule, DominationVector};
    use crate::space::{Ball, Coord};
    use crate::word::Kind;

    fn w(entries: &[(i32, u64)]) -> LocatedWord {
        LocatedWord::new(Kind::TwoSided, entries.iter().copied()).unwrap()
    }

    #[test]
    fn catalog_colorings() {
        let c = CatalogColoring::new(1, ColorRule::Constant).unwrap();
        assert_eq!(c.color(&w(&[(1, 1)])).unwrap(), 1);

        let c = CatalogColoring::new(
            2,
            ColorRule::DecodedResidue { codec: Codec::Rational, modulus: 2 },
        )
        .unwrap();
        // decode({1:1}) = 1 -> odd -> color 2; decode({1:1,2:2}) = -3 -> floor -3 -> odd.
        assert_eq!(c.color(&w(&[(1, 1)])).unwrap(), 2);
        assert_eq!(c.color(&w(&[(1, 1), (2, 2)])).unwrap(), 2);
        // decode({-1:1}) = -1/2, floor = -1 -> color 2; decode({2:2,3:1}) = 2 -> color 1.
        assert_eq!(c.color(&w(&[(-1, 1)])).unwrap(), 2);
        assert_eq!(c.color(&w(&[(2, 2), (3, 1)])).unwrap(), 1);

        let c = CatalogColoring::new(2, ColorRule::HasPosition { position: 1 }).unwrap();
        assert_eq!(c.color(&w(&[(1, 1)])).unwrap(), 1);
        assert_eq!(c.color(&w(&[(2, 1)])).unwrap(), 2);

        assert!(CatalogColoring::new(17, ColorRule::Constant).is_err());
    }

    #[test]
    fn net_coloring_uses_least_index() {
        let space = Space::CircleExact;
        let dom = DominationVector::two_sided(BoundRule::Abs).unwrap();
        let _ = dom;
        // Two overlapping half-circle balls.
        let b1 = Region::whole().and(Ball { center: Point::circle_exact(0, 1), radius: 0.3 });
        let b2 = Region::whole().and(Ball { center: Point::circle_exact(1, 2), radius: 0.5 });
        let coloring = coloring_from_net(&space, vec![b1, b2], |w: &LocatedWord| {
            // Net: decoded value mod 1.
            let q = crate::codec::decode_rational(w).unwrap();
            Point::Circle(Coord::exact(q))
        });
        // decode({1:1}) = 1 -> 0 mod 1: in ball 1 (distance 0) -> color 1.
        assert_eq!(coloring.color(&w(&[(1, 1)])).unwrap(), 1);
        // decode({-1:1}) = -1/2 -> 1/2: only ball 2.
        assert_eq!(coloring.color(&w(&[(-1, 1)])).unwrap(), 2);
        // Overlap: 0.3 from zero is inside both -> least index wins.
        // decode({-2:1, 1:1}) = 1 + 1/6 -> 1/6 ~ 0.166: both balls contain it.
        let both = w(&[(-2, 1), (1, 1)]);
        assert_eq!(coloring.color(&both).unwrap(), 1);

        // A single whole-space ball colors everything 1.
        let all = Region::whole().and(Ball { center: Point::circle_exact(0, 1), radius: 0.5 });
        let constant = coloring_from_net(&space, vec![all], |w: &LocatedWord| {
            let q = crate::codec::decode_rational(w).unwrap();
            Point::Circle(Coord::exact(q))
        });
        assert_eq!(constant.color(&w(&[(-1, 1)])).unwrap(), 1);

        // Uncovered values error.
        let small = Region::whole().and(Ball { center: Point::circle_exact(0, 1), radius: 0.1 });
        let partial = coloring_from_net(&space, vec![small], |w: &LocatedWord| {
            let q = crate::codec::decode_rational(w).unwrap();
            Point::Circle(Coord::exact(q))
        });
        assert!(matches!(
            partial.color(&w(&[(-1, 1)])),
            Err(ColoringError::Uncovered(_))
        ));
    }
}
