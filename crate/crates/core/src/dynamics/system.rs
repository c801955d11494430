//! Word-indexed systems: families of maps `T^w` with
//! `T^{w1} ∘ T^{w2} = T^{w1 ⋆ w2}` for order-related pairs. Every catalog
//! system acts by translations in its space's coordinates, so the law is
//! exact wherever the coordinates are.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::codec::Codec;
use crate::sample;
use crate::space::{wrap_exact, wrap_float, Coord, Point, Space};
use crate::word::{LocatedWord, Position, Word};

use super::DynError;

/// Exact or floating scalar, e.g. a rotation angle.
#[derive(Clone, PartialEq, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn exact(n: i64, d: i64) -> Scalar {
        Scalar::Exact(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(q) => s.serialize_str(&q.to_string()),
            Scalar::Float(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Num(f64),
        }
        match Repr::deserialize(d)? {
            Repr::Text(s) => s
                .parse::<BigRational>()
                .map(Scalar::Exact)
                .map_err(|e| D::Error::custom(format!("bad rational {s:?}: {e}"))),
            Repr::Num(x) => Ok(Scalar::Float(x)),
        }
    }
}

/// A base self-map used by exponent-driven systems.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "kebab-case")]
pub enum MapSpec {
    Identity,
    /// Circle translation by `angle`.
    CircleRotation { angle: Scalar },
    /// `x ↦ x + step` on a finite cyclic set.
    DiscreteShift { step: i64 },
}

impl MapSpec {
    /// Applies the `exponent`-th power.
    fn apply_pow(&self, space: &Space, exponent: &BigInt, x: &Point) -> Result<Point, DynError> {
        match self {
            MapSpec::Identity => Ok(x.clone()),
            MapSpec::CircleRotation { angle } => {
                rotate(space, x, &scalar_times_int(angle, exponent))
            }
            MapSpec::DiscreteShift { step } => {
                let offset = exponent * BigInt::from(*step);
                shift_discrete(space, x, &offset)
            }
        }
    }
}

fn scalar_times_int(s: &Scalar, n: &BigInt) -> Scalar {
    match s {
        Scalar::Exact(q) => Scalar::Exact(q * BigRational::from(n.clone())),
        Scalar::Float(x) => Scalar::Float(x * n.to_f64().unwrap_or(f64::NAN)),
    }
}

fn scalar_times_rational(s: &Scalar, q: &BigRational) -> Scalar {
    match s {
        Scalar::Exact(a) => Scalar::Exact(a * q),
        Scalar::Float(x) => Scalar::Float(x * q.to_f64().unwrap_or(f64::NAN)),
    }
}

fn rotate(space: &Space, x: &Point, offset: &Scalar) -> Result<Point, DynError> {
    match (space, x) {
        (Space::CircleExact, Point::Circle(Coord::Exact(c))) => match offset {
            Scalar::Exact(o) => Ok(Point::Circle(Coord::Exact(wrap_exact(c + o)))),
            Scalar::Float(_) => Err(DynError::Mismatch(
                "float offset on the exact circle".into(),
            )),
        },
        (Space::CircleFloat, Point::Circle(c)) => {
            let o = match offset {
                Scalar::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
                Scalar::Float(x) => *x,
            };
            Ok(Point::Circle(Coord::Float(wrap_float(c.to_f64() + o))))
        }
        _ => Err(DynError::Mismatch("rotation needs a circle".into())),
    }
}

fn shift_discrete(space: &Space, x: &Point, offset: &BigInt) -> Result<Point, DynError> {
    match (space, x) {
        (Space::Discrete { size }, Point::Discrete(i)) => {
            let m = BigInt::from(*size);
            let v = (BigInt::from(*i) + offset) % &m;
            let v = if v.is_negative() { v + &m } else { v };
            Ok(Point::Discrete(v.to_u64().expect("reduced mod size")))
        }
        _ => Err(DynError::Mismatch("shift needs a discrete space".into())),
    }
}

/// Per-position exponent weights.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "weights", rename_all = "kebab-case")]
pub enum WeightRule {
    /// Every position weighs 1: the exponent is the letter sum.
    One,
    /// Position `n` weighs `|n|`.
    Position,
    /// Explicit weights for `|n| = 1..=len`, error beyond.
    Table { values: Vec<u64> },
}

impl WeightRule {
    fn weight(&self, index: u32) -> Result<BigInt, DynError> {
        match self {
            WeightRule::One => Ok(BigInt::from(1)),
            WeightRule::Position => Ok(BigInt::from(index)),
            WeightRule::Table { values } => values
                .get(index as usize - 1)
                .map(|v| BigInt::from(*v))
                .ok_or(DynError::MissingWeight(index)),
        }
    }
}

/// A word-indexed system from the catalog.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "kebab-case")]
pub enum WordSystem {
    /// `T^w = id` for every word.
    Identity,
    /// Translation by `decode(w) · scale`: a rotation on circles, a shift
    /// on finite cyclic sets.
    CodecRotation {
        #[serde(flatten)]
        codec: Codec,
        scale: Scalar,
    },
    /// One base map raised to the weighted letter sum
    /// `Σ weight(|n|) · w_n`.
    SingleMap {
        #[serde(flatten)]
        map: MapSpec,
        #[serde(flatten)]
        weights: WeightRule,
    },
    /// Two commuting base maps, one per side of zero, each raised to that
    /// side's weighted letter sum.
    BiSequence {
        pos: MapSpec,
        neg: MapSpec,
        #[serde(flatten)]
        weights: WeightRule,
    },
    /// Tuple of systems acting coordinatewise.
    Product { components: Vec<WordSystem> },
    /// Image map on finite point sets of the base system's space.
    HyperspaceLift { base: Box<WordSystem> },
    /// `T_a^w ∘ (T_b^w)⁻¹`; the quotient systems of the multiple
    /// recurrence induction.
    Quotient { a: Box<WordSystem>, b: Box<WordSystem> },
    /// Translation by the semigroup image of the word, scaled.
    Phi {
        table: super::semigroup::SemigroupTable,
        scale: Scalar,
    },
    /// Deliberately lawless: drops each word's first entry before acting,
    /// which does not commute with concatenation. Negative control for
    /// the law check.
    BrokenIgnore { inner: Box<WordSystem> },
}

impl WordSystem {
    pub fn apply(&self, space: &Space, w: &LocatedWord, x: &Point) -> Result<Point, DynError> {
        self.apply_signed(space, w, x, false)
    }

    /// Applies the inverse map `('T^w)^{−1}`.
    pub fn apply_inv(&self, space: &Space, w: &LocatedWord, x: &Point) -> Result<Point, DynError> {
        self.apply_signed(space, w, x, true)
    }

    fn apply_signed(
        &self,
        space: &Space,
        w: &LocatedWord,
        x: &Point,
        invert: bool,
    ) -> Result<Point, DynError> {
        match self {
            WordSystem::Identity => Ok(x.clone()),
            WordSystem::CodecRotation { codec, scale } => {
                let value = codec.decode(w)?;
                let value = if invert { -value } else { value };
                match space {
                    Space::Discrete { .. } => {
                        let offset = match scalar_times_rational(scale, &value) {
                            Scalar::Exact(q) if q.is_integer() => q.to_integer(),
                            _ => {
                                return Err(DynError::Mismatch(
                                    "discrete shift needs an integer offset".into(),
                                ))
                            }
                        };
                        shift_discrete(space, x, &offset)
                    }
                    _ => rotate(space, x, &scalar_times_rational(scale, &value)),
                }
            }
            WordSystem::SingleMap { map, weights } => {
                let mut e = BigInt::zero();
                for (&p, &v) in w.entries() {
                    e += weights.weight(p.unsigned_abs())? * BigInt::from(v);
                }
                if invert {
                    e = -e;
                }
                map.apply_pow(space, &e, x)
            }
            WordSystem::BiSequence { pos, neg, weights } => {
                let mut e_pos = BigInt::zero();
                let mut e_neg = BigInt::zero();
                for (&p, &v) in w.entries() {
                    let idx = p.unsigned_abs();
                    let term = weights.weight(idx)? * BigInt::from(idx) * BigInt::from(v);
                    if p > 0 {
                        e_pos += term;
                    } else {
                        e_neg += term;
                    }
                }
                if invert {
                    e_pos = -e_pos;
                    e_neg = -e_neg;
                }
                let y = pos.apply_pow(space, &e_pos, x)?;
                neg.apply_pow(space, &e_neg, &y)
            }
            WordSystem::Product { components } => match x {
                Point::Tuple(xs) => {
                    let spaces = match space {
                        Space::Product { components: s } => s,
                        _ => return Err(DynError::Mismatch("product system off-space".into())),
                    };
                    if xs.len() != components.len() || spaces.len() != components.len() {
                        return Err(DynError::Mismatch("product arity mismatch".into()));
                    }
                    let out = components
                        .iter()
                        .zip(spaces.iter().zip(xs))
                        .map(|(sys, (sp, x))| sys.apply_signed(sp, w, x, invert))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(Point::Tuple(out))
                }
                _ => Err(DynError::Mismatch("product system needs a tuple point".into())),
            },
            WordSystem::HyperspaceLift { base } => match (space, x) {
                (Space::Hyperspace { base: bspace }, Point::Set(xs)) => {
                    let out = xs
                        .iter()
                        .map(|p| base.apply_signed(bspace, w, p, invert))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(Point::set(out))
                }
                _ => Err(DynError::Mismatch("hyperspace lift needs a point set".into())),
            },
            WordSystem::Quotient { a, b } => {
                if invert {
                    let y = a.apply_inv(space, w, x)?;
                    b.apply(space, w, &y)
                } else {
                    let y = b.apply_inv(space, w, x)?;
                    a.apply(space, w, &y)
                }
            }
            WordSystem::Phi { table, scale } => {
                use super::semigroup::SemiElem;
                let value = super::semigroup::semigroup_phi(table, w)?;
                let as_rational = match &value {
                    SemiElem::Int(z) => BigRational::from(z.clone()),
                    SemiElem::Rat(q) => q.clone(),
                    SemiElem::Cyc(c) => BigRational::from(BigInt::from(*c)),
                    SemiElem::Vec(_) => {
                        return Err(DynError::Mismatch(
                            "vector-valued images act on product spaces only".into(),
                        ))
                    }
                };
                let as_rational = if invert { -as_rational } else { as_rational };
                match space {
                    Space::Discrete { .. } => {
                        let offset = match scalar_times_rational(scale, &as_rational) {
                            Scalar::Exact(q) if q.is_integer() => q.to_integer(),
                            _ => {
                                return Err(DynError::Mismatch(
                                    "discrete shift needs an integer offset".into(),
                                ))
                            }
                        };
                        shift_discrete(space, x, &offset)
                    }
                    _ => rotate(space, x, &scalar_times_rational(scale, &as_rational)),
                }
            }
            WordSystem::BrokenIgnore { inner } => {
                let first = w.min_pos();
                let kept: Vec<(Position, u64)> = w
                    .entries()
                    .iter()
                    .filter(|(&p, _)| p != first)
                    .map(|(&p, &v)| (p, v))
                    .collect();
                if kept.is_empty() {
                    return Ok(x.clone());
                }
                let trimmed = LocatedWord::new(w.kind(), kept)?;
                inner.apply_signed(space, &trimmed, x, invert)
            }
        }
    }

    /// Whether the inverse maps exist in this build.
    pub fn invertible(&self) -> bool {
        match self {
            WordSystem::BrokenIgnore { .. } => false,
            WordSystem::Product { components } => components.iter().all(|c| c.invertible()),
            WordSystem::HyperspaceLift { base } => base.invertible(),
            WordSystem::Quotient { a, b } => a.invertible() && b.invertible(),
            _ => true,
        }
    }

    /// All catalog maps are isometries, which is the continuity modulus
    /// the recurrence chaining needs. Broken systems have none.
    pub fn is_isometric(&self) -> bool {
        match self {
            WordSystem::BrokenIgnore { .. } => false,
            WordSystem::Product { components } => components.iter().all(|c| c.is_isometric()),
            WordSystem::HyperspaceLift { base } => base.is_isometric(),
            WordSystem::Quotient { a, b } => a.is_isometric() && b.is_isometric(),
            _ => true,
        }
    }
}

/// Law-check report: the largest deviation
/// `d(T^{w1}(T^{w2} x), T^{w1 ⋆ w2} x)` over sampled related pairs.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct LawReport {
    pub samples: u32,
    pub max_deviation: f64,
    pub worst: Option<(Word, Word)>,
}

/// Samples random order-related pairs and points and measures the
/// composition law. Exact systems must report exactly zero.
pub fn check_system_law(
    sys: &WordSystem,
    space: &Space,
    dom: &crate::domination::DominationVector,
    samples: u32,
    seed: u64,
) -> Result<LawReport, DynError> {
    let mut rng = sample::rng_from_seed(seed);
    let mut max_deviation = 0.0f64;
    let mut worst = None;
    for _ in 0..samples {
        let (w1, w2) = sample::random_related_pair(&mut rng, dom, 4);
        let x = space.sample(&mut rng);
        let c1 = w1.as_constant().unwrap();
        let c2 = w2.as_constant().unwrap();
        let joined = crate::word::concat(&w1, &w2)?;
        let joined = joined.as_constant().unwrap();
        let lhs = sys.apply(space, c1, &sys.apply(space, c2, &x)?)?;
        let rhs = sys.apply(space, joined, &x)?;
        let d = space.distance(&lhs, &rhs);
        if d > max_deviation {
            max_deviation = d;
            worst = Some((w1.clone(), w2.clone()));
        }
    }
    Ok(LawReport { samples, max_deviation, worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domination::{BoundRule, DominationVector};
    use crate::word::Kind;

    fn lw1(entries: &[(Position, u64)]) -> LocatedWord {
        LocatedWord::new(Kind::OneSided, entries.iter().copied()).unwrap()
    }

    #[test]
    fn codec_rotation_law_is_exact() {
        let sys = WordSystem::CodecRotation {
            codec: Codec::Rational,
            scale: Scalar::exact(17, 29),
        };
        let dom = DominationVector::two_sided(BoundRule::Abs).unwrap();
        let report = check_system_law(&sys, &Space::CircleExact, &dom, 200, 11).unwrap();
        assert_eq!(report.max_deviation, 0.0);
    }

    #[test]
    fn discrete_shift_law_is_exact() {
        let sys = WordSystem::SingleMap {
            map: MapSpec::DiscreteShift { step: 1 },
            weights: WeightRule::One,
        };
        let dom = DominationVector::one_sided(BoundRule::Constant(3)).unwrap();
        let report =
            check_system_law(&sys, &Space::Discrete { size: 7 }, &dom, 200, 12).unwrap();
        assert_eq!(report.max_deviation, 0.0);
    }

    #[test]
    fn broken_system_is_flagged() {
        let sys = WordSystem::BrokenIgnore {
            inner: Box::new(WordSystem::SingleMap {
                map: MapSpec::DiscreteShift { step: 1 },
                weights: WeightRule::One,
            }),
        };
        let dom = DominationVector::one_sided(BoundRule::Constant(3)).unwrap();
        let report =
            check_system_law(&sys, &Space::Discrete { size: 7 }, &dom, 200, 13).unwrap();
        assert!(report.max_deviation > 0.0);
        assert!(report.worst.is_some());
    }

    #[test]
    fn exponent_systems_compose() {
        // T^w = shift^(sum of letters) on Z/7.
        let sys = WordSystem::SingleMap {
            map: MapSpec::DiscreteShift { step: 1 },
            weights: WeightRule::One,
        };
        let space = Space::Discrete { size: 7 };
        let w = lw1(&[(1, 2), (3, 4)]);
        let x = Point::Discrete(3);
        assert_eq!(sys.apply(&space, &w, &x).unwrap(), Point::Discrete(2)); // 3+6 mod 7
        let y = sys.apply_inv(&space, &w, &sys.apply(&space, &w, &x).unwrap()).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn quotient_cancels_shared_factor() {
        let a = WordSystem::SingleMap {
            map: MapSpec::DiscreteShift { step: 2 },
            weights: WeightRule::One,
        };
        let b = WordSystem::SingleMap {
            map: MapSpec::DiscreteShift { step: 2 },
            weights: WeightRule::One,
        };
        let q = WordSystem::Quotient { a: Box::new(a), b: Box::new(b) };
        let space = Space::Discrete { size: 5 };
        let w = lw1(&[(2, 3)]);
        let x = Point::Discrete(1);
        assert_eq!(q.apply(&space, &w, &x).unwrap(), x);
    }

    #[test]
    fn hyperspace_lift_moves_sets() {
        let base = WordSystem::CodecRotation {
            codec: Codec::Rational,
            scale: Scalar::exact(1, 4),
        };
        let sys = WordSystem::HyperspaceLift { base: Box::new(base) };
        let space = Space::Hyperspace { base: Box::new(Space::CircleExact) };
        let w = LocatedWord::new(Kind::TwoSided, [(1, 1)]).unwrap(); // decodes to 1
        let a = Point::set(vec![Point::circle_exact(0, 1), Point::circle_exact(1, 2)]);
        let out = sys.apply(&space, &w, &a).unwrap();
        assert_eq!(
            out,
            Point::set(vec![Point::circle_exact(1, 4), Point::circle_exact(3, 4)])
        );
    }
}
