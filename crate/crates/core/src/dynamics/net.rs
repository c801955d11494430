//! Word-to-point nets from a serializable catalog.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::codec::Codec;
use crate::space::{Coord, Point, Space};
use crate::word::{min_index, LocatedWord, Word};

use super::system::{Scalar, WordSystem};
use super::DynError;

/// Assigns a point to every constant word of the examined universe.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "net", rename_all = "kebab-case")]
pub enum Net {
    Constant { point: Point },
    /// `w ↦ T^w(start)`.
    Orbit {
        #[serde(flatten)]
        system: WordSystem,
        start: Point,
    },
    /// `w ↦ decode(w) · scale mod 1` on a circle.
    DecodedAngle {
        #[serde(flatten)]
        codec: Codec,
        scale: Scalar,
    },
    /// `w ↦ 1 / min_index(w)` on a circle.
    IndexReciprocal,
    /// Explicit table with an optional default point.
    Table {
        entries: Vec<(Word, Point)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        default: Option<Point>,
    },
}

impl Net {
    pub fn eval(&self, space: &Space, w: &LocatedWord) -> Result<Point, DynError> {
        match self {
            Net::Constant { point } => Ok(point.clone()),
            Net::Orbit { system, start } => system.apply(space, w, start),
            Net::DecodedAngle { codec, scale } => {
                let value = codec.decode(w)?;
                match (space, scale) {
                    (Space::CircleExact, Scalar::Exact(a)) => {
                        Ok(Point::Circle(Coord::exact(a * &value)))
                    }
                    (Space::CircleFloat, s) => {
                        let a = match s {
                            Scalar::Exact(q) => {
                                use num_traits::ToPrimitive;
                                q.to_f64().unwrap_or(f64::NAN)
                            }
                            Scalar::Float(x) => *x,
                        };
                        use num_traits::ToPrimitive;
                        Ok(Point::circle_float(a * value.to_f64().unwrap_or(f64::NAN)))
                    }
                    _ => Err(DynError::Mismatch("decoded-angle net needs a circle".into())),
                }
            }
            Net::IndexReciprocal => {
                let m = min_index(&w.to_word())?;
                match space {
                    Space::CircleExact => Ok(Point::Circle(Coord::exact(BigRational::new(
                        BigInt::from(1),
                        BigInt::from(m),
                    )))),
                    Space::CircleFloat => Ok(Point::circle_float(1.0 / m as f64)),
                    _ => Err(DynError::Mismatch("index-reciprocal net needs a circle".into())),
                }
            }
            Net::Table { entries, default } => {
                let key = w.to_word();
                for (word, point) in entries {
                    if *word == key {
                        return Ok(point.clone());
                    }
                }
                default.clone().ok_or_else(|| {
                    DynError::Mismatch("table net has no entry for the word".into())
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Kind;

    #[test]
    fn index_reciprocal_net() {
        let w = LocatedWord::new(Kind::TwoSided, [(-3, 1), (2, 1)]).unwrap();
        let p = Net::IndexReciprocal.eval(&Space::CircleExact, &w).unwrap();
        assert_eq!(p, Point::circle_exact(1, 2));
    }

    #[test]
    fn orbit_net_tracks_the_system() {
        let net = Net::Orbit {
            system: WordSystem::CodecRotation {
                codec: Codec::Rational,
                scale: Scalar::exact(1, 3),
            },
            start: Point::circle_exact(0, 1),
        };
        let w = LocatedWord::new(Kind::TwoSided, [(1, 1)]).unwrap(); // decodes to 1
        assert_eq!(
            net.eval(&Space::CircleExact, &w).unwrap(),
            Point::circle_exact(1, 3)
        );
    }
}
