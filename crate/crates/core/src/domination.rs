//! Per-position letter bounds: the sequence that says which letters are
//! legal at every position of a word.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Whether positions range over all nonzero integers or positive ones only.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Kind {
    #[serde(rename = "two-sided")]
    TwoSided,
    #[serde(rename = "one-sided")]
    OneSided,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kind::TwoSided => write!(f, "two-sided"),
            Kind::OneSided => write!(f, "one-sided"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DominationError {
    #[error("bound at distance {index} from zero is {value}; bounds must be at least 1")]
    BoundBelowOne { index: u32, value: i64 },
    #[error("bounds must be nondecreasing away from zero (violated between {index} and {next})")]
    NotMonotone { index: u32, next: u32 },
    #[error("zero is not a valid position")]
    ZeroPosition,
    #[error("negative position {0} under a one-sided bound")]
    NegativePosition(i32),
    #[error("table tail must be a closed-form rule, not another table")]
    NestedTable,
    #[error("empty bound table")]
    EmptyTable,
    #[error("bound overflow at distance {0} from zero")]
    Overflow(u32),
}

/// Closed-form rule (or finite table with a closed-form tail) giving the
/// letter bound at distance `|n|` from zero.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum BoundRule {
    /// Same bound everywhere.
    Constant(u64),
    /// Bound `|n|` at position `n`.
    Abs,
    /// Bound `|n| + 1`.
    AbsPlusOne,
    /// Bound `a·|n| + b`. The intercept may be negative as long as the
    /// value at `|n| = 1` is at least one.
    Affine { slope: u64, intercept: i64 },
    /// Explicit values for `|n| = 1..=head.len()`, then the tail rule.
    Table { head: Vec<u64>, tail: Box<BoundRule> },
}

impl BoundRule {
    /// Raw evaluation at distance `index >= 1`; `None` on overflow.
    fn eval(&self, index: u32) -> Option<i64> {
        match self {
            BoundRule::Constant(c) => i64::try_from(*c).ok(),
            BoundRule::Abs => Some(i64::from(index)),
            BoundRule::AbsPlusOne => Some(i64::from(index) + 1),
            BoundRule::Affine { slope, intercept } => {
                let s = i64::try_from(*slope).ok()?;
                s.checked_mul(i64::from(index))?.checked_add(*intercept)
            }
            BoundRule::Table { head, tail } => {
                if let Some(v) = head.get(index as usize - 1) {
                    i64::try_from(*v).ok()
                } else {
                    tail.eval(index)
                }
            }
        }
    }

    fn validate(&self) -> Result<(), DominationError> {
        match self {
            BoundRule::Constant(c) => {
                if *c < 1 {
                    return Err(DominationError::BoundBelowOne { index: 1, value: *c as i64 });
                }
            }
            BoundRule::Abs | BoundRule::AbsPlusOne => {}
            BoundRule::Affine { slope, intercept } => {
                let at_one = (*slope as i64).checked_add(*intercept)
                    .ok_or(DominationError::Overflow(1))?;
                if at_one < 1 {
                    return Err(DominationError::BoundBelowOne { index: 1, value: at_one });
                }
            }
            BoundRule::Table { head, tail } => {
                if head.is_empty() {
                    return Err(DominationError::EmptyTable);
                }
                if matches!(**tail, BoundRule::Table { .. }) {
                    return Err(DominationError::NestedTable);
                }
                tail.validate()?;
                for (i, v) in head.iter().enumerate() {
                    if *v < 1 {
                        return Err(DominationError::BoundBelowOne {
                            index: i as u32 + 1,
                            value: *v as i64,
                        });
                    }
                }
                for i in 1..head.len() {
                    if head[i] < head[i - 1] {
                        return Err(DominationError::NotMonotone {
                            index: i as u32,
                            next: i as u32 + 1,
                        });
                    }
                }
                // Tail must pick up at or above the last table value.
                let first_tail_index = head.len() as u32 + 1;
                let tail_val = tail
                    .eval(first_tail_index)
                    .ok_or(DominationError::Overflow(first_tail_index))?;
                if tail_val < *head.last().unwrap() as i64 {
                    return Err(DominationError::NotMonotone {
                        index: head.len() as u32,
                        next: first_tail_index,
                    });
                }
                if tail_val < 1 {
                    return Err(DominationError::BoundBelowOne {
                        index: first_tail_index,
                        value: tail_val,
                    });
                }
            }
        }
        Ok(())
    }

    /// The rule giving `self − 1` at every index, when representable.
    pub fn decremented(&self) -> Result<BoundRule, DominationError> {
        let out = match self {
            BoundRule::Constant(c) => BoundRule::Constant(c.checked_sub(1).filter(|v| *v >= 1)
                .ok_or(DominationError::BoundBelowOne { index: 1, value: *c as i64 - 1 })?),
            BoundRule::Abs => BoundRule::Affine { slope: 1, intercept: -1 },
            BoundRule::AbsPlusOne => BoundRule::Abs,
            BoundRule::Affine { slope, intercept } => BoundRule::Affine {
                slope: *slope,
                intercept: intercept - 1,
            },
            BoundRule::Table { head, tail } => BoundRule::Table {
                head: head.iter().map(|v| v.saturating_sub(1)).collect(),
                tail: Box::new(tail.decremented()?),
            },
        };
        out.validate()?;
        Ok(out)
    }
}

/// The bound vector: a kind plus a monotone rule on `|n|`.
///
/// Bounds grow (weakly) away from zero on each side, so a letter legal at
/// the innermost position of a word stays legal further out.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DominationVector {
    kind: Kind,
    rule: BoundRule,
}

impl DominationVector {
    pub fn new(kind: Kind, rule: BoundRule) -> Result<Self, DominationError> {
        rule.validate()?;
        Ok(DominationVector { kind, rule })
    }

    pub fn two_sided(rule: BoundRule) -> Result<Self, DominationError> {
        Self::new(Kind::TwoSided, rule)
    }

    pub fn one_sided(rule: BoundRule) -> Result<Self, DominationError> {
        Self::new(Kind::OneSided, rule)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn rule(&self) -> &BoundRule {
        &self.rule
    }

    /// Letter bound at a position. Positions must be nonzero, and negative
    /// positions are only meaningful for the two-sided kind.
    pub fn bound(&self, position: i32) -> Result<u64, DominationError> {
        if position == 0 {
            return Err(DominationError::ZeroPosition);
        }
        if position < 0 && self.kind == Kind::OneSided {
            return Err(DominationError::NegativePosition(position));
        }
        self.bound_at_index(position.unsigned_abs())
    }

    /// Letter bound at distance `index >= 1` from zero.
    pub fn bound_at_index(&self, index: u32) -> Result<u64, DominationError> {
        debug_assert!(index >= 1);
        let v = self.rule.eval(index).ok_or(DominationError::Overflow(index))?;
        if v < 1 {
            return Err(DominationError::BoundBelowOne { index, value: v });
        }
        Ok(v as u64)
    }
}

// Wire format: {"kind": "...", "rule": "...", "params": [...]} with an
// optional "tail" object for table rules.
#[derive(Serialize, Deserialize)]
struct RuleRepr {
    rule: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    params: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<Box<RuleRepr>>,
}

#[derive(Serialize, Deserialize)]
struct DomRepr {
    kind: Kind,
    #[serde(flatten)]
    rule: RuleRepr,
}

fn rule_to_repr(rule: &BoundRule) -> RuleRepr {
    match rule {
        BoundRule::Constant(c) => RuleRepr {
            rule: "constant".into(),
            params: vec![*c as i64],
            tail: None,
        },
        BoundRule::Abs => RuleRepr { rule: "abs".into(), params: vec![], tail: None },
        BoundRule::AbsPlusOne => RuleRepr { rule: "abs-plus-one".into(), params: vec![], tail: None },
        BoundRule::Affine { slope, intercept } => RuleRepr {
            rule: "affine".into(),
            params: vec![*slope as i64, *intercept],
            tail: None,
        },
        BoundRule::Table { head, tail } => RuleRepr {
            rule: "table".into(),
            params: head.iter().map(|v| *v as i64).collect(),
            tail: Some(Box::new(rule_to_repr(tail))),
        },
    }
}

fn repr_to_rule(repr: &RuleRepr) -> Result<BoundRule, String> {
    let arity = |n: usize| -> Result<(), String> {
        if repr.params.len() != n {
            Err(format!("rule '{}' takes {} parameter(s)", repr.rule, n))
        } else {
            Ok(())
        }
    };
    match repr.rule.as_str() {
        "constant" => {
            arity(1)?;
            u64::try_from(repr.params[0])
                .map(BoundRule::Constant)
                .map_err(|_| "constant bound must be nonnegative".into())
        }
        "abs" => {
            arity(0)?;
            Ok(BoundRule::Abs)
        }
        "abs-plus-one" => {
            arity(0)?;
            Ok(BoundRule::AbsPlusOne)
        }
        "affine" => {
            arity(2)?;
            let slope = u64::try_from(repr.params[0])
                .map_err(|_| "affine slope must be nonnegative".to_string())?;
            Ok(BoundRule::Affine { slope, intercept: repr.params[1] })
        }
        "table" => {
            let head = repr
                .params
                .iter()
                .map(|v| u64::try_from(*v).map_err(|_| "table entries must be nonnegative".to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            let tail = match &repr.tail {
                Some(t) => repr_to_rule(t)?,
                None => BoundRule::Constant(*head.last().ok_or("empty bound table")?),
            };
            Ok(BoundRule::Table { head, tail: Box::new(tail) })
        }
        other => Err(format!("unknown bound rule '{other}'")),
    }
}

impl Serialize for DominationVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        DomRepr { kind: self.kind, rule: rule_to_repr(&self.rule) }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DominationVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = DomRepr::deserialize(deserializer)?;
        let rule = repr_to_rule(&repr.rule).map_err(D::Error::custom)?;
        DominationVector::new(repr.kind, rule).map_err(D::Error::custom)
    }
}
