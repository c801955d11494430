//! Recurrent finite point sets and the chain argument that turns
//! set-recurrence into point-return: walk witnesses backwards, keep the
//! tolerances summable, and close the loop by compactness on a finite net.

use serde::{Deserialize, Serialize};

use crate::ramsey::{SearchBudget, SearchOutcome};
use crate::sequence::{plans_from, PlanFilter, SeqOrder, WordSequence};
use crate::space::{Point, Space};
use crate::word::{min_index, LocatedWord, Subst, VariableWord, Word};

use super::system::WordSystem;
use super::DynError;

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct RecurrentSetWitness {
    /// Per target point `x`: the set point `y` and the variable word `u`
    /// with every `d(T^{u(p,q)}(y), x)` within tolerance.
    pub witnesses: Vec<(Point, Point, VariableWord)>,
    pub examined: u64,
}

/// All substitutions of `u` with letters `1..=m` on each side, when
/// legal.
fn bounded_instances(
    u: &VariableWord,
    m: u64,
    seq: &WordSequence,
) -> Result<Option<Vec<LocatedWord>>, DynError> {
    let dom = seq.domination();
    let legal = match seq.order() {
        SeqOrder::R1 => {
            u.has_variable_on_both_sides()
                && dom.bound(u.min_positive_pos().unwrap()).map_err(crate::word::WordError::from)? >= m
                && dom.bound(u.max_negative_pos().unwrap()).map_err(crate::word::WordError::from)? >= m
        }
        SeqOrder::R2 => dom.bound(u.min_pos()).map_err(crate::word::WordError::from)? >= m,
    };
    if !legal {
        return Ok(None);
    }
    let mut out = Vec::new();
    match seq.order() {
        SeqOrder::R1 => {
            for p in 1..=m {
                for q in 1..=m {
                    out.push(u.substitute(Subst::Pair(p, q), dom)?.as_constant().unwrap().clone());
                }
            }
        }
        SeqOrder::R2 => {
            for p in 1..=m {
                out.push(u.substitute(Subst::Single(p), dom)?.as_constant().unwrap().clone());
            }
        }
    }
    Ok(Some(out))
}

struct SetWitnessQuery<'a> {
    space: &'a Space,
    sys: &'a WordSystem,
    seq: &'a WordSequence,
    set_points: &'a [Point],
    m: u64,
    max_plan_depth: usize,
}

/// First `(y, u)` in enumeration order with every bounded substitution of
/// `u` carrying `y` within `epsilon` of `target`; plans start at or after
/// `min_slot`.
fn find_set_witness(
    q: &SetWitnessQuery<'_>,
    target: &Point,
    epsilon: f64,
    min_slot: usize,
    node_cap: u64,
    nodes: &mut u64,
) -> Result<Option<(Point, VariableWord, usize)>, DynError> {
    for (plan, word) in plans_from(q.seq, PlanFilter::VariableOnly, q.max_plan_depth, min_slot) {
        *nodes += 1;
        if *nodes > node_cap {
            return Ok(None);
        }
        let u = word.as_variable().unwrap();
        let idx = match min_index(&word) {
            Ok(i) => i,
            Err(_) => continue,
        };
        if u64::from(idx) <= q.m {
            continue;
        }
        let Some(instances) = bounded_instances(u, q.m, q.seq)? else {
            continue;
        };
        for y in q.set_points {
            let mut ok = true;
            for inst in &instances {
                let moved = q.sys.apply(q.space, inst, y)?;
                if q.space.distance(&moved, target) > epsilon {
                    ok = false;
                    break;
                }
            }
            if ok {
                return Ok(Some((y.clone(), u.clone(), plan.max_term())));
            }
        }
    }
    Ok(None)
}

/// For each point of the set, searches for a set point and a variable
/// word of the sequence whose bounded substitutions all carry it within
/// `epsilon` of the target.
pub fn recurrent_set_check(
    space: &Space,
    sys: &WordSystem,
    seq: &WordSequence,
    set_points: &[Point],
    epsilon: f64,
    m: u64,
    budget: &SearchBudget,
) -> Result<SearchOutcome<RecurrentSetWitness>, DynError> {
    if set_points.is_empty() {
        return Ok(SearchOutcome::Exhausted { examined: 0, complete: true });
    }
    let query = SetWitnessQuery {
        space,
        sys,
        seq,
        set_points,
        m,
        max_plan_depth: budget.max_plan_depth as usize,
    };
    let mut nodes = 0u64;
    let mut witnesses = Vec::with_capacity(set_points.len());
    for x in set_points {
        match find_set_witness(&query, x, epsilon, 1, budget.max_candidates, &mut nodes)? {
            Some((y, u, _)) => witnesses.push((x.clone(), y, u)),
            None => {
                return Ok(SearchOutcome::Exhausted {
                    examined: nodes,
                    complete: nodes <= budget.max_candidates,
                })
            }
        }
    }
    Ok(SearchOutcome::Found {
        witness: RecurrentSetWitness { witnesses, examined: nodes },
    })
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Prop12Witness {
    /// The composite word `u_{i+1} ⋆ … ⋆ u_j`.
    pub u: VariableWord,
    pub z: Point,
    pub chain_len: usize,
    /// Largest `d(T^{u(p,q)}(z), z)` over the bounded substitutions.
    pub max_residual: f64,
    pub examined: u64,
}

/// Chains set-recurrence witnesses until two chain points come within
/// `epsilon/2` (compactness on a finite net guarantees this), then the
/// concatenation of the witnesses between them returns `z` to itself.
///
/// Isometric systems keep the chained tolerances additive, so the step
/// tolerances halve; the result is verified directly before returning.
pub fn prop12_chain(
    space: &Space,
    sys: &WordSystem,
    seq: &WordSequence,
    set_points: &[Point],
    epsilon: f64,
    m: u64,
    budget: &SearchBudget,
) -> Result<Prop12Witness, DynError> {
    if !sys.is_isometric() {
        return Err(DynError::ModulusUnavailable);
    }
    if set_points.is_empty() {
        return Err(DynError::ChainBudgetExhausted);
    }
    let query = SetWitnessQuery {
        space,
        sys,
        seq,
        set_points,
        m,
        max_plan_depth: budget.max_plan_depth as usize,
    };
    // Pigeonhole bound: more chain points than quarter-epsilon net balls
    // forces a close pair.
    let net_size = if epsilon > 0.0 {
        space.epsilon_net((epsilon / 4.0).max(1e-9))?.len()
    } else {
        // Exact chains revisit within the number of distinct values the
        // space can hold; cap generously.
        64
    };
    let max_chain = net_size + 1;

    let mut nodes = 0u64;
    let mut chain_points: Vec<Point> = vec![set_points[0].clone()];
    let mut chain_words: Vec<VariableWord> = Vec::new();
    let mut min_slot = 1usize;
    for step in 0..max_chain {
        // Close the loop when two chain points nearly coincide.
        for i in 0..chain_points.len() {
            for j in (i + 1)..chain_points.len() {
                if space.distance(&chain_points[i], &chain_points[j]) <= epsilon / 2.0 {
                    let parts: Vec<Word> =
                        chain_words[i..j].iter().map(|u| u.to_word()).collect();
                    if parts.is_empty() {
                        continue;
                    }
                    let u = crate::word::concat_all(parts.iter())?
                        .as_variable()
                        .expect("chain words keep their variables")
                        .clone();
                    let z = chain_points[j].clone();
                    let instances = bounded_instances(&u, m, seq)?
                        .ok_or(DynError::ChainBudgetExhausted)?;
                    let mut max_residual = 0.0f64;
                    for inst in &instances {
                        let moved = sys.apply(space, inst, &z)?;
                        max_residual = max_residual.max(space.distance(&moved, &z));
                    }
                    if max_residual <= epsilon {
                        return Ok(Prop12Witness {
                            u,
                            z,
                            chain_len: chain_words.len(),
                            max_residual,
                            examined: nodes,
                        });
                    }
                }
            }
        }
        // Extend the chain: a witness for the current endpoint, with a
        // halving tolerance so the composed bounds stay within epsilon/2.
        let target = chain_points.last().unwrap().clone();
        let step_eps = if epsilon > 0.0 { epsilon / f64::powi(2.0, step as i32 + 2) } else { 0.0 };
        match find_set_witness(&query, &target, step_eps, min_slot, budget.max_candidates, &mut nodes)? {
            Some((y, u, used_slot)) => {
                min_slot = used_slot + 1;
                chain_points.push(y);
                chain_words.push(u);
            }
            None => return Err(DynError::ChainBudgetExhausted),
        }
    }
    Err(DynError::ChainBudgetExhausted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::Codec;
    use crate::domination::{BoundRule, DominationVector};
    use crate::dynamics::system::Scalar;

    fn budget() -> SearchBudget {
        SearchBudget::new(6, 3, 500_000, 5)
    }

    #[test]
    fn identity_system_recurs_any_set() {
        let dom = DominationVector::two_sided(BoundRule::Abs).unwrap();
        let seq = WordSequence::canonical(SeqOrder::R1, dom, 4).unwrap();
        let set = vec![Point::circle_exact(0, 1), Point::circle_exact(1, 3)];
        let out = recurrent_set_check(
            &Space::CircleExact,
            &WordSystem::Identity,
            &seq,
            &set,
            0.0,
            1,
            &budget(),
        )
        .unwrap();
        let w = out.found().expect("identity recurs");
        assert_eq!(w.witnesses.len(), 2);
        // y must equal x for the identity at zero tolerance.
        for (x, y, _) in &w.witnesses {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn zero_tolerance_on_aperiodic_rotation_exhausts() {
        let dom = DominationVector::two_sided(BoundRule::Abs).unwrap();
        let seq = WordSequence::canonical(SeqOrder::R1, dom, 3).unwrap();
        let sys = WordSystem::CodecRotation {
            codec: Codec::Rational,
            scale: Scalar::Float(0.618033988749894),
        };
        let set = vec![Point::circle_float(0.25)];
        let out = recurrent_set_check(
            &Space::CircleFloat,
            &sys,
            &seq,
            &set,
            0.0,
            1,
            &SearchBudget::new(3, 2, 20_000, 5),
        )
        .unwrap();
        assert!(matches!(out, SearchOutcome::Exhausted { .. }));
    }

    #[test]
    fn chain_closes_on_cyclic_shift() {
        // Shift by the decoded value on Z/4, tolerance exactly zero,
        // single substitution letter: the chain must revisit within five
        // points and close exactly.
        let radix = crate::codec::MixedRadix::constant(2).unwrap();
        let dom = radix.word_domination();
        let seq = WordSequence::canonical(SeqOrder::R2, dom, 8).unwrap();
        let sys = WordSystem::CodecRotation {
            codec: Codec::Integer { radix },
            scale: Scalar::exact(1, 1),
        };
        let space = Space::Discrete { size: 4 };
        let set: Vec<Point> = (0..4).map(Point::Discrete).collect();
        let w = prop12_chain(&space, &sys, &seq, &set, 0.0, 1, &budget()).unwrap();
        assert_eq!(w.max_residual, 0.0);
        assert!(w.chain_len <= 5);
    }
}
