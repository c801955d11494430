//! Finite convergence checks: the chain-order limit condition over an
//! examined word set, and its reading as uniform convergence over all
//! substitution-choice sequences.

use serde::{Deserialize, Serialize};

use crate::domination::DominationVector;
use crate::sequence::{plans, PlanFilter, SeqOrder, WordSequence};
use crate::space::{Point, Space};
use crate::word::{concat, min_index, LocatedWord, Subst, Word};

use super::net::Net;
use super::DynError;

/// The finite set of constant words a check walks.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "universe", rename_all = "kebab-case")]
pub enum WordUniverse {
    /// Every constant word within `±radius` under the bound vector.
    Window { domination: DominationVector, radius: u32 },
    /// Constant extracted words of a sequence prefix, up to `max_terms`
    /// picks.
    Extracted { sequence: WordSequence, max_terms: usize },
}

impl WordUniverse {
    pub fn words(&self) -> Vec<LocatedWord> {
        match self {
            WordUniverse::Window { domination, radius } => {
                crate::ramsey::universe::constant_words(domination, *radius)
            }
            WordUniverse::Extracted { sequence, max_terms } => {
                plans(sequence, PlanFilter::ConstantOnly, *max_terms)
                    .map(|(_, w)| w.as_constant().unwrap().clone())
                    .collect()
            }
        }
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct RLimitReport {
    pub holds: bool,
    /// Examined words whose index reached the threshold.
    pub examined: usize,
    /// The farthest violating word and its distance, when any.
    pub offender: Option<(Word, f64)>,
}

/// Checks `d(net(w), x0) <= epsilon` for every examined word whose
/// convergence index reaches `n0`. Two-sided words lying on one side of
/// zero have no index and are skipped.
pub fn r_limit_check(
    space: &Space,
    net: &Net,
    x0: &Point,
    epsilon: f64,
    n0: u32,
    universe: &WordUniverse,
) -> Result<RLimitReport, DynError> {
    let mut examined = 0;
    let mut offender: Option<(Word, f64)> = None;
    for w in universe.words() {
        let Ok(idx) = min_index(&w.to_word()) else {
            continue;
        };
        if idx < n0 {
            continue;
        }
        examined += 1;
        let d = space.distance(&net.eval(space, &w)?, x0);
        if d > epsilon && offender.as_ref().map(|(_, worst)| d > *worst).unwrap_or(true) {
            offender = Some((w.to_word(), d));
        }
    }
    Ok(RLimitReport { holds: offender.is_none(), examined, offender })
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct IpReport {
    pub r_limit: bool,
    pub uniform_ip: bool,
    pub r_offender: Option<(Word, f64)>,
    pub ip_offender: Option<(Word, f64)>,
    pub choice_sequences: u64,
}

/// Runs both readings of the limit over a sequence prefix: the chain-order
/// check over extracted words with index at least `n0`, and the uniform
/// check over every substitution-choice sequence and every pick set `F`
/// with `min F >= n0`. On index-tight sequences the examined word sets
/// coincide, so the verdicts must agree.
pub fn uniform_ip_check(
    space: &Space,
    net: &Net,
    seq: &WordSequence,
    x0: &Point,
    epsilon: f64,
    n0: u32,
    depth: usize,
) -> Result<IpReport, DynError> {
    let depth = depth.min(seq.len());
    let r_report = r_limit_check(
        space,
        net,
        x0,
        epsilon,
        n0,
        &WordUniverse::Extracted { sequence: seq.clone(), max_terms: depth },
    )?;

    // Uniform side: all choice sequences (one substitution per slot),
    // folded over all admissible pick sets.
    let mut choice_space: Vec<Vec<Subst>> = Vec::with_capacity(depth);
    for slot in 1..=depth {
        let (p_bound, q_bound) = seq.slot_bounds(slot)?;
        let mut choices = Vec::new();
        match seq.order() {
            SeqOrder::R1 => {
                for p in 1..=p_bound {
                    for q in 1..=q_bound.unwrap() {
                        choices.push(Subst::Pair(p, q));
                    }
                }
            }
            SeqOrder::R2 => {
                for p in 1..=p_bound {
                    choices.push(Subst::Single(p));
                }
            }
        }
        choice_space.push(choices);
    }

    let mut ip_offender: Option<(Word, f64)> = None;
    let mut choice_sequences = 0u64;
    let mut cursor = vec![0usize; depth];
    loop {
        choice_sequences += 1;
        // All nonempty F with min F >= n0.
        for mask in 1u32..(1 << depth) {
            let slots: Vec<usize> = (0..depth).filter(|i| mask >> i & 1 == 1).collect();
            if (slots[0] + 1) < n0 as usize {
                continue;
            }
            let mut word: Option<Word> = None;
            for &i in &slots {
                let sub = choice_space[i][cursor[i]];
                let part = seq.term(i + 1).unwrap().substitute(sub, seq.domination())?;
                word = Some(match word {
                    None => part,
                    Some(acc) => concat(&acc, &part)?,
                });
            }
            let word = word.unwrap();
            let d = space.distance(&net.eval(space, word.as_constant().unwrap())?, x0);
            if d > epsilon
                && ip_offender.as_ref().map(|(_, worst)| d > *worst).unwrap_or(true)
            {
                ip_offender = Some((word, d));
            }
        }
        // Advance the mixed-radix cursor over choice sequences.
        let mut i = 0;
        loop {
            if i == depth {
                let report = IpReport {
                    r_limit: r_report.holds,
                    uniform_ip: ip_offender.is_none(),
                    r_offender: r_report.offender,
                    ip_offender,
                    choice_sequences,
                };
                return Ok(report);
            }
            cursor[i] += 1;
            if cursor[i] < choice_space[i].len() {
                break;
            }
            cursor[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domination::BoundRule;

    fn abs() -> DominationVector {
        DominationVector::two_sided(BoundRule::Abs).unwrap()
    }

    #[test]
    fn constant_net_always_converges() {
        let net = Net::Constant { point: Point::circle_exact(1, 3) };
        let report = r_limit_check(
            &Space::CircleExact,
            &net,
            &Point::circle_exact(1, 3),
            0.0,
            1,
            &WordUniverse::Window { domination: abs(), radius: 2 },
        )
        .unwrap();
        assert!(report.holds);
        assert!(report.examined > 0);
    }

    #[test]
    fn index_reciprocal_threshold() {
        // net(w) = 1/min_index(w): within 0.1 of zero exactly when the
        // index reaches 11.
        let net = Net::IndexReciprocal;
        let x0 = Point::circle_exact(0, 1);
        let seq = WordSequence::canonical(SeqOrder::R1, abs(), 12).unwrap();
        let universe = WordUniverse::Extracted { sequence: seq.clone(), max_terms: 2 };
        let report =
            r_limit_check(&Space::CircleExact, &net, &x0, 0.1, 11, &universe).unwrap();
        assert!(report.holds);
        let report =
            r_limit_check(&Space::CircleExact, &net, &x0, 0.1, 5, &universe).unwrap();
        assert!(!report.holds);
        let (_, d) = report.offender.unwrap();
        assert!(d > 0.1);
    }

    #[test]
    fn both_limit_readings_agree_on_tight_sequences() {
        let seq = WordSequence::canonical(SeqOrder::R1, abs(), 4).unwrap();
        let x0 = Point::circle_exact(0, 1);
        for (net, eps, n0) in [
            (Net::Constant { point: x0.clone() }, 0.0, 1u32),
            (Net::IndexReciprocal, 0.26, 4),
            (Net::IndexReciprocal, 0.1, 2),
        ] {
            let report =
                uniform_ip_check(&Space::CircleExact, &net, &seq, &x0, eps, n0, 4).unwrap();
            assert_eq!(report.r_limit, report.uniform_ip, "net {net:?}");
            assert_eq!(report.r_offender.is_some(), report.ip_offender.is_some());
        }
    }
}
