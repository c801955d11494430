//! Simultaneous recurrence for several commuting invertible systems, by
//! induction: divide each system by the last one, solve the quotients,
//! then run the single-system search for the last system along the
//! quotient solution. Extraction transitivity stacks the bounds, and the
//! result is verified directly against every system.

use serde::{Deserialize, Serialize};

use crate::ramsey::{SearchBudget, SearchOutcome};
use crate::sequence::WordSequence;
use crate::space::{Ball, Point, Space};
use crate::word::{LocatedWord, Word};

use super::refine::{find_recurrent_point, RecurrentPoint, RefineParams};
use super::system::WordSystem;
use super::DynError;

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct MultiRecurrence {
    /// The final-stage certificate; for one system this is exactly the
    /// single-system result.
    pub point: RecurrentPoint,
    /// Largest recurrence residual per system over the certificate words.
    pub per_system_epsilon: Vec<f64>,
    pub achieved_epsilon: f64,
    /// Per word: recurrence residual for each system.
    pub residuals: Vec<(Word, Vec<f64>)>,
}

fn sampled_commuting_check(
    space: &Space,
    systems: &[WordSystem],
    dom: &crate::domination::DominationVector,
    seed: u64,
) -> Result<(), DynError> {
    let mut rng = crate::sample::rng_from_seed(seed ^ 0x5151);
    let tol = 1e-9;
    for _ in 0..24 {
        let w1 = crate::sample::random_word(&mut rng, dom, 3);
        let w2 = crate::sample::random_word(&mut rng, dom, 3);
        let x = space.sample(&mut rng);
        for i in 0..systems.len() {
            for j in (i + 1)..systems.len() {
                let a = systems[i].apply(space, &w1, &systems[j].apply(space, &w2, &x)?)?;
                let b = systems[j].apply(space, &w2, &systems[i].apply(space, &w1, &x)?)?;
                let d = space.distance(&a, &b);
                if d > tol {
                    return Err(DynError::NotCommuting(d));
                }
            }
        }
    }
    Ok(())
}

fn sampled_invertibility_check(
    space: &Space,
    systems: &[WordSystem],
    dom: &crate::domination::DominationVector,
    seed: u64,
) -> Result<(), DynError> {
    let mut rng = crate::sample::rng_from_seed(seed ^ 0xA1A1);
    for sys in systems {
        if !sys.invertible() {
            return Err(DynError::NotInvertible);
        }
        for _ in 0..12 {
            let w = crate::sample::random_word(&mut rng, dom, 3);
            let x = space.sample(&mut rng);
            let back = sys.apply_inv(space, &w, &sys.apply(space, &w, &x)?)?;
            if space.distance(&back, &x) > 1e-9 {
                return Err(DynError::NotInvertible);
            }
        }
    }
    Ok(())
}

pub fn start_point(space: &Space, seed: u64) -> Point {
    let mut rng = crate::sample::rng_from_seed(seed);
    space.sample(&mut rng)
}

fn recur(
    space: &Space,
    systems: &[WordSystem],
    base: &WordSequence,
    start: &Point,
    params: &RefineParams,
) -> Result<SearchOutcome<RecurrentPoint>, DynError> {
    if systems.len() == 1 {
        return find_recurrent_point(space, &systems[0], base, start, params);
    }
    let last = systems.len() - 1;
    let quotients: Vec<WordSystem> = systems[..last]
        .iter()
        .map(|t| WordSystem::Quotient {
            a: Box::new(t.clone()),
            b: Box::new(systems[last].clone()),
        })
        .collect();
    // Quotient stage keeps its whole refined sequence so the last system
    // has room to refine further; its extracted words stay extracted
    // words of the quotient solution by transitivity.
    let carried = if quotients.len() == 1 {
        let (out, pool) = crate::dynamics::refine::recurrent_point_run(
            space, &quotients[0], base, start, params,
        )?;
        match out {
            SearchOutcome::Found { .. } => pool.expect("pool accompanies a found witness"),
            SearchOutcome::Exhausted { examined, complete } => {
                return Ok(SearchOutcome::Exhausted { examined, complete })
            }
        }
    } else {
        match recur(space, &quotients, base, start, params)? {
            SearchOutcome::Found { witness } => witness.prefix,
            exhausted => return Ok(exhausted),
        }
    };
    match find_recurrent_point(space, &systems[last], &carried, start, params)? {
        SearchOutcome::Found { witness } => Ok(SearchOutcome::Found { witness }),
        exhausted => Ok(exhausted),
    }
}

/// Searches for a point every system returns to along one extraction.
/// With a single system this delegates to the plain recurrence search and
/// returns its certificate unchanged.
pub fn multiple_recurrence_search(
    space: &Space,
    systems: &[WordSystem],
    base: &WordSequence,
    params: &RefineParams,
) -> Result<SearchOutcome<MultiRecurrence>, DynError> {
    if systems.is_empty() {
        return Ok(SearchOutcome::Exhausted { examined: 0, complete: true });
    }
    let dom = base.domination().clone();
    sampled_invertibility_check(space, systems, &dom, params.budget.seed)?;
    sampled_commuting_check(space, systems, &dom, params.budget.seed)?;
    let start = start_point(space, params.budget.seed);
    let point = match recur(space, systems, base, &start, params)? {
        SearchOutcome::Found { witness } => witness,
        SearchOutcome::Exhausted { examined, complete } => {
            return Ok(SearchOutcome::Exhausted { examined, complete })
        }
    };
    // Direct verification of every system on every certificate word.
    let words: Vec<LocatedWord> = point.residuals.iter()
        .map(|(w, _, _)| w.as_constant().unwrap().clone())
        .collect();
    let mut per_system_epsilon = vec![0.0f64; systems.len()];
    let mut residuals = Vec::with_capacity(words.len());
    for w in &words {
        let mut per_word = Vec::with_capacity(systems.len());
        for (i, sys) in systems.iter().enumerate() {
            let d = space.distance(&sys.apply(space, w, &point.x0)?, &point.x0);
            per_system_epsilon[i] = per_system_epsilon[i].max(d);
            per_word.push(d);
        }
        residuals.push((w.to_word(), per_word));
    }
    let achieved_epsilon = per_system_epsilon.iter().copied().fold(0.0, f64::max);
    Ok(SearchOutcome::Found {
        witness: MultiRecurrence { point, per_system_epsilon, achieved_epsilon, residuals },
    })
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub all_hit: bool,
    /// Per certificate word: a point whose images under every system land
    /// in the target ball, when one was found.
    pub witnesses: Vec<(Word, Option<Point>)>,
}

/// For each constant extracted word of the prefix (up to `depth` picks),
/// exhibits a point sent into the target ball by every system. Hints are
/// tried first (the recurrence point is the natural one), then the ball
/// center, then a net of the ball.
pub fn intersection_check(
    space: &Space,
    systems: &[WordSystem],
    target: &Ball,
    prefix: &WordSequence,
    depth: usize,
    hints: &[Point],
    _budget: &SearchBudget,
) -> Result<IntersectionReport, DynError> {
    let words: Vec<LocatedWord> =
        crate::sequence::plans(prefix, crate::sequence::PlanFilter::ConstantOnly, depth)
            .map(|(_, w)| w.as_constant().unwrap().clone())
            .collect();
    let mut candidates: Vec<Point> = hints.to_vec();
    candidates.push(target.center.clone());
    if target.radius > 0.0 {
        if let Ok(net) = space.epsilon_net((target.radius / 2.0).max(1e-6)) {
            for b in net {
                if space.distance(&b.center, &target.center) <= target.radius {
                    candidates.push(b.center);
                }
            }
        }
    }

    let mut witnesses = Vec::with_capacity(words.len());
    let mut all_hit = true;
    for w in &words {
        let mut hit = None;
        'candidates: for y in &candidates {
            for sys in systems {
                let moved = sys.apply(space, w, y)?;
                if space.distance(&moved, &target.center) > target.radius {
                    continue 'candidates;
                }
            }
            hit = Some(y.clone());
            break;
        }
        if hit.is_none() {
            all_hit = false;
        }
        witnesses.push((w.to_word(), hit));
    }
    Ok(IntersectionReport { all_hit, witnesses })
}
