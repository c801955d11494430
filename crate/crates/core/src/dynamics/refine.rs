//! Nested-ball refinement: cover the space, find an extraction refinement
//! whose net values land in one ball, shrink, repeat. Each level keeps a
//! long working sequence — the first `depth` terms are the certificate
//! blocks and carry the full monochromatic check, the rest is raw
//! material carried forward for later levels.
//!
//! Proposals are built block by block: a block groups a window of pool
//! terms, keeps at least one variable, fills the others with constant
//! picks or drops them. Sparse proposals come first. Every accepted level
//! is a genuine extraction of the previous one, and the final prefix is
//! verified against the whole ball chain before anything is returned.

use serde::{Deserialize, Serialize};

use crate::par;
use crate::ramsey::{SearchBudget, SearchOutcome};
use crate::sequence::{plans, PlanFilter, SeqOrder, WordSequence};
use crate::space::{Ball, Point, Region, Space};
use crate::word::{concat_all, min_index, LocatedWord, Subst, VariableWord, Word};

use super::net::Net;
use super::system::WordSystem;
use super::DynError;

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct RefineParams {
    pub levels: u32,
    /// Ball radii per level; defaults to `2^{-j}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<f64>>,
    /// Certificate depth: length of the returned prefix and the pick
    /// bound on the words checked at every level.
    pub depth: usize,
    pub budget: SearchBudget,
}

impl RefineParams {
    pub fn radii(&self) -> Vec<f64> {
        match &self.schedule {
            Some(s) => s.clone(),
            None => (1..=self.levels).map(|j| 0.5f64.powi(j as i32)).collect(),
        }
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct LevelRecord {
    pub radius: f64,
    pub ball_index: u32,
    pub ball: Ball,
    pub pool_len: usize,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ConvergentExtraction {
    pub prefix: WordSequence,
    pub x0: Point,
    /// Largest distance from a checked net value to `x0`.
    pub achieved_epsilon: f64,
    pub levels: Vec<LevelRecord>,
    pub examined: u64,
    pub residuals: Vec<(Word, f64)>,
}

/// Constant extracted words of a prefix, up to `depth` picks.
fn certificate_words(prefix: &WordSequence, depth: usize) -> Vec<LocatedWord> {
    plans(prefix, PlanFilter::ConstantOnly, depth)
        .map(|(_, w)| w.as_constant().unwrap().clone())
        .collect()
}

/// Substitution instances of a term sitting in `slot`, under slot-index
/// bounds.
fn slot_instances(
    term: &VariableWord,
    slot: usize,
    seq_order: SeqOrder,
    dom: &crate::domination::DominationVector,
) -> Result<Vec<LocatedWord>, DynError> {
    let s = slot as i32;
    let mut out = Vec::new();
    match seq_order {
        SeqOrder::R1 => {
            let pb = dom.bound(s).map_err(crate::word::WordError::from)?;
            let qb = dom.bound(-s).map_err(crate::word::WordError::from)?;
            for p in 1..=pb {
                for q in 1..=qb {
                    out.push(
                        term.substitute(Subst::Pair(p, q), dom)?
                            .as_constant()
                            .unwrap()
                            .clone(),
                    );
                }
            }
        }
        SeqOrder::R2 => {
            let pb = dom.bound(s).map_err(crate::word::WordError::from)?;
            for p in 1..=pb {
                out.push(
                    term.substitute(Subst::Single(p), dom)?
                        .as_constant()
                        .unwrap()
                        .clone(),
                );
            }
        }
    }
    Ok(out)
}

fn feasible_in_slot(term: &VariableWord, slot: usize, order: SeqOrder) -> bool {
    let s = slot as i32;
    match order {
        SeqOrder::R1 => {
            term.min_positive_pos().map(|p| p >= s).unwrap_or(false)
                && term.max_negative_pos().map(|n| -n >= s).unwrap_or(false)
        }
        SeqOrder::R2 => term.min_pos() >= s,
    }
}

/// What a pool term contributes to a block.
#[derive(Clone, Copy, PartialEq, Debug)]
enum Member {
    Keep,
    Fill(Subst),
}

/// One block proposal: (pool slot, contribution) pairs, ascending slots.
type Proposal = Vec<(usize, Member)>;

/// Proposals over the window `[start, start+g)` of pool slots whose last
/// member is used, ordered sparse-first: member count ascending, then
/// member sets, then fill letters. Keeping a variable sorts before
/// filling.
fn window_proposals(
    pool: &WordSequence,
    start: usize,
    g: usize,
    max_members: usize,
) -> Vec<Proposal> {
    let end = start + g - 1;
    let mut out = Vec::new();
    let indices: Vec<usize> = (start..end).collect();
    for used in 1..=max_members.min(g) {
        // Choose used−1 interior slots plus the window end.
        let mut combo: Vec<usize> = (0..used.saturating_sub(1)).collect();
        loop {
            let mut slots: Vec<usize> = combo.iter().map(|&i| indices[i]).collect();
            slots.push(end);
            push_fill_patterns(pool, &slots, &mut out);
            // next combination
            if used == 1 {
                break;
            }
            let k = used - 1;
            let n = indices.len();
            let mut i = k;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if combo[i] + 1 <= n - (k - i) {
                    combo[i] += 1;
                    for j in i + 1..k {
                        combo[j] = combo[j - 1] + 1;
                    }
                    break;
                }
                if i == 0 {
                    combo.clear();
                    break;
                }
            }
            if combo.is_empty() || combo[k - 1] >= n {
                break;
            }
        }
    }
    out
}

/// All Keep/Fill patterns over fixed slots, at least one Keep, fills
/// within the pool's slot-index bounds.
fn push_fill_patterns(pool: &WordSequence, slots: &[usize], out: &mut Vec<Proposal>) {
    fn rec(
        pool: &WordSequence,
        slots: &[usize],
        idx: usize,
        current: &mut Proposal,
        has_keep: bool,
        out: &mut Vec<Proposal>,
    ) {
        if idx == slots.len() {
            if has_keep {
                out.push(current.clone());
            }
            return;
        }
        let slot = slots[idx];
        current.push((slot, Member::Keep));
        rec(pool, slots, idx + 1, current, true, out);
        current.pop();
        let (pb, qb) = pool.slot_bounds(slot).expect("slot in range");
        match pool.order() {
            SeqOrder::R1 => {
                for p in 1..=pb {
                    for q in 1..=qb.unwrap() {
                        current.push((slot, Member::Fill(Subst::Pair(p, q))));
                        rec(pool, slots, idx + 1, current, has_keep, out);
                        current.pop();
                    }
                }
            }
            SeqOrder::R2 => {
                for p in 1..=pb {
                    current.push((slot, Member::Fill(Subst::Single(p))));
                    rec(pool, slots, idx + 1, current, has_keep, out);
                    current.pop();
                }
            }
        }
    }
    let mut current = Vec::with_capacity(slots.len());
    rec(pool, slots, 0, &mut current, false, out);
}

fn build_block(pool: &WordSequence, proposal: &Proposal) -> Result<VariableWord, DynError> {
    let mut parts: Vec<Word> = Vec::with_capacity(proposal.len());
    for (slot, member) in proposal {
        let term = pool.term(*slot).unwrap();
        match member {
            Member::Keep => parts.push(term.to_word()),
            Member::Fill(sub) => parts.push(term.substitute(*sub, pool.domination())?),
        }
    }
    let joined = concat_all(parts.iter())?;
    Ok(joined.as_variable().expect("at least one kept variable").clone())
}

struct RepairOutcome {
    pool: WordSequence,
    nodes: u64,
    capped: bool,
}

/// Builds `depth` certificate blocks landing in `region` and carries the
/// unused pool tail forward. Greedy left to right; `None` when some block
/// cannot be built.
fn repair_pool(
    space: &Space,
    net: &Net,
    pool: &WordSequence,
    region: &Region,
    depth: usize,
    max_members: usize,
    node_cap: u64,
) -> Result<Option<RepairOutcome>, DynError> {
    let mut blocks: Vec<VariableWord> = Vec::new();
    let mut cert_words: Vec<LocatedWord> = Vec::new();
    let mut position = 1usize;
    let mut nodes = 0u64;

    while blocks.len() < depth && position <= pool.len() {
        let slot = blocks.len() + 1;
        let mut committed = false;
        let remaining = pool.len() - position + 1;
        'windows: for g in 1..=remaining {
            let proposals = window_proposals(pool, position, g, max_members);
            nodes += proposals.len() as u64;
            if nodes > node_cap {
                return Ok(Some(RepairOutcome { pool: pool.clone(), nodes, capped: true }));
            }
            // Scan the batch in parallel; first passing proposal wins.
            let hit = par::find_map_first(&proposals, |proposal| {
                let Ok(block) = build_block(pool, proposal) else {
                    return None;
                };
                if !feasible_in_slot(&block, slot, pool.order()) {
                    return None;
                }
                let Ok(instances) = slot_instances(&block, slot, pool.order(), pool.domination())
                else {
                    return None;
                };
                let mut new_words = Vec::with_capacity(instances.len() * (1 + cert_words.len()));
                for inst in &instances {
                    let p = net.eval(space, inst).ok()?;
                    if !region.contains(space, &p) {
                        return None;
                    }
                    new_words.push(inst.clone());
                    for prev in &cert_words {
                        let Ok(Word::Constant(joined)) =
                            crate::word::concat(&prev.to_word(), &inst.to_word())
                        else {
                            return None;
                        };
                        let pj = net.eval(space, &joined).ok()?;
                        if !region.contains(space, &pj) {
                            return None;
                        }
                        new_words.push(joined);
                    }
                }
                Some((block, new_words))
            });
            if let Some((block, new_words)) = hit {
                blocks.push(block);
                cert_words.extend(new_words);
                position += g;
                committed = true;
                break 'windows;
            }
        }
        if !committed {
            return Ok(None);
        }
    }
    if blocks.len() < depth {
        return Ok(None);
    }
    // Carry the unused tail forward for later levels.
    let mut terms = blocks;
    terms.extend(pool.terms()[position - 1..].iter().cloned());
    let new_pool = WordSequence::new(pool.order(), pool.domination().clone(), terms)?;
    Ok(Some(RepairOutcome { pool: new_pool, nodes, capped: false }))
}

/// Ball-refinement search for an extraction along which the net
/// converges: returns the certificate prefix, the cluster point, and the
/// verified radius at each level.
pub fn find_convergent_extraction(
    space: &Space,
    net: &Net,
    base: &WordSequence,
    params: &RefineParams,
) -> Result<SearchOutcome<ConvergentExtraction>, DynError> {
    Ok(convergent_run(space, net, base, params)?.0)
}

/// The same search, also handing back the whole refined working sequence
/// (certificate blocks plus unused tail) for callers that refine further.
pub(crate) fn convergent_run(
    space: &Space,
    net: &Net,
    base: &WordSequence,
    params: &RefineParams,
) -> Result<(SearchOutcome<ConvergentExtraction>, Option<WordSequence>), DynError> {
    let depth = params.depth.max(1).min(base.len());
    let max_members = (params.budget.max_plan_depth as usize).max(1);
    let mut pool = base.clone();
    let mut chain: Vec<Ball> = Vec::new();
    let mut records: Vec<LevelRecord> = Vec::new();
    let mut examined = 0u64;

    for radius in params.radii() {
        let cover = match chain.last() {
            None => space.epsilon_net(radius)?,
            Some(prev) => space.cover_ball(prev, radius)?,
        };
        let mut advanced = false;
        for (ball_index, ball) in cover.iter().enumerate() {
            let mut region = Region { balls: chain.clone() };
            region = region.and(ball.clone());
            let node_cap = params.budget.max_candidates.saturating_sub(examined);
            match repair_pool(space, net, &pool, &region, depth, max_members, node_cap)? {
                Some(outcome) if !outcome.capped => {
                    examined += outcome.nodes;
                    pool = outcome.pool;
                    chain.push(ball.clone());
                    records.push(LevelRecord {
                        radius,
                        ball_index: ball_index as u32,
                        ball: ball.clone(),
                        pool_len: pool.len(),
                    });
                    advanced = true;
                    break;
                }
                Some(outcome) => {
                    examined += outcome.nodes;
                    return Ok((SearchOutcome::Exhausted { examined, complete: false }, None));
                }
                None => {}
            }
        }
        if !advanced {
            return Ok((SearchOutcome::Exhausted { examined, complete: false }, None));
        }
    }

    let prefix = pool.prefix(depth)?;
    let words = certificate_words(&prefix, depth);
    // The last level checked the certificate words against the whole
    // chain; re-verify directly all the same.
    for w in &words {
        let p = net.eval(space, w)?;
        for ball in &chain {
            if space.distance(&ball.center, &p) > ball.radius {
                return Ok((SearchOutcome::Exhausted { examined, complete: false }, None));
            }
        }
    }
    let x0 = net.eval(space, &words[0])?;
    let residuals: Vec<(Word, f64)> = words
        .iter()
        .map(|w| {
            let p = net.eval(space, w)?;
            Ok::<_, DynError>((w.to_word(), space.distance(&p, &x0)))
        })
        .collect::<Result<_, _>>()?;
    let achieved_epsilon = residuals.iter().map(|(_, d)| *d).fold(0.0, f64::max);
    Ok((
        SearchOutcome::Found {
            witness: ConvergentExtraction {
                prefix,
                x0,
                achieved_epsilon,
                levels: records,
                examined,
                residuals,
            },
        },
        Some(pool),
    ))
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct RecurrentPoint {
    pub prefix: WordSequence,
    pub x0: Point,
    /// Largest `d(T^w(start), x0)` over the certificate words.
    pub orbit_epsilon: f64,
    /// Largest `d(T^w(x0), x0)` over the certificate words.
    pub recurrence_epsilon: f64,
    pub achieved_epsilon: f64,
    /// Index threshold the certificate words all reach.
    pub n0: u32,
    pub levels: Vec<LevelRecord>,
    pub examined: u64,
    /// Per word: orbit residual, recurrence residual.
    pub residuals: Vec<(Word, f64, f64)>,
}

/// Finds a point the system returns to along an extraction of the base:
/// refines the orbit net of `start`, takes the cluster point, and
/// verifies both displayed limits directly on every certificate word.
pub fn find_recurrent_point(
    space: &Space,
    sys: &WordSystem,
    base: &WordSequence,
    start: &Point,
    params: &RefineParams,
) -> Result<SearchOutcome<RecurrentPoint>, DynError> {
    Ok(recurrent_point_run(space, sys, base, start, params)?.0)
}

/// The same search, also handing back the refined working sequence.
pub(crate) fn recurrent_point_run(
    space: &Space,
    sys: &WordSystem,
    base: &WordSequence,
    start: &Point,
    params: &RefineParams,
) -> Result<(SearchOutcome<RecurrentPoint>, Option<WordSequence>), DynError> {
    if !sys.is_isometric() {
        return Err(DynError::ModulusUnavailable);
    }
    let net = Net::Orbit { system: sys.clone(), start: start.clone() };
    let (conv_out, pool) = convergent_run(space, &net, base, params)?;
    let conv = match conv_out {
        SearchOutcome::Found { witness } => witness,
        SearchOutcome::Exhausted { examined, complete } => {
            return Ok((SearchOutcome::Exhausted { examined, complete }, None))
        }
    };
    let words = certificate_words(&conv.prefix, params.depth.max(1));
    let mut residuals = Vec::with_capacity(words.len());
    let mut orbit_epsilon = 0.0f64;
    let mut recurrence_epsilon = 0.0f64;
    let mut n0 = u32::MAX;
    for w in &words {
        let orbit_d = space.distance(&sys.apply(space, w, start)?, &conv.x0);
        let rec_d = space.distance(&sys.apply(space, w, &conv.x0)?, &conv.x0);
        orbit_epsilon = orbit_epsilon.max(orbit_d);
        recurrence_epsilon = recurrence_epsilon.max(rec_d);
        n0 = n0.min(min_index(&w.to_word()).unwrap_or(1));
        residuals.push((w.to_word(), orbit_d, rec_d));
    }
    Ok((
        SearchOutcome::Found {
            witness: RecurrentPoint {
                prefix: conv.prefix,
                x0: conv.x0,
                orbit_epsilon,
                recurrence_epsilon,
                achieved_epsilon: orbit_epsilon.max(recurrence_epsilon),
                n0,
                levels: conv.levels,
                examined: conv.examined,
                residuals,
            },
        },
        pool,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::Codec;
    use crate::domination::{BoundRule, DominationVector};
    use crate::dynamics::system::Scalar;

    fn params(levels: u32, depth: usize) -> RefineParams {
        RefineParams {
            levels,
            schedule: None,
            depth,
            budget: SearchBudget::new(8, 3, 2_000_000, 7),
        }
    }

    #[test]
    fn constant_net_converges_immediately() {
        let dom = DominationVector::two_sided(BoundRule::Abs).unwrap();
        let base = WordSequence::canonical(SeqOrder::R1, dom, 4).unwrap();
        let net = Net::Constant { point: Point::circle_exact(1, 3) };
        let out = find_convergent_extraction(&Space::CircleExact, &net, &base, &params(6, 2))
            .unwrap();
        let w = out.found().expect("constant net always converges");
        assert_eq!(w.achieved_epsilon, 0.0);
        assert_eq!(w.x0, Point::circle_exact(1, 3));
        assert_eq!(w.prefix.len(), 2);
        // The refinement is an extraction of the base.
        assert!(crate::sequence::is_extraction(&w.prefix, &base, 2).unwrap().is_some());
    }

    #[test]
    fn exact_rational_rotation_refines_into_quarter_ball() {
        // Net: decoded value times 17/29 on the exact circle; depth 2.
        let dom = DominationVector::two_sided(BoundRule::Abs).unwrap();
        let base = WordSequence::canonical(SeqOrder::R1, dom, 8).unwrap();
        let net = Net::DecodedAngle { codec: Codec::Rational, scale: Scalar::exact(17, 29) };
        let p = RefineParams {
            levels: 2,
            schedule: Some(vec![0.5, 0.25]),
            depth: 2,
            budget: SearchBudget::new(8, 3, 2_000_000, 7),
        };
        let out = find_convergent_extraction(&Space::CircleExact, &net, &base, &p).unwrap();
        let w = out.found().expect("quarter-ball refinement exists");
        // All depth-2 values within a quarter ball: radius bound holds.
        for (_, d) in &w.residuals {
            assert!(*d <= 0.5);
        }
        assert!(crate::sequence::is_extraction(&w.prefix, &base, 2).unwrap().is_some());
    }

    #[test]
    fn identity_system_has_exact_recurrent_point() {
        let dom = DominationVector::two_sided(BoundRule::Abs).unwrap();
        let base = WordSequence::canonical(SeqOrder::R1, dom, 4).unwrap();
        let x = Point::circle_exact(2, 7);
        let out = find_recurrent_point(
            &Space::CircleExact,
            &WordSystem::Identity,
            &base,
            &x,
            &params(5, 2),
        )
        .unwrap();
        let w = out.found().unwrap();
        assert_eq!(w.achieved_epsilon, 0.0);
        assert_eq!(w.x0, x);
    }

    #[test]
    fn shift_mod_two_recurs_exactly() {
        // Doubling bases: words decode with places 1, 2, 4, 8, …; any
        // variable block at position >= 2 has all values even, so the
        // shift on Z/2 returns exactly.
        let radix = crate::codec::MixedRadix::constant(2).unwrap();
        let dom = radix.word_domination();
        let base = WordSequence::canonical(SeqOrder::R2, dom, 6).unwrap();
        let sys = WordSystem::CodecRotation {
            codec: Codec::Integer { radix },
            scale: Scalar::exact(1, 1),
        };
        let out = find_recurrent_point(
            &Space::Discrete { size: 2 },
            &sys,
            &base,
            &Point::Discrete(0),
            &params(4, 2),
        )
        .unwrap();
        let w = out.found().expect("exact recurrence on Z/2");
        assert_eq!(w.achieved_epsilon, 0.0);
        assert_eq!(w.recurrence_epsilon, 0.0);
    }
}
