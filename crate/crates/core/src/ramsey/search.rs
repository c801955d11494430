//! The bounded monochromatic searches. Candidates are scanned in a fixed
//! order (smallest window first, then fewest variables, then
//! lexicographic), the scan may run in parallel, and the reported result
//! is always the order-minimal success, independently re-verified.

use serde::{Deserialize, Serialize};

use crate::domination::DominationVector;
use crate::par;
use crate::sequence::{
    check_plan, extracted_word, plans, ExtractionPlan, PlanFilter, SeqOrder, SequenceError,
    WordSequence,
};
use crate::word::{Kind, LocatedWord, Subst, VariableWord, Word};

use super::{universe, Coloring, SearchBudget, SearchError, SearchOutcome};

/// A variable word all of whose substitution instances share one color.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct SubstitutionWitness {
    pub word: VariableWord,
    pub color: u32,
    pub examined: u64,
}

/// Every substitution instance of `w` over its full legal range.
pub fn substitution_instances(
    w: &VariableWord,
    dom: &DominationVector,
) -> Result<Vec<LocatedWord>, SearchError> {
    let mut out = Vec::new();
    match dom.kind() {
        Kind::TwoSided => {
            if !w.has_variable_on_both_sides() {
                return Err(SearchError::Word(
                    crate::word::WordError::VariableOnOneSideOnly,
                ));
            }
            let p_bound = dom.bound(w.min_positive_pos().unwrap()).map_err(crate::word::WordError::from)?;
            let q_bound = dom.bound(w.max_negative_pos().unwrap()).map_err(crate::word::WordError::from)?;
            for p in 1..=p_bound {
                for q in 1..=q_bound {
                    let inst = w.substitute(Subst::Pair(p, q), dom)?;
                    out.push(inst.as_constant().unwrap().clone());
                }
            }
        }
        Kind::OneSided => {
            let p_bound = dom.bound(w.min_pos()).map_err(crate::word::WordError::from)?;
            for p in 1..=p_bound {
                let inst = w.substitute(Subst::Single(p), dom)?;
                out.push(inst.as_constant().unwrap().clone());
            }
        }
    }
    Ok(out)
}

fn monochromatic_color(
    col: &dyn Coloring,
    words: &[LocatedWord],
) -> Result<Option<u32>, SearchError> {
    let mut target = None;
    for w in words {
        let c = col.color(w)?;
        match target {
            None => target = Some(c),
            Some(t) if t == c => {}
            Some(_) => return Ok(None),
        }
    }
    Ok(target)
}

/// One-level search: a variable word in the window whose full substitution
/// range is monochromatic, or exhaustion.
pub fn search_monochromatic_substitutions(
    col: &dyn Coloring,
    dom: &DominationVector,
    budget: &SearchBudget,
) -> Result<SearchOutcome<SubstitutionWitness>, SearchError> {
    let mut candidates = universe::variable_candidates(dom, budget.window);
    let complete = candidates.len() as u64 <= budget.max_candidates;
    candidates.truncate(budget.max_candidates as usize);

    let indexed: Vec<(usize, VariableWord)> = candidates.into_iter().enumerate().collect();
    let hit = par::find_map_first(&indexed, |(i, cand)| {
        let words = substitution_instances(cand, dom).ok()?;
        let color = monochromatic_color(col, &words).ok()??;
        Some((*i, cand.clone(), color))
    });

    match hit {
        Some((i, word, color)) => {
            // Verification pass: recompute the full range sequentially.
            let words = substitution_instances(&word, dom)?;
            let verified = monochromatic_color(col, &words)?;
            debug_assert_eq!(verified, Some(color));
            if verified != Some(color) {
                return Ok(SearchOutcome::Exhausted { examined: i as u64 + 1, complete: false });
            }
            Ok(SearchOutcome::Found {
                witness: SubstitutionWitness { word, color, examined: i as u64 + 1 },
            })
        }
        None => Ok(SearchOutcome::Exhausted { examined: indexed.len() as u64, complete }),
    }
}

/// An extraction prefix of the base whose constant extracted words all
/// share one color, with the witnessing plans.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ExtractionWitness {
    pub prefix: WordSequence,
    pub plans: Vec<ExtractionPlan>,
    pub color: u32,
    pub examined: u64,
}

/// Common color of every constant extracted word of a prefix (up to
/// `max_terms` picks), or `None` if two differ.
pub fn verify_monochromatic_prefix(
    col: &dyn Coloring,
    prefix: &WordSequence,
    max_terms: usize,
) -> Result<Option<u32>, SearchError> {
    let mut target = None;
    for (_, w) in plans(prefix, PlanFilter::ConstantOnly, max_terms) {
        let c = col.color(w.as_constant().unwrap())?;
        match target {
            None => target = Some(c),
            Some(t) if t == c => {}
            Some(_) => return Ok(None),
        }
    }
    Ok(target)
}

/// Constant substitution instances of a prefix term sitting in `slot`
/// (1-based), under the slot-index letter bounds.
fn slot_instances(
    term: &VariableWord,
    slot: usize,
    order: SeqOrder,
    dom: &DominationVector,
) -> Result<Vec<LocatedWord>, SequenceError> {
    let mut out = Vec::new();
    let i = slot as i32;
    match order {
        SeqOrder::R1 => {
            let p_bound = dom.bound(i).map_err(crate::word::WordError::from)?;
            let q_bound = dom.bound(-i).map_err(crate::word::WordError::from)?;
            for p in 1..=p_bound {
                for q in 1..=q_bound {
                    let inst = term.substitute(Subst::Pair(p, q), dom)?;
                    out.push(inst.as_constant().unwrap().clone());
                }
            }
        }
        SeqOrder::R2 => {
            let p_bound = dom.bound(i).map_err(crate::word::WordError::from)?;
            for p in 1..=p_bound {
                let inst = term.substitute(Subst::Single(p), dom)?;
                out.push(inst.as_constant().unwrap().clone());
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

struct PrefixSearch<'a> {
    col: &'a dyn Coloring,
    base: &'a WordSequence,
    terms_wanted: usize,
    max_plan_depth: usize,
    color_ok: &'a (dyn Fn(u32) -> bool + Sync),
    node_cap: u64,
}

struct DfsState {
    picked: Vec<(ExtractionPlan, VariableWord)>,
    constant_words: Vec<LocatedWord>,
    target: Option<u32>,
    nodes: u64,
}

enum DfsResult {
    Found(Vec<(ExtractionPlan, VariableWord)>, u32),
    NotFound,
    Capped,
}

impl<'a> PrefixSearch<'a> {
    /// Tries to place `term` (built by `plan`) in the next slot, extending
    /// the monochromatic state; on success recurses, otherwise backtracks.
    fn place_and_recurse(&self, state: &mut DfsState, plan: ExtractionPlan, term: VariableWord) -> Result<DfsResult, SearchError> {
        let slot = state.picked.len() + 1;
        if !feasible_in_slot(&term, slot, self.base.order()) {
            return Ok(DfsResult::NotFound);
        }
        let instances = match slot_instances(&term, slot, self.base.order(), self.base.domination()) {
            Ok(v) => v,
            Err(_) => return Ok(DfsResult::NotFound),
        };
        // New constant words: each instance alone and joined with every
        // previously reachable constant word.
        let mut new_words = Vec::with_capacity(instances.len() * (1 + state.constant_words.len()));
        for inst in &instances {
            new_words.push(inst.clone());
            for prev in &state.constant_words {
                match crate::word::concat(&prev.to_word(), &inst.to_word()) {
                    Ok(Word::Constant(w)) => new_words.push(w),
                    _ => return Ok(DfsResult::NotFound),
                }
            }
        }
        let mut target = state.target;
        for w in &new_words {
            let c = self.col.color(w)?;
            if !(self.color_ok)(c) {
                return Ok(DfsResult::NotFound);
            }
            match target {
                None => target = Some(c),
                Some(t) if t == c => {}
                Some(_) => return Ok(DfsResult::NotFound),
            }
        }
        let saved_target = state.target;
        let saved_len = state.constant_words.len();
        state.target = target;
        state.constant_words.extend(new_words);
        state.picked.push((plan, term));

        let result = if state.picked.len() == self.terms_wanted {
            DfsResult::Found(state.picked.clone(), state.target.expect("nonempty prefix has words"))
        } else {
            self.extend(state)?
        };

        match result {
            DfsResult::Found(p, c) => Ok(DfsResult::Found(p, c)),
            other => {
                state.picked.pop();
                state.constant_words.truncate(saved_len);
                state.target = saved_target;
                Ok(other)
            }
        }
    }

    fn extend(&self, state: &mut DfsState) -> Result<DfsResult, SearchError> {
        let min_slot = state
            .picked
            .last()
            .map(|(p, _)| p.max_term() + 1)
            .unwrap_or(1);
        if min_slot > self.base.len() {
            return Ok(DfsResult::NotFound);
        }
        let mut capped = false;
        for (plan, word) in crate::sequence::plans_from(
            self.base,
            PlanFilter::VariableOnly,
            self.max_plan_depth,
            min_slot,
        ) {
            state.nodes += 1;
            if state.nodes > self.node_cap {
                return Ok(DfsResult::Capped);
            }
            let term = word.as_variable().expect("variable filter").clone();
            match self.place_and_recurse(state, plan, term)? {
                DfsResult::Found(p, c) => return Ok(DfsResult::Found(p, c)),
                DfsResult::Capped => capped = true,
                DfsResult::NotFound => {}
            }
        }
        Ok(if capped { DfsResult::Capped } else { DfsResult::NotFound })
    }
}

/// Searches for an extraction prefix of exactly `terms_wanted` terms whose
/// constant extracted words (any number of picks up to `terms_wanted`) all
/// share one color accepted by `color_ok`.
pub fn search_extraction_filtered(
    col: &dyn Coloring,
    base: &WordSequence,
    terms_wanted: usize,
    budget: &SearchBudget,
    color_ok: &(dyn Fn(u32) -> bool + Sync),
) -> Result<SearchOutcome<ExtractionWitness>, SearchError> {
    if terms_wanted == 0 || terms_wanted > base.len() {
        return Ok(SearchOutcome::Exhausted { examined: 0, complete: true });
    }
    let search = PrefixSearch {
        col,
        base,
        terms_wanted,
        max_plan_depth: budget.max_plan_depth as usize,
        color_ok,
        node_cap: 0, // per-branch cap set below
    };

    // Branch on the first term's plan; each branch runs an equal
    // deterministic share of the node budget.
    let first_plans: Vec<(ExtractionPlan, Word)> =
        plans(base, PlanFilter::VariableOnly, budget.max_plan_depth as usize).collect();
    if first_plans.is_empty() {
        return Ok(SearchOutcome::Exhausted { examined: 0, complete: true });
    }
    let slice = (budget.max_candidates / first_plans.len() as u64).max(1_000);

    struct BranchOutcome {
        result: Option<(Vec<(ExtractionPlan, VariableWord)>, u32)>,
        nodes: u64,
        capped: bool,
    }

    let mut examined = 0u64;
    let mut any_capped = false;
    // Chunked scan: branches inside a chunk run in parallel, chunks stop
    // at the first winner, so the answer and the examined count match the
    // sequential scan.
    for chunk in first_plans.chunks(64) {
        let branch_results: Vec<Result<BranchOutcome, SearchError>> =
            par::map_collect(chunk, |(plan, word)| {
                let mut state = DfsState {
                    picked: Vec::new(),
                    constant_words: Vec::new(),
                    target: None,
                    nodes: 1,
                };
                let branch_search = PrefixSearch { node_cap: slice, ..search_copy(&search) };
                let term = word.as_variable().expect("variable filter").clone();
                match branch_search.place_and_recurse(&mut state, plan.clone(), term) {
                    Ok(DfsResult::Found(picked, color)) => Ok(BranchOutcome {
                        result: Some((picked, color)),
                        nodes: state.nodes,
                        capped: false,
                    }),
                    Ok(DfsResult::NotFound) => {
                        Ok(BranchOutcome { result: None, nodes: state.nodes, capped: false })
                    }
                    Ok(DfsResult::Capped) => {
                        Ok(BranchOutcome { result: None, nodes: state.nodes, capped: true })
                    }
                    Err(e) => Err(e),
                }
            });

        for branch in branch_results {
            let branch = branch?;
            examined += branch.nodes;
            any_capped |= branch.capped;
            if let Some((picked, color)) = branch.result {
                let terms: Vec<VariableWord> = picked.iter().map(|(_, t)| t.clone()).collect();
                let prefix = WordSequence::new(base.order(), base.domination().clone(), terms)?;
                // Verification pass over the assembled prefix.
                let verified = verify_monochromatic_prefix(col, &prefix, terms_wanted)?;
                debug_assert_eq!(verified, Some(color));
                if verified != Some(color) || !color_ok(color) {
                    return Ok(SearchOutcome::Exhausted { examined, complete: false });
                }
                let witness_plans: Vec<ExtractionPlan> =
                    picked.into_iter().map(|(p, _)| p).collect();
                for p in &witness_plans {
                    check_plan(base, p)?;
                    debug_assert!(extracted_word(base, p).unwrap().as_variable().is_some());
                }
                return Ok(SearchOutcome::Found {
                    witness: ExtractionWitness { prefix, plans: witness_plans, color, examined },
                });
            }
        }
    }
    Ok(SearchOutcome::Exhausted { examined, complete: !any_capped })
}

fn search_copy<'a>(s: &PrefixSearch<'a>) -> PrefixSearch<'a> {
    PrefixSearch {
        col: s.col,
        base: s.base,
        terms_wanted: s.terms_wanted,
        max_plan_depth: s.max_plan_depth,
        color_ok: s.color_ok,
        node_cap: s.node_cap,
    }
}

/// Finite-depth extraction search: a prefix of `terms_wanted` extracted
/// variable words of `base` whose constant extracted words all share one
/// color.
pub fn search_monochromatic_extraction(
    col: &dyn Coloring,
    base: &WordSequence,
    terms_wanted: usize,
    budget: &SearchBudget,
) -> Result<SearchOutcome<ExtractionWitness>, SearchError> {
    search_extraction_filtered(col, base, terms_wanted, budget, &|_| true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::Codec;
    use crate::domination::BoundRule;
    use crate::ramsey::{CatalogColoring, ColorRule};
    use crate::sequence::is_extraction;

    fn budget() -> SearchBudget {
        SearchBudget::new(3, 3, 100_000, 1)
    }

    #[test]
    fn constant_coloring_takes_first_candidate() {
        let dom = DominationVector::two_sided(BoundRule::Abs).unwrap();
        let col = CatalogColoring::new(1, ColorRule::Constant).unwrap();
        let out = search_monochromatic_substitutions(&col, &dom, &budget()).unwrap();
        let w = out.found().unwrap();
        assert_eq!(w.color, 1);
        assert_eq!(w.examined, 1);
        // First candidate: {-1: v, 1: v}.
        assert_eq!(w.word.min_pos(), -1);
        assert_eq!(w.word.max_pos(), 1);
    }

    #[test]
    fn parity_coloring_on_doubling_bases() {
        // One-sided bases (2,2,2,…); parity of the decoded value.
        let radix = crate::codec::MixedRadix::constant(2).unwrap();
        let dom = radix.word_domination();
        let col = CatalogColoring::new(
            2,
            ColorRule::DecodedResidue {
                codec: Codec::Integer { radix: radix.clone() },
                modulus: 2,
            },
        )
        .unwrap();
        let out = search_monochromatic_substitutions(&col, &dom, &budget()).unwrap();
        let w = out.found().unwrap();
        // Verify the stated witness is itself monochromatic evenColor.
        let stated = VariableWord::new(
            Kind::OneSided,
            [(1, crate::word::Symbol::Letter(2)), (2, crate::word::Symbol::Variable)],
        )
        .unwrap();
        let insts = substitution_instances(&stated, &dom).unwrap();
        let mut colors: Vec<u32> = insts.iter().map(|i| col.color(i).unwrap()).collect();
        colors.dedup();
        assert_eq!(colors, vec![1]); // 2 - 2p is always even
        // And the found witness verifies too.
        let insts = substitution_instances(&w.word, &dom).unwrap();
        let mut colors: Vec<u32> = insts.iter().map(|i| col.color(i).unwrap()).collect();
        colors.dedup();
        assert_eq!(colors.len(), 1);
    }

    #[test]
    fn all_distinct_table_coloring_exhausts() {
        // Window ±1 under constant bound 2: the only candidate is
        // {-1: v, 1: v} with four substitution instances; coloring every
        // constant word distinctly leaves nothing monochromatic.
        let dom = DominationVector::two_sided(BoundRule::Constant(2)).unwrap();
        let words = universe::constant_words(&dom, 1);
        assert!(words.len() <= 16);
        let entries: Vec<(Word, u32)> = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.to_word(), i as u32 + 1))
            .collect();
        let col = CatalogColoring::new(16, ColorRule::Table { entries, default: Some(16) }).unwrap();
        let small = SearchBudget::new(1, 1, 1000, 1);
        let out = search_monochromatic_substitutions(&col, &dom, &small).unwrap();
        assert!(matches!(out, SearchOutcome::Exhausted { complete: true, .. }));
    }

    #[test]
    fn extraction_search_on_constant_coloring_returns_base_prefix() {
        let dom = DominationVector::two_sided(BoundRule::Abs).unwrap();
        let base = WordSequence::canonical(SeqOrder::R1, dom, 3).unwrap();
        let col = CatalogColoring::new(1, ColorRule::Constant).unwrap();
        let out = search_monochromatic_extraction(&col, &base, 2, &budget()).unwrap();
        let w = out.found().unwrap();
        assert_eq!(w.prefix.len(), 2);
        assert_eq!(w.prefix.terms()[0], base.terms()[0]);
        assert_eq!(w.prefix.terms()[1], base.terms()[1]);
        assert!(is_extraction(&w.prefix, &base, 2).unwrap().is_some());
    }

    #[test]
    fn terms_wanted_beyond_base_exhausts() {
        let dom = DominationVector::two_sided(BoundRule::Abs).unwrap();
        let base = WordSequence::canonical(SeqOrder::R1, dom, 2).unwrap();
        let col = CatalogColoring::new(1, ColorRule::Constant).unwrap();
        let out = search_monochromatic_extraction(&col, &base, 3, &budget()).unwrap();
        assert!(matches!(out, SearchOutcome::Exhausted { .. }));
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let radix = crate::codec::MixedRadix::factorial();
        let dom = radix.word_domination();
        let col = CatalogColoring::new(
            3,
            ColorRule::DecodedResidue { codec: Codec::Integer { radix }, modulus: 3 },
        )
        .unwrap();
        let b = budget();
        let par_out = search_monochromatic_substitutions(&col, &dom, &b).unwrap();
        crate::par::force_sequential(true);
        let seq_out = search_monochromatic_substitutions(&col, &dom, &b).unwrap();
        crate::par::force_sequential(false);
        assert_eq!(par_out, seq_out);
    }
}
