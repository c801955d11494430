//! Deterministic enumeration of the finite word universes a bounded
//! search walks: all constant or variable words whose domains live inside
//! a window of positions.

use crate::domination::{DominationVector, Kind};
use crate::word::{LocatedWord, Position, Symbol, VariableWord};

fn window_positions(dom: &DominationVector, radius: u32) -> Vec<Position> {
    let mut out = Vec::new();
    if dom.kind() == Kind::TwoSided {
        for i in (1..=radius as i32).rev() {
            out.push(-i);
        }
    }
    for i in 1..=radius as i32 {
        out.push(i);
    }
    out
}

/// Every constant word with domain inside `±radius`, ordered by the
/// smallest window containing the word, then domain size, then entries.
pub fn constant_words(dom: &DominationVector, radius: u32) -> Vec<LocatedWord> {
    let mut out = Vec::new();
    for r in 1..=radius {
        let mut batch: Vec<LocatedWord> = Vec::new();
        let positions = window_positions(dom, r);
        let mut entries: Vec<(Position, u64)> = Vec::new();
        collect_constant(dom, &positions, 0, r, false, &mut entries, &mut batch);
        batch.sort_by_key(|w| (w.len(), entry_key_const(w)));
        out.extend(batch);
    }
    out
}

fn collect_constant(
    dom: &DominationVector,
    positions: &[Position],
    idx: usize,
    radius: u32,
    touched_edge: bool,
    entries: &mut Vec<(Position, u64)>,
    out: &mut Vec<LocatedWord>,
) {
    if idx == positions.len() {
        if touched_edge && !entries.is_empty() {
            out.push(LocatedWord::new(dom.kind(), entries.iter().copied()).unwrap());
        }
        return;
    }
    let p = positions[idx];
    let at_edge = p.unsigned_abs() == radius;
    collect_constant(dom, positions, idx + 1, radius, touched_edge, entries, out);
    let bound = dom.bound(p).expect("window position in range");
    for v in 1..=bound {
        entries.push((p, v));
        collect_constant(dom, positions, idx + 1, radius, touched_edge || at_edge, entries, out);
        entries.pop();
    }
}

/// Candidate variable words for the substitution search, inside
/// `±radius`: two-sided candidates carry a variable on both sides, as
/// two-sided substitution requires; one-sided candidates carry at least
/// one. Ordered by window, then variable count, then entries.
pub fn variable_candidates(dom: &DominationVector, radius: u32) -> Vec<VariableWord> {
    let mut out = Vec::new();
    for r in 1..=radius {
        let mut batch: Vec<VariableWord> = Vec::new();
        let positions = window_positions(dom, r);
        let mut entries: Vec<(Position, Symbol)> = Vec::new();
        collect_variable(dom, &positions, 0, r, false, &mut entries, &mut batch);
        batch.retain(|w| match dom.kind() {
            Kind::TwoSided => w.has_variable_on_both_sides(),
            Kind::OneSided => true,
        });
        batch.sort_by_key(|w| (w.variable_positions().count(), entry_key_var(w)));
        out.extend(batch);
    }
    out
}

fn collect_variable(
    dom: &DominationVector,
    positions: &[Position],
    idx: usize,
    radius: u32,
    touched_edge: bool,
    entries: &mut Vec<(Position, Symbol)>,
    out: &mut Vec<VariableWord>,
) {
    if idx == positions.len() {
        if touched_edge && entries.iter().any(|(_, s)| s.is_variable()) {
            out.push(VariableWord::new(dom.kind(), entries.iter().copied()).unwrap());
        }
        return;
    }
    let p = positions[idx];
    let at_edge = p.unsigned_abs() == radius;
    collect_variable(dom, positions, idx + 1, radius, touched_edge, entries, out);
    entries.push((p, Symbol::Variable));
    collect_variable(dom, positions, idx + 1, radius, touched_edge || at_edge, entries, out);
    entries.pop();
    let bound = dom.bound(p).expect("window position in range");
    for v in 1..=bound {
        entries.push((p, Symbol::Letter(v)));
        collect_variable(dom, positions, idx + 1, radius, touched_edge || at_edge, entries, out);
        entries.pop();
    }
}

fn entry_key_const(w: &LocatedWord) -> Vec<(Position, u64)> {
    w.entries().iter().map(|(&p, &v)| (p, v)).collect()
}

fn entry_key_var(w: &VariableWord) -> Vec<(Position, i64)> {
    w.entries()
        .iter()
        .map(|(&p, &s)| {
            (
                p,
                match s {
                    Symbol::Variable => -1,
                    Symbol::Letter(v) => v as i64,
                },
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domination::BoundRule;

    #[test]
    fn constant_universe_size_matches_product_formula() {
        // Window ±2 under |n|: per-position options (bound+1):
        // (2+1)(1+1)(1+1)(2+1) = 36, minus the empty word.
        let dom = DominationVector::two_sided(BoundRule::Abs).unwrap();
        let words = constant_words(&dom, 2);
        assert_eq!(words.len(), 35);
        // No duplicates, all valid.
        let mut seen = std::collections::BTreeSet::new();
        for w in &words {
            assert!(w.check_bounds(&dom).is_ok());
            assert!(seen.insert(format!("{w:?}")));
        }
        // Window ordering: radius-1 words first.
        assert!(words[0].max_pos().unsigned_abs() <= 1);
        assert!(words.last().unwrap().domain().any(|p| p.unsigned_abs() == 2));
    }

    #[test]
    fn variable_candidates_span_both_sides_when_two_sided() {
        let dom = DominationVector::two_sided(BoundRule::Abs).unwrap();
        let cands = variable_candidates(&dom, 2);
        assert!(!cands.is_empty());
        for c in &cands {
            assert!(c.has_variable_on_both_sides());
        }
        // First candidate is the smallest-window, fewest-variables one.
        let first = &cands[0];
        assert_eq!(first.max_pos(), 1);
        assert_eq!(first.min_pos(), -1);
    }

    #[test]
    fn one_sided_candidates() {
        let dom = DominationVector::one_sided(BoundRule::Constant(2)).unwrap();
        let cands = variable_candidates(&dom, 2);
        // First: {1: v}; the radius-2 batch starts after window-1 words.
        assert_eq!(cands[0].entries().len(), 1);
        assert_eq!(cands[0].min_pos(), 1);
        assert!(cands.iter().all(|c| c.variable_positions().count() >= 1));
    }
}
