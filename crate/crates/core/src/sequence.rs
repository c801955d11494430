//! Ordered sequences of variable words and the words extracted from them:
//! pick some terms, substitute into each, concatenate.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::domination::{DominationVector, Kind};
use crate::word::{
    concat, rel_r1, rel_r2, Letter, Subst, VariableWord, Word, WordError,
};

/// Which chain relation consecutive terms satisfy.
///
/// `R1`: each term's domain straddles all the previous ones (two-sided
/// words with a variable on both sides). `R2`: each term's domain lies
/// wholly to the right of the previous one (one-sided words).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum SeqOrder {
    #[serde(rename = "r1")]
    R1,
    #[serde(rename = "r2")]
    R2,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum SequenceError {
    #[error("sequence needs at least one term")]
    Empty,
    #[error("order/kind mismatch: {0:?} sequences hold {1} words")]
    OrderKind(SeqOrder, Kind),
    #[error("term {index} breaks the chain relation")]
    ChainBroken { index: usize },
    #[error("term {index} must have a variable on both sides of zero")]
    NotSpanning { index: usize },
    #[error("term {index} starts too close to zero for its slot")]
    Infeasible { index: usize },
    #[error("plan is empty")]
    EmptyPlan,
    #[error("plan term index {0} is out of range")]
    PlanIndexOutOfRange(usize),
    #[error("plan term indices must be strictly increasing")]
    PlanNotIncreasing,
    #[error(transparent)]
    Word(#[from] WordError),
}

/// A finite prefix of an infinite chain of variable words, together with
/// the bound vector its letters live under.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WordSequence {
    order: SeqOrder,
    dom: DominationVector,
    terms: Vec<VariableWord>,
}

impl WordSequence {
    pub fn new(
        order: SeqOrder,
        dom: DominationVector,
        terms: Vec<VariableWord>,
    ) -> Result<Self, SequenceError> {
        if terms.is_empty() {
            return Err(SequenceError::Empty);
        }
        let expected_kind = match order {
            SeqOrder::R1 => Kind::TwoSided,
            SeqOrder::R2 => Kind::OneSided,
        };
        if dom.kind() != expected_kind {
            return Err(SequenceError::OrderKind(order, dom.kind()));
        }
        for (i, t) in terms.iter().enumerate() {
            if t.kind() != expected_kind {
                return Err(SequenceError::OrderKind(order, t.kind()));
            }
            t.check_bounds(&dom)?;
            let slot = i as i32 + 1;
            match order {
                SeqOrder::R1 => {
                    if !t.has_variable_on_both_sides() {
                        return Err(SequenceError::NotSpanning { index: i + 1 });
                    }
                    let min_pos = t.min_positive_pos().unwrap();
                    let max_neg = t.max_negative_pos().unwrap();
                    if min_pos < slot || -max_neg < slot {
                        return Err(SequenceError::Infeasible { index: i + 1 });
                    }
                }
                SeqOrder::R2 => {
                    if t.min_pos() < slot {
                        return Err(SequenceError::Infeasible { index: i + 1 });
                    }
                }
            }
            if i > 0 {
                let prev = terms[i - 1].to_word();
                let cur = t.to_word();
                let ok = match order {
                    SeqOrder::R1 => rel_r1(&prev, &cur),
                    SeqOrder::R2 => rel_r2(&prev, &cur),
                };
                if !ok {
                    return Err(SequenceError::ChainBroken { index: i + 1 });
                }
            }
        }
        Ok(WordSequence { order, dom, terms })
    }

    /// The tight base chain: term `n` is `{-n: v, n: v}` (two-sided) or
    /// `{n: v}` (one-sided).
    pub fn canonical(
        order: SeqOrder,
        dom: DominationVector,
        len: usize,
    ) -> Result<Self, SequenceError> {
        use crate::word::Symbol;
        let mut terms = Vec::with_capacity(len);
        for n in 1..=len as i32 {
            let term = match order {
                SeqOrder::R1 => VariableWord::new(
                    Kind::TwoSided,
                    [(-n, Symbol::Variable), (n, Symbol::Variable)],
                ),
                SeqOrder::R2 => VariableWord::new(Kind::OneSided, [(n, Symbol::Variable)]),
            }
            .map_err(SequenceError::Word)?;
            terms.push(term);
        }
        Self::new(order, dom, terms)
    }

    pub fn order(&self) -> SeqOrder {
        self.order
    }

    pub fn domination(&self) -> &DominationVector {
        &self.dom
    }

    pub fn terms(&self) -> &[VariableWord] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn term(&self, index_1based: usize) -> Option<&VariableWord> {
        self.terms.get(index_1based.wrapping_sub(1))
    }

    /// Prefix of the first `len` terms.
    pub fn prefix(&self, len: usize) -> Result<Self, SequenceError> {
        if len == 0 || len > self.terms.len() {
            return Err(SequenceError::Empty);
        }
        Ok(WordSequence {
            order: self.order,
            dom: self.dom.clone(),
            terms: self.terms[..len].to_vec(),
        })
    }

    /// Legal substitution letters for the term in slot `index` (1-based),
    /// bounded at the slot index itself.
    pub fn slot_bounds(&self, index: usize) -> Result<(u64, Option<u64>), SequenceError> {
        if index == 0 || index > self.terms.len() {
            return Err(SequenceError::PlanIndexOutOfRange(index));
        }
        let i = index as i32;
        match self.order {
            SeqOrder::R2 => Ok((self.dom.bound(i).map_err(WordError::from)?, None)),
            SeqOrder::R1 => Ok((
                self.dom.bound(i).map_err(WordError::from)?,
                Some(self.dom.bound(-i).map_err(WordError::from)?),
            )),
        }
    }
}

impl Serialize for WordSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            order: SeqOrder,
            domination: &'a DominationVector,
            terms: Vec<Word>,
        }
        Repr {
            order: self.order,
            domination: &self.dom,
            terms: self.terms.iter().map(|t| t.to_word()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for WordSequence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            order: SeqOrder,
            domination: DominationVector,
            terms: Vec<VariableWord>,
        }
        let r = Repr::deserialize(deserializer)?;
        WordSequence::new(r.order, r.domination, r.terms).map_err(D::Error::custom)
    }
}

/// One pick of an extraction plan: which term, and what to substitute.
pub type Pick = (usize, Subst);

/// A plan describing one extracted word: strictly increasing term slots,
/// each with a substitution choice. Plans with no `Keep` pick produce
/// constant words; plans with at least one produce variable words.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct ExtractionPlan {
    picks: Vec<Pick>,
}

impl ExtractionPlan {
    pub fn new(picks: Vec<Pick>) -> Result<Self, SequenceError> {
        if picks.is_empty() {
            return Err(SequenceError::EmptyPlan);
        }
        for w in picks.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(SequenceError::PlanNotIncreasing);
            }
        }
        Ok(ExtractionPlan { picks })
    }

    pub fn picks(&self) -> &[Pick] {
        &self.picks
    }

    pub fn term_count(&self) -> usize {
        self.picks.len()
    }

    pub fn is_constant(&self) -> bool {
        self.picks.iter().all(|(_, s)| *s != Subst::Keep)
    }

    pub fn max_term(&self) -> usize {
        self.picks.last().map(|(i, _)| *i).unwrap_or(0)
    }
}

impl Serialize for ExtractionPlan {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct PickRepr {
            term: usize,
            sub: SubstRepr,
        }
        let picks: Vec<PickRepr> = self
            .picks
            .iter()
            .map(|(t, s)| PickRepr { term: *t, sub: SubstRepr(*s) })
            .collect();
        picks.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExtractionPlan {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct PickRepr {
            term: usize,
            sub: SubstRepr,
        }
        let picks = Vec::<PickRepr>::deserialize(deserializer)?;
        ExtractionPlan::new(picks.into_iter().map(|p| (p.term, p.sub.0)).collect())
            .map_err(D::Error::custom)
    }
}

/// Wire form of a substitution: `"v"`, `[p]`, or `[p, q]`.
struct SubstRepr(Subst);

impl Serialize for SubstRepr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Subst::Keep => serializer.serialize_str("v"),
            Subst::Single(p) => vec![p].serialize(serializer),
            Subst::Pair(p, q) => vec![p, q].serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for SubstRepr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Nums(Vec<Letter>),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) if s == "v" => Ok(SubstRepr(Subst::Keep)),
            Repr::Text(s) => Err(D::Error::custom(format!("expected \"v\", got {s:?}"))),
            Repr::Nums(ns) => match ns.as_slice() {
                [p] => Ok(SubstRepr(Subst::Single(*p))),
                [p, q] => Ok(SubstRepr(Subst::Pair(*p, *q))),
                _ => Err(D::Error::custom("substitution takes one or two letters")),
            },
        }
    }
}

/// Checks a plan against a sequence: slots in range and strictly
/// increasing, substitution arity matching the order, letters within the
/// slot-index bounds.
pub fn check_plan(seq: &WordSequence, plan: &ExtractionPlan) -> Result<(), SequenceError> {
    for &(slot, sub) in plan.picks() {
        if slot == 0 || slot > seq.len() {
            return Err(SequenceError::PlanIndexOutOfRange(slot));
        }
        let (pos_bound, neg_bound) = seq.slot_bounds(slot)?;
        match (seq.order(), sub) {
            (_, Subst::Keep) => {}
            (SeqOrder::R1, Subst::Pair(p, q)) => {
                let neg_bound = neg_bound.unwrap();
                if p < 1 || p > pos_bound {
                    return Err(WordError::SubstitutionOutOfBound {
                        position: slot as i32,
                        letter: p,
                        bound: pos_bound,
                    }
                    .into());
                }
                if q < 1 || q > neg_bound {
                    return Err(WordError::SubstitutionOutOfBound {
                        position: -(slot as i32),
                        letter: q,
                        bound: neg_bound,
                    }
                    .into());
                }
            }
            (SeqOrder::R2, Subst::Single(p)) => {
                if p < 1 || p > pos_bound {
                    return Err(WordError::SubstitutionOutOfBound {
                        position: slot as i32,
                        letter: p,
                        bound: pos_bound,
                    }
                    .into());
                }
            }
            _ => return Err(WordError::SubstitutionArity.into()),
        }
    }
    Ok(())
}

/// Builds the extracted word a plan describes: substitute into each picked
/// term, then concatenate.
pub fn extracted_word(seq: &WordSequence, plan: &ExtractionPlan) -> Result<Word, SequenceError> {
    check_plan(seq, plan)?;
    let mut parts = Vec::with_capacity(plan.term_count());
    for &(slot, sub) in plan.picks() {
        let term = seq.term(slot).unwrap();
        parts.push(term.substitute(sub, seq.domination())?);
    }
    let mut acc = parts[0].clone();
    for part in &parts[1..] {
        acc = concat(&acc, part)?;
    }
    Ok(acc)
}

/// Which plans an enumeration should emit.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PlanFilter {
    All,
    ConstantOnly,
    VariableOnly,
}

impl PlanFilter {
    fn admits(self, plan: &ExtractionPlan) -> bool {
        match self {
            PlanFilter::All => true,
            PlanFilter::ConstantOnly => plan.is_constant(),
            PlanFilter::VariableOnly => !plan.is_constant(),
        }
    }
}

/// Lazy enumeration of every plan over a sequence, lexicographic on the
/// pick list (term slots ascending; at each slot the kept variable sorts
/// before letters, letters in ascending order). A plan is emitted before
/// any of its extensions, so the stream is reproducible and restartable.
pub struct PlanIter<'a> {
    seq: &'a WordSequence,
    filter: PlanFilter,
    max_terms: usize,
    min_slot: usize,
    stack: Vec<Pick>,
    started: bool,
    done: bool,
}

impl<'a> PlanIter<'a> {
    fn subst_after(&self, slot: usize, current: Option<Subst>) -> Option<Subst> {
        let (pos_bound, neg_bound) = self.seq.slot_bounds(slot).ok()?;
        match self.seq.order() {
            SeqOrder::R2 => match current {
                None => Some(Subst::Keep),
                Some(Subst::Keep) => Some(Subst::Single(1)),
                Some(Subst::Single(p)) if p < pos_bound => Some(Subst::Single(p + 1)),
                _ => None,
            },
            SeqOrder::R1 => {
                let neg_bound = neg_bound.unwrap();
                match current {
                    None => Some(Subst::Keep),
                    Some(Subst::Keep) => Some(Subst::Pair(1, 1)),
                    Some(Subst::Pair(p, q)) if q < neg_bound => Some(Subst::Pair(p, q + 1)),
                    Some(Subst::Pair(p, _)) if p < pos_bound => Some(Subst::Pair(p + 1, 1)),
                    _ => None,
                }
            }
        }
    }

    /// Advances the stack to the next plan in order, without filtering.
    fn step(&mut self) -> bool {
        if self.done {
            return false;
        }
        if !self.started {
            self.started = true;
            if self.min_slot > self.seq.len() || self.max_terms == 0 {
                self.done = true;
                return false;
            }
            let first = self
                .subst_after(self.min_slot, None)
                .expect("starting slot has substitutions");
            self.stack.push((self.min_slot, first));
            return true;
        }
        // Try to extend (emit-then-extend gives lexicographic order).
        if self.stack.len() < self.max_terms {
            let next_slot = self.stack.last().map(|(s, _)| s + 1).unwrap_or(self.min_slot);
            if next_slot <= self.seq.len() {
                let sub = self.subst_after(next_slot, None).expect("slot has substitutions");
                self.stack.push((next_slot, sub));
                return true;
            }
        }
        // Otherwise advance the top of the stack: next substitution, then
        // next slot, popping when a level is exhausted.
        loop {
            let Some((slot, sub)) = self.stack.pop() else {
                self.done = true;
                return false;
            };
            if let Some(next_sub) = self.subst_after(slot, Some(sub)) {
                self.stack.push((slot, next_sub));
                return true;
            }
            if slot < self.seq.len() {
                let next_sub = self.subst_after(slot + 1, None).expect("slot has substitutions");
                self.stack.push((slot + 1, next_sub));
                return true;
            }
        }
    }
}

impl<'a> Iterator for PlanIter<'a> {
    type Item = (ExtractionPlan, Word);

    fn next(&mut self) -> Option<Self::Item> {
        while self.step() {
            let plan = ExtractionPlan { picks: self.stack.clone() };
            if self.filter.admits(&plan) {
                let word = extracted_word(self.seq, &plan)
                    .expect("enumerated plans are valid by construction");
                return Some((plan, word));
            }
        }
        None
    }
}

/// Streams every plan over `seq` with at most `max_terms` picks, each
/// exactly once, in lexicographic order.
pub fn enumerate_extracted(
    seq: &WordSequence,
    constant_only: bool,
    max_terms: usize,
) -> PlanIter<'_> {
    plans(seq, if constant_only { PlanFilter::ConstantOnly } else { PlanFilter::All }, max_terms)
}

/// Same stream with an explicit filter.
pub fn plans(seq: &WordSequence, filter: PlanFilter, max_terms: usize) -> PlanIter<'_> {
    plans_from(seq, filter, max_terms, 1)
}

/// Plans whose first pick is at or after `min_slot` (1-based).
pub fn plans_from(
    seq: &WordSequence,
    filter: PlanFilter,
    max_terms: usize,
    min_slot: usize,
) -> PlanIter<'_> {
    PlanIter {
        seq,
        filter,
        max_terms: max_terms.min(seq.len()),
        min_slot: min_slot.max(1),
        stack: Vec::new(),
        started: false,
        done: false,
    }
}

/// Number of plans `enumerate_extracted` will emit: the sum over nonempty
/// slot subsets of the product of per-slot choice counts.
pub fn plan_count(
    seq: &WordSequence,
    constant_only: bool,
    max_terms: usize,
) -> Result<u128, SequenceError> {
    let mut per_slot = Vec::with_capacity(seq.len());
    for slot in 1..=seq.len() {
        let (p, q) = seq.slot_bounds(slot)?;
        let consts = p as u128 * q.unwrap_or(1) as u128;
        per_slot.push(consts);
    }
    // dp over subsets by size: ways[k] = sum over k-subsets of products.
    let max_terms = max_terms.min(seq.len());
    let mut ways = vec![0u128; max_terms + 1];
    ways[0] = 1;
    for &c in &per_slot {
        let options = if constant_only { c } else { c + 1 };
        for k in (1..=max_terms).rev() {
            ways[k] += ways[k - 1] * options;
        }
    }
    Ok(ways[1..].iter().sum())
}

/// Decides whether the first `depth` terms of `candidate` are all words a
/// plan over `base` can extract (keeping at least one variable). The match
/// is forced position by position, so the witness plans are unique when
/// they exist.
pub fn is_extraction(
    candidate: &WordSequence,
    base: &WordSequence,
    depth: usize,
) -> Result<Option<Vec<ExtractionPlan>>, SequenceError> {
    if candidate.order() != base.order() || candidate.domination() != base.domination() {
        return Ok(None);
    }
    let depth = depth.min(candidate.len());
    let mut witnesses = Vec::with_capacity(depth);
    for term in candidate.terms().iter().take(depth) {
        match match_term(term, base)? {
            Some(plan) => witnesses.push(plan),
            None => return Ok(None),
        }
    }
    Ok(Some(witnesses))
}

fn match_term(
    term: &VariableWord,
    base: &WordSequence,
) -> Result<Option<ExtractionPlan>, SequenceError> {
    use std::collections::BTreeMap;
    use crate::word::Symbol;

    // Locate the base term owning each position of the candidate.
    let mut owner: BTreeMap<usize, Vec<crate::word::Position>> = BTreeMap::new();
    'positions: for p in term.domain() {
        for (i, bt) in base.terms().iter().enumerate() {
            if bt.entries().contains_key(&p) {
                owner.entry(i + 1).or_default().push(p);
                continue 'positions;
            }
        }
        return Ok(None); // position outside the base's reach
    }

    let mut picks = Vec::with_capacity(owner.len());
    for (slot, _) in &owner {
        let bt = base.term(*slot).unwrap();
        // A picked base term contributes its whole domain.
        if !bt.domain().all(|p| term.entries().contains_key(&p)) {
            return Ok(None);
        }
        let mut keep = false;
        let mut pos_fill: Option<Letter> = None;
        let mut neg_fill: Option<Letter> = None;
        for (&p, &sym) in bt.entries() {
            let cand = term.entries()[&p];
            match sym {
                Symbol::Letter(v) => {
                    if cand != Symbol::Letter(v) {
                        return Ok(None); // constant cells must carry over
                    }
                }
                Symbol::Variable => match cand {
                    Symbol::Variable => keep = true,
                    Symbol::Letter(v) => {
                        let side = if p > 0 { &mut pos_fill } else { &mut neg_fill };
                        match side {
                            None => *side = Some(v),
                            Some(prev) if *prev == v => {}
                            Some(_) => return Ok(None), // inconsistent fill
                        }
                    }
                },
            }
        }
        let sub = match (keep, pos_fill, neg_fill, base.order()) {
            (true, None, None, _) => Subst::Keep,
            (false, Some(p), Some(q), SeqOrder::R1) => Subst::Pair(p, q),
            (false, Some(p), None, SeqOrder::R2) => Subst::Single(p),
            _ => return Ok(None), // mixed kept/filled variables
        };
        picks.push((*slot, sub));
    }
    let plan = ExtractionPlan::new(picks)?;
    if !plan.picks().iter().any(|(_, s)| *s == Subst::Keep) {
        return Ok(None); // extracted *variable* words keep a variable
    }
    if check_plan(base, &plan).is_err() {
        return Ok(None); // slot-index letter bounds
    }
    // The forced plan must reproduce the term exactly.
    match extracted_word(base, &plan)? {
        Word::Variable(w) if w == *term => Ok(Some(plan)),
        _ => Ok(None),
    }
}
