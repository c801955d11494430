//! Words: finite sorted maps from nonzero positions to letters, with an
//! optional distinguished variable symbol, plus the operations on them —
//! concatenation, the two order relations, substitution.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::domination::{DominationError, DominationVector};
pub use crate::domination::Kind;

pub type Position = i32;
pub type Letter = u64;

/// A cell of a variable word: either a concrete letter or the variable.
///
/// The derived order puts the variable first, which is also the order
/// substitution choices are enumerated in.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Symbol {
    Variable,
    Letter(Letter),
}

impl Symbol {
    pub fn is_variable(self) -> bool {
        matches!(self, Symbol::Variable)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("a word needs at least one position")]
    EmptyDomain,
    #[error("zero is not a valid position")]
    ZeroPosition,
    #[error("negative position {0} in a one-sided word")]
    NegativePosition(Position),
    #[error("letter {letter} at position {position} exceeds the bound {bound}")]
    LetterOutOfBound { position: Position, letter: Letter, bound: u64 },
    #[error("words overlap at position {0}")]
    DomainOverlap(Position),
    #[error("word kinds differ: {0} vs {1}")]
    KindMismatch(Kind, Kind),
    #[error("a variable word needs at least one variable position")]
    NoVariable,
    #[error("substitution letter {letter} exceeds the bound {bound} at position {position}")]
    SubstitutionOutOfBound { position: Position, letter: Letter, bound: u64 },
    #[error("two-sided substitution needs a variable on both sides of zero")]
    VariableOnOneSideOnly,
    #[error("substitution arity does not match the word kind")]
    SubstitutionArity,
    #[error("two-sided index undefined: domain lies on one side of zero only")]
    OneSidedDomain,
    #[error(transparent)]
    Domination(#[from] DominationError),
}

/// A constant word: every position holds a letter.
///
/// Letters are stored as positive integers; on the negative side the stored
/// value `v` at position `n < 0` denotes the `v`-th letter counted from the
/// top of the allowed range, so the bound check is `1 <= v <= bound(n)` on
/// both sides.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct LocatedWord {
    kind: Kind,
    entries: BTreeMap<Position, Letter>,
}

/// A word with at least one variable position.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct VariableWord {
    kind: Kind,
    entries: BTreeMap<Position, Symbol>,
}

/// Either flavor, for operations that accept both.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Word {
    Constant(LocatedWord),
    Variable(VariableWord),
}

fn check_positions<V>(kind: Kind, entries: &BTreeMap<Position, V>) -> Result<(), WordError> {
    if entries.is_empty() {
        return Err(WordError::EmptyDomain);
    }
    for &p in entries.keys() {
        if p == 0 {
            return Err(WordError::ZeroPosition);
        }
        if p < 0 && kind == Kind::OneSided {
            return Err(WordError::NegativePosition(p));
        }
    }
    Ok(())
}

impl LocatedWord {
    /// Structural construction: positions checked, letter bounds are not
    /// (those belong to a specific domination vector; see `validate_word`).
    pub fn new(
        kind: Kind,
        entries: impl IntoIterator<Item = (Position, Letter)>,
    ) -> Result<Self, WordError> {
        let entries: BTreeMap<_, _> = entries.into_iter().collect();
        check_positions(kind, &entries)?;
        Ok(LocatedWord { kind, entries })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn entries(&self) -> &BTreeMap<Position, Letter> {
        &self.entries
    }

    pub fn domain(&self) -> impl Iterator<Item = Position> + '_ {
        self.entries.keys().copied()
    }

    pub fn letter(&self, position: Position) -> Option<Letter> {
        self.entries.get(&position).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min_pos(&self) -> Position {
        *self.entries.keys().next().unwrap()
    }

    pub fn max_pos(&self) -> Position {
        *self.entries.keys().next_back().unwrap()
    }

    /// Checks every letter against the bound vector.
    pub fn check_bounds(&self, dom: &DominationVector) -> Result<(), WordError> {
        if self.kind != dom.kind() {
            return Err(WordError::KindMismatch(self.kind, dom.kind()));
        }
        for (&p, &v) in &self.entries {
            let bound = dom.bound(p)?;
            if v < 1 || v > bound {
                return Err(WordError::LetterOutOfBound { position: p, letter: v, bound });
            }
        }
        Ok(())
    }

    pub fn to_word(&self) -> Word {
        Word::Constant(self.clone())
    }
}

impl VariableWord {
    pub fn new(
        kind: Kind,
        entries: impl IntoIterator<Item = (Position, Symbol)>,
    ) -> Result<Self, WordError> {
        let entries: BTreeMap<_, _> = entries.into_iter().collect();
        check_positions(kind, &entries)?;
        if !entries.values().any(|s| s.is_variable()) {
            return Err(WordError::NoVariable);
        }
        Ok(VariableWord { kind, entries })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn entries(&self) -> &BTreeMap<Position, Symbol> {
        &self.entries
    }

    pub fn domain(&self) -> impl Iterator<Item = Position> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn min_pos(&self) -> Position {
        *self.entries.keys().next().unwrap()
    }

    pub fn max_pos(&self) -> Position {
        *self.entries.keys().next_back().unwrap()
    }

    pub fn variable_positions(&self) -> impl Iterator<Item = Position> + '_ {
        self.entries
            .iter()
            .filter(|(_, s)| s.is_variable())
            .map(|(&p, _)| p)
    }

    /// True when the variable occurs both at a negative and a positive
    /// position, which is what two-sided substitution requires.
    pub fn has_variable_on_both_sides(&self) -> bool {
        let mut neg = false;
        let mut pos = false;
        for p in self.variable_positions() {
            if p < 0 {
                neg = true;
            } else {
                pos = true;
            }
        }
        neg && pos
    }

    /// Smallest positive position in the whole domain, if any.
    pub fn min_positive_pos(&self) -> Option<Position> {
        self.entries.keys().copied().find(|&p| p > 0)
    }

    /// Largest negative position in the whole domain, if any.
    pub fn max_negative_pos(&self) -> Option<Position> {
        self.entries.keys().copied().take_while(|&p| p < 0).last()
    }

    pub fn check_bounds(&self, dom: &DominationVector) -> Result<(), WordError> {
        if self.kind != dom.kind() {
            return Err(WordError::KindMismatch(self.kind, dom.kind()));
        }
        for (&p, &s) in &self.entries {
            if let Symbol::Letter(v) = s {
                let bound = dom.bound(p)?;
                if v < 1 || v > bound {
                    return Err(WordError::LetterOutOfBound { position: p, letter: v, bound });
                }
            }
        }
        Ok(())
    }

    pub fn to_word(&self) -> Word {
        Word::Variable(self.clone())
    }

    /// Replaces every variable cell: positive positions get `pos_letter`,
    /// negative ones `neg_letter`. Callers have checked legality.
    fn fill(&self, pos_letter: Letter, neg_letter: Letter) -> LocatedWord {
        let entries = self
            .entries
            .iter()
            .map(|(&p, &s)| {
                let v = match s {
                    Symbol::Letter(v) => v,
                    Symbol::Variable => {
                        if p > 0 {
                            pos_letter
                        } else {
                            neg_letter
                        }
                    }
                };
                (p, v)
            })
            .collect();
        LocatedWord { kind: self.kind, entries }
    }

    /// Substitution. `Keep` returns the word unchanged; a `Pair(p, q)` fills
    /// positive-side variables with `p` and negative-side ones with `q`
    /// (two-sided words only, and the variable must appear on both sides);
    /// `Single(p)` fills the variables of a one-sided word.
    ///
    /// Legality is checked at the innermost positions (smallest positive /
    /// largest negative); monotone bounds make the letter legal at every
    /// other variable position, which is asserted in debug builds.
    pub fn substitute(&self, sub: Subst, dom: &DominationVector) -> Result<Word, WordError> {
        if self.kind != dom.kind() {
            return Err(WordError::KindMismatch(self.kind, dom.kind()));
        }
        match sub {
            Subst::Keep => Ok(Word::Variable(self.clone())),
            Subst::Pair(p, q) => {
                if self.kind != Kind::TwoSided {
                    return Err(WordError::SubstitutionArity);
                }
                if !self.has_variable_on_both_sides() {
                    return Err(WordError::VariableOnOneSideOnly);
                }
                let n_pos = self.min_positive_pos().unwrap();
                let n_neg = self.max_negative_pos().unwrap();
                let pos_bound = dom.bound(n_pos)?;
                if p < 1 || p > pos_bound {
                    return Err(WordError::SubstitutionOutOfBound {
                        position: n_pos,
                        letter: p,
                        bound: pos_bound,
                    });
                }
                let neg_bound = dom.bound(n_neg)?;
                if q < 1 || q > neg_bound {
                    return Err(WordError::SubstitutionOutOfBound {
                        position: n_neg,
                        letter: q,
                        bound: neg_bound,
                    });
                }
                let out = self.fill(p, q);
                debug_assert!(out.check_bounds(dom).is_ok());
                Ok(Word::Constant(out))
            }
            Subst::Single(p) => {
                if self.kind != Kind::OneSided {
                    return Err(WordError::SubstitutionArity);
                }
                let n = self.min_pos();
                let bound = dom.bound(n)?;
                if p < 1 || p > bound {
                    return Err(WordError::SubstitutionOutOfBound {
                        position: n,
                        letter: p,
                        bound,
                    });
                }
                let out = self.fill(p, p);
                debug_assert!(out.check_bounds(dom).is_ok());
                Ok(Word::Constant(out))
            }
        }
    }
}

/// A substitution choice: keep the variable, or fill it.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Subst {
    /// Leave every variable in place.
    Keep,
    /// One-sided fill.
    Single(Letter),
    /// Two-sided fill: first the positive side, then the negative side.
    Pair(Letter, Letter),
}

impl Word {
    pub fn kind(&self) -> Kind {
        match self {
            Word::Constant(w) => w.kind(),
            Word::Variable(w) => w.kind(),
        }
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Word::Variable(_))
    }

    pub fn symbol(&self, position: Position) -> Option<Symbol> {
        match self {
            Word::Constant(w) => w.letter(position).map(Symbol::Letter),
            Word::Variable(w) => w.entries().get(&position).copied(),
        }
    }

    pub fn domain(&self) -> Vec<Position> {
        match self {
            Word::Constant(w) => w.domain().collect(),
            Word::Variable(w) => w.domain().collect(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Word::Constant(w) => w.len(),
            Word::Variable(w) => w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min_pos(&self) -> Position {
        match self {
            Word::Constant(w) => w.min_pos(),
            Word::Variable(w) => w.min_pos(),
        }
    }

    pub fn max_pos(&self) -> Position {
        match self {
            Word::Constant(w) => w.max_pos(),
            Word::Variable(w) => w.max_pos(),
        }
    }

    pub fn as_constant(&self) -> Option<&LocatedWord> {
        match self {
            Word::Constant(w) => Some(w),
            Word::Variable(_) => None,
        }
    }

    pub fn as_variable(&self) -> Option<&VariableWord> {
        match self {
            Word::Variable(w) => Some(w),
            Word::Constant(_) => None,
        }
    }

    pub fn check_bounds(&self, dom: &DominationVector) -> Result<(), WordError> {
        match self {
            Word::Constant(w) => w.check_bounds(dom),
            Word::Variable(w) => w.check_bounds(dom),
        }
    }

    fn symbols(&self) -> Vec<(Position, Symbol)> {
        match self {
            Word::Constant(w) => w.entries.iter().map(|(&p, &v)| (p, Symbol::Letter(v))).collect(),
            Word::Variable(w) => w.entries.iter().map(|(&p, &s)| (p, s)).collect(),
        }
    }
}

/// Classifies a raw map as a constant or variable word and checks every
/// invariant against the bound vector.
pub fn validate_word(
    raw: impl IntoIterator<Item = (Position, Symbol)>,
    dom: &DominationVector,
) -> Result<Word, WordError> {
    let entries: BTreeMap<Position, Symbol> = raw.into_iter().collect();
    let word = if entries.values().any(|s| s.is_variable()) {
        Word::Variable(VariableWord::new(dom.kind(), entries)?)
    } else {
        Word::Constant(LocatedWord::new(
            dom.kind(),
            entries.into_iter().map(|(p, s)| match s {
                Symbol::Letter(v) => (p, v),
                Symbol::Variable => unreachable!(),
            }),
        )?)
    };
    word.check_bounds(dom)?;
    Ok(word)
}

/// Concatenation: the union of two words with disjoint domains.
pub fn concat(a: &Word, b: &Word) -> Result<Word, WordError> {
    if a.kind() != b.kind() {
        return Err(WordError::KindMismatch(a.kind(), b.kind()));
    }
    let mut entries: BTreeMap<Position, Symbol> = BTreeMap::new();
    for (p, s) in a.symbols() {
        entries.insert(p, s);
    }
    for (p, s) in b.symbols() {
        if entries.insert(p, s).is_some() {
            return Err(WordError::DomainOverlap(p));
        }
    }
    let kind = a.kind();
    if entries.values().any(|s| s.is_variable()) {
        Ok(Word::Variable(VariableWord { kind, entries }))
    } else {
        Ok(Word::Constant(LocatedWord {
            kind,
            entries: entries
                .into_iter()
                .map(|(p, s)| match s {
                    Symbol::Letter(v) => (p, v),
                    Symbol::Variable => unreachable!(),
                })
                .collect(),
        }))
    }
}

/// Folds a nonempty sequence of words with `concat`.
pub fn concat_all<'a>(words: impl IntoIterator<Item = &'a Word>) -> Result<Word, WordError> {
    let mut iter = words.into_iter();
    let first = iter.next().ok_or(WordError::EmptyDomain)?;
    let mut acc = first.clone();
    for w in iter {
        acc = concat(&acc, w)?;
    }
    Ok(acc)
}

/// True when `u`'s domain splits into a nonempty part strictly below
/// `w`'s domain and a nonempty part strictly above it.
pub fn rel_r1(w: &Word, u: &Word) -> bool {
    let lo = w.min_pos();
    let hi = w.max_pos();
    let mut below = false;
    let mut above = false;
    for p in u.domain() {
        if p < lo {
            below = true;
        } else if p > hi {
            above = true;
        } else {
            return false;
        }
    }
    below && above
}

/// True when `w`'s domain lies entirely before `u`'s.
pub fn rel_r2(w: &Word, u: &Word) -> bool {
    w.max_pos() < u.min_pos()
}

/// Convergence index of a word: for two-sided words the distance from zero
/// to the inner edge of the domain on its farther-from-covering side,
/// `min(−max dom⁻, min dom⁺)`; for one-sided words, `min dom`.
pub fn min_index(w: &Word) -> Result<u32, WordError> {
    match w.kind() {
        Kind::OneSided => Ok(w.min_pos() as u32),
        Kind::TwoSided => {
            let dom = w.domain();
            let max_neg = dom.iter().copied().filter(|&p| p < 0).max();
            let min_pos = dom.iter().copied().filter(|&p| p > 0).min();
            match (max_neg, min_pos) {
                (Some(n), Some(p)) => Ok((-n).min(p) as u32),
                _ => Err(WordError::OneSidedDomain),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Canonical JSON: {"kind": "...", "entries": {"<position>": <letter | "v">}}
// ---------------------------------------------------------------------------

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Symbol::Letter(v) => serializer.serialize_u64(*v),
            Symbol::Variable => serializer.serialize_str("v"),
        }
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(v) => Ok(Symbol::Letter(v)),
            Repr::Text(s) if s == "v" => Ok(Symbol::Variable),
            Repr::Text(s) => Err(D::Error::custom(format!("expected a letter or \"v\", got {s:?}"))),
        }
    }
}

// Positions travel as decimal strings so the format survives generic
// value buffering; emission order is numeric.
#[derive(Serialize)]
struct WordReprOut<'a> {
    kind: Kind,
    entries: Entries<'a>,
}

struct Entries<'a>(&'a Word);

impl Serialize for Entries<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let symbols = self.0.symbols();
        let mut map = serializer.serialize_map(Some(symbols.len()))?;
        for (p, s) in symbols {
            map.serialize_entry(&p.to_string(), &s)?;
        }
        map.end()
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        WordReprOut { kind: self.kind(), entries: Entries(self) }.serialize(serializer)
    }
}

#[derive(Deserialize)]
struct WordReprIn {
    kind: Kind,
    entries: BTreeMap<String, Symbol>,
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = WordReprIn::deserialize(deserializer)?;
        let mut entries: BTreeMap<Position, Symbol> = BTreeMap::new();
        for (key, s) in repr.entries {
            let p: Position = key
                .parse()
                .map_err(|_| D::Error::custom(format!("bad position {key:?}")))?;
            entries.insert(p, s);
        }
        let has_var = entries.values().any(|s| s.is_variable());
        if has_var {
            VariableWord::new(repr.kind, entries)
                .map(Word::Variable)
                .map_err(D::Error::custom)
        } else {
            LocatedWord::new(
                repr.kind,
                entries.into_iter().map(|(p, s)| match s {
                    Symbol::Letter(v) => (p, v),
                    Symbol::Variable => unreachable!(),
                }),
            )
            .map(Word::Constant)
            .map_err(D::Error::custom)
        }
    }
}

impl Serialize for LocatedWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_word().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LocatedWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match Word::deserialize(deserializer)? {
            Word::Constant(w) => Ok(w),
            Word::Variable(_) => Err(D::Error::custom("expected a constant word")),
        }
    }
}

impl Serialize for VariableWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_word().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for VariableWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match Word::deserialize(deserializer)? {
            Word::Variable(w) => Ok(w),
            Word::Constant(_) => Err(D::Error::custom("expected a variable word")),
        }
    }
}
