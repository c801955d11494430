//! Seeded random generators for words and related pairs, used by the law
//! checks and the property tests.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::domination::{DominationVector, Kind};
use crate::word::{LocatedWord, Position, Word};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random constant word with domain inside `±window` (positive side only
/// for one-sided bounds), at least one position.
pub fn random_word(rng: &mut impl Rng, dom: &DominationVector, window: u32) -> LocatedWord {
    loop {
        let mut entries: Vec<(Position, u64)> = Vec::new();
        for idx in 1..=window as i32 {
            let mut positions = vec![idx];
            if dom.kind() == Kind::TwoSided {
                positions.push(-idx);
            }
            for p in positions {
                if rng.gen_bool(0.5) {
                    let bound = dom.bound(p).expect("window position in range");
                    entries.push((p, rng.gen_range(1..=bound)));
                }
            }
        }
        if !entries.is_empty() {
            return LocatedWord::new(dom.kind(), entries).expect("structurally valid");
        }
    }
}

/// Random pair of constant words with disjoint domains inside `±window`.
pub fn random_disjoint_pair(
    rng: &mut impl Rng,
    dom: &DominationVector,
    window: u32,
) -> (LocatedWord, LocatedWord) {
    loop {
        let mut first: Vec<(Position, u64)> = Vec::new();
        let mut second: Vec<(Position, u64)> = Vec::new();
        for idx in 1..=window as i32 {
            let mut positions = vec![idx];
            if dom.kind() == Kind::TwoSided {
                positions.push(-idx);
            }
            for p in positions {
                let bound = dom.bound(p).expect("window position in range");
                match rng.gen_range(0..3) {
                    0 => first.push((p, rng.gen_range(1..=bound))),
                    1 => second.push((p, rng.gen_range(1..=bound))),
                    _ => {}
                }
            }
        }
        if !first.is_empty() && !second.is_empty() {
            return (
                LocatedWord::new(dom.kind(), first).unwrap(),
                LocatedWord::new(dom.kind(), second).unwrap(),
            );
        }
    }
}

/// Random pair related by the order the kind supports: for two-sided
/// bounds the second word straddles the first; for one-sided bounds it
/// lies strictly to the right.
pub fn random_related_pair(
    rng: &mut impl Rng,
    dom: &DominationVector,
    window: u32,
) -> (Word, Word) {
    let window = window.max(2);
    match dom.kind() {
        Kind::TwoSided => loop {
            let split = rng.gen_range(1..window) as i32;
            let mut inner: Vec<(Position, u64)> = Vec::new();
            let mut outer: Vec<(Position, u64)> = Vec::new();
            for idx in 1..=window as i32 {
                for p in [idx, -idx] {
                    if rng.gen_bool(0.6) {
                        let bound = dom.bound(p).unwrap();
                        let v = rng.gen_range(1..=bound);
                        if idx <= split {
                            inner.push((p, v));
                        } else {
                            outer.push((p, v));
                        }
                    }
                }
            }
            let has_low = outer.iter().any(|(p, _)| *p < 0);
            let has_high = outer.iter().any(|(p, _)| *p > 0);
            if !inner.is_empty() && has_low && has_high {
                return (
                    LocatedWord::new(Kind::TwoSided, inner).unwrap().to_word(),
                    LocatedWord::new(Kind::TwoSided, outer).unwrap().to_word(),
                );
            }
        },
        Kind::OneSided => loop {
            let split = rng.gen_range(1..window) as i32;
            let mut first: Vec<(Position, u64)> = Vec::new();
            let mut second: Vec<(Position, u64)> = Vec::new();
            for idx in 1..=window as i32 {
                if rng.gen_bool(0.6) {
                    let bound = dom.bound(idx).unwrap();
                    let v = rng.gen_range(1..=bound);
                    if idx <= split {
                        first.push((idx, v));
                    } else {
                        second.push((idx, v));
                    }
                }
            }
            if !first.is_empty() && !second.is_empty() {
                return (
                    LocatedWord::new(Kind::OneSided, first).unwrap().to_word(),
                    LocatedWord::new(Kind::OneSided, second).unwrap().to_word(),
                );
            }
        },
    }
}
