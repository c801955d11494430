//! Words over position-bounded alphabets and what can be done with them:
//! exact bijections onto the nonzero rationals, the nonzero integers and
//! the naturals; bounded searches for monochromatic substitution patterns;
//! and word-indexed dynamical systems on compact metric spaces with
//! certificate-producing recurrence searches.
//!
//! Everything is a pure function over immutable values. Searches can run
//! data-parallel (feature `parallel`, on by default) and always return the
//! enumeration-order-minimal result, so parallelism never changes an
//! answer.

pub mod certificate;
pub mod codec;
pub mod domination;
pub mod dynamics;
pub mod par;
pub mod ramsey;
pub mod sample;
pub mod sequence;
pub mod space;
pub mod word;

pub use domination::{BoundRule, DominationVector, Kind};
pub use sequence::{
    enumerate_extracted, extracted_word, is_extraction, ExtractionPlan, PlanFilter, SeqOrder,
    WordSequence,
};
pub use word::{
    concat, concat_all, min_index, rel_r1, rel_r2, validate_word, Letter, LocatedWord, Position,
    Subst, Symbol, VariableWord, Word,
};
