//! Word-indexed dynamics on compact metric spaces: nets of points indexed
//! by words, convergence checks along the chain orders, and the
//! ball-refinement searches that produce verified recurrence certificates.

pub mod limits;
pub mod multi;
pub mod net;
pub mod refine;
pub mod semigroup;
pub mod sets;
pub mod system;

use thiserror::Error;

use crate::codec::CodecError;
use crate::ramsey::{ColoringError, SearchError};
use crate::sequence::SequenceError;
use crate::space::SpaceError;
use crate::word::WordError;

pub use limits::{r_limit_check, uniform_ip_check, IpReport, RLimitReport, WordUniverse};
pub use multi::{
    intersection_check, multiple_recurrence_search, start_point, IntersectionReport,
    MultiRecurrence,
};
pub use net::Net;
pub use refine::{
    find_convergent_extraction, find_recurrent_point, ConvergentExtraction, LevelRecord,
    RecurrentPoint, RefineParams,
};
pub use semigroup::{
    semigroup_phi, semigroup_recurrence, Carrier, ElementRule, SemiElem, SemigroupRecurrence,
    SemigroupTable, TermDecomposition,
};
pub use sets::{prop12_chain, recurrent_set_check, Prop12Witness, RecurrentSetWitness};
pub use system::{check_system_law, LawReport, MapSpec, Scalar, WeightRule, WordSystem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynError {
    #[error("system/space mismatch: {0}")]
    Mismatch(String),
    #[error("no weight declared at distance {0} from zero")]
    MissingWeight(u32),
    #[error("system is not invertible")]
    NotInvertible,
    #[error("systems do not commute (deviation {0})")]
    NotCommuting(f64),
    #[error("system declares no continuity modulus")]
    ModulusUnavailable,
    #[error("recurrence chain exceeded its budget")]
    ChainBudgetExhausted,
    #[error("missing table entry for letter {letter} at position {position}")]
    MissingTableEntry { letter: i64, position: i32 },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

impl From<SearchError> for DynError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Coloring(c) => DynError::Coloring(c),
            SearchError::Sequence(s) => DynError::Sequence(s),
            SearchError::Word(w) => DynError::Word(w),
        }
    }
}
