//! Deterministic model of the string-and-hole puzzles.
//!
//! A state is one chain of signed hole crossings per long object (String,
//! Post, ...). Actions pass a crossing element through a host element's hole
//! towards one of its two faces.

mod catalog;
mod notation;
mod solve;
mod spec;
mod state;
mod transition;

pub use catalog::{
    build_spec, build_spec_named, nonstationary_switch, DEFAULT_MAX_CHAIN_LEN, DEFAULT_WINDING_LIMIT, FISHERMANS_INITIAL,
    ROPELADDER_INITIAL, ROPELADDER_MAX_CHAIN_LEN, ROPELADDER_SIMPLIFIED_INITIAL,
};
pub use notation::CanonicalKey;
pub use solve::{Plan, SolveReport};
pub use spec::{
    End, HoleFace, HoleLocation, ObjectClass, ObjectDef, ObjectId, Puzzle, PuzzleSpec, Variant,
    WindingOverride,
};
pub use state::{Chain, Crossing, PuzzleState};
pub use transition::{ActionTriple, Impossibility, TransitionResult};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PuzzleError {
    #[error("unknown puzzle `{0}` (expected fishermans or ropeladder)")]
    UnknownPuzzle(String),
    #[error("unknown variant `{0}`")]
    UnknownVariant(String),
    #[error("{0}")]
    InvalidCombination(String),
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: unknown object `{name}`")]
    UnknownObject {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("no goal state within {max_depth} actions ({states_seen} states seen)")]
    NotFound { max_depth: usize, states_seen: usize },
}

impl PuzzleSpec {
    /// Same puzzle, different starting configuration.
    pub fn with_initial(&self, text: &str) -> Result<PuzzleSpec, PuzzleError> {
        let mut spec = self.clone();
        spec.initial = self.parse_state(text)?;
        Ok(spec)
    }
}
