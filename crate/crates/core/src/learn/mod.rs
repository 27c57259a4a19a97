//! Tabular agents: Q-Learning, HAQL, oASP(MDP) and HoASP(MDP).

mod agent;
mod config;
mod heuristic;
mod qtable;

use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub use agent::{greedy_rollout, select_action, Agent, EpisodeMetrics};
pub use config::{q_target, AlgorithmKind, LearnerConfig};
pub use heuristic::{heuristic_h, HeuristicSource, StateMapper, TraceMapper};
pub use qtable::{QTable, RowId};

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("snapshot line {line}: {message}")]
    Snapshot { line: usize, message: String },
}
