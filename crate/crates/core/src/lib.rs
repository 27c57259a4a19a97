//! Learning to untangle string-and-hole puzzles.
//!
//! * [`puzzle`] – crossing-chain simulator, notation and BFS solver
//! * [`env`] – episodic environment with rewards, noise and a scheduled rule change
//! * [`asp`] – per-state choice-rule programs learned online
//! * [`learn`] – Q-Learning, HAQL, oASP(MDP) and HoASP(MDP) agents
//! * [`harness`] – multi-trial experiments, aggregation, t-tests and CSV output
//!
//! Value-carrying types are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the usual choice.

pub mod asp;
pub mod env;
pub mod harness;
pub mod learn;
pub mod puzzle;
mod scalar;

pub use scalar::Scalar;

pub type Environment64 = env::Environment<f64>;
pub type EnvConfig64 = env::EnvConfig<f64>;
pub type QTable64 = learn::QTable<f64>;
pub type QTable32 = learn::QTable<f32>;
pub type LearnerConfig64 = learn::LearnerConfig<f64>;
pub type Agent64 = learn::Agent<f64>;
pub type ExperimentConfig64 = harness::ExperimentConfig<f64>;
