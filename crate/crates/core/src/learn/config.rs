use std::fmt;
use std::str::FromStr;

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgorithmKind {
    QLearning,
    Haql,
    Oasp,
    Hoasp,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 4] = [
        AlgorithmKind::QLearning,
        AlgorithmKind::Haql,
        AlgorithmKind::Oasp,
        AlgorithmKind::Hoasp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmKind::QLearning => "qlearning",
            AlgorithmKind::Haql => "haql",
            AlgorithmKind::Oasp => "oasp",
            AlgorithmKind::Hoasp => "hoasp",
        }
    }

    /// Builds choice-rule programs and filters actions through them.
    pub fn uses_program(self) -> bool {
        matches!(self, AlgorithmKind::Oasp | AlgorithmKind::Hoasp)
    }

    pub fn needs_heuristic(self) -> bool {
        matches!(self, AlgorithmKind::Haql | AlgorithmKind::Hoasp)
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AlgorithmKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}` (expected qlearning, haql, oasp or hoasp)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerConfig<F> {
    pub alpha: F,
    pub gamma: F,
    pub epsilon_base: F,
    /// Last episode at the base rate.
    pub epsilon_decay_start: usize,
    pub epsilon_decay_step: F,
    pub epsilon_decay_every: usize,
    pub epsilon_floor: F,
    pub eta: F,
    pub xi: F,
    pub beta: F,
    pub max_steps: usize,
    pub episodes: usize,
    /// Zero the Q-values of QLearning/HAQL when the environment switches.
    pub reinit_on_switch: bool,
}

impl<F: Scalar> Default for LearnerConfig<F> {
    fn default() -> Self {
        LearnerConfig {
            alpha: F::lit(0.2),
            gamma: F::lit(0.9),
            epsilon_base: F::lit(0.1),
            epsilon_decay_start: 4000,
            epsilon_decay_step: F::lit(0.01),
            epsilon_decay_every: 250,
            epsilon_floor: F::lit(0.03),
            eta: F::lit(0.25),
            xi: F::one(),
            beta: F::one(),
            max_steps: 500,
            episodes: 6000,
            reinit_on_switch: true,
        }
    }
}

impl<F: Scalar> LearnerConfig<F> {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.alpha > F::zero() && self.alpha <= F::one()) {
            return Err(format!("alpha must be in (0, 1], got {}", self.alpha));
        }
        if !(self.gamma >= F::zero() && self.gamma < F::one()) {
            return Err(format!("gamma must be in [0, 1), got {}", self.gamma));
        }
        if self.epsilon_floor > self.epsilon_base {
            return Err("epsilon floor above base rate".into());
        }
        if self.epsilon_decay_every == 0 {
            return Err("epsilon decay interval must be positive".into());
        }
        Ok(())
    }

    /// Exploration rate for a 1-based episode.
    pub fn epsilon_at(&self, episode: usize) -> F {
        if episode <= self.epsilon_decay_start {
            return self.epsilon_base;
        }
        let drops = (episode - self.epsilon_decay_start) / self.epsilon_decay_every;
        let eps = self.epsilon_base - self.epsilon_decay_step * F::from_usize(drops).unwrap();
        eps.max(self.epsilon_floor)
    }
}

/// `Q + alpha * (r + gamma * max_next - Q)`
pub fn q_target<F: Scalar>(q: F, r: F, max_next: F, alpha: F, gamma: F) -> F {
    q + alpha * (r + gamma * max_next - q)
}
