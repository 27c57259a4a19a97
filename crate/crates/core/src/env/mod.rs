//! Episodic wrapper around a puzzle: rewards, action noise, step budget and
//! the scheduled fit change of the disk variant.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::puzzle::{
    nonstationary_switch, ActionTriple, Impossibility, ObjectId, PuzzleSpec, PuzzleState,
    TransitionResult, Variant,
};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardSchedule<F> {
    pub impossible: F,
    pub goal: F,
    pub step: F,
}

impl<F: Scalar> Default for RewardSchedule<F> {
    fn default() -> Self {
        RewardSchedule {
            impossible: F::lit(-100.0),
            goal: F::lit(1000.0),
            step: F::lit(-1.0),
        }
    }
}

/// Outcome probabilities of a requested action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Determinism {
    Deterministic,
    NonDeterministic {
        p_intended: f64,
        p_opposite: f64,
        p_noop: f64,
    },
}

impl Determinism {
    pub fn noisy() -> Self {
        Determinism::NonDeterministic {
            p_intended: 0.8,
            p_opposite: 0.1,
            p_noop: 0.1,
        }
    }
}

/// Fit entries rewritten once the switch episode has passed.
#[derive(Debug, Clone, PartialEq)]
pub struct FitSwitch {
    /// Last episode played under the initial fits.
    pub last_episode_before: usize,
    pub changes: Vec<(ObjectId, ObjectId, bool)>,
}

#[derive(Debug, Clone)]
pub struct EnvConfig<F> {
    pub spec: PuzzleSpec,
    pub determinism: Determinism,
    pub nonstationary: Option<FitSwitch>,
    pub max_steps: usize,
    pub rewards: RewardSchedule<F>,
    /// Reward a noise-induced no-op like an impossible action (otherwise
    /// like a plain step).
    pub noop_is_impossible: bool,
}

impl<F: Scalar> EnvConfig<F> {
    pub const DEFAULT_SWITCH_EPISODE: usize = 2000;

    /// Defaults for a variant: noise for `nondeterministic`, the fit switch
    /// after episode 2000 for `nonstationary-disk`.
    pub fn for_spec(spec: PuzzleSpec) -> Self {
        let determinism = match spec.variant() {
            Variant::NonDeterministic => Determinism::noisy(),
            _ => Determinism::Deterministic,
        };
        let nonstationary = (spec.variant() == Variant::NonStationaryDisk).then(|| FitSwitch {
            last_episode_before: Self::DEFAULT_SWITCH_EPISODE,
            changes: nonstationary_switch(&spec),
        });
        EnvConfig {
            spec,
            determinism,
            nonstationary,
            max_steps: 500,
            rewards: RewardSchedule::default(),
            noop_is_impossible: true,
        }
    }

    pub fn with_switch_after(mut self, episode: usize) -> Self {
        if let Some(sw) = &mut self.nonstationary {
            sw.last_episode_before = episode;
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Realized {
    Action(ActionTriple),
    NoOp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome<F> {
    pub next_state: PuzzleState,
    pub reward: F,
    pub terminal: bool,
    pub goal: bool,
    pub realized: Realized,
    pub impossible: bool,
    pub reason: Option<Impossibility>,
}

/// Maps a uniform draw `u` in `[0,1)` to what actually happens.
pub fn perturb(action: ActionTriple, determinism: Determinism, u: f64) -> Realized {
    match determinism {
        Determinism::Deterministic => Realized::Action(action),
        Determinism::NonDeterministic {
            p_intended,
            p_opposite,
            ..
        } => {
            if u < p_intended {
                Realized::Action(action)
            } else if u < p_intended + p_opposite {
                Realized::Action(action.inverse())
            } else {
                Realized::NoOp
            }
        }
    }
}

pub struct Environment<F> {
    config: EnvConfig<F>,
    spec: PuzzleSpec,
    state: PuzzleState,
    steps: usize,
    terminal: bool,
    switched: bool,
    rng: ChaCha8Rng,
}

impl<F: Scalar> Environment<F> {
    pub fn new(config: EnvConfig<F>, rng: ChaCha8Rng) -> Self {
        if let Determinism::NonDeterministic {
            p_intended,
            p_opposite,
            p_noop,
        } = config.determinism
        {
            assert!(
                (p_intended + p_opposite + p_noop - 1.0).abs() < 1e-9,
                "outcome probabilities must sum to 1"
            );
        }
        let spec = config.spec.clone();
        let state = spec.initial().clone();
        Environment {
            config,
            spec,
            state,
            steps: 0,
            terminal: false,
            switched: false,
            rng,
        }
    }

    /// The spec currently in force (after any switch).
    pub fn spec(&self) -> &PuzzleSpec {
        &self.spec
    }

    pub fn config(&self) -> &EnvConfig<F> {
        &self.config
    }

    pub fn state(&self) -> &PuzzleState {
        &self.state
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn is_terminal(&self) -> bool {
        self.terminal
    }

    pub fn switched(&self) -> bool {
        self.switched
    }

    pub fn reset(&mut self) -> &PuzzleState {
        self.state = self.spec.initial().clone();
        self.steps = 0;
        self.terminal = false;
        &self.state
    }

    /// Called before each episode (1-based). Returns true on the episode
    /// where the fits change.
    pub fn schedule_tick(&mut self, episode: usize) -> bool {
        let Some(sw) = &self.config.nonstationary else {
            return false;
        };
        if self.switched || episode <= sw.last_episode_before {
            return false;
        }
        for &(ce, he, fits) in &sw.changes {
            self.spec.set_fits(ce, he, fits);
        }
        self.switched = true;
        true
    }

    pub fn step(&mut self, action: ActionTriple) -> StepOutcome<F> {
        assert!(!self.terminal, "step on a finished episode");
        let realized = match self.config.determinism {
            Determinism::Deterministic => Realized::Action(action),
            d => perturb(action, d, self.rng.gen::<f64>()),
        };
        self.steps += 1;
        let r = &self.config.rewards;
        let (reward, goal, reason) = match realized {
            Realized::NoOp => {
                let reward = if self.config.noop_is_impossible {
                    r.impossible
                } else {
                    r.step
                };
                (reward, false, None)
            }
            Realized::Action(a) => match self.spec.apply(&self.state, a) {
                TransitionResult::Moved(next) => {
                    self.state = next;
                    if self.spec.is_goal(&self.state) {
                        (r.goal, true, None)
                    } else {
                        (r.step, false, None)
                    }
                }
                TransitionResult::Impossible(why) => (r.impossible, false, Some(why)),
            },
        };
        self.terminal = goal || self.steps >= self.config.max_steps;
        StepOutcome {
            next_state: self.state.clone(),
            reward,
            terminal: self.terminal,
            goal,
            realized,
            impossible: reason.is_some() || realized == Realized::NoOp,
            reason,
        }
    }
}
