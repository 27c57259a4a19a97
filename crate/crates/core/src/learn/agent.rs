use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::asp::{ActionAtom, AtomRegistry, GlobalProgram, Scope};
use crate::env::{Environment, Realized};
use crate::puzzle::{ActionTriple, PuzzleSpec, TransitionResult};
use crate::scalar::Scalar;

use super::config::{q_target, AlgorithmKind, LearnerConfig};
use super::heuristic::{heuristic_h, HeuristicSource};
use super::qtable::{QTable, RowId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeMetrics<F> {
    pub steps: usize,
    pub accumulated_return: F,
    pub visited_states: usize,
    pub qtable_pairs: usize,
}

/// Epsilon-greedy choice over `candidates` scoring `Q + xi * H^beta`; ties
/// are broken uniformly at random.
#[allow(clippy::too_many_arguments)]
pub fn select_action<F: Scalar>(
    q: &QTable<F>,
    row: Option<RowId>,
    candidates: &[usize],
    epsilon: F,
    suggested: Option<usize>,
    config: &LearnerConfig<F>,
    rng: &mut ChaCha8Rng,
) -> usize {
    assert!(!candidates.is_empty(), "no admissible action");
    if rng.gen::<f64>() < epsilon.as_f64() {
        return *candidates.choose(rng).unwrap();
    }
    let mut best = F::neg_infinity();
    let mut ties: Vec<usize> = Vec::new();
    for &a in candidates {
        let mut score = row.map_or(F::zero(), |r| q.value(r, a));
        if suggested == Some(a) {
            let h = heuristic_h(q, row, candidates, suggested, a, config.eta);
            score = score + config.xi * h.powf(config.beta);
        }
        if score > best {
            best = score;
            ties.clear();
            ties.push(a);
        } else if score == best {
            ties.push(a);
        }
    }
    *ties.choose(rng).unwrap()
}

/// One learner: its table, optional program store and heuristic, and its
/// own random stream.
pub struct Agent<F> {
    kind: AlgorithmKind,
    config: LearnerConfig<F>,
    actions: Vec<ActionTriple>,
    q: QTable<F>,
    program: Option<GlobalProgram>,
    heuristic: Option<HeuristicSource<F>>,
    rng: ChaCha8Rng,
}

impl<F: Scalar> Agent<F> {
    pub fn new(
        kind: AlgorithmKind,
        config: LearnerConfig<F>,
        spec: &PuzzleSpec,
        heuristic: Option<HeuristicSource<F>>,
        rng: ChaCha8Rng,
    ) -> Self {
        assert!(
            !kind.needs_heuristic() || heuristic.is_some(),
            "{kind} needs a heuristic source"
        );
        let actions = spec.enumerate_actions();
        let program = kind.uses_program().then(|| {
            GlobalProgram::new(AtomRegistry::new(
                actions.iter().map(|&a| spec.format_action(a)).collect(),
            ))
        });
        Agent {
            kind,
            config,
            q: QTable::new(actions.len()),
            actions,
            program,
            heuristic: if kind.needs_heuristic() { heuristic } else { None },
            rng,
        }
    }

    pub fn kind(&self) -> AlgorithmKind {
        self.kind
    }

    pub fn config(&self) -> &LearnerConfig<F> {
        &self.config
    }

    pub fn qtable(&self) -> &QTable<F> {
        &self.q
    }

    pub fn program(&self) -> Option<&GlobalProgram> {
        self.program.as_ref()
    }

    pub fn actions(&self) -> &[ActionTriple] {
        &self.actions
    }

    /// Environment rules changed. Plain learners may start over; program
    /// learners keep everything.
    pub fn on_switch(&mut self) {
        if !self.kind.uses_program() && self.config.reinit_on_switch {
            self.q.reset_values();
        }
    }

    fn admissible(&self, row: RowId) -> Vec<usize> {
        match &self.program {
            None => (0..self.actions.len()).collect(),
            Some(p) => {
                let s = p
                    .registry()
                    .state(self.q.key(row))
                    .expect("current state registered");
                (0..self.actions.len())
                    .filter(|&a| !p.is_forbidden(s, ActionAtom(a as u16)))
                    .collect()
            }
        }
    }

    /// Plays one episode (1-based index) and learns from it.
    pub fn run_episode(&mut self, env: &mut Environment<F>, episode: usize) -> EpisodeMetrics<F> {
        let epsilon = self.config.epsilon_at(episode);
        env.reset();
        let mut key = env.spec().canonical_key(env.state());
        if let Some(h) = &mut self.heuristic {
            h.mapper.reset();
        }
        let mut ret = F::zero();
        let mut steps = 0;
        loop {
            let row = self.q.intern(&key);
            let first = self.q.visit(row);
            let s_atom = self.program.as_mut().map(|p| p.register(&key));
            if first && self.program.is_none() {
                for a in 0..self.actions.len() {
                    self.q.ensure(row, a);
                }
            }
            let candidates = self.admissible(row);
            let suggested = self.heuristic.as_mut().and_then(|h| h.suggest(&key));
            let a = if first && self.program.is_some() {
                *candidates.choose(&mut self.rng).expect("no admissible action")
            } else {
                select_action(
                    &self.q,
                    Some(row),
                    &candidates,
                    epsilon,
                    suggested,
                    &self.config,
                    &mut self.rng,
                )
            };
            let out = env.step(self.actions[a]);
            steps += 1;
            ret = ret + out.reward;
            let next_key = if out.impossible {
                key.clone()
            } else {
                env.spec().canonical_key(&out.next_state)
            };

            if let (Some(p), Some(s)) = (self.program.as_mut(), s_atom) {
                let act = ActionAtom(a as u16);
                match out.reason {
                    Some(why) if out.realized == Realized::Action(self.actions[a]) => {
                        if why.is_global() {
                            p.record_forbidden(Scope::Global, act);
                            self.q.remove_action(a);
                        } else {
                            p.record_forbidden(Scope::PerState(s), act);
                            self.q.remove(row, a);
                        }
                    }
                    _ => {
                        let n = p.register(&next_key);
                        p.record_transition(s, act, n);
                        p.seed_q_rows(s, &mut self.q).expect("registered state");
                    }
                }
            }

            if let Some(old) = self.q.get(row, a) {
                let max_next = self
                    .q
                    .row(&next_key)
                    .and_then(|r| self.q.max_value(r))
                    .unwrap_or_else(F::zero);
                let new = q_target(old, out.reward, max_next, self.config.alpha, self.config.gamma);
                self.q.set(row, a, new);
            }

            if !out.impossible {
                if let (Some(h), Realized::Action(done)) = (&mut self.heuristic, out.realized) {
                    let idx = self.actions.iter().position(|&x| x == done).unwrap();
                    h.mapper.observe(idx);
                }
            }
            key = next_key;
            if out.terminal {
                break;
            }
        }
        EpisodeMetrics {
            steps,
            accumulated_return: ret,
            visited_states: self.q.visited_count(),
            qtable_pairs: self.q.entry_count(),
        }
    }

    pub fn greedy_rollout(&self, spec: &PuzzleSpec, max_steps: usize) -> Option<usize> {
        greedy_rollout(&self.q, spec, max_steps)
    }
}

/// Follows the per-state argmax of the existing entries (lowest action on
/// ties) without noise or learning. Steps to the goal, or `None`.
pub fn greedy_rollout<F: Scalar>(q: &QTable<F>, spec: &PuzzleSpec, max_steps: usize) -> Option<usize> {
    let actions = spec.enumerate_actions();
    let mut s = spec.initial().clone();
    for step in 1..=max_steps {
        let row = q.row(&spec.canonical_key(&s))?;
        let a = q.best_action(row)?;
        if let TransitionResult::Moved(next) = spec.apply(&s, actions[a]) {
            s = next;
            if spec.is_goal(&s) {
                return Some(step);
            }
        }
    }
    None
}
