//! Exhaustive breadth-first search; the ground truth the learners are
//! measured against.

use std::collections::{HashMap, VecDeque};

use super::spec::PuzzleSpec;
use super::state::PuzzleState;
use super::transition::{ActionTriple, TransitionResult};
use super::PuzzleError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub actions: Vec<ActionTriple>,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// One `pass(...)` line per action.
    pub fn to_text(&self, spec: &PuzzleSpec) -> String {
        let mut out = String::new();
        for &a in &self.actions {
            out.push_str(&spec.format_action(a));
            out.push('\n');
        }
        out
    }

    pub fn parse(spec: &PuzzleSpec, text: &str) -> Result<Plan, PuzzleError> {
        let mut actions = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let action = spec.parse_action(line).ok_or_else(|| PuzzleError::Parse {
                line: i + 1,
                column: 1,
                message: format!("not an action of this puzzle: {line:?}"),
            })?;
            actions.push(action);
        }
        Ok(Plan { actions })
    }

    /// Replays the plan from the spec's initial state.
    pub fn replay(&self, spec: &PuzzleSpec) -> Option<PuzzleState> {
        let mut state = spec.initial().clone();
        for &a in &self.actions {
            state = spec.apply(&state, a).moved()?;
        }
        Some(state)
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub plan: Plan,
    /// Distinct states discovered before the goal was reached.
    pub states_seen: usize,
}

impl PuzzleSpec {
    pub fn bfs_solve(&self, max_depth: usize) -> Result<SolveReport, PuzzleError> {
        self.bfs_solve_bounded(max_depth, usize::MAX)
    }

    /// BFS that also gives up after `max_states` distinct states.
    pub fn bfs_solve_bounded(
        &self,
        max_depth: usize,
        max_states: usize,
    ) -> Result<SolveReport, PuzzleError> {
        assert!(max_depth >= 1, "max_depth must be at least 1");
        let start = self.initial().clone();
        if self.is_goal(&start) {
            return Ok(SolveReport {
                plan: Plan { actions: vec![] },
                states_seen: 1,
            });
        }
        let actions = self.enumerate_actions();
        // parent node index and action index per discovered state
        let mut nodes: Vec<(u32, u16)> = vec![(u32::MAX, 0)];
        let mut seen: HashMap<Box<[u8]>, ()> = HashMap::new();
        seen.insert(start.pack(), ());
        let mut queue = VecDeque::from([(start.pack(), 0u32, 0usize)]);

        while let Some((packed, node, depth)) = queue.pop_front() {
            if depth >= max_depth {
                continue;
            }
            let state = PuzzleState::unpack(&self.longs, &packed);
            for (ai, &action) in actions.iter().enumerate() {
                let TransitionResult::Moved(next) = self.apply(&state, action) else {
                    continue;
                };
                let key = next.pack();
                if seen.contains_key(&key) {
                    continue;
                }
                let id = nodes.len() as u32;
                nodes.push((node, ai as u16));
                seen.insert(key.clone(), ());
                if self.is_goal(&next) {
                    let mut plan = Vec::new();
                    let mut cur = id;
                    while cur != 0 {
                        let (parent, a) = nodes[cur as usize];
                        plan.push(actions[a as usize]);
                        cur = parent;
                    }
                    plan.reverse();
                    return Ok(SolveReport {
                        plan: Plan { actions: plan },
                        states_seen: seen.len(),
                    });
                }
                if seen.len() >= max_states {
                    return Err(PuzzleError::NotFound {
                        max_depth,
                        states_seen: seen.len(),
                    });
                }
                queue.push_back((key, id, depth + 1));
            }
        }
        Err(PuzzleError::NotFound {
            max_depth,
            states_seen: seen.len(),
        })
    }

    /// Every state reachable within `max_depth` passes, in BFS order.
    pub fn reachable_states(&self, max_depth: usize, max_states: usize) -> Vec<PuzzleState> {
        let actions = self.enumerate_actions();
        let mut seen: HashMap<PuzzleState, ()> = HashMap::new();
        let mut order = vec![self.initial().clone()];
        seen.insert(self.initial().clone(), ());
        let mut frontier = 0;
        let mut depth_end = 1;
        let mut depth = 0;
        while frontier < order.len() && order.len() < max_states {
            if frontier == depth_end {
                depth += 1;
                depth_end = order.len();
            }
            if depth >= max_depth {
                break;
            }
            let state = order[frontier].clone();
            frontier += 1;
            for &a in &actions {
                if let TransitionResult::Moved(next) = self.apply(&state, a) {
                    if seen.insert(next.clone(), ()).is_none() {
                        order.push(next);
                        if order.len() >= max_states {
                            break;
                        }
                    }
                }
            }
        }
        order
    }
}
