use std::collections::HashMap;

use crate::puzzle::{ActionTriple, CanonicalKey, PuzzleSpec, PuzzleState, TransitionResult};
use crate::scalar::Scalar;

use super::qtable::{QTable, RowId};

/// Follows a target episode in a source puzzle by replaying its actions.
#[derive(Debug, Clone)]
pub struct TraceMapper {
    source: PuzzleSpec,
    /// Target action index to the same-named source action.
    translate: Vec<Option<ActionTriple>>,
    current: Option<PuzzleState>,
    trace: Vec<usize>,
    memo: HashMap<CanonicalKey, Option<CanonicalKey>>,
}

impl TraceMapper {
    pub fn new(source: PuzzleSpec, target: &PuzzleSpec) -> Self {
        let translate = target
            .enumerate_actions()
            .into_iter()
            .map(|a| source.parse_action(&target.format_action(a)))
            .collect();
        let current = Some(source.initial().clone());
        TraceMapper {
            source,
            translate,
            current,
            trace: Vec::new(),
            memo: HashMap::new(),
        }
    }

    pub fn source(&self) -> &PuzzleSpec {
        &self.source
    }

    pub fn trace(&self) -> &[usize] {
        &self.trace
    }

    pub fn reset(&mut self) {
        self.current = Some(self.source.initial().clone());
        self.trace.clear();
    }

    /// Records a target action that changed the target state.
    pub fn observe(&mut self, action: usize) {
        self.trace.push(action);
        self.current = match (self.current.take(), self.translate[action]) {
            (Some(s), Some(a)) => match self.source.apply(&s, a) {
                TransitionResult::Moved(next) => Some(next),
                TransitionResult::Impossible(_) => None,
            },
            _ => None,
        };
    }

    /// Source state for the target state reached by the current trace. The
    /// first answer given for a target key sticks.
    pub fn map(&mut self, target: &CanonicalKey) -> Option<CanonicalKey> {
        if let Some(hit) = self.memo.get(target) {
            return hit.clone();
        }
        let mapped = self.current.as_ref().map(|s| self.source.canonical_key(s));
        self.memo.insert(target.clone(), mapped.clone());
        mapped
    }

    /// Replays a whole trace from the source start, without memoization.
    pub fn replay(&self, trace: &[usize]) -> Option<CanonicalKey> {
        let mut s = self.source.initial().clone();
        for &a in trace {
            s = self.source.apply(&s, self.translate[a]?).moved()?;
        }
        Some(self.source.canonical_key(&s))
    }
}

#[derive(Debug, Clone)]
pub enum StateMapper {
    /// Source and target share the state notation.
    Identity,
    TraceReplay(Box<TraceMapper>),
}

impl StateMapper {
    pub fn reset(&mut self) {
        if let StateMapper::TraceReplay(m) = self {
            m.reset();
        }
    }

    pub fn observe(&mut self, action: usize) {
        if let StateMapper::TraceReplay(m) = self {
            m.observe(action);
        }
    }

    pub fn map(&mut self, target: &CanonicalKey) -> Option<CanonicalKey> {
        match self {
            StateMapper::Identity => Some(target.clone()),
            StateMapper::TraceReplay(m) => m.map(target),
        }
    }
}

/// A solved Q-table of a related puzzle plus the state correspondence.
#[derive(Debug, Clone)]
pub struct HeuristicSource<F> {
    pub source_q: QTable<F>,
    pub mapper: StateMapper,
}

impl<F: Scalar> HeuristicSource<F> {
    pub fn new(source_q: QTable<F>, mapper: StateMapper) -> Self {
        HeuristicSource { source_q, mapper }
    }

    /// The action the source policy takes in the mapped state, if any.
    pub fn suggest(&mut self, target: &CanonicalKey) -> Option<usize> {
        let mapped = self.mapper.map(target)?;
        let row = self.source_q.row(&mapped)?;
        self.source_q.best_action(row)
    }
}

/// `H(s, a)`: zero unless `a` is the suggested action, where it is
/// `max_b Q(s, b) - Q(s, a) + eta` over `candidates` (missing values read 0).
pub fn heuristic_h<F: Scalar>(
    q: &QTable<F>,
    row: Option<RowId>,
    candidates: &[usize],
    suggested: Option<usize>,
    a: usize,
    eta: F,
) -> F {
    if suggested != Some(a) {
        return F::zero();
    }
    let value = |b: usize| row.map_or(F::zero(), |r| q.value(r, b));
    let best = candidates
        .iter()
        .map(|&b| value(b))
        .fold(F::neg_infinity(), F::max);
    let best = if best.is_finite() { best } else { value(a) };
    best - value(a) + eta
}
