use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::puzzle::{CanonicalKey, PuzzleSpec};
use crate::scalar::Scalar;

use super::LearnError;

/// Row handle inside one [`QTable`].
pub type RowId = u32;

#[derive(Debug, Clone)]
struct Row<F> {
    present: u64,
    values: Box<[F]>,
    visited: bool,
}

/// Sparse action values keyed by canonical state and action index.
#[derive(Debug, Clone)]
pub struct QTable<F> {
    n_actions: usize,
    index: HashMap<CanonicalKey, RowId>,
    keys: Vec<CanonicalKey>,
    rows: Vec<Row<F>>,
    entries: usize,
    visited: usize,
}

impl<F: Scalar> QTable<F> {
    pub fn new(n_actions: usize) -> Self {
        assert!(n_actions <= 64, "at most 64 actions per state");
        QTable {
            n_actions,
            index: HashMap::new(),
            keys: Vec::new(),
            rows: Vec::new(),
            entries: 0,
            visited: 0,
        }
    }

    pub fn action_count(&self) -> usize {
        self.n_actions
    }

    pub fn row(&self, key: &CanonicalKey) -> Option<RowId> {
        self.index.get(key).copied()
    }

    /// Row for `key`, created empty if missing.
    pub fn intern(&mut self, key: &CanonicalKey) -> RowId {
        if let Some(&id) = self.index.get(key) {
            return id;
        }
        let id = self.rows.len() as RowId;
        self.index.insert(key.clone(), id);
        self.keys.push(key.clone());
        self.rows.push(Row {
            present: 0,
            values: vec![F::zero(); self.n_actions].into_boxed_slice(),
            visited: false,
        });
        id
    }

    pub fn key(&self, row: RowId) -> &CanonicalKey {
        &self.keys[row as usize]
    }

    /// Marks the state visited; true the first time.
    pub fn visit(&mut self, row: RowId) -> bool {
        let r = &mut self.rows[row as usize];
        if r.visited {
            return false;
        }
        r.visited = true;
        self.visited += 1;
        true
    }

    pub fn is_visited(&self, row: RowId) -> bool {
        self.rows[row as usize].visited
    }

    pub fn visited_count(&self) -> usize {
        self.visited
    }

    /// Number of (state, action) entries.
    pub fn entry_count(&self) -> usize {
        self.entries
    }

    pub fn has(&self, row: RowId, a: usize) -> bool {
        self.rows[row as usize].present & (1 << a) != 0
    }

    pub fn get(&self, row: RowId, a: usize) -> Option<F> {
        self.has(row, a).then(|| self.rows[row as usize].values[a])
    }

    /// Missing entries read as zero.
    pub fn value(&self, row: RowId, a: usize) -> F {
        self.get(row, a).unwrap_or_else(F::zero)
    }

    pub fn get_by_key(&self, key: &CanonicalKey, a: usize) -> Option<F> {
        self.row(key).and_then(|r| self.get(r, a))
    }

    pub fn set(&mut self, row: RowId, a: usize, v: F) {
        assert!(v.is_finite(), "non-finite action value");
        self.ensure(row, a);
        self.rows[row as usize].values[a] = v;
    }

    /// Creates a zero entry unless one exists.
    pub fn ensure(&mut self, row: RowId, a: usize) {
        assert!(a < self.n_actions);
        let r = &mut self.rows[row as usize];
        if r.present & (1 << a) == 0 {
            r.present |= 1 << a;
            r.values[a] = F::zero();
            self.entries += 1;
            if !r.visited {
                r.visited = true;
                self.visited += 1;
            }
        }
    }

    pub fn remove(&mut self, row: RowId, a: usize) {
        let r = &mut self.rows[row as usize];
        if r.present & (1 << a) != 0 {
            r.present &= !(1 << a);
            r.values[a] = F::zero();
            self.entries -= 1;
        }
    }

    /// Drops action `a` from every state.
    pub fn remove_action(&mut self, a: usize) {
        for row in 0..self.rows.len() as RowId {
            self.remove(row, a);
        }
    }

    /// `(action, value)` for the existing entries of a row, in action order.
    pub fn entries(&self, row: RowId) -> impl Iterator<Item = (usize, F)> + '_ {
        let r = &self.rows[row as usize];
        (0..self.n_actions)
            .filter(move |&a| r.present & (1 << a) != 0)
            .map(move |a| (a, r.values[a]))
    }

    /// Largest existing value, `None` for a row without entries.
    pub fn max_value(&self, row: RowId) -> Option<F> {
        self.entries(row).map(|(_, v)| v).reduce(F::max)
    }

    /// Highest-valued existing action, lowest index on ties.
    pub fn best_action(&self, row: RowId) -> Option<usize> {
        let mut best: Option<(usize, F)> = None;
        for (a, v) in self.entries(row) {
            if best.map_or(true, |(_, b)| v > b) {
                best = Some((a, v));
            }
        }
        best.map(|(a, _)| a)
    }

    /// Zeroes every value, keeping entries and visited marks.
    pub fn reset_values(&mut self) {
        for r in &mut self.rows {
            r.values.iter_mut().for_each(|v| *v = F::zero());
        }
    }

    /// Snapshot text: header, then `state<TAB>action<TAB>value` rows sorted
    /// by state then action.
    pub fn to_snapshot(&self, spec: &PuzzleSpec) -> String {
        let actions = spec.enumerate_actions();
        assert_eq!(actions.len(), self.n_actions, "spec does not match table");
        let mut order: Vec<RowId> = (0..self.rows.len() as RowId).collect();
        order.sort_by(|&a, &b| self.keys[a as usize].cmp(&self.keys[b as usize]));
        let mut out = format!("# puzzle={} variant={}\n", spec.puzzle(), spec.variant());
        for row in order {
            for (a, v) in self.entries(row) {
                writeln!(
                    out,
                    "{}\t{}\t{}",
                    self.keys[row as usize],
                    spec.format_action(actions[a]),
                    v
                )
                .unwrap();
            }
        }
        out
    }

    pub fn save(&self, spec: &PuzzleSpec, path: &Path) -> Result<(), LearnError> {
        fs::write(path, self.to_snapshot(spec)).map_err(|source| LearnError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Reads a snapshot; action names are resolved against `spec`, which may
    /// be a different variant than the one the table was learned on.
    pub fn from_snapshot(spec: &PuzzleSpec, text: &str) -> Result<Self, LearnError> {
        let actions = spec.enumerate_actions();
        let mut q = QTable::new(actions.len());
        for (i, line) in text.lines().enumerate() {
            let bad = |message: String| LearnError::Snapshot {
                line: i + 1,
                message,
            };
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split('\t');
            let (Some(state), Some(action), Some(value), None) =
                (cols.next(), cols.next(), cols.next(), cols.next())
            else {
                return Err(bad("expected three tab-separated columns".into()));
            };
            let a = spec
                .parse_action(action)
                .and_then(|a| actions.iter().position(|&x| x == a))
                .ok_or_else(|| bad(format!("unknown action {action:?}")))?;
            let v: F = value
                .parse()
                .map_err(|_| bad(format!("bad value {value:?}")))?;
            if !v.is_finite() {
                return Err(bad("non-finite value".into()));
            }
            let row = q.intern(&CanonicalKey::from_canonical(state));
            q.set(row, a, v);
        }
        Ok(q)
    }

    pub fn load(spec: &PuzzleSpec, path: &Path) -> Result<Self, LearnError> {
        let text = fs::read_to_string(path).map_err(|source| LearnError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_snapshot(spec, &text)
    }
}
