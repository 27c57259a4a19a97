//! Per-state logic programs built while acting.
//!
//! Every observed `(s, a, s')` extends a choice rule `1 {s'; ...} 1 :- a, s.`
//! and every impossible attempt becomes an integrity constraint, either for
//! one state (`:- a, s.`) or for all of them (`:- a.`). The fragment is small
//! enough that answer sets are enumerated directly.

mod text;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::learn::QTable;
use crate::puzzle::CanonicalKey;
use crate::scalar::Scalar;

pub use text::{parse_global, parse_program};

#[derive(Debug, Error)]
pub enum AspError {
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("atom {0} is not in the registry")]
    UnknownAtom(String),
    #[error("state s{0} is not registered")]
    UnregisteredState(u32),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {message}")]
    Registry { path: PathBuf, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> AspError + '_ {
    move |source| AspError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateAtom(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionAtom(pub u16);

impl fmt::Display for StateAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

impl fmt::Display for ActionAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomKind {
    State,
    Action,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub kind: AtomKind,
    pub index: u32,
    pub label: String,
}

/// States numbered in discovery order, actions in enumeration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AtomRegistry {
    states: Vec<CanonicalKey>,
    lookup: HashMap<CanonicalKey, u32>,
    actions: Vec<String>,
}

impl AtomRegistry {
    pub fn new(action_labels: Vec<String>) -> Self {
        AtomRegistry {
            states: Vec::new(),
            lookup: HashMap::new(),
            actions: action_labels,
        }
    }

    pub fn intern(&mut self, key: &CanonicalKey) -> StateAtom {
        if let Some(&i) = self.lookup.get(key) {
            return StateAtom(i);
        }
        let i = self.states.len() as u32;
        self.states.push(key.clone());
        self.lookup.insert(key.clone(), i);
        StateAtom(i)
    }

    pub fn state(&self, key: &CanonicalKey) -> Option<StateAtom> {
        self.lookup.get(key).map(|&i| StateAtom(i))
    }

    pub fn state_key(&self, s: StateAtom) -> Option<&CanonicalKey> {
        self.states.get(s.0 as usize)
    }

    pub fn action_label(&self, a: ActionAtom) -> Option<&str> {
        self.actions.get(a.0 as usize).map(String::as_str)
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        let states = self.states.iter().enumerate().map(|(i, k)| Atom {
            kind: AtomKind::State,
            index: i as u32,
            label: k.as_str().to_string(),
        });
        let actions = self.actions.iter().enumerate().map(|(i, l)| Atom {
            kind: AtomKind::Action,
            index: i as u32,
            label: l.clone(),
        });
        states.chain(actions)
    }

    /// Tab-separated `kind, index, label` with a header row.
    pub fn write_tsv(&self, path: &Path) -> Result<(), AspError> {
        let mut w = csv::WriterBuilder::new()
            .delimiter(b'\t')
            .from_path(path)
            .map_err(|e| registry_err(path, e))?;
        w.write_record(["kind", "index", "label"])
            .map_err(|e| registry_err(path, e))?;
        for atom in self.atoms() {
            let kind = match atom.kind {
                AtomKind::State => "state",
                AtomKind::Action => "action",
            };
            w.write_record([kind, &atom.index.to_string(), &atom.label])
                .map_err(|e| registry_err(path, e))?;
        }
        w.flush().map_err(io_err(path))
    }

    pub fn read_tsv(path: &Path) -> Result<Self, AspError> {
        let mut r = csv::ReaderBuilder::new()
            .delimiter(b'\t')
            .from_path(path)
            .map_err(|e| registry_err(path, e))?;
        let mut reg = AtomRegistry::default();
        for row in r.records() {
            let row = row.map_err(|e| registry_err(path, e))?;
            let bad = |m: &str| AspError::Registry {
                path: path.to_path_buf(),
                message: m.to_string(),
            };
            let (kind, index, label) = match (row.get(0), row.get(1), row.get(2)) {
                (Some(k), Some(i), Some(l)) => (k, i, l),
                _ => return Err(bad("expected three columns")),
            };
            let index: usize = index.parse().map_err(|_| bad("bad index"))?;
            match kind {
                "state" if index == reg.states.len() => {
                    reg.intern(&CanonicalKey::from_canonical(label));
                }
                "action" if index == reg.actions.len() => reg.actions.push(label.to_string()),
                "state" | "action" => return Err(bad("indices must be dense and ascending")),
                _ => return Err(bad("kind must be state or action")),
            }
        }
        Ok(reg)
    }
}

fn registry_err(path: &Path, e: csv::Error) -> AspError {
    AspError::Registry {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceRule {
    pub state: StateAtom,
    pub action: ActionAtom,
    /// Ascending, no duplicates.
    pub successors: Vec<StateAtom>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    PerState(StateAtom),
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegrityConstraint {
    pub scope: Scope,
    pub action: ActionAtom,
}

/// Rules and per-state constraints of one state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateProgram {
    pub state: StateAtom,
    rules: BTreeMap<ActionAtom, Vec<StateAtom>>,
    constraints: BTreeSet<ActionAtom>,
}

impl StateProgram {
    pub fn new(state: StateAtom) -> Self {
        StateProgram {
            state,
            rules: BTreeMap::new(),
            constraints: BTreeSet::new(),
        }
    }

    pub fn rules(&self) -> impl Iterator<Item = ChoiceRule> + '_ {
        self.rules.iter().map(|(&action, succ)| ChoiceRule {
            state: self.state,
            action,
            successors: succ.clone(),
        })
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    pub fn successors(&self, a: ActionAtom) -> Option<&[StateAtom]> {
        self.rules.get(&a).map(Vec::as_slice)
    }

    pub fn constraints(&self) -> impl Iterator<Item = IntegrityConstraint> + '_ {
        self.constraints.iter().map(|&action| IntegrityConstraint {
            scope: Scope::PerState(self.state),
            action,
        })
    }

    pub fn is_constrained(&self, a: ActionAtom) -> bool {
        self.constraints.contains(&a)
    }

    /// Adds `s'` to the head of the rule for `a`.
    pub fn add_transition(&mut self, a: ActionAtom, next: StateAtom) {
        assert!(
            !self.constraints.contains(&a),
            "transition recorded for constrained pair ({a}, {})",
            self.state
        );
        let succ = self.rules.entry(a).or_default();
        if let Err(pos) = succ.binary_search(&next) {
            succ.insert(pos, next);
        }
    }

    /// Adds `:- a, s.` and drops the rule for `a`.
    pub fn add_constraint(&mut self, a: ActionAtom) {
        self.rules.remove(&a);
        self.constraints.insert(a);
    }

    /// Stable models of this program plus the global constraints, each
    /// reduced to its `(action, successor)` choice.
    pub fn answer_sets(&self, global: &BTreeSet<ActionAtom>) -> Vec<(ActionAtom, StateAtom)> {
        let mut out = Vec::new();
        for (&a, succ) in &self.rules {
            if self.constraints.contains(&a) || global.contains(&a) {
                continue;
            }
            out.extend(succ.iter().map(|&s| (a, s)));
        }
        out
    }
}

/// All state programs of one learner plus the global constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalProgram {
    registry: AtomRegistry,
    global: BTreeSet<ActionAtom>,
    programs: Vec<StateProgram>,
}

impl GlobalProgram {
    pub fn new(registry: AtomRegistry) -> Self {
        let programs = (0..registry.state_count() as u32)
            .map(|i| StateProgram::new(StateAtom(i)))
            .collect();
        GlobalProgram {
            registry,
            global: BTreeSet::new(),
            programs,
        }
    }

    pub fn registry(&self) -> &AtomRegistry {
        &self.registry
    }

    pub fn register(&mut self, key: &CanonicalKey) -> StateAtom {
        let s = self.registry.intern(key);
        if s.0 as usize == self.programs.len() {
            self.programs.push(StateProgram::new(s));
        }
        s
    }

    pub fn program(&self, s: StateAtom) -> Option<&StateProgram> {
        self.programs.get(s.0 as usize)
    }

    pub fn programs(&self) -> &[StateProgram] {
        &self.programs
    }

    pub fn global_constraints(&self) -> &BTreeSet<ActionAtom> {
        &self.global
    }

    pub fn is_forbidden(&self, s: StateAtom, a: ActionAtom) -> bool {
        self.global.contains(&a) || self.programs[s.0 as usize].is_constrained(a)
    }

    pub fn record_transition(&mut self, s: StateAtom, a: ActionAtom, next: StateAtom) {
        assert!(
            !self.global.contains(&a),
            "transition recorded for globally constrained {a}"
        );
        assert!((next.0 as usize) < self.programs.len(), "unregistered {next}");
        self.programs[s.0 as usize].add_transition(a, next);
    }

    /// Adds the constraint and removes every rule it contradicts.
    pub fn record_forbidden(&mut self, scope: Scope, a: ActionAtom) {
        match scope {
            Scope::PerState(s) => self.programs[s.0 as usize].add_constraint(a),
            Scope::Global => {
                self.global.insert(a);
                for p in &mut self.programs {
                    p.rules.remove(&a);
                }
            }
        }
    }

    pub fn answer_sets(&self, s: StateAtom) -> Result<Vec<(ActionAtom, StateAtom)>, AspError> {
        let p = self
            .programs
            .get(s.0 as usize)
            .ok_or(AspError::UnregisteredState(s.0))?;
        Ok(p.answer_sets(&self.global))
    }

    /// Creates a zero-valued Q entry for every action in the answer sets of
    /// `s`; existing values are kept.
    pub fn seed_q_rows<F: Scalar>(&self, s: StateAtom, q: &mut QTable<F>) -> Result<(), AspError> {
        let key = self
            .registry
            .state_key(s)
            .ok_or(AspError::UnregisteredState(s.0))?;
        let row = q.intern(key);
        for (a, _) in self.answer_sets(s)? {
            q.ensure(row, a.0 as usize);
        }
        Ok(())
    }

    pub fn print_program(&self, s: StateAtom) -> Result<String, AspError> {
        let p = self
            .programs
            .get(s.0 as usize)
            .ok_or(AspError::UnregisteredState(s.0))?;
        Ok(text::print_program(p, Some(&self.registry)))
    }

    /// Rejects atoms the registry does not know.
    pub fn check_atoms(&self, p: &StateProgram) -> Result<(), AspError> {
        let states = self.registry.state_count() as u32;
        let actions = self.registry.action_count() as u16;
        if p.state.0 >= states {
            return Err(AspError::UnknownAtom(p.state.to_string()));
        }
        for (a, succ) in &p.rules {
            if a.0 >= actions {
                return Err(AspError::UnknownAtom(a.to_string()));
            }
            if let Some(s) = succ.iter().find(|s| s.0 >= states) {
                return Err(AspError::UnknownAtom(s.to_string()));
            }
        }
        match p.constraints.iter().find(|a| a.0 >= actions) {
            Some(a) => Err(AspError::UnknownAtom(a.to_string())),
            None => Ok(()),
        }
    }

    /// `s<N>.rules`, `s<N>.constraints`, `global.constraints`, `atoms.tsv`.
    pub fn save(&self, dir: &Path) -> Result<(), AspError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        for p in &self.programs {
            let rules = dir.join(format!("{}.rules", p.state));
            fs::write(&rules, text::print_rules(p, Some(&self.registry))).map_err(io_err(&rules))?;
            let cons = dir.join(format!("{}.constraints", p.state));
            fs::write(&cons, text::print_constraints(p, Some(&self.registry)))
                .map_err(io_err(&cons))?;
        }
        let global = dir.join("global.constraints");
        fs::write(&global, text::print_global(&self.global, Some(&self.registry)))
            .map_err(io_err(&global))?;
        self.registry.write_tsv(&dir.join("atoms.tsv"))
    }

    pub fn load(dir: &Path) -> Result<Self, AspError> {
        let registry = AtomRegistry::read_tsv(&dir.join("atoms.tsv"))?;
        let mut gp = GlobalProgram::new(registry);
        let global_path = dir.join("global.constraints");
        let text = fs::read_to_string(&global_path).map_err(io_err(&global_path))?;
        gp.global = parse_global(&text)?;
        for i in 0..gp.programs.len() {
            let mut joined = String::new();
            for ext in ["rules", "constraints"] {
                let path = dir.join(format!("s{i}.{ext}"));
                joined.push_str(&fs::read_to_string(&path).map_err(io_err(&path))?);
            }
            let p = parse_program(&joined)?;
            if p.state != StateAtom(i as u32) {
                return Err(AspError::UnknownAtom(p.state.to_string()));
            }
            gp.check_atoms(&p)?;
            gp.programs[i] = p;
        }
        Ok(gp)
    }
}
