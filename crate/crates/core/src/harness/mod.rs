//! Multi-trial experiments: running, aggregating, testing, exporting.

mod csvio;
mod stats;

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::asp::AspError;
use crate::env::{EnvConfig, Environment};
use crate::learn::{
    AlgorithmKind, Agent, EpisodeMetrics, HeuristicSource, LearnError, LearnerConfig, QTable,
    StateMapper, TraceMapper,
};
use crate::puzzle::{build_spec, Puzzle, PuzzleError, PuzzleSpec, Variant};
use crate::scalar::Scalar;

pub use csvio::{read_raw_csv, write_aggregate_csv, write_raw_csv, write_ttest, write_ttest_csv, RAW_HEADER};
pub use stats::{mean, pooled_t_test, sample_sd, welch_t_test, TTest};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Puzzle(#[from] PuzzleError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Asp(#[from] AspError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },
}

impl HarnessError {
    /// Caused by how the tool was invoked rather than by the run itself.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            HarnessError::Config(_)
                | HarnessError::Puzzle(
                    PuzzleError::UnknownPuzzle(_)
                        | PuzzleError::UnknownVariant(_)
                        | PuzzleError::InvalidCombination(_)
                )
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Steps,
    Return,
    VisitedStates,
    QtablePairs,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::Steps,
        Metric::Return,
        Metric::VisitedStates,
        Metric::QtablePairs,
    ];

    pub fn column(self) -> &'static str {
        match self {
            Metric::Steps => "steps",
            Metric::Return => "return",
            Metric::VisitedStates => "visited_states",
            Metric::QtablePairs => "qtable_pairs",
        }
    }

    pub fn from_column(name: &str) -> Option<Metric> {
        Metric::ALL.into_iter().find(|m| m.column() == name)
    }

    pub fn of<F: Scalar>(self, m: &EpisodeMetrics<F>) -> f64 {
        match self {
            Metric::Steps => m.steps as f64,
            Metric::Return => m.accumulated_return.as_f64(),
            Metric::VisitedStates => m.visited_states as f64,
            Metric::QtablePairs => m.qtable_pairs as f64,
        }
    }
}

/// A row of a raw metrics file.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub trial: usize,
    pub episode: usize,
    pub steps: usize,
    pub accumulated_return: f64,
    pub visited_states: usize,
    pub qtable_pairs: usize,
}

impl RawRow {
    pub fn metric(&self, m: Metric) -> f64 {
        match m {
            Metric::Steps => self.steps as f64,
            Metric::Return => self.accumulated_return,
            Metric::VisitedStates => self.visited_states as f64,
            Metric::QtablePairs => self.qtable_pairs as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub episode: usize,
    /// Indexed like [`Metric::ALL`].
    pub mean: [f64; 4],
    pub sd: [f64; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateSeries {
    pub rows: Vec<AggregateRow>,
}

impl AggregateSeries {
    pub fn mean_of(&self, m: Metric) -> Vec<f64> {
        let j = Metric::ALL.iter().position(|&x| x == m).unwrap();
        self.rows.iter().map(|r| r.mean[j]).collect()
    }
}

/// Per-episode mean and sample standard deviation across trials.
pub fn aggregate<F: Scalar>(trials: &[Vec<EpisodeMetrics<F>>]) -> Result<AggregateSeries, HarnessError> {
    let per_trial: Vec<Vec<[f64; 4]>> = trials
        .iter()
        .map(|t| t.iter().map(|m| Metric::ALL.map(|k| k.of(m))).collect())
        .collect();
    aggregate_values(&per_trial)
}

/// [`aggregate`] over rows read back from a raw file.
pub fn aggregate_rows(rows: &[RawRow]) -> Result<AggregateSeries, HarnessError> {
    aggregate_values(&group_by_trial(rows, |r| Metric::ALL.map(|m| r.metric(m))))
}

fn group_by_trial<T>(rows: &[RawRow], f: impl Fn(&RawRow) -> T) -> Vec<Vec<T>> {
    let mut by: BTreeMap<usize, Vec<(usize, T)>> = BTreeMap::new();
    for r in rows {
        by.entry(r.trial).or_default().push((r.episode, f(r)));
    }
    by.into_values()
        .map(|mut v| {
            v.sort_by_key(|(e, _)| *e);
            v.into_iter().map(|(_, x)| x).collect()
        })
        .collect()
}

fn aggregate_values(trials: &[Vec<[f64; 4]>]) -> Result<AggregateSeries, HarnessError> {
    let Some(first) = trials.first() else {
        return Err(HarnessError::Config("no trials to aggregate".into()));
    };
    let n = first.len();
    if trials.iter().any(|t| t.len() != n) {
        return Err(HarnessError::Config(
            "trials have different episode counts".into(),
        ));
    }
    let rows = (0..n)
        .map(|e| {
            let mut row = AggregateRow {
                episode: e + 1,
                mean: [0.0; 4],
                sd: [0.0; 4],
            };
            for j in 0..4 {
                let xs: Vec<f64> = trials.iter().map(|t| t[e][j]).collect();
                row.mean[j] = mean(&xs);
                row.sd[j] = sample_sd(&xs);
            }
            row
        })
        .collect();
    Ok(AggregateSeries { rows })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestRow {
    pub episode: usize,
    pub test: TTest,
}

/// Per-episode two-sample test of one metric between two raw files.
pub fn t_test_series(
    a: &[RawRow],
    b: &[RawRow],
    metric: Metric,
    pooled: bool,
) -> Result<Vec<TTestRow>, HarnessError> {
    let ga = group_by_trial(a, |r| r.metric(metric));
    let gb = group_by_trial(b, |r| r.metric(metric));
    let n = ga.first().map_or(0, Vec::len);
    if ga.iter().chain(&gb).any(|t| t.len() != n) {
        return Err(HarnessError::Config(
            "both inputs need the same episode count in every trial".into(),
        ));
    }
    (0..n)
        .map(|e| {
            let xa: Vec<f64> = ga.iter().map(|t| t[e]).collect();
            let xb: Vec<f64> = gb.iter().map(|t| t[e]).collect();
            let test = if pooled {
                pooled_t_test(&xa, &xb)?
            } else {
                welch_t_test(&xa, &xb)?
            };
            Ok(TTestRow {
                episode: e + 1,
                test,
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig<F> {
    pub puzzle: Puzzle,
    pub variant: Variant,
    pub algorithm: AlgorithmKind,
    pub trials: usize,
    pub episodes: usize,
    pub seed: u64,
    pub learner: LearnerConfig<F>,
    pub winding_limit: Option<u8>,
    /// Overrides the per-chain crossing cap; `Some(None)` removes it.
    pub max_chain_len: Option<Option<usize>>,
    /// Snapshot of a solved related puzzle (HAQL, HoASP).
    pub heuristic_from: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub parallel: bool,
    /// Overrides the switch episode of the disk variant.
    pub switch_after: Option<usize>,
    pub noop_is_impossible: bool,
    /// Write per-trial Q-tables and programs under `out`.
    pub persist: bool,
    /// Record a greedy rollout length after every episode.
    pub greedy_probe: bool,
}

impl<F: Scalar> ExperimentConfig<F> {
    pub fn new(puzzle: Puzzle, variant: Variant, algorithm: AlgorithmKind) -> Self {
        ExperimentConfig {
            puzzle,
            variant,
            algorithm,
            trials: 30,
            episodes: 6000,
            seed: 0,
            learner: LearnerConfig::default(),
            winding_limit: None,
            max_chain_len: None,
            heuristic_from: None,
            out: None,
            parallel: false,
            switch_after: None,
            noop_is_impossible: true,
            persist: true,
            greedy_probe: false,
        }
    }

    pub fn spec(&self) -> Result<PuzzleSpec, HarnessError> {
        let mut spec = build_spec(self.puzzle, self.variant)?;
        if let Some(limit) = self.winding_limit {
            if limit == 0 {
                return Err(HarnessError::Config("winding limit must be positive".into()));
            }
            spec.set_winding_limit(limit);
        }
        if let Some(cap) = self.max_chain_len {
            spec.set_max_chain_len(cap);
        }
        Ok(spec)
    }

    pub fn env_config(&self, spec: &PuzzleSpec) -> EnvConfig<F> {
        let mut env = EnvConfig::for_spec(spec.clone());
        if let Some(e) = self.switch_after {
            env = env.with_switch_after(e);
        }
        env.max_steps = self.learner.max_steps;
        env.noop_is_impossible = self.noop_is_impossible;
        env
    }

    fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 || self.episodes == 0 {
            return Err(HarnessError::Config("trials and episodes must be at least 1".into()));
        }
        self.learner.validate().map_err(HarnessError::Config)?;
        if self.algorithm.needs_heuristic() && self.heuristic_from.is_none() {
            return Err(HarnessError::Config(format!(
                "{} needs --heuristic-from <snapshot>",
                self.algorithm
            )));
        }
        Ok(())
    }
}

/// Reads a snapshot and pairs it with a state mapper: identity when the
/// snapshot's puzzle starts where the target does, trace replay otherwise.
pub fn load_heuristic<F: Scalar>(
    path: &Path,
    target: &PuzzleSpec,
) -> Result<HeuristicSource<F>, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let source_spec = snapshot_spec(&text)?.unwrap_or_else(|| target.clone());
    let q = QTable::from_snapshot(target, &text)?;
    let mapper = if source_spec.puzzle() == target.puzzle()
        && source_spec.initial() == target.initial()
    {
        StateMapper::Identity
    } else {
        StateMapper::TraceReplay(Box::new(TraceMapper::new(source_spec, target)))
    };
    Ok(HeuristicSource::new(q, mapper))
}

fn snapshot_spec(text: &str) -> Result<Option<PuzzleSpec>, HarnessError> {
    let Some(header) = text.lines().next().and_then(|l| l.strip_prefix('#')) else {
        return Ok(None);
    };
    let mut puzzle = None;
    let mut variant = None;
    for field in header.split_whitespace() {
        match field.split_once('=') {
            Some(("puzzle", p)) => puzzle = Some(p.parse::<Puzzle>()?),
            Some(("variant", v)) => variant = Some(v.parse::<Variant>()?),
            _ => {}
        }
    }
    match (puzzle, variant) {
        (Some(p), Some(v)) => Ok(Some(build_spec(p, v)?)),
        _ => Ok(None),
    }
}

pub struct TrialResult<F> {
    pub trial: usize,
    pub metrics: Vec<EpisodeMetrics<F>>,
    /// Greedy rollout length after each episode, when probing.
    pub greedy: Vec<Option<usize>>,
    pub agent: Agent<F>,
    /// Spec in force at the end of the trial.
    pub final_spec: PuzzleSpec,
}

fn trial_rngs(seed: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let agent = ChaCha8Rng::seed_from_u64(seed);
    let mut env = ChaCha8Rng::seed_from_u64(seed);
    env.set_stream(1);
    (agent, env)
}

/// Runs trial `k` (seed `config.seed + k`) in memory.
pub fn run_trial<F: Scalar>(
    config: &ExperimentConfig<F>,
    k: usize,
    heuristic: Option<HeuristicSource<F>>,
) -> Result<TrialResult<F>, HarnessError> {
    let spec = config.spec()?;
    let (agent_rng, env_rng) = trial_rngs(config.seed.wrapping_add(k as u64));
    let mut env = Environment::new(config.env_config(&spec), env_rng);
    let mut agent = Agent::new(config.algorithm, config.learner.clone(), &spec, heuristic, agent_rng);
    let mut metrics = Vec::with_capacity(config.episodes);
    let mut greedy = Vec::new();
    for episode in 1..=config.episodes {
        if env.schedule_tick(episode) {
            agent.on_switch();
        }
        metrics.push(agent.run_episode(&mut env, episode));
        if config.greedy_probe {
            greedy.push(agent.greedy_rollout(env.spec(), config.learner.max_steps));
        }
    }
    Ok(TrialResult {
        trial: k,
        metrics,
        greedy,
        final_spec: env.spec().clone(),
        agent,
    })
}

fn persist_trial<F: Scalar>(out: &Path, t: &TrialResult<F>) -> Result<(), HarnessError> {
    let dir = out.join(format!("trial{}", t.trial));
    fs::create_dir_all(&dir).map_err(|source| HarnessError::Io {
        path: dir.clone(),
        source,
    })?;
    t.agent.qtable().save(&t.final_spec, &dir.join("qtable.tsv"))?;
    if let Some(p) = t.agent.program() {
        p.save(&dir.join("programs"))?;
    }
    Ok(())
}

pub struct ExperimentResult<F> {
    pub trials: Vec<Vec<EpisodeMetrics<F>>>,
    pub greedy: Vec<Vec<Option<usize>>>,
    pub aggregate: AggregateSeries,
}

/// Runs every trial, then writes `raw.csv`, `aggregate.csv` and per-trial
/// artifacts under `config.out` when set.
pub fn run_experiment<F: Scalar>(
    config: &ExperimentConfig<F>,
) -> Result<ExperimentResult<F>, HarnessError> {
    config.validate()?;
    let spec = config.spec()?;
    let heuristic = match &config.heuristic_from {
        Some(path) if config.algorithm.needs_heuristic() => Some(load_heuristic(path, &spec)?),
        _ => None,
    };
    if let Some(out) = &config.out {
        fs::create_dir_all(out).map_err(|source| HarnessError::Io {
            path: out.clone(),
            source,
        })?;
    }
    let one = |k: usize| -> Result<TrialResult<F>, HarnessError> {
        let t = run_trial(config, k, heuristic.clone())?;
        if let (Some(out), true) = (&config.out, config.persist) {
            persist_trial(out, &t)?;
        }
        Ok(t)
    };
    let results: Vec<TrialResult<F>> = if config.parallel {
        (0..config.trials).into_par_iter().map(one).collect::<Result<_, _>>()?
    } else {
        (0..config.trials).map(one).collect::<Result<_, _>>()?
    };
    let mut trials = Vec::with_capacity(results.len());
    let mut greedy = Vec::with_capacity(results.len());
    for r in results {
        trials.push(r.metrics);
        greedy.push(r.greedy);
    }
    let aggregate = aggregate(&trials)?;
    if let Some(out) = &config.out {
        write_raw_csv(&out.join("raw.csv"), &trials)?;
        write_aggregate_csv(&out.join("aggregate.csv"), &aggregate)?;
    }
    Ok(ExperimentResult {
        trials,
        greedy,
        aggregate,
    })
}
