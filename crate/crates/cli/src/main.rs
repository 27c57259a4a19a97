use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand};
use tangle_core::harness::{
    read_raw_csv, run_experiment, t_test_series, write_ttest, write_ttest_csv, HarnessError, Metric,
};
use tangle_core::learn::AlgorithmKind;
use tangle_core::puzzle::{build_spec, Puzzle, PuzzleError, PuzzleSpec, TransitionResult, Variant};
use tangle_core::{ExperimentConfig64, LearnerConfig64};

#[derive(Parser)]
#[command(name = "tangle-rl", version, about = "Learn to solve string-and-hole puzzles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train agents and write per-episode metrics.
    Run(RunArgs),
    /// Shortest plan by breadth-first search.
    Solve(SolveArgs),
    /// Per-episode two-sample t-test between two raw metric files.
    Ttest(TtestArgs),
    /// Parse, validate and print a state.
    ShowState(ShowArgs),
}

#[derive(Args)]
struct PuzzleArgs {
    #[arg(long)]
    puzzle: Puzzle,
    #[arg(long, default_value = "original")]
    variant: Variant,
    /// Most identical crossings in a row on one chain.
    #[arg(long)]
    winding_limit: Option<u8>,
    /// Most crossings on one chain, or `none`.
    #[arg(long, value_parser = parse_cap)]
    max_chain_len: Option<Option<usize>>,
}

impl PuzzleArgs {
    fn spec(&self) -> Result<PuzzleSpec, Failure> {
        let mut spec = build_spec(self.puzzle, self.variant).map_err(Failure::usage)?;
        if let Some(limit) = self.winding_limit {
            if limit == 0 {
                return Err(Failure::Usage(anyhow!("winding limit must be positive")));
            }
            spec.set_winding_limit(limit);
        }
        if let Some(cap) = self.max_chain_len {
            spec.set_max_chain_len(cap);
        }
        Ok(spec)
    }
}

fn parse_cap(s: &str) -> Result<Option<usize>, String> {
    if s == "none" {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| format!("expected a count or `none`, got `{s}`"))
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    puzzle: PuzzleArgs,
    #[arg(long)]
    algorithm: AlgorithmKind,
    #[arg(long, default_value_t = 30)]
    trials: usize,
    #[arg(long, default_value_t = 6000)]
    episodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    #[arg(long, default_value_t = 0.9)]
    gamma: f64,
    #[arg(long, default_value_t = 0.25)]
    eta: f64,
    #[arg(long, default_value_t = 1.0)]
    xi: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Q-table snapshot of a solved related puzzle (haql, hoasp).
    #[arg(long)]
    heuristic_from: Option<PathBuf>,
    #[arg(long, env = "TANGLE_RL_OUT", default_value = "tangle-out")]
    out: PathBuf,
    /// Run trials on all cores.
    #[arg(long)]
    parallel: bool,
    /// Last episode before the disk fits change (nonstationary-disk).
    #[arg(long)]
    switch_after: Option<usize>,
    /// Reward a noise-induced no-op as a plain step instead of an
    /// impossible action.
    #[arg(long)]
    noop_as_step: bool,
    /// Keep Q-Learning values when the environment changes.
    #[arg(long)]
    no_reinit: bool,
    /// Skip writing per-trial Q-tables and programs.
    #[arg(long)]
    no_persist: bool,
    /// Report the greedy policy's plan length at the end of each trial.
    #[arg(long)]
    greedy: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    puzzle: PuzzleArgs,
    /// Start somewhere other than the puzzle's initial state.
    #[arg(long)]
    from: Option<String>,
    #[arg(long, default_value_t = 40)]
    max_depth: usize,
}

#[derive(Args)]
struct TtestArgs {
    a: PathBuf,
    b: PathBuf,
    /// steps, return, visited_states or qtable_pairs
    #[arg(long, default_value = "steps")]
    column: String,
    /// Equal-variance test instead of Welch's.
    #[arg(long)]
    pooled: bool,
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ShowArgs {
    #[command(flatten)]
    puzzle: PuzzleArgs,
    /// State text; the initial state when omitted.
    state: Option<String>,
    /// Also list what every action does from this state.
    #[arg(long)]
    moves: bool,
}

enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    fn usage(e: impl Into<anyhow::Error>) -> Self {
        Failure::Usage(e.into())
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        if e.is_usage() {
            Failure::Usage(e.into())
        } else {
            Failure::Runtime(e.into())
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Solve(args) => solve(args),
        Command::Ttest(args) => ttest(args),
        Command::ShowState(args) => show_state(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Writes to stdout; a reader that went away early is not an error.
fn emit(bytes: &[u8]) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    match out.write_all(bytes).and_then(|()| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
            Err(Failure::Runtime(anyhow::Error::new(e).context("writing output")))
        }
        _ => Ok(()),
    }
}

fn run(args: RunArgs) -> Result<(), Failure> {
    args.puzzle.spec()?;
    let mut c = ExperimentConfig64::new(args.puzzle.puzzle, args.puzzle.variant, args.algorithm);
    c.trials = args.trials;
    c.episodes = args.episodes;
    c.seed = args.seed;
    c.learner = LearnerConfig64 {
        alpha: args.alpha,
        gamma: args.gamma,
        eta: args.eta,
        xi: args.xi,
        beta: args.beta,
        episodes: args.episodes,
        reinit_on_switch: !args.no_reinit,
        ..LearnerConfig64::default()
    };
    c.winding_limit = args.puzzle.winding_limit;
    c.max_chain_len = args.puzzle.max_chain_len;
    c.heuristic_from = args.heuristic_from;
    c.out = Some(args.out.clone());
    c.parallel = args.parallel;
    c.switch_after = args.switch_after;
    c.noop_is_impossible = !args.noop_as_step;
    c.persist = !args.no_persist;
    c.greedy_probe = args.greedy;

    let res = run_experiment(&c)?;
    let last = res.aggregate.rows.last().expect("at least one episode");
    println!(
        "{} on {} {}: {} trials x {} episodes",
        c.algorithm, c.puzzle, c.variant, c.trials, c.episodes
    );
    for (j, m) in Metric::ALL.into_iter().enumerate() {
        println!(
            "final {:<15} mean {:>10.2}  sd {:>9.2}",
            m.column(),
            last.mean[j],
            last.sd[j]
        );
    }
    if args.greedy {
        let lens: Vec<String> = res
            .greedy
            .iter()
            .map(|g| match g.last().copied().flatten() {
                Some(n) => n.to_string(),
                None => "-".to_string(),
            })
            .collect();
        println!("greedy plan length per trial: {}", lens.join(" "));
    }
    println!("output in {}", args.out.display());
    Ok(())
}

fn solve(args: SolveArgs) -> Result<(), Failure> {
    let mut spec = args.puzzle.spec()?;
    if let Some(text) = &args.from {
        spec = spec.with_initial(text).map_err(Failure::usage)?;
    }
    let report = spec
        .bfs_solve(args.max_depth)
        .map_err(|e| Failure::Runtime(e.into()))?;
    let mut out = report.plan.to_text(&spec);
    out.push_str(&format!("length {}\n", report.plan.len()));
    emit(out.as_bytes())
}

fn ttest(args: TtestArgs) -> Result<(), Failure> {
    let metric = Metric::from_column(&args.column).ok_or_else(|| {
        Failure::Usage(anyhow!(
            "unknown column `{}` (expected steps, return, visited_states or qtable_pairs)",
            args.column
        ))
    })?;
    let a = read_raw_csv(&args.a)?;
    let b = read_raw_csv(&args.b)?;
    let rows = t_test_series(&a, &b, metric, args.pooled)?;
    match &args.out {
        Some(path) => Ok(write_ttest_csv(path, &rows)?),
        None => {
            let mut buf = Vec::new();
            write_ttest(&mut buf, &rows, Path::new("<stdout>"))?;
            emit(&buf)
        }
    }
}

fn show_state(args: ShowArgs) -> Result<(), Failure> {
    let spec = args.puzzle.spec()?;
    let state = match &args.state {
        Some(text) => spec.parse_state(text).map_err(Failure::usage)?,
        None => spec.initial().clone(),
    };
    spec.validate_state(&state)
        .map_err(|e: PuzzleError| Failure::Usage(e.into()))?;
    let mut out = format!(
        "{}\ngoal: {}\n",
        spec.print_state(&state),
        if spec.is_goal(&state) { "yes" } else { "no" }
    );
    if args.moves {
        for a in spec.enumerate_actions() {
            let what = match spec.apply(&state, a) {
                TransitionResult::Moved(next) => spec.print_state(&next),
                TransitionResult::Impossible(why) => format!("impossible: {why}"),
            };
            out.push_str(&format!("{}\t{}\n", spec.format_action(a), what));
        }
    }
    emit(out.as_bytes())
}
