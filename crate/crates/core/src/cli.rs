//! Command-line front end. `run` is the whole program minus argument
//! parsing so it can be driven from tests.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::amplify::{AmplificationSchedule, Policy};
use crate::drivers::{
    compare_strategies, greedy_quantum_loop, iterative_deepening_search, pruned_search, total_queries,
    uninformed_search, PipelinePlan, PruningStage,
};
use crate::error::Error;
use crate::prep::PreparationPlan;
use crate::problem::{branching_stats, enumerate_paths, load_problem, ProblemSpec};
use crate::report::{fmt_g12, fmt_path, RunReport};
use crate::state::{sample_rng, TreeState};

pub const EXIT_FOUND: i32 = 0;
pub const EXIT_NOT_FOUND: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Prepare the superposition tree and print it.
    Prepare,
    /// Fixed-depth quantum search.
    Search,
    /// Iterative deepening over depths 0..=depth.
    Iddfs,
    /// Heuristic pruning stages followed by goal amplification.
    Prune,
    /// Hybrid greedy best-first loop.
    Greedy,
    /// Classical expansions versus quantum oracle queries.
    Compare,
    /// Branching statistics.
    Stats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    #[value(name = "fixed_optimal")]
    FixedOptimal,
    #[value(name = "explicit")]
    Explicit,
    #[value(name = "exponential_search")]
    ExponentialSearch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Records,
    #[value(name = "state-dump")]
    StateDump,
}

/// `level:k[:tau]`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageArg {
    pub level: usize,
    pub iterations: usize,
    pub tau: Option<f64>,
}

fn parse_stage(s: &str) -> Result<StageArg, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(format!("expected level:k[:tau], got '{s}'"));
    }
    let level = parts[0].parse().map_err(|_| format!("invalid stage level '{}'", parts[0]))?;
    let iterations = parts[1].parse().map_err(|_| format!("invalid stage iteration count '{}'", parts[1]))?;
    let tau = match parts.get(2) {
        Some(t) => Some(t.parse().map_err(|_| format!("invalid stage threshold '{t}'"))?),
        None => None,
    };
    Ok(StageArg { level, iterations, tau })
}

#[derive(Debug, Clone, Parser)]
#[command(name = "qtree", version, about = "Quantum tree search simulator")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Problem file.
    pub problem: PathBuf,
    /// Tree depth (maximum depth for iddfs and greedy).
    #[arg(long)]
    pub depth: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = PolicyArg::FixedOptimal)]
    pub policy: PolicyArg,
    /// Iterate count for the explicit policy.
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Exponential-search growth factor, in (1, 4/3].
    #[arg(long, default_value_t = crate::amplify::DEFAULT_LAMBDA)]
    pub lambda: f64,
    /// Oracle-query budget.
    #[arg(long, default_value_t = 100_000)]
    pub budget: u64,
    /// Measurement outcomes printed after a search.
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Same as `--format state-dump`.
    #[arg(long)]
    pub state_dump: bool,
    /// Default threshold for stages given as `level:k`.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Pruning stage `level:k[:tau]`; repeatable.
    #[arg(long = "stage", value_parser = parse_stage)]
    pub stages: Vec<StageArg>,
    /// Number of seeds (starting at --seed) for compare.
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
}

impl RunConfig {
    pub fn format(&self) -> Format {
        if self.state_dump {
            Format::StateDump
        } else {
            self.format
        }
    }

    pub fn schedule(&self) -> Result<AmplificationSchedule, String> {
        let policy = match self.policy {
            PolicyArg::FixedOptimal => Policy::FixedOptimal,
            PolicyArg::Explicit => Policy::Explicit(self.iterations.ok_or("--policy explicit requires --iterations")?),
            PolicyArg::ExponentialSearch => {
                if !(self.lambda > 1.0 && self.lambda <= 4.0 / 3.0) {
                    return Err(format!("--lambda must be in (1, 4/3], got {}", self.lambda));
                }
                Policy::ExponentialSearch { lambda: self.lambda }
            }
        };
        Ok(AmplificationSchedule { policy, seed: self.seed, max_oracle_queries: self.budget })
    }
}

enum Failure {
    Input(String),
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Input(s)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(format!("output error: {e}"))
    }
}

fn problem_error(path: &std::path::Path, e: Error) -> Failure {
    match e {
        Error::Parse { line, message } => Failure::Input(format!("{}:{line}: {message}", path.display())),
        other => Failure::Input(format!("{}: {other}", path.display())),
    }
}

fn engine_error(e: Error) -> Failure {
    Failure::Input(e.to_string())
}

/// Runs one command, writing results to `out` and diagnostics to `err`.
/// Returns 0 when a solution is found (or a non-search command succeeds),
/// 1 when no solution is found, 2 on input errors.
pub fn run(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(config, out) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT_ERROR
        }
    }
}

fn dispatch(config: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let text = std::fs::read_to_string(&config.problem)
        .map_err(|e| Failure::Input(format!("{}: {e}", config.problem.display())))?;
    let p = load_problem(&text).map_err(|e| problem_error(&config.problem, e))?;
    let depth = config.depth;
    match config.command {
        Command::Stats => stats(&p, depth, out),
        Command::Prepare => prepare(&p, config, out),
        Command::Search => {
            let sched = config.schedule()?;
            let outcome = uninformed_search(&p, depth, &sched).map_err(engine_error)?;
            emit_report(config, &outcome.report, outcome.state.as_ref(), out)?;
            if let Some(state) = &outcome.state {
                emit_samples(config, &p, state, out)?;
            }
            Ok(exit_for(outcome.solution.is_some()))
        }
        Command::Iddfs => {
            let sched = config.schedule()?;
            let (solution, reports) = iterative_deepening_search(&p, depth, &sched).map_err(engine_error)?;
            for r in &reports {
                emit_report(config, r, None, out)?;
            }
            writeln!(
                out,
                "iddfs solution={} depths_run={} total_oracle_queries={}",
                solution.as_deref().map_or("none".into(), fmt_path),
                reports.len(),
                total_queries(&reports)
            )?;
            Ok(exit_for(solution.is_some()))
        }
        Command::Prune => {
            let stages = config
                .stages
                .iter()
                .map(|s| {
                    let tau = s.tau.or(config.tau).ok_or_else(|| {
                        format!("stage {}:{} has no threshold; give level:k:tau or --tau", s.level, s.iterations)
                    })?;
                    Ok(PruningStage { level: s.level, tau, iterations: s.iterations })
                })
                .collect::<Result<Vec<_>, String>>()?;
            let plan = PipelinePlan { problem: &p, depth, stages, terminal: config.schedule()? };
            let outcome = pruned_search(&plan, config.seed).map_err(engine_error)?;
            for s in &outcome.stages {
                writeln!(out, "{}", s.to_record())?;
            }
            emit_report(config, &outcome.terminal.report, outcome.terminal.state.as_ref(), out)?;
            writeln!(out, "prune total_oracle_queries={}", outcome.total_oracle_queries)?;
            Ok(exit_for(outcome.solution.is_some()))
        }
        Command::Greedy => {
            let outcome = greedy_quantum_loop(&p, depth, config.seed).map_err(engine_error)?;
            for r in &outcome.steps {
                writeln!(out, "{}", r.to_record())?;
            }
            writeln!(
                out,
                "greedy solution={} committed={} reached={} steps={} mode=hybrid_measure_and_commit warnings={}",
                outcome.solution.as_deref().map_or("none".into(), fmt_path),
                fmt_path(&outcome.committed),
                p.state_name(outcome.reached),
                outcome.steps.len(),
                if outcome.warnings.is_empty() { "none".into() } else { outcome.warnings.join(";").replace(' ', "_") }
            )?;
            Ok(exit_for(outcome.solution.is_some()))
        }
        Command::Compare => {
            let seeds: Vec<u64> = (0..config.seeds).map(|i| config.seed.wrapping_add(i)).collect();
            let table = compare_strategies(&p, depth, &seeds).map_err(engine_error)?;
            match config.format() {
                Format::Records => write!(out, "{}", table.to_records())?,
                _ => write!(out, "{}", table.to_table())?,
            }
            Ok(EXIT_FOUND)
        }
    }
}

fn exit_for(found: bool) -> i32 {
    if found {
        EXIT_FOUND
    } else {
        EXIT_NOT_FOUND
    }
}

fn stats(p: &ProblemSpec, depth: usize, out: &mut dyn Write) -> Result<i32, Failure> {
    let s = branching_stats(p, depth).map_err(engine_error)?;
    let layout = PreparationPlan::new(p, depth).layout;
    let paths = enumerate_paths(p, depth);
    writeln!(
        out,
        "stats problem={} depth={} states={} actions={} b_max={} b_avg={} b_eff={} generated={} internal={} \
         n_paths={} goal_paths={} node_width={} action_width={} total_width={} path_encoded_node_width={}",
        p.name(),
        depth,
        p.num_states(),
        p.num_actions(),
        s.b_max,
        fmt_g12(s.b_avg),
        fmt_g12(s.b_eff),
        s.generated,
        s.internal,
        paths.len(),
        paths.iter().filter(|o| o.is_goal).count(),
        layout.node_width,
        layout.action_width,
        layout.total_width,
        layout.path_encoded_node_width()
    )?;
    Ok(EXIT_FOUND)
}

fn prepare(p: &ProblemSpec, config: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let plan = PreparationPlan::new(p, config.depth);
    let state = plan.prepare().map_err(engine_error)?;
    match config.format() {
        Format::StateDump => write!(out, "{}", state.dump().map_err(engine_error)?)?,
        _ => {
            let entries: Vec<_> = state.entries().expect("structured").collect();
            let live = entries.iter().filter(|(k, s)| !s.dead && k.len() == config.depth).count();
            writeln!(
                out,
                "prepare problem={} depth={} configurations={} live_paths={} dead_prefixes={} norm={} node_width={} \
                 action_width={} total_width={} path_encoded_node_width={}",
                p.name(),
                config.depth,
                entries.len(),
                live,
                entries.iter().filter(|(_, s)| s.dead).count(),
                fmt_g12(state.norm_sqr()),
                plan.layout.node_width,
                plan.layout.action_width,
                plan.layout.total_width,
                plan.layout.path_encoded_node_width()
            )?;
        }
    }
    Ok(EXIT_FOUND)
}

fn emit_report(
    config: &RunConfig,
    r: &RunReport,
    state: Option<&TreeState>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    match config.format() {
        Format::Records => writeln!(out, "{}", r.to_record())?,
        Format::StateDump => match state {
            Some(s) => write!(out, "{}", s.dump().map_err(engine_error)?)?,
            None => writeln!(out, "{}", r.to_record())?,
        },
        Format::Table => {
            for (k, v) in crate::report::parse_record(&r.to_record()) {
                writeln!(out, "{k:<24} {v}")?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

fn emit_samples(config: &RunConfig, p: &ProblemSpec, state: &TreeState, out: &mut dyn Write) -> Result<(), Failure> {
    if config.samples == 0 || config.format() == Format::StateDump {
        return Ok(());
    }
    // Separate stream from the validation draws so adding samples never
    // changes the reported solution.
    let mut rng = sample_rng(config.seed ^ 0x9e37_79b9_7f4a_7c15);
    for s in state.measure_with(&mut rng, config.samples).map_err(engine_error)? {
        writeln!(
            out,
            "sample path={} node={} goal={}",
            fmt_path(&s.path),
            s.node,
            s.path.len() == config.depth && p.is_goal(s.node)
        )?;
    }
    Ok(())
}
