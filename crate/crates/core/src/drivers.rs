//! End-to-end search strategies built from preparation and amplification,
//! and the classical-versus-quantum comparison.

use std::fmt::Write as _;

use crate::amplify::marked_mass;
use crate::amplify::{AmplificationSchedule, Amplifier, MarkPredicate};
use crate::error::{Error, Result};
use crate::prep::{extend, transition_conflicts, PreparationPlan};
use crate::problem::{
    branching_stats, classical_search, ActionPath, BranchingStats, ProblemSpec, SearchLimits, StateId, Strategy,
};
use crate::report::{fmt_g12, RunReport, RunStatus};
use crate::state::{sample_rng, TreeState};

/// Fixed-k policies draw up to this many samples before giving up.
pub const VALIDATION_ATTEMPTS: usize = 3;

const NON_UNITARY: &str = "non-unitary transition model";

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub solution: Option<ActionPath>,
    pub report: RunReport,
    /// Final amplified state; absent when amplification did not run.
    pub state: Option<TreeState>,
}

/// Amplifies `mark` about `psi`, then measures and verifies classically.
fn amplify_and_measure(
    p: &ProblemSpec,
    psi: &TreeState,
    mark: MarkPredicate,
    sched: &AmplificationSchedule,
    label: &str,
) -> Result<SearchOutcome> {
    let amplified = match Amplifier::new(p, psi, mark)?.run(psi, sched, label) {
        Ok(a) => a,
        Err(Error::NoMarked(report)) | Err(Error::BudgetExhausted(report)) => {
            return Ok(SearchOutcome { solution: None, report: *report, state: None });
        }
        Err(e) => return Err(e),
    };
    let mut report = amplified.report;
    if let Some(sample) = amplified.sample {
        return Ok(SearchOutcome { solution: Some(sample.path), report, state: Some(amplified.state) });
    }
    let mut rng = sample_rng(sched.seed);
    for _ in 0..VALIDATION_ATTEMPTS {
        let sample = amplified.state.measure_with(&mut rng, 1)?.remove(0);
        report.samples_drawn += 1;
        if mark.accepts(p, psi.root(), &sample) {
            report.status = RunStatus::Found;
            report.solution = Some(sample.path.clone());
            return Ok(SearchOutcome { solution: Some(sample.path), report, state: Some(amplified.state) });
        }
    }
    report.status = RunStatus::NotFound;
    Ok(SearchOutcome { solution: None, report, state: Some(amplified.state) })
}

/// Prepares the depth-`depth` superposition tree, amplifies the goal
/// predicate, measures and verifies.
pub fn uninformed_search(p: &ProblemSpec, depth: usize, sched: &AmplificationSchedule) -> Result<SearchOutcome> {
    if depth == 0 {
        return Err(Error::InvalidDepth(depth));
    }
    let plan = PreparationPlan::new(p, depth);
    let psi = plan.prepare()?;
    let mut out = amplify_and_measure(p, &psi, MarkPredicate::goal(depth), sched, &format!("{}@d{depth}", p.name()))?;
    if !transition_conflicts(p, p.root(), depth).is_empty() {
        out.report.warnings.push(NON_UNITARY.into());
    }
    Ok(out)
}

/// Depth 0 is a classical root check; depths `1..=d_max` run
/// [`uninformed_search`] with seed `sched.seed + d`, stopping at the first
/// verified solution.
pub fn iterative_deepening_search(
    p: &ProblemSpec,
    d_max: usize,
    sched: &AmplificationSchedule,
) -> Result<(Option<ActionPath>, Vec<RunReport>)> {
    let mut reports = Vec::new();
    let mut root = RunReport::new(format!("{}@d0", p.name()), "classical_root_check", 0, sched.seed);
    root.n_paths = 1;
    if p.is_goal(p.root()) {
        root.n_marked = 1;
        root.initial_success = 1.0;
        root.status = RunStatus::Found;
        root.solution = Some(Vec::new());
        reports.push(root);
        return Ok((Some(Vec::new()), reports));
    }
    root.status = RunStatus::NotFound;
    reports.push(root);
    for d in 1..=d_max {
        let out = uninformed_search(p, d, &sched.with_seed(sched.seed.wrapping_add(d as u64)))?;
        reports.push(out.report);
        if out.solution.is_some() {
            return Ok((out.solution, reports));
        }
    }
    Ok((None, reports))
}

pub fn total_queries(reports: &[RunReport]) -> u64 {
    reports.iter().map(|r| r.oracle_queries).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PruningStage {
    pub level: usize,
    pub tau: f64,
    pub iterations: usize,
}

impl PruningStage {
    pub fn mark(&self) -> MarkPredicate {
        MarkPredicate::threshold(self.tau, self.level)
    }
}

#[derive(Debug, Clone)]
pub struct PipelinePlan<'p> {
    pub problem: &'p ProblemSpec,
    pub depth: usize,
    pub stages: Vec<PruningStage>,
    pub terminal: AmplificationSchedule,
}

impl PipelinePlan<'_> {
    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::InvalidDepth(0));
        }
        if !self.stages.is_empty() && !self.problem.has_heuristic() {
            return Err(Error::MissingHeuristic);
        }
        for w in self.stages.windows(2) {
            if w[0].level >= w[1].level {
                return Err(Error::InvalidPlan("stage levels must be strictly increasing".into()));
            }
        }
        if let Some(s) = self.stages.iter().find(|s| s.level >= self.depth) {
            return Err(Error::InvalidPlan(format!("stage level {} is not below depth {}", s.level, self.depth)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageReport {
    pub level: usize,
    pub tau: f64,
    pub iterations: usize,
    /// Mass on configurations satisfying `h <= tau` at `level`.
    pub mass_before: f64,
    pub mass_after: f64,
    pub oracle_queries: u64,
    pub skipped: bool,
}

impl StageReport {
    pub fn to_record(&self) -> String {
        format!(
            "stage_level={} tau={} k={} mass_before={} mass_after={} oracle_queries={} skipped={}",
            self.level,
            fmt_g12(self.tau),
            self.iterations,
            fmt_g12(self.mass_before),
            fmt_g12(self.mass_after),
            self.oracle_queries,
            self.skipped
        )
    }
}

#[derive(Debug, Clone)]
pub struct PrunedOutcome {
    pub solution: Option<ActionPath>,
    pub stages: Vec<StageReport>,
    pub terminal: SearchOutcome,
    /// Depth-`d` state after all stages, before terminal amplification.
    pub prepared: TreeState,
    pub total_oracle_queries: u64,
}

/// Interleaves tree preparation with heuristic-threshold amplification
/// stages. Each stage reflects about the partial-depth state it starts from,
/// then the tree is extended to the next stage or to the final depth, where
/// the goal predicate is amplified with the terminal schedule.
pub fn pruned_search(plan: &PipelinePlan<'_>, seed: u64) -> Result<PrunedOutcome> {
    plan.validate()?;
    let p = plan.problem;
    let mut x = PreparationPlan::new(p, plan.depth).ground()?;
    let mut level = 0;
    let mut stages = Vec::with_capacity(plan.stages.len());
    let mut warnings = Vec::new();
    let mut stage_queries = 0;
    for stage in &plan.stages {
        extend(&mut x, p, level, stage.level)?;
        level = stage.level;
        let mark = stage.mark();
        let mass_before = marked_mass(&x, p, &mark);
        let mut report = StageReport {
            level: stage.level,
            tau: stage.tau,
            iterations: stage.iterations,
            mass_before,
            mass_after: mass_before,
            oracle_queries: 0,
            skipped: false,
        };
        if mass_before <= 0.0 {
            report.skipped = true;
            warnings.push(format!(
                "stage at level {} skipped: nothing satisfies h <= {}",
                stage.level,
                fmt_g12(stage.tau)
            ));
        } else if stage.iterations > 0 {
            let reference = x.clone();
            let mut amp = Amplifier::new(p, &reference, mark)?;
            amp.iterate_n(&mut x, stage.iterations)?;
            report.oracle_queries = amp.queries();
            report.mass_after = marked_mass(&x, p, &mark);
        }
        stage_queries += report.oracle_queries;
        stages.push(report);
    }
    extend(&mut x, p, level, plan.depth)?;
    let sched = plan.terminal.with_seed(seed);
    let mut terminal = amplify_and_measure(
        p,
        &x,
        MarkPredicate::goal(plan.depth),
        &sched,
        &format!("{}@d{}-pruned", p.name(), plan.depth),
    )?;
    terminal.report.warnings.extend(warnings);
    if !transition_conflicts(p, p.root(), plan.depth).is_empty() {
        terminal.report.warnings.push(NON_UNITARY.into());
    }
    let total = stage_queries + terminal.report.oracle_queries;
    Ok(PrunedOutcome {
        solution: terminal.solution.clone(),
        stages,
        terminal,
        prepared: x,
        total_oracle_queries: total,
    })
}

#[derive(Debug, Clone)]
pub struct GreedyOutcome {
    pub solution: Option<ActionPath>,
    /// Actions committed so far (the partial path when no goal is reached).
    pub committed: ActionPath,
    pub reached: StateId,
    pub steps: Vec<RunReport>,
    pub warnings: Vec<String>,
}

/// Hybrid greedy loop: at each committed node, amplify "child minimizes h
/// among the children" over a one-level superposition, measure with
/// exponential search (seed `seed + step`) and commit the verified action.
pub fn greedy_quantum_loop(p: &ProblemSpec, d_max: usize, seed: u64) -> Result<GreedyOutcome> {
    if !p.has_heuristic() {
        return Err(Error::MissingHeuristic);
    }
    let mut node = p.root();
    let mut committed = Vec::new();
    let mut steps = Vec::new();
    let mut warnings = Vec::new();
    loop {
        if p.is_goal(node) {
            return Ok(GreedyOutcome { solution: Some(committed.clone()), committed, reached: node, steps, warnings });
        }
        if committed.len() >= d_max {
            warnings.push(format!("depth limit {d_max} reached"));
            break;
        }
        let edges = p.edges(node);
        if edges.is_empty() {
            warnings.push(format!("dead end at state '{}'", p.state_name(node)));
            break;
        }
        let tau = edges.iter().map(|&(_, t)| p.heuristic(t).expect("checked")).fold(f64::INFINITY, f64::min);
        let plan = PreparationPlan::rooted_at(p, node, 1)?;
        let psi = plan.prepare()?;
        let sched = AmplificationSchedule::exponential(seed.wrapping_add(committed.len() as u64), 10_000);
        let label = format!("{}-greedy-step{}", p.name(), committed.len());
        let out = amplify_and_measure(p, &psi, MarkPredicate::threshold(tau, 1), &sched, &label)?;
        steps.push(out.report);
        let Some(step) = out.solution else {
            warnings.push(format!("no verified minimizing child at step {}", committed.len()));
            break;
        };
        let a = step[0];
        node = p.transition(node, a).expect("verified sample is admissible");
        committed.push(a);
    }
    Ok(GreedyOutcome { solution: None, committed, reached: node, steps, warnings })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub strategy: String,
    pub metric: &'static str,
    pub mean_cost: f64,
    pub success_rate: f64,
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub problem: String,
    pub depth: usize,
    pub n_paths: usize,
    pub stats: Option<BranchingStats>,
    pub rows: Vec<ComparisonRow>,
}

/// Classical node expansions against quantum oracle queries on the same
/// problem, with branching statistics alongside.
pub fn compare_strategies(p: &ProblemSpec, depth: usize, seeds: &[u64]) -> Result<Comparison> {
    let mut rows = Vec::new();
    let limits = SearchLimits { max_depth: Some(depth), max_expansions: None };
    for strategy in Strategy::ALL {
        if strategy == Strategy::GreedyBestFirst && !p.has_heuristic() {
            continue;
        }
        let r = classical_search(p, strategy, limits)?;
        let ok = r.solution.as_ref().is_some_and(|s| p.validates(s));
        rows.push(ComparisonRow {
            strategy: strategy.name().into(),
            metric: "expansions",
            mean_cost: r.nodes_expanded as f64,
            success_rate: if ok { 1.0 } else { 0.0 },
            runs: 1,
        });
    }

    let mut n_paths = 0;
    if depth > 0 {
        let plan = PreparationPlan::new(p, depth);
        let psi = plan.prepare()?;
        let mark = MarkPredicate::goal(depth);
        n_paths = crate::amplify::mark_summary(&psi, p, &mark).0;
        let budget = 100 * ((n_paths as f64).sqrt().ceil() as u64 + 1);
        for name in ["quantum_fixed_optimal", "quantum_exponential_search"] {
            let make = |s: u64| match name {
                "quantum_fixed_optimal" => AmplificationSchedule::fixed_optimal().with_seed(s),
                _ => AmplificationSchedule::exponential(s, budget),
            };
            let mut cost = 0.0;
            let mut hits = 0;
            for &seed in seeds {
                let out = amplify_and_measure(p, &psi, mark, &make(seed), name)?;
                cost += out.report.oracle_queries as f64;
                if out.solution.as_ref().is_some_and(|s| p.validates(s)) {
                    hits += 1;
                }
            }
            let runs = seeds.len().max(1);
            rows.push(ComparisonRow {
                strategy: name.into(),
                metric: "oracle_queries",
                mean_cost: cost / runs as f64,
                success_rate: hits as f64 / runs as f64,
                runs: seeds.len(),
            });
        }
    }

    Ok(Comparison { problem: p.name().into(), depth, n_paths, stats: branching_stats(p, depth).ok(), rows })
}

impl Comparison {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "problem {} depth {} paths {}", self.problem, self.depth, self.n_paths);
        if let Some(s) = &self.stats {
            let _ = writeln!(out, "branching b_max {} b_avg {} b_eff {}", s.b_max, fmt_g12(s.b_avg), fmt_g12(s.b_eff));
        }
        let width = self.rows.iter().map(|r| r.strategy.len()).max().unwrap_or(8).max(8);
        let _ =
            writeln!(out, "{:<width$}  {:<14}  {:>16}  {:>12}  {:>5}", "strategy", "metric", "cost", "success", "runs");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<width$}  {:<14}  {:>16}  {:>12}  {:>5}",
                r.strategy,
                r.metric,
                fmt_g12(r.mean_cost),
                fmt_g12(r.success_rate),
                r.runs
            );
        }
        out
    }

    pub fn to_records(&self) -> String {
        let mut out = String::new();
        let (b_max, b_avg, b_eff) =
            self.stats.map_or(("undefined".into(), "undefined".into(), "undefined".into()), |s| {
                (s.b_max.to_string(), fmt_g12(s.b_avg), fmt_g12(s.b_eff))
            });
        let _ = writeln!(
            out,
            "problem={} depth={} n_paths={} b_max={b_max} b_avg={b_avg} b_eff={b_eff}",
            self.problem, self.depth, self.n_paths
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "strategy={} metric={} cost={} success_rate={} runs={}",
                r.strategy,
                r.metric,
                fmt_g12(r.mean_cost),
                fmt_g12(r.success_rate),
                r.runs
            );
        }
        out
    }
}
