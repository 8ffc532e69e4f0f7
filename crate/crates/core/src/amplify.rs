//! Phase oracles, reflection about a prepared state, and the amplitude
//! amplification schedules.
//!
//! The iterate is `Q = (2|Ψ⟩⟨Ψ| − I) · O`. With `a` the marked mass of `|Ψ⟩`
//! and `θ = asin(√a)`, the marked mass after `k` iterates is
//! `sin²((2k + 1) θ)`.

use std::f64::consts::FRAC_PI_4;

use rand::Rng;

use crate::error::{Error, Result};
use crate::prep::PreparationPlan;
use crate::problem::{ProblemSpec, StateId};
use crate::report::{RunReport, RunStatus};
use crate::state::{inner_product, sample_rng, Amplitude, Sample, Slot, Storage, TreeState};

/// Growth factor of the exponential-search range.
pub const DEFAULT_LAMBDA: f64 = 6.0 / 5.0;
/// Hard cap on exponential-search rounds, independent of the query budget.
pub const MAX_ROUNDS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarkKind {
    Goal,
    /// Marks nodes with `h(node) <= tau`.
    HeuristicThreshold(f64),
}

/// Which configurations the phase oracle flips. Only live configurations whose
/// path has exactly `level` actions are candidates; dead ones never are.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkPredicate {
    pub kind: MarkKind,
    pub level: usize,
}

impl MarkPredicate {
    pub fn goal(level: usize) -> Self {
        MarkPredicate { kind: MarkKind::Goal, level }
    }

    pub fn threshold(tau: f64, level: usize) -> Self {
        MarkPredicate { kind: MarkKind::HeuristicThreshold(tau), level }
    }

    pub fn validate(&self, p: &ProblemSpec) -> Result<()> {
        match self.kind {
            MarkKind::HeuristicThreshold(_) if !p.has_heuristic() => Err(Error::MissingHeuristic),
            _ => Ok(()),
        }
    }

    pub fn marks_node(&self, p: &ProblemSpec, node: StateId) -> bool {
        match self.kind {
            MarkKind::Goal => p.is_goal(node),
            MarkKind::HeuristicThreshold(tau) => p.heuristic(node).is_some_and(|h| h <= tau),
        }
    }

    /// Classical check of a measured outcome: replays the path from `root`.
    pub fn accepts(&self, p: &ProblemSpec, root: StateId, sample: &Sample) -> bool {
        sample.path.len() == self.level
            && p.follow(root, &sample.path).is_some_and(|t| t == sample.node && self.marks_node(p, t))
    }
}

/// Calls `f(node, live, amplitude)` for every stored configuration. In dense
/// mode liveness is recovered by replaying the action registers from the root.
fn for_each_config(x: &mut TreeState, p: &ProblemSpec, level: usize, mut f: impl FnMut(StateId, bool, &mut Amplitude)) {
    let layout = *x.layout();
    let root = x.root();
    match &mut x.storage {
        Storage::Structured(map) => {
            for (path, slot) in map.iter_mut() {
                let live = !slot.dead && path.len() == level;
                f(slot.node, live, &mut slot.amp);
            }
        }
        Storage::Dense(v) => {
            for (idx, amp) in v.iter_mut().enumerate() {
                if *amp == Amplitude::new(0.0, 0.0) {
                    continue;
                }
                let node = layout.node_of(idx);
                let regs = layout.registers(idx);
                let live = level <= layout.depth
                    && regs[level..].iter().all(|&a| a == 0)
                    && p.follow(root, &regs[..level]) == Some(node);
                f(node, live, amp);
            }
        }
    }
}

/// `(live configurations, marked configurations, marked mass)` at the
/// predicate's level, counting only nonzero amplitudes.
pub fn mark_summary(x: &TreeState, p: &ProblemSpec, mark: &MarkPredicate) -> (usize, usize, f64) {
    let (mut n, mut m, mut mass) = (0, 0, 0.0);
    let mut scratch = x.clone();
    for_each_config(&mut scratch, p, mark.level, |node, live, amp| {
        if live && *amp != Amplitude::new(0.0, 0.0) {
            n += 1;
            if mark.marks_node(p, node) {
                m += 1;
                mass += amp.norm_sqr();
            }
        }
    });
    (n, m, mass)
}

pub fn marked_mass(x: &TreeState, p: &ProblemSpec, mark: &MarkPredicate) -> f64 {
    mark_summary(x, p, mark).2
}

/// Phase oracle with its own query counter.
#[derive(Debug, Clone)]
pub struct PhaseOracle<'p> {
    problem: &'p ProblemSpec,
    mark: MarkPredicate,
    queries: u64,
}

impl<'p> PhaseOracle<'p> {
    pub fn new(problem: &'p ProblemSpec, mark: MarkPredicate) -> Result<Self> {
        mark.validate(problem)?;
        Ok(PhaseOracle { problem, mark, queries: 0 })
    }

    pub fn mark(&self) -> &MarkPredicate {
        &self.mark
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    /// Multiplies every marked configuration by −1.
    pub fn apply(&mut self, x: &mut TreeState) {
        self.queries += 1;
        let (p, mark) = (self.problem, self.mark);
        for_each_config(x, p, mark.level, |node, live, amp| {
            if live && mark.marks_node(p, node) {
                *amp = -*amp;
            }
        });
    }
}

/// One-shot oracle application.
pub fn apply_oracle(x: &mut TreeState, p: &ProblemSpec, mark: &MarkPredicate) -> Result<()> {
    PhaseOracle::new(p, *mark)?.apply(x);
    Ok(())
}

/// `x ← (2|Ψ⟩⟨Ψ| − I) x`.
pub fn reflect_about(x: &mut TreeState, psi: &TreeState) -> Result<()> {
    let overlap = inner_product(psi, x)?;
    let twice = overlap * 2.0;
    match (&mut x.storage, &psi.storage) {
        (Storage::Structured(xm), Storage::Structured(pm)) => {
            for slot in xm.values_mut() {
                slot.amp = -slot.amp;
            }
            for (path, s) in pm {
                let entry = xm.entry(path.clone()).or_insert(Slot {
                    node: s.node,
                    dead: s.dead,
                    amp: Amplitude::new(0.0, 0.0),
                });
                if entry.node != s.node {
                    return Err(Error::Precondition(format!(
                        "configuration {path:?} sits on node {} here but {} in the reference state",
                        entry.node, s.node
                    )));
                }
                entry.amp += twice * s.amp;
            }
        }
        (Storage::Dense(xv), _) => {
            let pv = psi.dense_amplitudes()?;
            for (a, b) in xv.iter_mut().zip(pv.iter()) {
                *a = twice * b - *a;
            }
        }
        (Storage::Structured(_), Storage::Dense(_)) => {
            return Err(Error::Precondition("cannot reflect a structured state about a dense one".into()));
        }
    }
    Ok(())
}

/// Reflection about `prepare_tree_state(plan)`.
pub fn reflect_about_prepared(x: &mut TreeState, plan: &PreparationPlan<'_>) -> Result<()> {
    if *x.layout() != plan.layout {
        return Err(Error::LayoutMismatch);
    }
    let psi = match x.mode() {
        crate::state::Mode::Structured => plan.prepare()?,
        crate::state::Mode::Dense => plan.prepare_dense()?,
    };
    reflect_about(x, &psi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Policy {
    /// `k = floor(π / 4θ)` with `a` read off the simulated state.
    FixedOptimal,
    Explicit(usize),
    /// Random `k` from a geometrically growing range, verified classically.
    ExponentialSearch {
        lambda: f64,
    },
}

impl Policy {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::FixedOptimal => "fixed_optimal",
            Policy::Explicit(_) => "explicit",
            Policy::ExponentialSearch { .. } => "exponential_search",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplificationSchedule {
    pub policy: Policy,
    pub seed: u64,
    pub max_oracle_queries: u64,
}

impl AmplificationSchedule {
    pub fn fixed_optimal() -> Self {
        AmplificationSchedule { policy: Policy::FixedOptimal, seed: 0, max_oracle_queries: u64::MAX }
    }

    pub fn explicit(k: usize) -> Self {
        AmplificationSchedule { policy: Policy::Explicit(k), ..Self::fixed_optimal() }
    }

    pub fn exponential(seed: u64, max_oracle_queries: u64) -> Self {
        AmplificationSchedule { policy: Policy::ExponentialSearch { lambda: DEFAULT_LAMBDA }, seed, max_oracle_queries }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        AmplificationSchedule { seed, ..self }
    }
}

/// `floor(π / 4θ)`, or 0 once `a >= 1/2` (a single measurement already
/// succeeds with probability at least one half).
pub fn optimal_iterations(a: f64) -> usize {
    // Masses like 1/2 arrive with rounding error from the simulation.
    if a >= 0.5 - 1e-12 {
        return 0;
    }
    (FRAC_PI_4 / success_angle(a)).floor() as usize
}

pub fn success_angle(a: f64) -> f64 {
    a.clamp(0.0, 1.0).sqrt().asin()
}

/// Marked mass after `k` iterates from initial mass `a`.
pub fn predicted_mass(a: f64, k: usize) -> f64 {
    ((2 * k + 1) as f64 * success_angle(a)).sin().powi(2)
}

#[derive(Debug, Clone)]
pub struct Amplified {
    pub state: TreeState,
    pub report: RunReport,
    /// The verified measurement (exponential search only).
    pub sample: Option<Sample>,
}

/// Amplitude amplification driven by a reference (prepared) state.
pub struct Amplifier<'a> {
    problem: &'a ProblemSpec,
    reference: &'a TreeState,
    oracle: PhaseOracle<'a>,
}

impl<'a> Amplifier<'a> {
    pub fn new(problem: &'a ProblemSpec, reference: &'a TreeState, mark: MarkPredicate) -> Result<Self> {
        Ok(Amplifier { problem, reference, oracle: PhaseOracle::new(problem, mark)? })
    }

    pub fn queries(&self) -> u64 {
        self.oracle.queries()
    }

    /// One iterate: oracle, then reflection about the reference state.
    pub fn iterate(&mut self, x: &mut TreeState) -> Result<()> {
        self.oracle.apply(x);
        reflect_about(x, self.reference)
    }

    pub fn iterate_n(&mut self, x: &mut TreeState, k: usize) -> Result<()> {
        (0..k).try_for_each(|_| self.iterate(x))
    }

    fn base_report(&self, sched: &AmplificationSchedule, label: &str) -> (RunReport, f64) {
        let mark = self.oracle.mark();
        let (n, m, a) = mark_summary(self.reference, self.problem, mark);
        let layout = self.reference.layout();
        let mut r = RunReport::new(label, sched.policy.name(), layout.depth, sched.seed);
        r.n_paths = n;
        r.n_marked = m;
        r.initial_success = a;
        r.theta = success_angle(a);
        r.path_encoded_node_width = layout.path_encoded_node_width();
        r.node_width = layout.node_width;
        r.total_width = layout.total_width;
        (r, a)
    }

    /// Runs the schedule starting from `x0` (fixed/explicit policies) or from
    /// fresh copies of the reference state (exponential search).
    pub fn run(mut self, x0: &TreeState, sched: &AmplificationSchedule, label: &str) -> Result<Amplified> {
        let (mut report, a) = self.base_report(sched, label);
        let mark = *self.oracle.mark();
        match sched.policy {
            Policy::FixedOptimal | Policy::Explicit(_) => {
                let k = match sched.policy {
                    Policy::Explicit(k) => k,
                    _ => {
                        report.uses_simulator_knowledge = true;
                        if a <= 0.0 {
                            report.status = RunStatus::NoMarked;
                            return Err(Error::NoMarked(Box::new(report)));
                        }
                        if a >= 0.5 - 1e-12 {
                            report.warnings.push("a >= 1/2: no iterate needed, one measurement succeeds w.p. a".into());
                        }
                        optimal_iterations(a)
                    }
                };
                if k as u64 > sched.max_oracle_queries {
                    report.status = RunStatus::BudgetExhausted;
                    return Err(Error::BudgetExhausted(Box::new(report)));
                }
                let mut x = x0.clone();
                self.iterate_n(&mut x, k)?;
                report.iterations = k;
                report.rounds = 1;
                report.oracle_queries = self.queries();
                report.predicted_final = predicted_mass(a, k);
                report.measured_final = marked_mass(&x, self.problem, &mark);
                Ok(Amplified { state: x, report, sample: None })
            }
            Policy::ExponentialSearch { lambda } => {
                let mut rng = sample_rng(sched.seed);
                let cap = (report.n_paths as f64).sqrt().max(1.0);
                let mut range = 1.0f64;
                loop {
                    if report.rounds >= MAX_ROUNDS {
                        report.status = RunStatus::BudgetExhausted;
                        return Err(Error::BudgetExhausted(Box::new(report)));
                    }
                    let k = rng.random_range(0..range.ceil() as usize);
                    if self.queries() + k as u64 > sched.max_oracle_queries {
                        report.status = RunStatus::BudgetExhausted;
                        return Err(Error::BudgetExhausted(Box::new(report)));
                    }
                    let mut x = self.reference.clone();
                    self.iterate_n(&mut x, k)?;
                    report.rounds += 1;
                    report.iterations += k;
                    report.oracle_queries = self.queries();
                    report.predicted_final = predicted_mass(a, k);
                    report.measured_final = marked_mass(&x, self.problem, &mark);
                    let sample = x.measure_with(&mut rng, 1)?.remove(0);
                    report.samples_drawn += 1;
                    if mark.accepts(self.problem, x.root(), &sample) {
                        report.status = RunStatus::Found;
                        report.solution = Some(sample.path.clone());
                        return Ok(Amplified { state: x, report, sample: Some(sample) });
                    }
                    range = (lambda * range).min(cap);
                }
            }
        }
    }
}

/// Amplifies `mark` in `x0` by reflecting about `prepare_tree_state(plan)`.
pub fn amplify(
    x0: &TreeState,
    plan: &PreparationPlan<'_>,
    mark: &MarkPredicate,
    sched: &AmplificationSchedule,
) -> Result<Amplified> {
    let psi = match x0.mode() {
        crate::state::Mode::Structured => plan.prepare()?,
        crate::state::Mode::Dense => plan.prepare_dense()?,
    };
    if x0.layout() != psi.layout() {
        return Err(Error::LayoutMismatch);
    }
    Amplifier::new(plan.problem, &psi, *mark)?.run(x0, sched, plan.problem.name())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::generators;

    const EPS: f64 = 1e-12;

    #[test]
    fn oracle_flips_the_goal_only() {
        let p = generators::uniform_tree(2, 2, &[1]);
        let plan = PreparationPlan::new(&p, 2);
        let mut x = plan.prepare().unwrap();
        let mut oracle = PhaseOracle::new(&p, MarkPredicate::goal(2)).unwrap();
        oracle.apply(&mut x);
        assert_eq!(oracle.queries(), 1);
        assert!((x.amplitude(&[0, 1]).unwrap().re + 0.5).abs() < EPS);
        for path in [[0, 0], [1, 0], [1, 1]] {
            assert!((x.amplitude(&path).unwrap().re - 0.5).abs() < EPS);
        }
        let psi = plan.prepare().unwrap();
        assert!((inner_product(&psi, &x).unwrap().re - 0.5).abs() < EPS);
    }

    #[test]
    fn oracle_without_marks_is_identity_but_counts() {
        let p = generators::goalless();
        let plan = PreparationPlan::new(&p, 3);
        let mut x = plan.prepare().unwrap();
        let mut oracle = PhaseOracle::new(&p, MarkPredicate::goal(3)).unwrap();
        oracle.apply(&mut x);
        assert_eq!(x, plan.prepare().unwrap());
        assert_eq!(oracle.queries(), 1);
    }

    #[test]
    fn all_marked_is_a_global_phase() {
        let p = generators::uniform_tree(2, 2, &[0, 1, 2, 3]);
        let plan = PreparationPlan::new(&p, 2);
        let mut x = plan.prepare().unwrap();
        apply_oracle(&mut x, &p, &MarkPredicate::goal(2)).unwrap();
        let overlap = inner_product(&plan.prepare().unwrap(), &x).unwrap();
        assert!((overlap.re + 1.0).abs() < EPS && overlap.im.abs() < EPS);
    }

    #[test]
    fn threshold_needs_heuristic() {
        let p = generators::uniform_tree(2, 2, &[0]);
        let mut x = PreparationPlan::new(&p, 2).prepare().unwrap();
        assert!(matches!(apply_oracle(&mut x, &p, &MarkPredicate::threshold(1.0, 2)), Err(Error::MissingHeuristic)));
    }

    #[test]
    fn reflection_eigenvectors() {
        let p = generators::five_leaf();
        let plan = PreparationPlan::new(&p, 2);
        let psi = plan.prepare().unwrap();
        let mut x = psi.clone();
        reflect_about_prepared(&mut x, &plan).unwrap();
        assert!(inner_product(&psi, &x).unwrap().re > 1.0 - EPS);

        // |0,0⟩ − |0,1⟩ has no overlap with the uniform-within-subtree state.
        let mut orth = psi.clone();
        if let Storage::Structured(m) = &mut orth.storage {
            for (path, slot) in m.iter_mut() {
                slot.amp = match path.as_slice() {
                    [0, 0] => Amplitude::new(0.5f64.sqrt(), 0.0),
                    [0, 1] => Amplitude::new(-(0.5f64.sqrt()), 0.0),
                    _ => Amplitude::new(0.0, 0.0),
                };
            }
        }
        let mut y = orth.clone();
        reflect_about(&mut y, &psi).unwrap();
        for (path, slot) in y.entries().unwrap() {
            assert!((slot.amp + orth.amplitude(path).unwrap()).norm() < EPS);
        }
    }

    #[test]
    fn one_iterate_reaches_certainty_for_one_in_four() {
        let p = generators::uniform_tree(2, 2, &[2]);
        let plan = PreparationPlan::new(&p, 2);
        let psi = plan.prepare().unwrap();
        let out = amplify(&psi, &plan, &MarkPredicate::goal(2), &AmplificationSchedule::fixed_optimal()).unwrap();
        assert_eq!(out.report.iterations, 1);
        assert!((out.report.initial_success - 0.25).abs() < EPS);
        assert!((out.report.theta - std::f64::consts::PI / 6.0).abs() < EPS);
        assert!((out.report.measured_final - 1.0).abs() < EPS);
        assert!((out.state.amplitude(&[1, 0]).unwrap().norm() - 1.0).abs() < EPS);
        for path in [[0, 0], [0, 1], [1, 1]] {
            assert!(out.state.amplitude(&path).unwrap().norm() < EPS);
        }
        let samples = out.state.measure_paths(200, 1).unwrap();
        assert!(samples.iter().all(|s| p.validates(&s.path)));
    }

    #[test]
    fn five_leaf_closed_form() {
        let p = generators::five_leaf();
        let plan = PreparationPlan::new(&p, 2);
        let psi = plan.prepare().unwrap();
        let out = amplify(&psi, &plan, &MarkPredicate::goal(2), &AmplificationSchedule::fixed_optimal()).unwrap();
        let theta = (1.0f64 / 6.0).sqrt().asin();
        assert_eq!(out.report.iterations, 1);
        assert!((out.report.measured_final - (3.0 * theta).sin().powi(2)).abs() < 1e-9);
        assert!((out.report.measured_final - 49.0 / 54.0).abs() < 1e-9);
    }

    #[test]
    fn every_path_a_goal_needs_no_iterate() {
        let p = generators::uniform_tree(2, 1, &[0, 1]);
        let plan = PreparationPlan::new(&p, 1);
        let psi = plan.prepare().unwrap();
        let out = amplify(&psi, &plan, &MarkPredicate::goal(1), &AmplificationSchedule::fixed_optimal()).unwrap();
        assert_eq!(out.report.iterations, 0);
        assert_eq!(out.state, psi);
    }

    #[test]
    fn no_marked_is_an_error_with_report() {
        let p = generators::goalless();
        let plan = PreparationPlan::new(&p, 3);
        let psi = plan.prepare().unwrap();
        match amplify(&psi, &plan, &MarkPredicate::goal(3), &AmplificationSchedule::fixed_optimal()) {
            Err(Error::NoMarked(r)) => {
                assert_eq!(r.initial_success, 0.0);
                assert_eq!(r.n_paths, 8);
                assert_eq!(r.oracle_queries, 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn explicit_counts_queries_exactly() {
        let p = generators::uniform_tree(4, 2, &[5]);
        let plan = PreparationPlan::new(&p, 2);
        let psi = plan.prepare().unwrap();
        for k in 0..6 {
            let out = amplify(&psi, &plan, &MarkPredicate::goal(2), &AmplificationSchedule::explicit(k)).unwrap();
            assert_eq!(out.report.oracle_queries, k as u64);
            assert!((out.report.measured_final - predicted_mass(1.0 / 16.0, k)).abs() < 1e-9);
        }
    }

    #[test]
    fn exponential_search_accounting() {
        let p = generators::uniform_tree(2, 6, &[37]);
        let plan = PreparationPlan::new(&p, 6);
        let psi = plan.prepare().unwrap();
        for seed in 0..20 {
            let out = amplify(&psi, &plan, &MarkPredicate::goal(6), &AmplificationSchedule::exponential(seed, 10_000))
                .unwrap();
            assert_eq!(out.report.iterations as u64, out.report.oracle_queries);
            assert!(p.validates(out.report.solution.as_ref().unwrap()));
            assert_eq!(out.report.samples_drawn, out.report.rounds);
        }
    }

    #[test]
    fn exponential_search_respects_budget() {
        let p = generators::goalless();
        let plan = PreparationPlan::new(&p, 3);
        let psi = plan.prepare().unwrap();
        match amplify(&psi, &plan, &MarkPredicate::goal(3), &AmplificationSchedule::exponential(3, 40)) {
            Err(Error::BudgetExhausted(r)) => assert!(r.oracle_queries <= 40),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn optimal_iteration_edges() {
        assert_eq!(optimal_iterations(1.0), 0);
        assert_eq!(optimal_iterations(0.5), 0);
        assert_eq!(optimal_iterations(0.25), 1);
        assert_eq!(optimal_iterations(1.0 / 1024.0), 25);
    }
}
