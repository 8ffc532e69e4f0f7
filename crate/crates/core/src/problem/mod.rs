//! Explicit search problems with arbitrary per-state branching, plus the
//! classical ground truth (path enumeration, uninformed and greedy search,
//! branching statistics) that the quantum simulation is checked against.

mod classical;
mod format;
pub mod generators;
mod stats;

pub use classical::{classical_search, enumerate_paths, PathOutcome, SearchLimits, SearchResult, Strategy};
pub use format::load_problem;
pub use stats::{branching_stats, BranchingStats};

use crate::error::{Error, Result};

pub type StateId = usize;
pub type ActionId = usize;

/// A sequence of action indices `a_0 a_1 ... a_{d-1}`.
pub type ActionPath = Vec<ActionId>;

/// Immutable, validated search problem.
///
/// States and actions are dense indices assigned in declaration order. The
/// admissible set of a state and its transition function are defined together
/// by the outgoing edges, so `transition(s, a)` is `Some` exactly when `a` is
/// admissible at `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    name: String,
    state_names: Vec<String>,
    action_names: Vec<String>,
    // Outgoing edges per state, sorted by action index.
    edges: Vec<Vec<(ActionId, StateId)>>,
    admissible: Vec<Vec<ActionId>>,
    root: StateId,
    goals: Vec<bool>,
    heuristic: Option<Vec<f64>>,
}

impl ProblemSpec {
    pub fn builder(name: impl Into<String>) -> ProblemBuilder {
        ProblemBuilder::new(name)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn num_actions(&self) -> usize {
        self.action_names.len()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.state_names[s]
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.action_names[a]
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn action_names(&self) -> &[String] {
        &self.action_names
    }

    pub fn root(&self) -> StateId {
        self.root
    }

    /// Admissible actions `A_s`, in ascending action order.
    pub fn admissible(&self, s: StateId) -> &[ActionId] {
        &self.admissible[s]
    }

    pub fn edges(&self, s: StateId) -> &[(ActionId, StateId)] {
        &self.edges[s]
    }

    pub fn transition(&self, s: StateId, a: ActionId) -> Option<StateId> {
        let edges = &self.edges[s];
        edges.binary_search_by_key(&a, |&(action, _)| action).ok().map(|i| edges[i].1)
    }

    pub fn is_goal(&self, s: StateId) -> bool {
        self.goals[s]
    }

    pub fn goals(&self) -> impl Iterator<Item = StateId> + '_ {
        self.goals.iter().enumerate().filter(|(_, &g)| g).map(|(s, _)| s)
    }

    pub fn has_heuristic(&self) -> bool {
        self.heuristic.is_some()
    }

    pub fn heuristic(&self, s: StateId) -> Option<f64> {
        self.heuristic.as_ref().map(|h| h[s])
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.state_names.iter().position(|n| n == name)
    }

    pub fn action_index(&self, name: &str) -> Option<ActionId> {
        self.action_names.iter().position(|n| n == name)
    }

    /// Replays `path` from `start`, returning the terminal state if every step
    /// is admissible.
    pub fn follow(&self, start: StateId, path: &[ActionId]) -> Option<StateId> {
        path.iter().try_fold(start, |s, &a| self.transition(s, a))
    }

    /// True when `path` replays admissibly from the root and ends in a goal.
    pub fn validates(&self, path: &[ActionId]) -> bool {
        self.follow(self.root, path).is_some_and(|s| self.is_goal(s))
    }

    /// Same problem rooted elsewhere.
    pub fn with_root(&self, root: StateId) -> Result<ProblemSpec> {
        if root >= self.num_states() {
            return Err(Error::RootOutOfRange { root, states: self.num_states() });
        }
        let mut p = self.clone();
        p.root = root;
        Ok(p)
    }

    /// Renders the problem in the line-oriented text format accepted by
    /// [`load_problem`].
    pub fn to_text(&self) -> String {
        format::render(self)
    }
}

/// Incremental constructor; `build` checks every invariant.
#[derive(Debug, Clone, Default)]
pub struct ProblemBuilder {
    name: String,
    states: Vec<String>,
    actions: Vec<String>,
    edges: Vec<(StateId, ActionId, StateId)>,
    root: Option<StateId>,
    goals: Vec<StateId>,
    heuristic: Vec<(StateId, f64)>,
}

impl ProblemBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Default::default() }
    }

    pub fn action(&mut self, name: impl Into<String>) -> ActionId {
        self.actions.push(name.into());
        self.actions.len() - 1
    }

    pub fn state(&mut self, name: impl Into<String>) -> StateId {
        self.states.push(name.into());
        self.states.len() - 1
    }

    pub fn edge(&mut self, from: StateId, action: ActionId, to: StateId) -> &mut Self {
        self.edges.push((from, action, to));
        self
    }

    pub fn root(&mut self, s: StateId) -> &mut Self {
        self.root = Some(s);
        self
    }

    pub fn goal(&mut self, s: StateId) -> &mut Self {
        self.goals.push(s);
        self
    }

    pub fn heuristic(&mut self, s: StateId, h: f64) -> &mut Self {
        self.heuristic.push((s, h));
        self
    }

    pub fn build(&self) -> Result<ProblemSpec> {
        let n = self.states.len();
        let na = self.actions.len();
        if n == 0 {
            return Err(Error::Validation("no states declared".into()));
        }
        check_unique(&self.states, "state")?;
        check_unique(&self.actions, "action")?;
        let root = self.root.ok_or_else(|| Error::Validation("no root declared".into()))?;
        if root >= n {
            return Err(Error::RootOutOfRange { root, states: n });
        }

        let mut edges = vec![Vec::new(); n];
        for &(from, a, to) in &self.edges {
            if from >= n || to >= n {
                return Err(Error::Validation(format!("edge ({from}, {a}, {to}) names an unknown state")));
            }
            if a >= na {
                return Err(Error::Validation(format!("edge ({from}, {a}, {to}) names an unknown action")));
            }
            edges[from].push((a, to));
        }
        for (s, out) in edges.iter_mut().enumerate() {
            out.sort_by_key(|&(a, _)| a);
            if let Some(w) = out.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::Validation(format!(
                    "duplicate edge for state '{}' and action '{}'",
                    self.states[s], self.actions[w[0].0]
                )));
            }
        }
        let admissible = edges.iter().map(|out| out.iter().map(|&(a, _)| a).collect()).collect();

        let mut goals = vec![false; n];
        for &g in &self.goals {
            if g >= n {
                return Err(Error::Validation(format!("goal {g} is not a state")));
            }
            goals[g] = true;
        }

        let heuristic = if self.heuristic.is_empty() {
            None
        } else {
            let mut h = vec![f64::NAN; n];
            for &(s, v) in &self.heuristic {
                if s >= n {
                    return Err(Error::Validation(format!("heuristic for unknown state {s}")));
                }
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::Validation(format!(
                        "heuristic for '{}' must be a non-negative finite number, got {v}",
                        self.states[s]
                    )));
                }
                h[s] = v;
            }
            if let Some(s) = h.iter().position(|v| v.is_nan()) {
                return Err(Error::Validation(format!("state '{}' has no heuristic value", self.states[s])));
            }
            Some(h)
        };

        Ok(ProblemSpec {
            name: self.name.clone(),
            state_names: self.states.clone(),
            action_names: self.actions.clone(),
            edges,
            admissible,
            root,
            goals,
            heuristic,
        })
    }
}

fn check_unique(names: &[String], what: &str) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(Error::Validation(format!("duplicate {what} '{n}'")));
        }
    }
    Ok(())
}
