//! The action-superposition operator 𝒜, the transition operator 𝒯 and their
//! interleaving into the superposition tree.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::problem::{ActionId, ProblemSpec, StateId};
use crate::state::{Amplitude, RegisterLayout, Slot, Storage, TreeState};

#[derive(Debug, Clone, Copy)]
pub struct PreparationPlan<'p> {
    pub problem: &'p ProblemSpec,
    pub root: StateId,
    pub depth: usize,
    pub layout: RegisterLayout,
}

impl<'p> PreparationPlan<'p> {
    pub fn new(problem: &'p ProblemSpec, depth: usize) -> Self {
        PreparationPlan { problem, root: problem.root(), depth, layout: RegisterLayout::for_problem(problem, depth) }
    }

    /// Plan for the subtree below `root` (used by the greedy loop).
    pub fn rooted_at(problem: &'p ProblemSpec, root: StateId, depth: usize) -> Result<Self> {
        if root >= problem.num_states() {
            return Err(Error::RootOutOfRange { root, states: problem.num_states() });
        }
        Ok(PreparationPlan { root, ..Self::new(problem, depth) })
    }

    pub fn ground(&self) -> Result<TreeState> {
        TreeState::init_ground(self.layout, self.root)
    }

    pub fn prepare(&self) -> Result<TreeState> {
        prepare_tree_state(self)
    }

    pub fn prepare_dense(&self) -> Result<TreeState> {
        let mut x = self.ground()?.to_dense()?;
        extend(&mut x, self.problem, 0, self.depth)?;
        Ok(x)
    }
}

/// `init_ground` followed by `depth` rounds of 𝒜 then 𝒯.
pub fn prepare_tree_state(plan: &PreparationPlan<'_>) -> Result<TreeState> {
    let mut x = plan.ground()?;
    extend(&mut x, plan.problem, 0, plan.depth)?;
    Ok(x)
}

/// Applies the rounds for levels `from..to`.
pub fn extend(x: &mut TreeState, p: &ProblemSpec, from: usize, to: usize) -> Result<()> {
    for level in from..to {
        apply_action_superposition(x, p, level)?;
        apply_transition(x, p, level)?;
    }
    Ok(())
}

fn check_level(x: &TreeState, level: usize) -> Result<()> {
    let depth = x.layout().depth;
    if level >= depth {
        return Err(Error::LevelOutOfRange { level, depth });
    }
    Ok(())
}

/// 𝒜 on action register `level`: every live configuration at node `s` is
/// split uniformly over `A_s`. Configurations at a node with no admissible
/// action are flagged dead and keep their amplitude.
pub fn apply_action_superposition(x: &mut TreeState, p: &ProblemSpec, level: usize) -> Result<()> {
    check_level(x, level)?;
    let layout = *x.layout();
    match &mut x.storage {
        Storage::Structured(map) => {
            let mut next = BTreeMap::new();
            for (path, slot) in std::mem::take(map) {
                if slot.dead {
                    next.insert(path, slot);
                    continue;
                }
                if path.len() > level {
                    return Err(Error::NotGround { level });
                }
                if path.len() < level {
                    return Err(Error::Precondition(format!(
                        "configuration {path:?} has not been extended to level {level}"
                    )));
                }
                let actions = p.admissible(slot.node);
                if actions.is_empty() {
                    next.insert(path, Slot { dead: true, ..slot });
                    continue;
                }
                let amp = slot.amp * (1.0 / (actions.len() as f64).sqrt());
                for &a in actions {
                    let mut child = path.clone();
                    child.push(a);
                    next.insert(child, Slot { node: slot.node, dead: false, amp });
                }
            }
            *map = next;
        }
        Storage::Dense(v) => {
            let mut next = vec![Amplitude::new(0.0, 0.0); v.len()];
            for (idx, &amp) in v.iter().enumerate() {
                if amp == Amplitude::new(0.0, 0.0) {
                    continue;
                }
                let s = dense_node(&layout, idx)?;
                if layout.register(idx, level) != 0 {
                    return Err(Error::NotGround { level });
                }
                let actions = p.admissible(s);
                if actions.is_empty() {
                    next[idx] += amp;
                    continue;
                }
                let amp = amp * (1.0 / (actions.len() as f64).sqrt());
                for &a in actions {
                    next[layout.with_register(idx, level, a)] += amp;
                }
            }
            *v = next;
        }
    }
    Ok(())
}

/// 𝒯 on level `level`: `|s⟩|…a_level…⟩ ↦ |transition(s, a_level)⟩|…a_level…⟩`
/// for live configurations; dead ones are untouched.
pub fn apply_transition(x: &mut TreeState, p: &ProblemSpec, level: usize) -> Result<()> {
    check_level(x, level)?;
    let layout = *x.layout();
    match &mut x.storage {
        Storage::Structured(map) => {
            for (path, slot) in map.iter_mut() {
                if slot.dead {
                    continue;
                }
                if path.len() != level + 1 {
                    return Err(Error::Precondition(format!(
                        "action register {level} of configuration {path:?} is not populated"
                    )));
                }
                let a = path[level];
                slot.node = p.transition(slot.node, a).ok_or(Error::CorruptedState { state: slot.node, action: a })?;
            }
        }
        Storage::Dense(v) => {
            let mut next = vec![Amplitude::new(0.0, 0.0); v.len()];
            for (idx, &amp) in v.iter().enumerate() {
                if amp == Amplitude::new(0.0, 0.0) {
                    continue;
                }
                let s = dense_node(&layout, idx)?;
                let a = layout.register(idx, level);
                match p.transition(s, a) {
                    Some(t) => next[layout.with_node(idx, t)] += amp,
                    None if a == 0 && p.admissible(s).is_empty() => next[idx] += amp,
                    None => return Err(Error::CorruptedState { state: s, action: a }),
                }
            }
            *v = next;
        }
    }
    Ok(())
}

fn dense_node(layout: &RegisterLayout, idx: usize) -> Result<StateId> {
    let s = layout.node_of(idx);
    if s >= layout.states {
        return Err(Error::Precondition(format!("node register holds {s}, beyond {} states", layout.states)));
    }
    Ok(s)
}

/// Two live states at the same level that an action maps to one successor;
/// 𝒯 is not injective (hence not unitary) on such a transition model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionConflict {
    pub level: usize,
    pub action: ActionId,
    pub sources: (StateId, StateId),
    pub target: StateId,
}

/// Checks, level by level, that each action's transition map restricted to
/// the states live at that level is injective.
pub fn transition_conflicts(p: &ProblemSpec, root: StateId, depth: usize) -> Vec<TransitionConflict> {
    let mut conflicts = Vec::new();
    let mut live: Vec<StateId> = vec![root];
    for level in 0..depth {
        let mut seen: HashMap<(ActionId, StateId), StateId> = HashMap::new();
        let mut next = HashSet::new();
        for &s in &live {
            for &(a, t) in p.edges(s) {
                next.insert(t);
                match seen.get(&(a, t)) {
                    Some(&other) if other != s => {
                        conflicts.push(TransitionConflict { level, action: a, sources: (other, s), target: t })
                    }
                    Some(_) => {}
                    None => {
                        seen.insert((a, t), s);
                    }
                }
            }
        }
        let mut next: Vec<_> = next.into_iter().collect();
        next.sort_unstable();
        live = next;
    }
    conflicts
}
