use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet, VecDeque};

use super::{ActionId, ActionPath, ProblemSpec, StateId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathOutcome {
    pub path: ActionPath,
    pub terminal: StateId,
    pub is_goal: bool,
}

/// Every admissible action path of exactly length `depth` from the root, in
/// lexicographic action order. Paths that reach a dead end before `depth` are
/// not included.
pub fn enumerate_paths(p: &ProblemSpec, depth: usize) -> Vec<PathOutcome> {
    enumerate_paths_from(p, p.root(), depth)
}

pub(crate) fn enumerate_paths_from(p: &ProblemSpec, start: StateId, depth: usize) -> Vec<PathOutcome> {
    fn walk(p: &ProblemSpec, s: StateId, depth: usize, path: &mut ActionPath, out: &mut Vec<PathOutcome>) {
        if path.len() == depth {
            out.push(PathOutcome { path: path.clone(), terminal: s, is_goal: p.is_goal(s) });
            return;
        }
        for &(a, t) in p.edges(s) {
            path.push(a);
            walk(p, t, depth, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    walk(p, start, depth, &mut Vec::with_capacity(depth), &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Bfs,
    DfsDepthLimited,
    Iddfs,
    GreedyBestFirst,
}

impl Strategy {
    pub const ALL: [Strategy; 4] =
        [Strategy::Bfs, Strategy::DfsDepthLimited, Strategy::Iddfs, Strategy::GreedyBestFirst];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Bfs => "bfs",
            Strategy::DfsDepthLimited => "dfs_depth_limited",
            Strategy::Iddfs => "iddfs",
            Strategy::GreedyBestFirst => "greedy_best_first",
        }
    }
}

/// `max_depth` bounds path length (required for the depth-limited
/// strategies, defaulting to the number of states otherwise);
/// `max_expansions` bounds the number of frontier pops.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_depth: Option<usize>,
    pub max_expansions: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub solution: Option<ActionPath>,
    pub nodes_expanded: usize,
}

/// Classical baselines. `Bfs` and `GreedyBestFirst` are graph searches (each
/// state expanded at most once); the depth-first strategies are tree searches.
/// The goal test is applied when a node is popped, and every pop counts as an
/// expansion.
pub fn classical_search(p: &ProblemSpec, strategy: Strategy, limits: SearchLimits) -> Result<SearchResult> {
    let max_depth = limits.max_depth.unwrap_or(p.num_states());
    let budget = limits.max_expansions.unwrap_or(usize::MAX);
    match strategy {
        Strategy::Bfs => Ok(bfs(p, max_depth, budget)),
        Strategy::DfsDepthLimited => {
            let mut expanded = 0;
            let solution = dls(p, max_depth, budget, &mut expanded);
            Ok(SearchResult { solution, nodes_expanded: expanded })
        }
        Strategy::Iddfs => {
            let mut expanded = 0;
            for limit in 0..=max_depth {
                if let Some(path) = dls(p, limit, budget, &mut expanded) {
                    return Ok(SearchResult { solution: Some(path), nodes_expanded: expanded });
                }
                if expanded >= budget {
                    break;
                }
            }
            Ok(SearchResult { solution: None, nodes_expanded: expanded })
        }
        Strategy::GreedyBestFirst => greedy(p, max_depth, budget),
    }
}

// (state, parent index and action, depth)
type TreeNode = (StateId, Option<(usize, ActionId)>, usize);

// Parent links for graph search.
struct Tree {
    nodes: Vec<TreeNode>,
}

impl Tree {
    fn path(&self, mut i: usize) -> ActionPath {
        let mut path = Vec::new();
        while let Some((parent, a)) = self.nodes[i].1 {
            path.push(a);
            i = parent;
        }
        path.reverse();
        path
    }
}

fn bfs(p: &ProblemSpec, max_depth: usize, budget: usize) -> SearchResult {
    let mut tree = Tree { nodes: vec![(p.root(), None, 0)] };
    let mut queue = VecDeque::from([0usize]);
    let mut seen = HashSet::from([p.root()]);
    let mut expanded = 0;
    while let Some(i) = queue.pop_front() {
        if expanded >= budget {
            break;
        }
        expanded += 1;
        let (s, _, depth) = tree.nodes[i];
        if p.is_goal(s) {
            return SearchResult { solution: Some(tree.path(i)), nodes_expanded: expanded };
        }
        if depth == max_depth {
            continue;
        }
        for &(a, t) in p.edges(s) {
            if seen.insert(t) {
                tree.nodes.push((t, Some((i, a)), depth + 1));
                queue.push_back(tree.nodes.len() - 1);
            }
        }
    }
    SearchResult { solution: None, nodes_expanded: expanded }
}

fn dls(p: &ProblemSpec, limit: usize, budget: usize, expanded: &mut usize) -> Option<ActionPath> {
    let mut stack: Vec<(StateId, ActionPath)> = vec![(p.root(), Vec::new())];
    while let Some((s, path)) = stack.pop() {
        if *expanded >= budget {
            return None;
        }
        *expanded += 1;
        if p.is_goal(s) {
            return Some(path);
        }
        if path.len() == limit {
            continue;
        }
        // Reverse push so the lowest action is explored first.
        for &(a, t) in p.edges(s).iter().rev() {
            let mut next = path.clone();
            next.push(a);
            stack.push((t, next));
        }
    }
    None
}

#[derive(PartialEq)]
struct Frontier {
    h: f64,
    state: StateId,
    node: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    // Min-heap on (h, state index).
    fn cmp(&self, other: &Self) -> Ordering {
        other.h.total_cmp(&self.h).then_with(|| other.state.cmp(&self.state))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn greedy(p: &ProblemSpec, max_depth: usize, budget: usize) -> Result<SearchResult> {
    let h = |s| p.heuristic(s).ok_or(Error::MissingHeuristic);
    let mut tree = Tree { nodes: vec![(p.root(), None, 0)] };
    let mut heap = BinaryHeap::from([Frontier { h: h(p.root())?, state: p.root(), node: 0 }]);
    let mut closed = HashSet::new();
    let mut expanded = 0;
    while let Some(Frontier { state: s, node: i, .. }) = heap.pop() {
        if !closed.insert(s) {
            continue;
        }
        if expanded >= budget {
            break;
        }
        expanded += 1;
        if p.is_goal(s) {
            return Ok(SearchResult { solution: Some(tree.path(i)), nodes_expanded: expanded });
        }
        let depth = tree.nodes[i].2;
        if depth == max_depth {
            continue;
        }
        for &(a, t) in p.edges(s) {
            if !closed.contains(&t) {
                tree.nodes.push((t, Some((i, a)), depth + 1));
                heap.push(Frontier { h: h(t)?, state: t, node: tree.nodes.len() - 1 });
            }
        }
    }
    Ok(SearchResult { solution: None, nodes_expanded: expanded })
}
