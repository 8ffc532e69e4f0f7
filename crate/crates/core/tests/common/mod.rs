//! Oracles and fixtures shared by the integration tests. Expected amplitudes
//! and masses are built from the problem definition alone; the unitarity
//! check drives the crate's operators and compares Gram matrices.

#![allow(dead_code)]

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use proptest::prelude::*;
use qtree::problem::{ActionId, ProblemBuilder, ProblemSpec, StateId};
use qtree::{load_problem, TreeState};

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// Depth at which each shipped fixture is exercised.
pub const FIXTURE_DEPTHS: &[(&str, usize)] = &[
    ("binary_d2", 2),
    ("binary_d3_goal5", 3),
    ("chain_4", 4),
    ("dead_end", 2),
    ("five_leaf", 2),
    ("goalless", 3),
    ("grid_5x5", 8),
    ("misleading", 2),
    ("mixed_tree", 2),
    ("quad_prune", 2),
    ("quaternary_d2", 2),
    ("root_goal", 2),
    ("route_map", 3),
    ("skewed_d4", 4),
];

pub struct Fixture {
    pub name: String,
    pub problem: ProblemSpec,
    pub depth: usize,
}

pub fn load_fixture(name: &str) -> ProblemSpec {
    let path = fixture_dir().join(format!("{name}.problem"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    load_problem(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Every `*.problem` file in the fixture directory, each at its listed depth.
pub fn fixtures() -> Vec<Fixture> {
    let mut names: Vec<String> = std::fs::read_dir(fixture_dir())
        .unwrap()
        .filter_map(|e| {
            let path = e.unwrap().path();
            (path.extension()? == "problem").then(|| path.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|name| {
            let depth = FIXTURE_DEPTHS
                .iter()
                .find(|(n, _)| *n == name)
                .unwrap_or_else(|| panic!("fixture {name} has no depth in FIXTURE_DEPTHS"))
                .1;
            Fixture { problem: load_fixture(&name), name, depth }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub path: Vec<ActionId>,
    pub node: StateId,
    pub dead: bool,
    pub amp: f64,
}

/// Expected superposition tree: each configuration carries the product of
/// `1/sqrt(|A_s|)` along its path. Prefixes that stop at a node without
/// actions before `depth` are reported as dead.
pub fn product_oracle(p: &ProblemSpec, root: StateId, depth: usize) -> Vec<Config> {
    fn walk(p: &ProblemSpec, s: StateId, depth: usize, path: &mut Vec<ActionId>, amp: f64, out: &mut Vec<Config>) {
        if path.len() == depth {
            out.push(Config { path: path.clone(), node: s, dead: false, amp });
            return;
        }
        let edges = p.edges(s);
        if edges.is_empty() {
            out.push(Config { path: path.clone(), node: s, dead: true, amp });
            return;
        }
        let share = amp / (edges.len() as f64).sqrt();
        for &(a, t) in edges {
            path.push(a);
            walk(p, t, depth, path, share, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    walk(p, root, depth, &mut Vec::new(), 1.0, &mut out);
    out
}

/// Initial marked mass by brute force over the oracle's configurations.
pub fn brute_force_mass(p: &ProblemSpec, depth: usize, marks: impl Fn(StateId) -> bool) -> f64 {
    product_oracle(p, p.root(), depth).iter().filter(|c| !c.dead && marks(c.node)).map(|c| c.amp * c.amp).sum()
}

pub fn goal_mass(p: &ProblemSpec, depth: usize) -> f64 {
    brute_force_mass(p, depth, |s| p.is_goal(s))
}

pub fn sparse(x: &TreeState) -> Vec<(usize, Complex64)> {
    x.dense_amplitudes().unwrap().iter().enumerate().filter(|(_, a)| a.norm_sqr() > 0.0).map(|(i, &a)| (i, a)).collect()
}

/// All pairwise inner products `⟨v_i|v_j⟩` for `i <= j`, accumulated over
/// shared support only.
pub fn gram(vectors: &[Vec<(usize, Complex64)>]) -> HashMap<(usize, usize), Complex64> {
    let mut by_index: HashMap<usize, Vec<(usize, Complex64)>> = HashMap::new();
    for (i, v) in vectors.iter().enumerate() {
        for &(idx, a) in v {
            by_index.entry(idx).or_default().push((i, a));
        }
    }
    let mut g = HashMap::new();
    for entries in by_index.values() {
        for &(i, a) in entries {
            for &(j, b) in entries {
                if i <= j {
                    *g.entry((i, j)).or_insert(Complex64::new(0.0, 0.0)) += a.conj() * b;
                }
            }
        }
    }
    g
}

/// Largest entrywise difference between the Gram matrices of `before` and
/// `after`.
pub fn gram_deviation(before: &[Vec<(usize, Complex64)>], after: &[Vec<(usize, Complex64)>]) -> f64 {
    let (g0, g1) = (gram(before), gram(after));
    let zero = Complex64::new(0.0, 0.0);
    g0.keys()
        .chain(g1.keys())
        .map(|k| (g0.get(k).copied().unwrap_or(zero) - g1.get(k).copied().unwrap_or(zero)).norm())
        .fold(0.0, f64::max)
}

/// Random transition graph over at most 12 states and 3 actions. Targets may
/// point anywhere, so merges and cycles occur.
pub fn arb_problem() -> impl Strategy<Value = ProblemSpec> {
    (1usize..=12).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::collection::vec(prop::option::weighted(0.6, 0..n), 3), n),
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec(0.0f64..4.0, n),
        )
            .prop_map(move |(targets, goals, h)| {
                let mut b = ProblemBuilder::new("random");
                let actions: Vec<_> = (0..3).map(|a| b.action(format!("a{a}"))).collect();
                let states: Vec<_> = (0..n).map(|s| b.state(format!("s{s}"))).collect();
                for (s, row) in targets.iter().enumerate() {
                    for (a, t) in row.iter().enumerate() {
                        if let Some(t) = t {
                            b.edge(states[s], actions[a], states[*t]);
                        }
                    }
                    if goals[s] {
                        b.goal(states[s]);
                    }
                    b.heuristic(states[s], h[s]);
                }
                b.root(states[0]);
                b.build().unwrap()
            })
    })
}

pub fn write_temp(dir: &tempfile::TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

/// Worst inner-product deviation of each operator over its declared domain,
/// simulated in dense mode.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitarityReport {
    pub action: f64,
    pub transition: f64,
    pub oracle: f64,
    pub reflection: f64,
}

impl UnitarityReport {
    pub fn worst(&self) -> f64 {
        self.action.max(self.transition).max(self.oracle).max(self.reflection)
    }
}

type SparseVec = Vec<(usize, Complex64)>;

fn basis_images(
    layout: qtree::RegisterLayout,
    root: StateId,
    domain: &[usize],
    mut op: impl FnMut(&mut TreeState),
) -> (Vec<SparseVec>, Vec<SparseVec>) {
    let before = domain.iter().map(|&i| vec![(i, Complex64::new(1.0, 0.0))]).collect();
    let after = domain
        .iter()
        .map(|&i| {
            let mut x = TreeState::dense_basis(layout, root, i).unwrap();
            op(&mut x);
            sparse(&x)
        })
        .collect();
    (before, after)
}

fn support_indices(x: &TreeState) -> Vec<usize> {
    let layout = *x.layout();
    x.entries().unwrap().map(|(path, s)| layout.index(s.node, path)).collect()
}

pub fn unitarity_report(p: &ProblemSpec, depth: usize, seed: u64) -> UnitarityReport {
    use qtree::prep::{apply_action_superposition, apply_transition};
    use qtree::{apply_oracle, reflect_about_prepared, MarkPredicate, PreparationPlan};
    use rand::{Rng, SeedableRng};

    let plan = PreparationPlan::new(p, depth);
    let (layout, root) = (plan.layout, plan.root);
    let mut r = UnitarityReport::default();
    let mut x = plan.ground().unwrap();
    for level in 0..depth {
        let domain = support_indices(&x);
        let (b, a) = basis_images(layout, root, &domain, |y| apply_action_superposition(y, p, level).unwrap());
        r.action = r.action.max(gram_deviation(&b, &a));
        apply_action_superposition(&mut x, p, level).unwrap();

        let domain = support_indices(&x);
        let (b, a) = basis_images(layout, root, &domain, |y| apply_transition(y, p, level).unwrap());
        r.transition = r.transition.max(gram_deviation(&b, &a));
        apply_transition(&mut x, p, level).unwrap();
    }

    let domain = support_indices(&x);
    let goal = MarkPredicate::goal(depth);
    let (b, a) = basis_images(layout, root, &domain, |y| apply_oracle(y, p, &goal).unwrap());
    r.oracle = gram_deviation(&b, &a);

    // Reflection: a bounded set of basis states plus random superpositions
    // over the same support.
    let basis: Vec<usize> = domain.iter().copied().take(48).collect();
    let (mut before, mut after) = basis_images(layout, root, &basis, |y| reflect_about_prepared(y, &plan).unwrap());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let dim = layout.dense_len().unwrap();
    for _ in 0..8 {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        for &i in &domain {
            v[i] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|a| *a /= norm);
        let mut y = TreeState::from_dense(layout, root, v).unwrap();
        before.push(sparse(&y));
        reflect_about_prepared(&mut y, &plan).unwrap();
        after.push(sparse(&y));
    }
    r.reflection = gram_deviation(&before, &after);
    r
}
