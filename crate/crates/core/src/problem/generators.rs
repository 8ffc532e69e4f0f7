//! Small problem families used by the fixtures, tests, CLI sweeps and the
//! browser demo.

use super::{ProblemBuilder, ProblemSpec, StateId};

/// Complete `b`-ary tree of depth `d`. `goal_leaves` indexes the `b^d` leaves
/// in lexicographic path order. States are named by their path (`n`, `n0`,
/// `n01`, ...), actions `a0..a{b-1}`.
pub fn uniform_tree(b: usize, d: usize, goal_leaves: &[usize]) -> ProblemSpec {
    assert!((1..=10).contains(&b), "branching factor must be in 1..=10");
    let mut builder = ProblemBuilder::new(format!("uniform_b{b}_d{d}"));
    let actions: Vec<_> = (0..b).map(|a| builder.action(format!("a{a}"))).collect();
    let root = builder.state("n");
    builder.root(root);
    let mut frontier = vec![(root, String::from("n"))];
    for _ in 0..d {
        let mut next = Vec::with_capacity(frontier.len() * b);
        for (s, name) in &frontier {
            for &a in &actions {
                let child_name = format!("{name}{a}");
                let child = builder.state(child_name.clone());
                builder.edge(*s, a, child);
                next.push((child, child_name));
            }
        }
        frontier = next;
    }
    for &leaf in goal_leaves {
        builder.goal(frontier[leaf].0);
    }
    builder.build().expect("uniform tree is valid")
}

/// Chain of `len` forced moves; the last state is the goal.
pub fn chain(len: usize) -> ProblemSpec {
    let mut b = ProblemBuilder::new(format!("chain_{len}"));
    let step = b.action("step");
    let states: Vec<_> = (0..=len).map(|i| b.state(format!("c{i}"))).collect();
    b.root(states[0]).goal(states[len]);
    for w in states.windows(2) {
        b.edge(w[0], step, w[1]);
    }
    for (i, &s) in states.iter().enumerate() {
        b.heuristic(s, (len - i) as f64);
    }
    b.build().expect("chain is valid")
}

fn tree_from_children(name: &str, actions: usize, children: &[&[usize]], goals: &[usize]) -> ProblemSpec {
    // children[s] lists the child state indices of s; action i leads to the i-th child.
    let mut b = ProblemBuilder::new(name);
    for a in 0..actions {
        b.action(format!("a{a}"));
    }
    let n = children.len().max(1 + children.iter().flat_map(|c| c.iter()).copied().max().unwrap_or(0));
    for s in 0..n {
        b.state(format!("s{s}"));
    }
    b.root(0);
    for (s, cs) in children.iter().enumerate() {
        for (a, &c) in cs.iter().enumerate() {
            b.edge(s, a, c);
        }
    }
    for &g in goals {
        b.goal(g);
    }
    b.build().expect("hand-built tree is valid")
}

/// Root with two actions; left child has three, right child one. Goal is the
/// first grandchild.
pub fn mixed_tree() -> ProblemSpec {
    tree_from_children("mixed", 3, &[&[1, 2], &[3, 4, 5], &[6]], &[3])
}

/// Root with two actions; left child has three, right child two. Five leaves
/// at depth 2 with squared amplitudes 1/6, 1/6, 1/6, 1/4, 1/4. Goal is the
/// first leaf (mass 1/6).
pub fn five_leaf() -> ProblemSpec {
    tree_from_children("five_leaf", 3, &[&[1, 2], &[3, 4, 5], &[6, 7]], &[3])
}

/// Root with three actions: a dead-end goal child, a child with two leaves
/// and a child whose only child is a dead end. One depth-2 leaf is a goal.
pub fn dead_end_tree() -> ProblemSpec {
    tree_from_children("dead_end", 3, &[&[1, 2, 3], &[], &[4, 5], &[6]], &[1, 5])
}

/// Complete binary tree of depth 3 without goals.
pub fn goalless() -> ProblemSpec {
    let mut p = uniform_tree(2, 3, &[]);
    p.name = "goalless".into();
    p
}

/// Heavy branching skew: a "wide" node has five children (one wide, four
/// narrow) and a "narrow" node has a single wide child. Branching averages
/// about 2.56 while `b_max` is 5. The goal is the last node generated at
/// `depth`.
pub fn skewed(depth: usize) -> ProblemSpec {
    let mut b = ProblemBuilder::new(format!("skewed_d{depth}"));
    let actions: Vec<_> = (0..5).map(|a| b.action(format!("a{a}"))).collect();
    let root = b.state("r");
    b.root(root);
    let mut frontier = vec![(root, true)];
    for level in 0..depth {
        let mut next = Vec::new();
        for &(s, wide) in &frontier {
            let width = if wide { 5 } else { 1 };
            for (i, &a) in actions.iter().take(width).enumerate() {
                let c = b.state(format!("l{}_{}", level + 1, next.len()));
                b.edge(s, a, c);
                next.push((c, !wide || i == 0));
            }
        }
        frontier = next;
    }
    b.goal(frontier.last().unwrap().0);
    b.build().expect("skewed tree is valid")
}

/// `w × h` four-connected grid starting at `(0, 0)` with the given goal cell
/// and Manhattan-distance heuristic. Actions `U D L R` are admissible where
/// they stay on the grid.
pub fn grid(w: usize, h: usize, goal: (usize, usize)) -> ProblemSpec {
    grid_with_walls(w, h, goal, &[])
}

/// Grid as in [`grid`], with impassable cells removed from the state space.
#[allow(clippy::needless_range_loop)]
pub fn grid_with_walls(w: usize, h: usize, goal: (usize, usize), walls: &[(usize, usize)]) -> ProblemSpec {
    let mut b = ProblemBuilder::new(format!("grid_{w}x{h}"));
    let moves = [("U", 0i64, 1i64), ("D", 0, -1), ("L", -1, 0), ("R", 1, 0)];
    let actions: Vec<_> = moves.iter().map(|m| b.action(m.0)).collect();
    let mut ids = vec![vec![None::<StateId>; h]; w];
    for y in 0..h {
        for x in 0..w {
            if !walls.contains(&(x, y)) {
                ids[x][y] = Some(b.state(format!("c{x}_{y}")));
            }
        }
    }
    for y in 0..h {
        for x in 0..w {
            let Some(s) = ids[x][y] else { continue };
            for (m, &a) in moves.iter().zip(&actions) {
                let (nx, ny) = (x as i64 + m.1, y as i64 + m.2);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                if let Some(t) = ids[nx as usize][ny as usize] {
                    b.edge(s, a, t);
                }
            }
            let dist = x.abs_diff(goal.0) + y.abs_diff(goal.1);
            b.heuristic(s, dist as f64);
        }
    }
    b.root(ids[0][0].expect("start cell is free"));
    b.goal(ids[goal.0][goal.1].expect("goal cell is free"));
    b.build().expect("grid is valid")
}

/// Root with four subtrees of two leaves each. Only subtree 0 satisfies
/// `h <= 1`; the goal is its second leaf. Marking the good subtree at depth 1
/// is the one-in-four case where a single iterate reaches certainty.
pub fn quad_prune() -> ProblemSpec {
    let mut p = tree_from_children("quad_prune", 4, &[&[1, 2, 3, 4], &[5, 6], &[7, 8], &[9, 10], &[11, 12]], &[6]);
    let mut h = vec![4.0; p.num_states()];
    h[0] = 2.0;
    h[1] = 0.0;
    h[6] = 0.0;
    h[5] = 1.0;
    p.heuristic = Some(h);
    p.name = "quad_prune".into();
    p
}

/// Root with two subtrees of two leaves each; only subtree 0 satisfies `h <= 1`.
pub fn two_subtree_prune() -> ProblemSpec {
    let mut p = tree_from_children("two_subtree", 2, &[&[1, 2], &[3, 4], &[5, 6]], &[4]);
    let mut h = vec![4.0; p.num_states()];
    h[1] = 0.0;
    h[4] = 0.0;
    h[3] = 1.0;
    p.heuristic = Some(h);
    p
}

/// The heuristic prefers a branch that leads away from the goal.
pub fn misleading() -> ProblemSpec {
    let mut b = ProblemBuilder::new("misleading");
    let (x, y) = (b.action("x"), b.action("y"));
    let r = b.state("r");
    let decoy: Vec<_> = (0..5).map(|i| b.state(format!("d{i}"))).collect();
    let good = b.state("g0");
    let goal = b.state("goal");
    b.root(r).goal(goal);
    b.edge(r, x, decoy[0]).edge(r, y, good).edge(good, x, goal);
    for w in decoy.windows(2) {
        b.edge(w[0], x, w[1]);
    }
    b.heuristic(r, 3.0).heuristic(good, 5.0).heuristic(goal, 0.0);
    for (i, &d) in decoy.iter().enumerate() {
        b.heuristic(d, 2.0 - 0.25 * i as f64);
    }
    b.build().expect("misleading fixture is valid")
}
