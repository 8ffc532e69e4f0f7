use super::ProblemSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchingStats {
    /// Largest `|A_s|` over nodes expanded above depth `d`.
    pub b_max: usize,
    /// Mean `|A_s|` over expanded internal nodes (nodes with at least one child).
    pub b_avg: f64,
    /// Branching factor of the uniform tree generating the same node count.
    pub b_eff: f64,
    /// Nodes generated below the root up to depth `d`.
    pub generated: u128,
    pub internal: u128,
    pub depth: usize,
}

/// Expands the search tree (not the state graph) to `depth` and summarizes its
/// branching. Node multiplicities are tracked per state so repeated states in
/// cyclic problems do not blow up memory.
pub fn branching_stats(p: &ProblemSpec, depth: usize) -> Result<BranchingStats> {
    let mut level = vec![0u128; p.num_states()];
    level[p.root()] = 1;
    let mut generated = 0u128;
    let mut internal = 0u128;
    let mut branch_sum = 0u128;
    let mut b_max = 0;
    for _ in 0..depth {
        let mut next = vec![0u128; p.num_states()];
        for (s, &count) in level.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let b = p.admissible(s).len();
            b_max = b_max.max(b);
            if b > 0 {
                internal += count;
                branch_sum += count * b as u128;
            }
            for &(_, t) in p.edges(s) {
                next[t] += count;
            }
        }
        generated += next.iter().sum::<u128>();
        level = next;
    }
    if internal == 0 {
        return Err(Error::UndefinedStats { depth });
    }
    Ok(BranchingStats {
        b_max,
        b_avg: branch_sum as f64 / internal as f64,
        b_eff: effective_branching(generated as f64, depth, b_max as f64),
        generated,
        internal,
        depth,
    })
}

/// Solves `N + 1 = 1 + x + ... + x^d` for `x` by bisection on `[1, b_max]`.
pub fn effective_branching(generated: f64, depth: usize, b_max: f64) -> f64 {
    if generated <= depth as f64 {
        return 1.0;
    }
    let excess = |x: f64| (1..=depth).map(|i| x.powi(i as i32)).sum::<f64>() - generated;
    let (mut lo, mut hi) = (1.0, b_max.max(1.0));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}
