//! Amplitudes over the joint node ⊗ action-path register.
//!
//! The structured representation stores one amplitude per admissible path
//! prefix (the node register is a function of the prefix). The dense
//! representation stores the full `2^total_width` vector and exists so the
//! operators can be checked as linear maps on the actual register.
//!
//! Sampling uses `ChaCha8Rng` seeded with `seed_from_u64`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::problem::{ActionId, ActionPath, ProblemSpec, StateId};
use crate::report::fmt_g12;

pub type Amplitude = Complex64;
pub type SampleRng = ChaCha8Rng;

/// Largest register width materialized densely (16M amplitudes).
pub const MAX_DENSE_WIDTH: u32 = 24;

pub fn sample_rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// Bit widths of the node register followed by `depth` action registers.
/// The node occupies the most significant bits of a dense index and action
/// register 0 the next ones; the last action register is least significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterLayout {
    pub action_width: u32,
    pub depth: usize,
    pub node_width: u32,
    pub total_width: u32,
    pub states: usize,
    pub actions: usize,
}

impl RegisterLayout {
    pub fn new(states: usize, actions: usize, depth: usize) -> Self {
        let action_width = ceil_log2(actions).max(1);
        let node_width = ceil_log2(states);
        RegisterLayout {
            action_width,
            depth,
            node_width,
            total_width: node_width + depth as u32 * action_width,
            states,
            actions,
        }
    }

    pub fn for_problem(p: &ProblemSpec, depth: usize) -> Self {
        Self::new(p.num_states(), p.num_actions(), depth)
    }

    /// Node-register width when nodes are encoded as action strings,
    /// `d * ceil(log2 |A|)`.
    pub fn path_encoded_node_width(&self) -> u32 {
        self.depth as u32 * ceil_log2(self.actions)
    }

    fn action_shift(&self, level: usize) -> u32 {
        (self.depth - 1 - level) as u32 * self.action_width
    }

    fn action_mask(&self) -> usize {
        (1usize << self.action_width) - 1
    }

    /// Dense index of `node` with the action registers holding `path`
    /// (unpopulated registers are 0).
    pub fn index(&self, node: StateId, path: &[ActionId]) -> usize {
        let mut idx = node << (self.depth as u32 * self.action_width);
        for (k, &a) in path.iter().enumerate() {
            idx |= a << self.action_shift(k);
        }
        idx
    }

    pub fn node_of(&self, idx: usize) -> StateId {
        idx >> (self.depth as u32 * self.action_width)
    }

    pub fn register(&self, idx: usize, level: usize) -> ActionId {
        (idx >> self.action_shift(level)) & self.action_mask()
    }

    pub fn with_register(&self, idx: usize, level: usize, a: ActionId) -> usize {
        let shift = self.action_shift(level);
        (idx & !(self.action_mask() << shift)) | (a << shift)
    }

    pub fn with_node(&self, idx: usize, node: StateId) -> usize {
        let shift = self.depth as u32 * self.action_width;
        (idx & ((1usize << shift) - 1)) | (node << shift)
    }

    pub fn registers(&self, idx: usize) -> ActionPath {
        (0..self.depth).map(|k| self.register(idx, k)).collect()
    }

    pub fn dense_len(&self) -> Result<usize> {
        if self.total_width > MAX_DENSE_WIDTH {
            return Err(Error::DenseTooLarge(self.total_width));
        }
        Ok(1usize << self.total_width)
    }
}

/// One stored configuration of the structured representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slot {
    pub node: StateId,
    /// Reached a state without admissible actions before the current level;
    /// the amplitude is frozen from then on.
    pub dead: bool,
    pub amp: Amplitude,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Storage {
    Structured(BTreeMap<ActionPath, Slot>),
    Dense(Vec<Amplitude>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Structured,
    Dense,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeState {
    layout: RegisterLayout,
    root: StateId,
    pub(crate) storage: Storage,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sample {
    /// Populated action registers (structured) or all registers (dense).
    pub path: ActionPath,
    pub node: StateId,
}

impl TreeState {
    /// `|root⟩ ⊗ |0…0⟩`: the empty prefix with amplitude 1.
    pub fn init_ground(layout: RegisterLayout, root: StateId) -> Result<Self> {
        if root >= layout.states {
            return Err(Error::RootOutOfRange { root, states: layout.states });
        }
        let mut map = BTreeMap::new();
        map.insert(Vec::new(), Slot { node: root, dead: false, amp: Amplitude::new(1.0, 0.0) });
        Ok(TreeState { layout, root, storage: Storage::Structured(map) })
    }

    pub fn init_ground_dense(layout: RegisterLayout, root: StateId) -> Result<Self> {
        Self::init_ground(layout, root)?.to_dense()
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn root(&self) -> StateId {
        self.root
    }

    pub fn mode(&self) -> Mode {
        match self.storage {
            Storage::Structured(_) => Mode::Structured,
            Storage::Dense(_) => Mode::Dense,
        }
    }

    /// Stored configurations in lexicographic path order (structured mode only).
    pub fn entries(&self) -> Option<impl Iterator<Item = (&ActionPath, &Slot)>> {
        match &self.storage {
            Storage::Structured(m) => Some(m.iter()),
            Storage::Dense(_) => None,
        }
    }

    /// Stored amplitude for `path` (structured mode only).
    pub fn amplitude(&self, path: &[ActionId]) -> Option<Amplitude> {
        match &self.storage {
            Storage::Structured(m) => m.get(path).map(|s| s.amp),
            Storage::Dense(_) => None,
        }
    }

    /// Dense amplitude vector, materializing it if needed.
    pub fn dense_amplitudes(&self) -> Result<std::borrow::Cow<'_, [Amplitude]>> {
        match &self.storage {
            Storage::Dense(v) => Ok(std::borrow::Cow::Borrowed(v)),
            Storage::Structured(m) => {
                let mut v = vec![Amplitude::new(0.0, 0.0); self.layout.dense_len()?];
                for (path, slot) in m {
                    v[self.layout.index(slot.node, path)] += slot.amp;
                }
                Ok(std::borrow::Cow::Owned(v))
            }
        }
    }

    pub fn to_dense(&self) -> Result<TreeState> {
        Ok(TreeState {
            layout: self.layout,
            root: self.root,
            storage: Storage::Dense(self.dense_amplitudes()?.into_owned()),
        })
    }

    /// A dense basis state `|idx⟩` for operator checks.
    pub fn dense_basis(layout: RegisterLayout, root: StateId, idx: usize) -> Result<TreeState> {
        let mut v = vec![Amplitude::new(0.0, 0.0); layout.dense_len()?];
        v[idx] = Amplitude::new(1.0, 0.0);
        Ok(TreeState { layout, root, storage: Storage::Dense(v) })
    }

    pub fn from_dense(layout: RegisterLayout, root: StateId, amplitudes: Vec<Amplitude>) -> Result<TreeState> {
        if amplitudes.len() != layout.dense_len()? {
            return Err(Error::LayoutMismatch);
        }
        Ok(TreeState { layout, root, storage: Storage::Dense(amplitudes) })
    }

    pub fn norm_sqr(&self) -> f64 {
        match &self.storage {
            Storage::Structured(m) => m.values().map(|s| s.amp.norm_sqr()).sum(),
            Storage::Dense(v) => v.iter().map(|a| a.norm_sqr()).sum(),
        }
    }

    pub fn scale(&mut self, factor: Amplitude) {
        match &mut self.storage {
            Storage::Structured(m) => m.values_mut().for_each(|s| s.amp *= factor),
            Storage::Dense(v) => v.iter_mut().for_each(|a| *a *= factor),
        }
    }

    /// Number of configurations with nonzero amplitude.
    pub fn support_len(&self) -> usize {
        match &self.storage {
            Storage::Structured(m) => m.values().filter(|s| s.amp != Amplitude::new(0.0, 0.0)).count(),
            Storage::Dense(v) => v.iter().filter(|a| **a != Amplitude::new(0.0, 0.0)).count(),
        }
    }

    /// Draws `samples` configurations i.i.d. from `|amplitude|²`.
    pub fn measure_paths(&self, samples: usize, seed: u64) -> Result<Vec<Sample>> {
        self.measure_with(&mut sample_rng(seed), samples)
    }

    pub fn measure_with(&self, rng: &mut SampleRng, samples: usize) -> Result<Vec<Sample>> {
        // Cumulative weights in storage order keep sampling deterministic.
        let (cumulative, outcomes): (Vec<f64>, Vec<Sample>) = match &self.storage {
            Storage::Structured(m) => {
                let mut acc = 0.0;
                m.iter()
                    .filter(|(_, s)| s.amp.norm_sqr() > 0.0)
                    .map(|(path, s)| {
                        acc += s.amp.norm_sqr();
                        (acc, Sample { path: path.clone(), node: s.node })
                    })
                    .unzip()
            }
            Storage::Dense(v) => {
                let mut acc = 0.0;
                v.iter()
                    .enumerate()
                    .filter(|(_, a)| a.norm_sqr() > 0.0)
                    .map(|(i, a)| {
                        acc += a.norm_sqr();
                        (acc, Sample { path: self.layout.registers(i), node: self.layout.node_of(i) })
                    })
                    .unzip()
            }
        };
        let total = cumulative.last().copied().unwrap_or(0.0);
        if total <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok((0..samples)
            .map(|_| {
                let u = rng.random::<f64>() * total;
                let i = cumulative.partition_point(|&c| c <= u).min(outcomes.len() - 1);
                outcomes[i].clone()
            })
            .collect())
    }

    /// One record per nonzero amplitude, sorted by path:
    /// `path=<a0,a1,...> node=<s> re=<float> im=<float>`.
    pub fn dump(&self) -> Result<String> {
        let Storage::Structured(m) = &self.storage else {
            return Err(Error::Precondition("state dump needs the structured representation".into()));
        };
        let mut out = String::new();
        for (path, slot) in m {
            if slot.amp == Amplitude::new(0.0, 0.0) {
                continue;
            }
            let joined: Vec<String> = path.iter().map(|a| a.to_string()).collect();
            let _ = writeln!(
                out,
                "path=<{}> node={} re={} im={}",
                joined.join(","),
                slot.node,
                fmt_g12(slot.amp.re),
                fmt_g12(slot.amp.im)
            );
        }
        Ok(out)
    }
}

/// `⟨x|y⟩` over the joint register. Mixed representations are compared
/// densely.
pub fn inner_product(x: &TreeState, y: &TreeState) -> Result<Amplitude> {
    if x.layout != y.layout {
        return Err(Error::LayoutMismatch);
    }
    match (&x.storage, &y.storage) {
        (Storage::Structured(a), Storage::Structured(b)) => {
            let (small, large, conj_small) = if a.len() <= b.len() { (a, b, true) } else { (b, a, false) };
            let mut sum = Amplitude::new(0.0, 0.0);
            for (path, s) in small {
                if let Some(t) = large.get(path) {
                    if s.node == t.node {
                        sum += if conj_small { s.amp.conj() * t.amp } else { t.amp.conj() * s.amp };
                    }
                }
            }
            Ok(sum)
        }
        _ => {
            let (a, b) = (x.dense_amplitudes()?, y.dense_amplitudes()?);
            Ok(a.iter().zip(b.iter()).map(|(u, v)| u.conj() * v).sum())
        }
    }
}
