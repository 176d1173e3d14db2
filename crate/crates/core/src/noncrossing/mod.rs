//! Non-crossing partitions, the Kreweras complement, and the cumulant sums
//! built on them.

mod functionals;

pub use functionals::{
    mixed_r_m1_comb, moment_py_cumulant, r_m1_inner_compositions, r_m1_inner_laguerre,
    trace_functional, weight_sum, weight_sum_closed, Letter, LetterWord,
};

use thiserror::Error;

/// Largest ground set `enumerate_nc` accepts.
pub const MAX_GROUND_SET: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NcError {
    #[error("ground set of size {0} exceeds the enumeration cap of {MAX_GROUND_SET}")]
    GroundSetTooLarge(usize),
    #[error("ground set must be non-empty")]
    EmptyGroundSet,
    #[error("word of length {word} evaluated against a partition of {n} points")]
    LengthMismatch { word: usize, n: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("index out of range: {0}")]
    Range(String),
}

/// A non-crossing partition of `{1, ..., n}`.
///
/// Blocks are sorted internally and ordered by their smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NcPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl NcPartition {
    /// Validates and canonicalizes a partition given as 1-based blocks.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self, NcError> {
        if n == 0 {
            return Err(NcError::EmptyGroundSet);
        }
        let mut seen = vec![false; n + 1];
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .filter(|b| !b.is_empty())
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        for b in &blocks {
            for &x in b {
                if x == 0 || x > n {
                    return Err(NcError::InvalidPartition(format!(
                        "element {x} outside 1..={n}"
                    )));
                }
                if std::mem::replace(&mut seen[x], true) {
                    return Err(NcError::InvalidPartition(format!("element {x} repeated")));
                }
            }
        }
        if let Some(x) = (1..=n).find(|&x| !seen[x]) {
            return Err(NcError::InvalidPartition(format!(
                "element {x} not covered"
            )));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        let p = Self { n, blocks };
        if !p.is_noncrossing() {
            return Err(NcError::InvalidPartition("blocks cross".into()));
        }
        Ok(p)
    }

    /// Builds a partition from block labels of `1..=n` (label of element
    /// `i` at index `i - 1`). Labels need not be contiguous.
    pub fn from_labels(labels: &[usize]) -> Result<Self, NcError> {
        let mut order: Vec<usize> = Vec::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, &l) in labels.iter().enumerate() {
            match order.iter().position(|&o| o == l) {
                Some(b) => blocks[b].push(i + 1),
                None => {
                    order.push(l);
                    blocks.push(vec![i + 1]);
                }
            }
        }
        Self::new(labels.len(), blocks)
    }

    /// All singletons.
    pub fn finest(n: usize) -> Self {
        Self {
            n,
            blocks: (1..=n).map(|i| vec![i]).collect(),
        }
    }

    /// The single block `{1, ..., n}`.
    pub fn coarsest(n: usize) -> Self {
        Self {
            n,
            blocks: vec![(1..=n).collect()],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of blocks, `|pi|`.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block index of each element, 0-based in both.
    pub fn labels(&self) -> Vec<usize> {
        let mut l = vec![0; self.n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &x in block {
                l[x - 1] = b;
            }
        }
        l
    }

    /// Stack scan: a block may only be revisited while it is on top.
    fn is_noncrossing(&self) -> bool {
        let labels = self.labels();
        let last: Vec<usize> = self.blocks.iter().map(|b| *b.last().unwrap()).collect();
        let first: Vec<usize> = self.blocks.iter().map(|b| b[0]).collect();
        let mut stack: Vec<usize> = Vec::new();
        for i in 1..=self.n {
            let b = labels[i - 1];
            if first[b] != i && stack.last() != Some(&b) {
                return false;
            }
            if first[b] == i && last[b] != i {
                stack.push(b);
            } else if first[b] != i && last[b] == i {
                stack.pop();
            }
        }
        true
    }

    /// The partition as a permutation: each block `a1 < ... < ak` becomes
    /// the cycle `a1 -> a2 -> ... -> ak -> a1`. 0-based.
    fn as_permutation(&self) -> Vec<usize> {
        let mut p = vec![0; self.n];
        for b in &self.blocks {
            for (i, &x) in b.iter().enumerate() {
                p[x - 1] = b[(i + 1) % b.len()] - 1;
            }
        }
        p
    }

    fn from_permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut seen = vec![false; n];
        let mut blocks = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut block = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                block.push(x + 1);
                x = perm[x];
            }
            block.sort_unstable();
            blocks.push(block);
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Self { n, blocks }
    }

    /// Kreweras complement.
    ///
    /// Element `i` of the complement stands for the point placed between
    /// `i` and `i + 1` (cyclically). As permutations, `K(pi) = pi^{-1} o c`
    /// with `c` the long cycle `i -> i + 1`.
    pub fn kreweras(&self) -> Self {
        let p = self.as_permutation();
        let mut inv = vec![0; self.n];
        for (i, &x) in p.iter().enumerate() {
            inv[x] = i;
        }
        let k: Vec<usize> = (0..self.n).map(|i| inv[(i + 1) % self.n]).collect();
        Self::from_permutation(&k)
    }

    /// Relabels `i -> i + shift (mod n)`.
    pub fn rotate(&self, shift: isize) -> Self {
        let n = self.n as isize;
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&x| ((x as isize - 1 + shift).rem_euclid(n) + 1) as usize)
                    .collect()
            })
            .collect();
        Self::new(self.n, blocks).expect("rotation preserves non-crossing partitions")
    }
}

impl std::fmt::Display for NcPartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for b in &self.blocks {
            let items: Vec<String> = b.iter().map(usize::to_string).collect();
            write!(f, "{{{}}}", items.join(","))?;
        }
        Ok(())
    }
}

/// Lazily enumerates `NC(n)` in lexicographic order of block labels.
///
/// Partial assignments keep a stack of the blocks that can still grow: a
/// new element may join any of them (closing every block above it) or open
/// a new one. Crossing partitions are never constructed.
pub fn enumerate_nc(n: usize) -> Result<NcIter, NcError> {
    if n == 0 {
        return Err(NcError::EmptyGroundSet);
    }
    if n > MAX_GROUND_SET {
        return Err(NcError::GroundSetTooLarge(n));
    }
    Ok(NcIter {
        n,
        labels: vec![0; n],
        stacks: vec![Vec::new(); n],
        counts: vec![0; n],
        choice: vec![0; n],
        started: false,
        done: false,
    })
}

#[derive(Debug, Clone)]
pub struct NcIter {
    n: usize,
    labels: Vec<usize>,
    /// Open blocks before element `d` is placed.
    stacks: Vec<Vec<usize>>,
    /// Number of blocks before element `d` is placed.
    counts: Vec<usize>,
    choice: Vec<usize>,
    started: bool,
    done: bool,
}

impl NcIter {
    /// Places element `d` according to `choice[d]` and prepares level `d+1`.
    fn apply(&mut self, d: usize) {
        let c = self.choice[d];
        let mut stack = self.stacks[d].clone();
        let mut count = self.counts[d];
        if c == stack.len() {
            self.labels[d] = count;
            stack.push(count);
            count += 1;
        } else {
            self.labels[d] = stack[c];
            stack.truncate(c + 1);
        }
        if d + 1 < self.n {
            self.stacks[d + 1] = stack;
            self.counts[d + 1] = count;
        }
    }

    fn fill_from(&mut self, d: usize) {
        for e in d..self.n {
            self.choice[e] = 0;
            self.apply(e);
        }
    }

    fn current(&self) -> NcPartition {
        let k = self.labels.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); k];
        for (i, &l) in self.labels.iter().enumerate() {
            blocks[l].push(i + 1);
        }
        NcPartition { n: self.n, blocks }
    }
}

impl Iterator for NcIter {
    type Item = NcPartition;

    fn next(&mut self) -> Option<NcPartition> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.fill_from(0);
            return Some(self.current());
        }
        let mut d = self.n - 1;
        loop {
            self.choice[d] += 1;
            if self.choice[d] <= self.stacks[d].len() {
                self.apply(d);
                self.fill_from(d + 1);
                return Some(self.current());
            }
            if d == 0 {
                self.done = true;
                return None;
            }
            d -= 1;
        }
    }
}
