use std::collections::HashMap;
use std::ops::Range;

use crate::{Error, Result};

/// Hilbert space of `n_atoms` two-level atoms truncated to at most `n_max`
/// excitations.
///
/// States are excitation sets (sorted zero-based atom indices) ordered by
/// manifold, lexicographically inside each manifold: the ground state first,
/// then the N singles, then pairs `(m < n)`, then triples.
#[derive(Clone, Debug)]
pub struct TruncatedBasis {
    n_atoms: usize,
    n_max: usize,
    states: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    offsets: Vec<usize>,
}

/// Highest truncation supported.
pub const MAX_EXCITATIONS: usize = 3;

impl TruncatedBasis {
    pub fn new(n_atoms: usize, n_max: usize) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::Config("basis needs at least one atom".into()));
        }
        if n_max == 0 || n_max > MAX_EXCITATIONS {
            return Err(Error::Config(format!(
                "n_max must be in 1..={MAX_EXCITATIONS}, got {n_max}"
            )));
        }
        if n_max > n_atoms {
            return Err(Error::Config(format!(
                "n_max = {n_max} exceeds the number of atoms {n_atoms}"
            )));
        }
        let mut states: Vec<Vec<usize>> = vec![Vec::new()];
        let mut offsets = vec![0, 1];
        for k in 1..=n_max {
            combinations(n_atoms, k, &mut states);
            offsets.push(states.len());
        }
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(TruncatedBasis {
            n_atoms,
            n_max,
            states,
            index,
            offsets,
        })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn state(&self, i: usize) -> &[usize] {
        &self.states[i]
    }

    pub fn states(&self) -> &[Vec<usize>] {
        &self.states
    }

    /// Index of an excitation set; the set must be sorted.
    pub fn index_of(&self, set: &[usize]) -> Option<usize> {
        self.index.get(set).copied()
    }

    pub fn excitations(&self, i: usize) -> usize {
        self.states[i].len()
    }

    /// Basis indices spanning the manifold with `k` excitations.
    pub fn manifold(&self, k: usize) -> Range<usize> {
        if k > self.n_max {
            return self.dim()..self.dim();
        }
        self.offsets[k]..self.offsets[k + 1]
    }

    pub fn manifold_dim(&self, k: usize) -> usize {
        self.manifold(k).len()
    }

    /// Index of the pair `{m, n}` (any order).
    pub fn pair_index(&self, m: usize, n: usize) -> Option<usize> {
        if m == n {
            return None;
        }
        let (lo, hi) = if m < n { (m, n) } else { (n, m) };
        self.index_of(&[lo, hi])
    }

    /// True when `other` enumerates the same space.
    pub fn same_space(&self, other: &TruncatedBasis) -> bool {
        self.n_atoms == other.n_atoms && self.n_max == other.n_max
    }

    pub(crate) fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }
}

/// Number of states with at most `n_max` excitations, `Σ_k C(N, k)`.
pub fn truncated_dimension(n_atoms: usize, n_max: usize) -> usize {
    let mut total = 0usize;
    let mut binom = 1usize;
    for k in 0..=n_max.min(n_atoms) {
        total += binom;
        binom = binom * (n_atoms - k) / (k + 1);
    }
    total
}

fn combinations(n: usize, k: usize, out: &mut Vec<Vec<usize>>) {
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        // rightmost slot that can still advance
        let mut i = k;
        while i > 0 && current[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        current[i - 1] += 1;
        for j in i..k {
            current[j] = current[j - 1] + 1;
        }
    }
}
