use ndarray::{Array1, Array2};

use crate::{Error, Result, C64};

/// Square complex matrix in compressed-row storage.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<C64>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        SparseMatrix {
            dim,
            row_ptr: vec![0; dim + 1],
            cols: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Duplicate entries are summed; exact zeros are dropped.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "triplet ({r}, {c}) outside {dim}x{dim}");
            if last == Some((r, c)) {
                *values.last_mut().expect("previous entry exists") += v;
            } else {
                cols.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        SparseMatrix {
            dim,
            row_ptr,
            cols,
            values,
        }
        .pruned()
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let dim = diag.len();
        Self::from_triplets(dim, diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect())
    }

    fn pruned(self) -> Self {
        if self.values.iter().all(|v| *v != C64::new(0.0, 0.0)) {
            return self;
        }
        let triplets = self
            .iter()
            .filter(|&(_, _, v)| v != C64::new(0.0, 0.0))
            .collect::<Vec<_>>();
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            row_ptr[r + 1] += 1;
            cols.push(c);
            values.push(v);
        }
        for r in 0..self.dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        SparseMatrix {
            dim: self.dim,
            row_ptr,
            cols,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates stored entries as `(row, col, value)` in row order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.values[k]))
        })
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(k) => self.values[range.start + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.iter().map(|(r, c, v)| (c, r, v.conj())).collect())
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self::from_triplets(self.dim, self.iter().map(|(r, c, v)| (r, c, v * factor)).collect())
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(Self::from_triplets(self.dim, self.iter().chain(other.iter()).collect()))
    }

    pub fn matmul(&self, other: &SparseMatrix) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut triplets = Vec::new();
        for (r, k, a) in self.iter() {
            for q in other.row_ptr[k]..other.row_ptr[k + 1] {
                triplets.push((r, other.cols[q], a * other.values[q]));
            }
        }
        Ok(Self::from_triplets(self.dim, triplets))
    }

    pub fn to_dense(&self) -> Array2<C64> {
        let mut out = Array2::zeros((self.dim, self.dim));
        for (r, c, v) in self.iter() {
            out[[r, c]] += v;
        }
        out
    }

    pub fn mul_vec(&self, v: &Array1<C64>) -> Array1<C64> {
        let mut out = Array1::zeros(self.dim);
        for r in 0..self.dim {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * v[self.cols[k]];
            }
            out[r] = acc;
        }
        out
    }

    /// `out = self · dense` for a standard-layout square `dense`.
    pub fn mul_dense_into(&self, dense: &Array2<C64>, out: &mut Array2<C64>) {
        let n = self.dim;
        assert_eq!(dense.dim(), (n, n));
        assert_eq!(out.dim(), (n, n));
        let src = dense.as_slice().expect("dense operand in standard layout");
        let dst = out.as_slice_mut().expect("output in standard layout");
        dst.fill(C64::new(0.0, 0.0));
        for r in 0..n {
            let out_row = &mut dst[r * n..(r + 1) * n];
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let h = self.values[k];
                let c = self.cols[k];
                let in_row = &src[c * n..(c + 1) * n];
                // spelled out so the loop vectorizes
                for (o, x) in out_row.iter_mut().zip(in_row) {
                    o.re += h.re * x.re - h.im * x.im;
                    o.im += h.re * x.im + h.im * x.re;
                }
            }
        }
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|k| self.values[k].norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}
