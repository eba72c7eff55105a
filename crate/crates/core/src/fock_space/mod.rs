//! Truncated many-excitation Hilbert space of the chain: basis enumeration,
//! spin operators, effective Hamiltonian embedding and the master equation.

mod basis;
mod master;
mod sparse;

pub use basis::{truncated_dimension, TruncatedBasis, MAX_EXCITATIONS};
pub use master::{me_rhs, MasterEquation};
pub use sparse::SparseMatrix;

use ndarray::{Array1, Array2};

use crate::{Error, Result, C64};

/// `σ_ge` of atom `n` (zero-based): removes atom `n` from every excitation
/// set that contains it.
pub fn lowering_operator(n: usize, basis: &TruncatedBasis) -> Result<SparseMatrix> {
    if n >= basis.n_atoms() {
        return Err(Error::IndexOutOfRange(format!(
            "atom {n} in a chain of {}",
            basis.n_atoms()
        )));
    }
    let mut triplets = Vec::new();
    let mut reduced = Vec::with_capacity(basis.n_max());
    for col in 0..basis.dim() {
        let state = basis.state(col);
        if !state.contains(&n) {
            continue;
        }
        reduced.clear();
        reduced.extend(state.iter().copied().filter(|&m| m != n));
        let row = basis
            .index_of(&reduced)
            .expect("lower manifold is always inside the truncation");
        triplets.push((row, col, C64::new(1.0, 0.0)));
    }
    Ok(SparseMatrix::from_triplets(basis.dim(), triplets))
}

/// `σ_eg` of atom `n`; annihilates states already holding `n` and states in
/// the top manifold.
pub fn raising_operator(n: usize, basis: &TruncatedBasis) -> Result<SparseMatrix> {
    Ok(lowering_operator(n, basis)?.adjoint())
}

/// Diagonal operator counting excitations.
pub fn number_operator(basis: &TruncatedBasis) -> SparseMatrix {
    let diag: Vec<C64> = (0..basis.dim())
        .map(|i| C64::new(basis.excitations(i) as f64, 0.0))
        .collect();
    SparseMatrix::from_diagonal(&diag)
}

/// Embeds `Σ_mn h_mn σ_eg^m σ_ge^n` into every manifold of the basis.
pub fn embed_hamiltonian(h_single: &Array2<C64>, basis: &TruncatedBasis) -> Result<SparseMatrix> {
    let n_atoms = basis.n_atoms();
    if h_single.dim() != (n_atoms, n_atoms) {
        return Err(Error::DimensionMismatch {
            expected: n_atoms,
            found: h_single.nrows(),
        });
    }
    let mut triplets = Vec::new();
    let mut moved = Vec::with_capacity(basis.n_max());
    for col in 0..basis.dim() {
        let state = basis.state(col);
        for &n in state {
            triplets.push((col, col, h_single[[n, n]]));
            for m in 0..n_atoms {
                if state.contains(&m) {
                    continue;
                }
                moved.clear();
                moved.extend(state.iter().map(|&k| if k == n { m } else { k }));
                moved.sort_unstable();
                let row = basis.index_of(&moved).expect("hopping preserves the manifold");
                triplets.push((row, col, h_single[[m, n]]));
            }
        }
    }
    Ok(SparseMatrix::from_triplets(basis.dim(), triplets))
}

/// Dense block of an embedded operator restricted to manifold `k`.
pub fn manifold_block(op: &SparseMatrix, basis: &TruncatedBasis, k: usize) -> Array2<C64> {
    let range = basis.manifold(k);
    let d = range.len();
    let mut out = Array2::zeros((d, d));
    for (r, c, v) in op.iter() {
        if range.contains(&r) && range.contains(&c) {
            out[[r - range.start, c - range.start]] += v;
        }
    }
    out
}

/// Places manifold-`k` amplitudes into a full basis vector.
pub fn embed_manifold_vector(
    amplitudes: &Array1<C64>,
    basis: &TruncatedBasis,
    k: usize,
) -> Result<Array1<C64>> {
    let range = basis.manifold(k);
    if amplitudes.len() != range.len() {
        return Err(Error::DimensionMismatch {
            expected: range.len(),
            found: amplitudes.len(),
        });
    }
    let mut v = Array1::zeros(basis.dim());
    for (i, a) in range.zip(amplitudes.iter()) {
        v[i] = *a;
    }
    Ok(v)
}

/// Hermitian, unit-trace state over a [`TruncatedBasis`].
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: Array2<C64>,
    n_atoms: usize,
    n_max: usize,
}

impl DensityMatrix {
    pub fn ground(basis: &TruncatedBasis) -> Self {
        let mut matrix = Array2::zeros((basis.dim(), basis.dim()));
        matrix[[0, 0]] = C64::new(1.0, 0.0);
        DensityMatrix {
            matrix,
            n_atoms: basis.n_atoms(),
            n_max: basis.n_max(),
        }
    }

    /// `|ψ⟩⟨ψ|` for a normalized copy of `psi`.
    pub fn pure(basis: &TruncatedBasis, psi: &Array1<C64>) -> Result<Self> {
        basis.check_dim(psi.len())?;
        let norm = psi.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Domain("cannot normalize a zero state".into()));
        }
        let d = psi.len();
        let matrix = Array2::from_shape_fn((d, d), |(i, j)| psi[i] * psi[j].conj() / (norm * norm));
        Ok(DensityMatrix {
            matrix,
            n_atoms: basis.n_atoms(),
            n_max: basis.n_max(),
        })
    }

    /// Wraps a matrix after checking shape and Hermiticity (within 1e-10).
    pub fn from_matrix(basis: &TruncatedBasis, matrix: Array2<C64>) -> Result<Self> {
        basis.check_dim(matrix.nrows())?;
        basis.check_dim(matrix.ncols())?;
        let d = matrix.nrows();
        for i in 0..d {
            for j in 0..=i {
                if (matrix[[i, j]] - matrix[[j, i]].conj()).norm() > 1e-10 {
                    return Err(Error::Domain(format!("matrix is not Hermitian at ({i}, {j})")));
                }
            }
        }
        Ok(DensityMatrix {
            matrix: matrix.as_standard_layout().to_owned(),
            n_atoms: basis.n_atoms(),
            n_max: basis.n_max(),
        })
    }

    #[cfg(test)]
    pub(crate) fn from_raw(basis: &TruncatedBasis, matrix: Array2<C64>) -> Self {
        DensityMatrix {
            matrix,
            n_atoms: basis.n_atoms(),
            n_max: basis.n_max(),
        }
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut Array2<C64> {
        &mut self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diag().iter().map(|x| x.re).sum()
    }

    pub fn check_basis(&self, basis: &TruncatedBasis) -> Result<()> {
        if self.n_atoms != basis.n_atoms() || self.n_max != basis.n_max() {
            return Err(Error::BasisMismatch(format!(
                "state lives on (N = {}, n_max = {}), basis is (N = {}, n_max = {})",
                self.n_atoms,
                self.n_max,
                basis.n_atoms(),
                basis.n_max()
            )));
        }
        Ok(())
    }

    /// Replaces the matrix with its Hermitian part.
    pub fn hermitize(&mut self) {
        hermitize(&mut self.matrix);
    }

    /// Largest deviation `|ρ_ij - conj(ρ_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..i {
                worst = worst.max((self.matrix[[i, j]] - self.matrix[[j, i]].conj()).norm());
            }
        }
        worst
    }

    /// `Re⟨v|ρ|v⟩`.
    pub fn expectation_projector(&self, v: &Array1<C64>) -> f64 {
        let rv = self.matrix.dot(v);
        v.iter().zip(rv.iter()).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Applies `ρ_ST ← ρ_ST e^{-iφ(n_S - n_T)}`.
    pub(crate) fn rotate_frame(&mut self, basis: &TruncatedBasis, phase: f64) {
        let d = self.dim();
        let counts: Vec<f64> = (0..d).map(|i| basis.excitations(i) as f64).collect();
        for i in 0..d {
            for j in 0..d {
                let dn = counts[i] - counts[j];
                if dn != 0.0 {
                    self.matrix[[i, j]] *= C64::new(0.0, -phase * dn).exp();
                }
            }
        }
    }
}

pub(crate) fn hermitize(m: &mut Array2<C64>) {
    let d = m.nrows();
    for i in 0..d {
        m[[i, i]].im = 0.0;
        for j in 0..i {
            let avg = (m[[i, j]] + m[[j, i]].conj()) * 0.5;
            m[[i, j]] = avg;
            m[[j, i]] = avg.conj();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense 2^N tensor-product construction, projected on the truncated
    /// basis. Qubit `n` is the n-th most significant bit; bit set = excited.
    fn tensor_lowering(n: usize, n_atoms: usize) -> Array2<f64> {
        let dim = 1usize << n_atoms;
        let mut op = Array2::<f64>::eye(1);
        for k in 0..n_atoms {
            let local = if k == n {
                // |g><e| in the (g, e) ordering
                ndarray::arr2(&[[0.0, 1.0], [0.0, 0.0]])
            } else {
                Array2::<f64>::eye(2)
            };
            op = kron(&op, &local);
        }
        assert_eq!(op.nrows(), dim);
        op
    }

    fn kron(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
        let (ra, ca) = a.dim();
        let (rb, cb) = b.dim();
        Array2::from_shape_fn((ra * rb, ca * cb), |(i, j)| a[[i / rb, j / cb]] * b[[i % rb, j % cb]])
    }

    fn bitstring(set: &[usize], n_atoms: usize) -> usize {
        set.iter().map(|&k| 1usize << (n_atoms - 1 - k)).sum()
    }

    #[test]
    fn lowering_matches_tensor_product_construction() {
        let basis = TruncatedBasis::new(3, 2).unwrap();
        for n in 0..3 {
            let sparse = lowering_operator(n, &basis).unwrap().to_dense();
            let full = tensor_lowering(n, 3);
            for i in 0..basis.dim() {
                for j in 0..basis.dim() {
                    let fi = bitstring(basis.state(i), 3);
                    let fj = bitstring(basis.state(j), 3);
                    assert_eq!(sparse[[i, j]].re, full[[fi, fj]], "atom {n} entry ({i}, {j})");
                    assert_eq!(sparse[[i, j]].im, 0.0);
                }
            }
        }
    }

    #[test]
    fn lowering_is_nilpotent_and_raising_projects() {
        let basis = TruncatedBasis::new(5, 3).unwrap();
        for n in 0..5 {
            let low = lowering_operator(n, &basis).unwrap();
            assert_eq!(low.matmul(&low).unwrap().nnz(), 0);
            let proj = raising_operator(n, &basis).unwrap().matmul(&low).unwrap();
            for i in 0..basis.dim() {
                let expected = if basis.state(i).contains(&n) { 1.0 } else { 0.0 };
                assert_eq!(proj.get(i, i).re, expected);
            }
            assert_eq!(proj.nnz(), basis.states().iter().filter(|s| s.contains(&n)).count());
        }
    }

    #[test]
    fn raising_truncates_at_top_manifold() {
        let basis = TruncatedBasis::new(4, 2).unwrap();
        let up = raising_operator(0, &basis).unwrap();
        let pair = basis.index_of(&[1, 2]).unwrap();
        for r in 0..basis.dim() {
            assert_eq!(up.get(r, pair), C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn embedded_hamiltonian_matches_operator_products() {
        let basis = TruncatedBasis::new(4, 3).unwrap();
        let h = Array2::from_shape_fn((4, 4), |(m, n)| {
            C64::new(0.1 * (m + n) as f64, if m == n { -0.5 } else { 0.05 * (m * n) as f64 })
        });
        let embedded = embed_hamiltonian(&h, &basis).unwrap().to_dense();
        let mut reference = Array2::<C64>::zeros((basis.dim(), basis.dim()));
        for m in 0..4 {
            for n in 0..4 {
                let up = raising_operator(m, &basis).unwrap();
                let low = lowering_operator(n, &basis).unwrap();
                reference = reference + up.matmul(&low).unwrap().to_dense() * h[[m, n]];
            }
        }
        for (a, b) in embedded.iter().zip(reference.iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn frame_rotation_leaves_populations() {
        let basis = TruncatedBasis::new(3, 2).unwrap();
        let psi = Array1::from_shape_fn(basis.dim(), |i| C64::new(1.0, 0.3 * i as f64));
        let mut rho = DensityMatrix::pure(&basis, &psi).unwrap();
        let before = rho.matrix().diag().to_owned();
        rho.rotate_frame(&basis, 0.7);
        assert!(rho.hermiticity_error() < 1e-14);
        for (a, b) in before.iter().zip(rho.matrix().diag().iter()) {
            assert!((a - b).norm() < 1e-15);
        }
    }
}
