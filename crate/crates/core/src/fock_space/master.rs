use ndarray::Array2;

use super::{DensityMatrix, SparseMatrix, TruncatedBasis};
use crate::{Error, Result, C64};

/// Right-hand side of the collective master equation
///
/// ```text
/// dρ/dt = -i(Hρ - ρH†) + Σ_mn Γ_mn σ_ge^m ρ σ_eg^n
/// ```
///
/// on a fixed truncated basis. The recycling sum never forms the `N²`
/// operator products: `(σ_ge^m ρ σ_eg^n)_ST = ρ_{S+m, T+n}` for `m ∉ S`,
/// `n ∉ T`, so it is gathered from precomputed raising links.
#[derive(Clone, Debug)]
pub struct MasterEquation {
    decay: Array2<f64>,
    /// For every basis state `S`, the pairs `(m, index(S ∪ {m}))`.
    up_links: Vec<Vec<(usize, usize)>>,
    /// States with at least one raising link.
    sources: Vec<usize>,
    excitations: Vec<f64>,
}

impl MasterEquation {
    pub fn new(basis: &TruncatedBasis, decay: &Array2<f64>) -> Result<Self> {
        let n = basis.n_atoms();
        if decay.dim() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: decay.nrows(),
            });
        }
        let mut up_links = vec![Vec::new(); basis.dim()];
        let mut grown = Vec::with_capacity(basis.n_max());
        for (s, links) in up_links.iter_mut().enumerate() {
            let state = basis.state(s);
            if state.len() == basis.n_max() {
                continue;
            }
            for m in 0..n {
                if state.contains(&m) {
                    continue;
                }
                grown.clear();
                grown.extend_from_slice(state);
                grown.push(m);
                grown.sort_unstable();
                let idx = basis.index_of(&grown).expect("state below the truncation");
                links.push((m, idx));
            }
        }
        let sources = (0..basis.dim()).filter(|&s| !up_links[s].is_empty()).collect();
        let excitations = (0..basis.dim()).map(|i| basis.excitations(i) as f64).collect();
        Ok(MasterEquation {
            decay: decay.clone(),
            up_links,
            sources,
            excitations,
        })
    }

    pub fn dim(&self) -> usize {
        self.up_links.len()
    }

    pub fn decay(&self) -> &Array2<f64> {
        &self.decay
    }

    /// Writes `dρ/dt` into `out`. `rho` must be Hermitian (the Hamiltonian
    /// part uses `ρH† = (Hρ)†`); `work` is scratch of the same shape.
    pub fn rhs_into(
        &self,
        rho: &Array2<C64>,
        h: &SparseMatrix,
        work: &mut Array2<C64>,
        out: &mut Array2<C64>,
    ) {
        let d = self.dim();
        debug_assert_eq!(rho.dim(), (d, d));
        h.mul_dense_into(rho, work);
        // -i(W - W†) with W = Hρ
        for i in 0..d {
            for j in 0..d {
                let z = work[[i, j]] - work[[j, i]].conj();
                out[[i, j]] = C64::new(z.im, -z.re);
            }
        }
        self.add_recycling(rho, out);
    }

    pub fn rhs(&self, rho: &Array2<C64>, h: &SparseMatrix) -> Array2<C64> {
        let d = self.dim();
        let mut work = Array2::zeros((d, d));
        let mut out = Array2::zeros((d, d));
        self.rhs_into(rho, h, &mut work, &mut out);
        out
    }

    fn add_recycling(&self, rho: &Array2<C64>, out: &mut Array2<C64>) {
        let d = self.dim();
        let src = rho.as_slice().expect("density matrix in standard layout");
        let decay = self.decay.as_slice().expect("decay matrix in standard layout");
        let n_atoms = self.decay.nrows();
        for &s in &self.sources {
            for &t in &self.sources {
                let mut acc = C64::new(0.0, 0.0);
                for &(m, i) in &self.up_links[s] {
                    let g = &decay[m * n_atoms..(m + 1) * n_atoms];
                    let r = &src[i * d..(i + 1) * d];
                    for &(n, j) in &self.up_links[t] {
                        acc += r[j] * g[n];
                    }
                }
                out[[s, t]] += acc;
            }
        }
    }

    /// `Tr(N̂ X)` for any matrix on the basis.
    pub fn excitation_trace(&self, x: &Array2<C64>) -> f64 {
        self.excitations
            .iter()
            .enumerate()
            .map(|(i, n)| n * x[[i, i]].re)
            .sum()
    }
}

/// One-shot evaluation of the master-equation right-hand side.
pub fn me_rhs(
    rho: &DensityMatrix,
    h_total: &SparseMatrix,
    decay: &Array2<f64>,
    basis: &TruncatedBasis,
) -> Result<Array2<C64>> {
    rho.check_basis(basis)?;
    basis.check_dim(h_total.dim())?;
    let me = MasterEquation::new(basis, decay)?;
    Ok(me.rhs(rho.matrix(), h_total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock_space::{embed_hamiltonian, lowering_operator, raising_operator};
    use crate::lattice_green::{coupling_matrices, ChainGeometry};
    use ndarray::Array1;

    fn reference_recycling(
        rho: &Array2<C64>,
        decay: &Array2<f64>,
        basis: &TruncatedBasis,
    ) -> Array2<C64> {
        let n = basis.n_atoms();
        let mut out = Array2::zeros(rho.dim());
        for m in 0..n {
            let low_m = lowering_operator(m, basis).unwrap().to_dense();
            for k in 0..n {
                let up_k = raising_operator(k, basis).unwrap().to_dense();
                out = out + low_m.dot(rho).dot(&up_k) * decay[[m, k]];
            }
        }
        out
    }

    fn random_state(basis: &TruncatedBasis, seed: u64) -> DensityMatrix {
        let d = basis.dim();
        let mut x = seed;
        let mut next = move || {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x % 10_000) as f64 / 10_000.0 - 0.5
        };
        let mut m = Array2::<C64>::zeros((d, d));
        for _ in 0..3 {
            let v = Array1::from_shape_fn(d, |_| C64::new(next(), next()));
            for i in 0..d {
                for j in 0..d {
                    m[[i, j]] += v[i] * v[j].conj();
                }
            }
        }
        let tr: f64 = m.diag().iter().map(|z| z.re).sum();
        DensityMatrix::from_matrix(basis, m / C64::new(tr, 0.0)).unwrap()
    }

    #[test]
    fn recycling_matches_operator_sum() {
        let geometry = ChainGeometry::new(4, 0.3).unwrap();
        let c = coupling_matrices(&geometry);
        let basis = TruncatedBasis::new(4, 3).unwrap();
        let rho = random_state(&basis, 7);
        let zero_h = SparseMatrix::zeros(basis.dim());
        let fast = me_rhs(&rho, &zero_h, &c.decay, &basis).unwrap();
        let slow = reference_recycling(rho.matrix(), &c.decay, &basis);
        for (a, b) in fast.iter().zip(slow.iter()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn ground_state_is_stationary() {
        let c = coupling_matrices(&ChainGeometry::new(5, 0.35).unwrap());
        let basis = TruncatedBasis::new(5, 2).unwrap();
        let h = embed_hamiltonian(&c.h_eff_single, &basis).unwrap();
        let d = me_rhs(&DensityMatrix::ground(&basis), &h, &c.decay, &basis).unwrap();
        assert!(d.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn single_atom_decays_at_unit_rate() {
        let c = coupling_matrices(&ChainGeometry::new(1, 0.35).unwrap());
        let basis = TruncatedBasis::new(1, 1).unwrap();
        let h = embed_hamiltonian(&c.h_eff_single, &basis).unwrap();
        let excited = Array1::from(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        let rho = DensityMatrix::pure(&basis, &excited).unwrap();
        let d = me_rhs(&rho, &h, &c.decay, &basis).unwrap();
        assert!((d[[1, 1]].re + 1.0).abs() < 1e-15);
        assert!((d[[0, 0]].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_pair_decays_superradiantly() {
        let x = 0.7 * std::f64::consts::PI;
        let gamma_12 = 3.0 * (x.sin() / x.powi(3) - x.cos() / x.powi(2));
        let c = coupling_matrices(&ChainGeometry::new(2, 0.35).unwrap());
        let basis = TruncatedBasis::new(2, 1).unwrap();
        let h = embed_hamiltonian(&c.h_eff_single, &basis).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let psi = Array1::from(vec![C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(s, 0.0)]);
        let rho = DensityMatrix::pure(&basis, &psi).unwrap();
        let me = MasterEquation::new(&basis, &c.decay).unwrap();
        let d = me.rhs(rho.matrix(), &h);
        let rate = -me.excitation_trace(&d) / me.excitation_trace(rho.matrix());
        assert!((rate - (1.0 + gamma_12)).abs() < 1e-13);
    }

    #[test]
    fn trace_is_conserved_and_output_hermitian() {
        let c = coupling_matrices(&ChainGeometry::new(5, 0.35).unwrap());
        let basis = TruncatedBasis::new(5, 2).unwrap();
        let h = embed_hamiltonian(&c.h_eff_single, &basis).unwrap();
        let rho = random_state(&basis, 99);
        let d = me_rhs(&rho, &h, &c.decay, &basis).unwrap();
        let tr: C64 = d.diag().sum();
        assert!(tr.norm() < 1e-12);
        let dm = DensityMatrix::from_raw(&basis, d);
        assert!(dm.hermiticity_error() < 1e-12);
    }

    #[test]
    fn rejects_foreign_state() {
        let c = coupling_matrices(&ChainGeometry::new(3, 0.35).unwrap());
        let basis = TruncatedBasis::new(3, 2).unwrap();
        let other = TruncatedBasis::new(3, 1).unwrap();
        let h = SparseMatrix::zeros(basis.dim());
        let rho = DensityMatrix::ground(&other);
        assert!(matches!(
            me_rhs(&rho, &h, &c.decay, &basis),
            Err(Error::BasisMismatch(_))
        ));
    }
}
