//! Free-space electromagnetic couplings of a linear chain of two-level atoms.
//!
//! Units: lengths in the transition wavelength (so the vacuum wavenumber is
//! `K0 = 2π`), rates and frequencies in the single-atom decay rate. The
//! coupling between atoms `m` and `n` is
//!
//! ```text
//! H_mn = -(3π/k0) p·G(r_m, r_n)·p,     Γ_mn = (6π/k0) Im[p·G(r_m, r_n)·p]
//! ```
//!
//! which fixes `Γ_mm = 1` since `Im G(r, r) = k0/(6π) I`.

use ndarray::Array2;

use crate::{Error, Result, C64, K0};

/// 3×3 complex tensor, row-major.
pub type Tensor3 = [[C64; 3]; 3];

/// A uniform chain of atoms on the z axis, `r_m = (0, 0, (m+1)·a)` for the
/// zero-based atom index `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainGeometry {
    n_atoms: usize,
    spacing: f64,
    dipole: [f64; 3],
}

impl ChainGeometry {
    /// Chain with dipoles parallel to the chain axis.
    pub fn new(n_atoms: usize, spacing: f64) -> Result<Self> {
        Self::with_dipole(n_atoms, spacing, [0.0, 0.0, 1.0])
    }

    pub fn with_dipole(n_atoms: usize, spacing: f64, dipole: [f64; 3]) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::Geometry("chain needs at least one atom".into()));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::Geometry(format!("spacing must be positive, got {spacing}")));
        }
        let norm = dipole.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Geometry(format!(
                "dipole orientation must be a unit vector, |p| = {norm}"
            )));
        }
        Ok(ChainGeometry {
            n_atoms,
            spacing,
            dipole,
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn dipole(&self) -> [f64; 3] {
        self.dipole
    }

    pub fn position(&self, m: usize) -> [f64; 3] {
        [0.0, 0.0, (m + 1) as f64 * self.spacing]
    }

    pub fn positions(&self) -> Vec<[f64; 3]> {
        (0..self.n_atoms).map(|m| self.position(m)).collect()
    }
}

/// Decay matrix and single-excitation effective Hamiltonian of a chain.
#[derive(Clone, Debug)]
pub struct CouplingMatrices {
    /// Real symmetric `Γ_mn`, unit diagonal.
    pub decay: Array2<f64>,
    /// Complex symmetric `H_eff` restricted to one excitation.
    pub h_eff_single: Array2<C64>,
}

impl CouplingMatrices {
    pub fn n_atoms(&self) -> usize {
        self.decay.nrows()
    }
}

/// Free-space dyadic Green tensor at wavenumber `K0`:
///
/// ```text
/// G = e^{ikr}/(4πr) [ (1 + i/(kr) - 1/(kr)²) I + (-1 - 3i/(kr) + 3/(kr)²) r̂r̂ ]
/// ```
pub fn dyadic_green(r_src: [f64; 3], r_obs: [f64; 3]) -> Result<Tensor3> {
    let d = [
        r_obs[0] - r_src[0],
        r_obs[1] - r_src[1],
        r_obs[2] - r_src[2],
    ];
    let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if r <= 1e-12 {
        return Err(Error::SelfInteraction(r));
    }
    let x = K0 * r;
    let inv = 1.0 / x;
    let prefactor = C64::new(0.0, x).exp() / (4.0 * std::f64::consts::PI * r);
    let transverse = C64::new(1.0 - inv * inv, inv);
    let longitudinal = C64::new(-1.0 + 3.0 * inv * inv, -3.0 * inv);
    let unit = [d[0] / r, d[1] / r, d[2] / r];

    let mut g = [[C64::new(0.0, 0.0); 3]; 3];
    for (i, row) in g.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let delta = if i == j { 1.0 } else { 0.0 };
            *entry = prefactor * (transverse * delta + longitudinal * (unit[i] * unit[j]));
        }
    }
    Ok(g)
}

/// `p·G·q` for real vectors.
pub(crate) fn project(g: &Tensor3, p: [f64; 3], q: [f64; 3]) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..3 {
        for j in 0..3 {
            acc += g[i][j] * (p[i] * q[j]);
        }
    }
    acc
}

/// Builds `Γ_mn` and the single-excitation `H_eff` of the chain.
///
/// The single-atom Lamb shift is dropped: the diagonal of `H_eff` is `-i/2`.
pub fn coupling_matrices(geometry: &ChainGeometry) -> CouplingMatrices {
    let n = geometry.n_atoms();
    let p = geometry.dipole();
    let positions = geometry.positions();
    let mut decay = Array2::<f64>::zeros((n, n));
    let mut h = Array2::<C64>::zeros((n, n));
    for m in 0..n {
        decay[[m, m]] = 1.0;
        h[[m, m]] = C64::new(0.0, -0.5);
        for k in (m + 1)..n {
            let g = dyadic_green(positions[k], positions[m])
                .expect("distinct lattice sites never coincide");
            let pgp = project(&g, p, p);
            let coupling = -pgp * (3.0 * std::f64::consts::PI / K0);
            let rate = pgp.im * (6.0 * std::f64::consts::PI / K0);
            h[[m, k]] = coupling;
            h[[k, m]] = coupling;
            decay[[m, k]] = rate;
            decay[[k, m]] = rate;
        }
    }
    CouplingMatrices {
        decay,
        h_eff_single: h,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;

    fn longitudinal_closed_form(r: f64) -> C64 {
        let x = K0 * r;
        let phase = C64::new(0.0, x).exp() / (4.0 * std::f64::consts::PI * r);
        phase * C64::new(2.0 / (x * x), -2.0 / x)
    }

    #[test]
    fn coincident_points_are_rejected() {
        let r = [0.1, 0.2, 0.3];
        assert!(matches!(dyadic_green(r, r), Err(Error::SelfInteraction(_))));
    }

    #[test]
    fn green_tensor_is_reciprocal() {
        let r1 = [0.13, -0.4, 0.25];
        let r2 = [-0.31, 0.07, 1.12];
        let g12 = dyadic_green(r1, r2).unwrap();
        let g21 = dyadic_green(r2, r1).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((g12[i][j] - g21[j][i]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn longitudinal_component_matches_closed_form() {
        // kr = 0.7π
        let a = 0.35;
        let expected = longitudinal_closed_form(a);
        let g = dyadic_green([0.0, 0.0, 0.0], [0.0, 0.0, a]).unwrap();
        assert!((g[2][2] - expected).norm() < 1e-14);
        assert!(g[0][0].norm() > 0.0);
        assert!(g[0][2].norm() < 1e-15);
    }

    #[test]
    fn isolated_atom() {
        let c = coupling_matrices(&ChainGeometry::new(1, 0.35).unwrap());
        assert_eq!(c.decay[[0, 0]], 1.0);
        assert_eq!(c.h_eff_single[[0, 0]], C64::new(0.0, -0.5));
    }

    #[test]
    fn two_atom_decay_matches_scalar_formula() {
        let x = 0.7 * std::f64::consts::PI;
        let expected = 3.0 * (x.sin() / x.powi(3) - x.cos() / x.powi(2));
        let c = coupling_matrices(&ChainGeometry::new(2, 0.35).unwrap());
        assert!((c.decay[[0, 1]] - expected).abs() < 1e-13);
        assert!((c.decay[[0, 1]] - 0.592_833_303_445_851).abs() < 1e-12);
    }

    #[test]
    fn hundred_atom_chain_is_psd_with_unit_diagonal() {
        let c = coupling_matrices(&ChainGeometry::new(100, 0.35).unwrap());
        let trace: f64 = c.decay.diag().sum();
        assert!((trace - 100.0).abs() < 1e-9);
        let eig = linalg::symmetric_eigenvalues(&c.decay).unwrap();
        assert!(eig.iter().all(|&l| l >= -1e-10), "min eigenvalue {}", eig[0]);
    }

    #[test]
    fn effective_hamiltonian_is_complex_symmetric() {
        let c = coupling_matrices(&ChainGeometry::new(17, 0.27).unwrap());
        let h = &c.h_eff_single;
        for m in 0..17 {
            for n in 0..17 {
                assert!((h[[m, n]] - h[[n, m]]).norm() < 1e-12);
                assert!((h[[m, n]].im + 0.5 * c.decay[[m, n]]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn geometry_validation() {
        assert!(ChainGeometry::new(0, 0.3).is_err());
        assert!(ChainGeometry::new(3, 0.0).is_err());
        assert!(ChainGeometry::new(3, -0.1).is_err());
        assert!(ChainGeometry::with_dipole(3, 0.3, [1.0, 0.0, 0.1]).is_err());
        let g = ChainGeometry::new(4, 0.25).unwrap();
        let z: Vec<f64> = g.positions().iter().map(|r| r[2]).collect();
        assert_eq!(z, vec![0.25, 0.5, 0.75, 1.0]);
    }
}
