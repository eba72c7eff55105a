use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::fock_space::{number_operator, raising_operator, SparseMatrix, TruncatedBasis};
use crate::modes::{check_label, CollectiveMode};
use crate::{Error, Result, C64};

/// Spatial profile of the illuminating field over the atoms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriveProfile {
    /// `Ω_n = Ω c_N(n)`: matched to the most superradiant mode.
    SuperradiantShaped,
    /// `Ω_n = Ω / √N`.
    Uniform,
    /// `Ω_n = Ω v_n`.
    Custom(Vec<f64>),
}

/// Coherent drive `H_F = -Δ₀ Σ σ_ee^n - Σ (Ω_n σ_eg^n + h.c.)`, written in
/// the frame rotating at the laser frequency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    pub rabi: f64,
    /// Laser detuning from the atomic transition; also the frame frequency.
    pub detuning: f64,
    pub profile: DriveProfile,
}

impl DriveConfig {
    /// Per-atom Rabi frequencies `Ω_n`.
    pub fn rabi_profile(&self, n_atoms: usize, modes: Option<&[CollectiveMode]>) -> Result<Vec<C64>> {
        if !(self.rabi >= 0.0) || !self.rabi.is_finite() {
            return Err(Error::Config(format!("Rabi frequency {} must be ≥ 0", self.rabi)));
        }
        let omega = C64::new(self.rabi, 0.0);
        match &self.profile {
            DriveProfile::SuperradiantShaped => {
                let modes = modes.ok_or(Error::MissingModes)?;
                if modes.len() != n_atoms {
                    return Err(Error::DimensionMismatch {
                        expected: n_atoms,
                        found: modes.len(),
                    });
                }
                Ok(modes[n_atoms - 1].amplitudes.iter().map(|c| omega * c).collect())
            }
            DriveProfile::Uniform => {
                Ok(vec![omega / (n_atoms as f64).sqrt(); n_atoms])
            }
            DriveProfile::Custom(v) => {
                if v.len() != n_atoms {
                    return Err(Error::DimensionMismatch {
                        expected: n_atoms,
                        found: v.len(),
                    });
                }
                Ok(v.iter().map(|x| omega * x).collect())
            }
        }
    }
}

/// Drive Hamiltonian embedded in the truncated basis. The shaped profile
/// needs the single-excitation modes.
pub fn drive_hamiltonian(
    cfg: &DriveConfig,
    modes: Option<&[CollectiveMode]>,
    basis: &TruncatedBasis,
) -> Result<SparseMatrix> {
    let omegas = cfg.rabi_profile(basis.n_atoms(), modes)?;
    let mut h = number_operator(basis).scaled(C64::new(-cfg.detuning, 0.0));
    for (n, &w) in omegas.iter().enumerate() {
        if w == C64::new(0.0, 0.0) {
            continue;
        }
        let up = raising_operator(n, basis)?.scaled(-w);
        h = h.add(&up)?.add(&up.adjoint())?;
    }
    Ok(h)
}

/// Position-varying detuning `Δ_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetuningPattern {
    /// `Δ_n = (-1)ⁿ Δ`, `n = 1..N`.
    Staggered { amplitude: f64 },
    /// `Δ_n = Δ sin(n ξ_aim π / (N+1))`.
    Sinusoidal { amplitude: f64, xi_aim: usize },
    Custom(Vec<f64>),
}

impl DetuningPattern {
    pub fn values(&self, n_atoms: usize) -> Result<Vec<f64>> {
        match self {
            DetuningPattern::Staggered { amplitude } => Ok((1..=n_atoms)
                .map(|n| if n % 2 == 0 { *amplitude } else { -amplitude })
                .collect()),
            DetuningPattern::Sinusoidal { amplitude, xi_aim } => {
                check_label(n_atoms, *xi_aim)?;
                let q = *xi_aim as f64 * PI / (n_atoms + 1) as f64;
                Ok((1..=n_atoms).map(|n| amplitude * (q * n as f64).sin()).collect())
            }
            DetuningPattern::Custom(v) => {
                if v.len() != n_atoms {
                    return Err(Error::DimensionMismatch {
                        expected: n_atoms,
                        found: v.len(),
                    });
                }
                Ok(v.clone())
            }
        }
    }

    /// Largest `|Δ_n|`.
    pub fn max_abs(&self, n_atoms: usize) -> Result<f64> {
        Ok(self.values(n_atoms)?.iter().fold(0.0, |m, x| m.max(x.abs())))
    }
}

/// `H_S = -Σ_n Δ_n σ_ee^n`: diagonal, `-Σ_{n∈S} Δ_n` on state `S`.
pub fn pvd_hamiltonian(pattern: &DetuningPattern, basis: &TruncatedBasis) -> Result<SparseMatrix> {
    let deltas = pattern.values(basis.n_atoms())?;
    let diag: Vec<C64> = basis
        .states()
        .iter()
        .map(|s| C64::new(-s.iter().map(|&n| deltas[n]).sum::<f64>(), 0.0))
        .collect();
    Ok(SparseMatrix::from_diagonal(&diag))
}
