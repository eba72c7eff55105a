//! Collective eigenmodes of the effective Hamiltonian in the one- and
//! two-excitation manifolds.

mod dispersion;
mod polylog;

use std::cmp::Ordering;
use std::f64::consts::PI;

use ndarray::{Array1, Array2, ArrayView1};

pub use dispersion::{analytic_dispersion, kz_of_mode};
pub(crate) use dispersion::check_label;
pub use polylog::polylog;

use crate::fock_space::{embed_hamiltonian, manifold_block, TruncatedBasis};
use crate::lattice_green::CouplingMatrices;
use crate::linalg::eigen;
use crate::{Error, Result, C64};

/// Eigenvalues closer than this in decay are ordered by shift.
const DEGENERACY_TOL: f64 = 1e-10;

/// Below this ansatz overlap a pair label is flagged as ambiguous.
pub const AMBIGUOUS_OVERLAP: f64 = 0.5;

/// Eigenmode of the single-excitation effective Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct CollectiveMode {
    /// `ξ`, 1-based, ordered by increasing decay.
    pub label: usize,
    pub amplitudes: Array1<C64>,
    pub shift: f64,
    pub decay: f64,
}

/// Eigenmode of the two-excitation block, with amplitudes over the pair
/// basis `(m < n)` in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoExcitationMode {
    /// 1-based position in the decay ordering.
    pub rank: usize,
    /// `(ξ₁, ξ₂)` with `ξ₁ < ξ₂`, from the best-matching fermionic ansatz.
    pub pair_label: (usize, usize),
    /// `|⟨ansatz(pair_label)|mode⟩|`.
    pub label_overlap: f64,
    pub amplitudes: Array1<C64>,
    pub shift: f64,
    pub decay: f64,
}

impl TwoExcitationMode {
    pub fn is_ambiguous(&self) -> bool {
        self.label_overlap < AMBIGUOUS_OVERLAP
    }
}

struct Eigenpair {
    shift: f64,
    decay: f64,
    vector: Array1<C64>,
}

/// Diagonalizes a complex-symmetric effective Hamiltonian block and returns
/// normalized, phase-fixed eigenpairs sorted by decay.
fn sorted_eigenpairs(h: &Array2<C64>) -> Result<Vec<Eigenpair>> {
    let (values, vectors) = eigen(h)?;
    let mut pairs: Vec<Eigenpair> = values
        .iter()
        .enumerate()
        .map(|(k, lambda)| Eigenpair {
            shift: lambda.re,
            decay: -2.0 * lambda.im,
            vector: normalize_phase(vectors.column(k)),
        })
        .collect();
    pairs.sort_by(|a, b| {
        if (a.decay - b.decay).abs() < DEGENERACY_TOL {
            a.shift.partial_cmp(&b.shift).unwrap_or(Ordering::Equal)
        } else {
            a.decay.partial_cmp(&b.decay).unwrap_or(Ordering::Equal)
        }
    });
    Ok(pairs)
}

/// Unit norm, with the first largest-magnitude component real positive.
fn normalize_phase(v: ArrayView1<C64>) -> Array1<C64> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let largest = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    // mirror-symmetric chains have pairs of equal components; take the first
    let pivot = v
        .iter()
        .position(|z| z.norm() >= largest * (1.0 - 1e-9))
        .unwrap_or(0);
    let phase = v[pivot].conj() / v[pivot].norm();
    let mut out = v.mapv(|z| z * phase / norm);
    out[pivot] = C64::new(v[pivot].norm() / norm, 0.0);
    out
}

/// Single-excitation eigenmodes sorted by increasing decay.
pub fn single_modes(coupling: &CouplingMatrices) -> Result<Vec<CollectiveMode>> {
    Ok(sorted_eigenpairs(&coupling.h_eff_single)?
        .into_iter()
        .enumerate()
        .map(|(k, p)| CollectiveMode {
            label: k + 1,
            amplitudes: p.vector,
            shift: p.shift,
            decay: p.decay,
        })
        .collect())
}

/// Standing-wave approximation of mode `ξ`:
/// `sqrt(2/(N+1)) sin((N+1-ξ) m π / (N+1))`, `m = 1..N`.
pub fn sine_ansatz(n_atoms: usize, xi: usize) -> Result<Array1<f64>> {
    check_label(n_atoms, xi)?;
    let np1 = (n_atoms + 1) as f64;
    let q = (np1 - xi as f64) * PI / np1;
    let norm = (2.0 / np1).sqrt();
    Ok(Array1::from_shape_fn(n_atoms, |i| norm * (q * (i + 1) as f64).sin()))
}

/// Antisymmetrized product of single modes `ξ₁`, `ξ₂` over the pair basis,
/// unit norm.
pub fn fermionic_ansatz(modes: &[CollectiveMode], xi1: usize, xi2: usize) -> Result<Array1<C64>> {
    let n = modes.len();
    check_label(n, xi1)?;
    check_label(n, xi2)?;
    if xi1 == xi2 {
        return Err(Error::DegenerateAnsatz(xi1));
    }
    let c1 = &modes[xi1 - 1].amplitudes;
    let c2 = &modes[xi2 - 1].amplitudes;
    let v = antisymmetric_product(c1.view(), c2.view());
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-14 {
        return Err(Error::DegenerateAnsatz(xi1));
    }
    Ok(v / C64::new(norm, 0.0))
}

fn antisymmetric_product(c1: ArrayView1<C64>, c2: ArrayView1<C64>) -> Array1<C64> {
    let n = c1.len();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for m in 0..n {
        for k in (m + 1)..n {
            out.push(c1[m] * c2[k] - c2[m] * c1[k]);
        }
    }
    Array1::from(out)
}

/// Two-excitation block of the many-body effective Hamiltonian, over the
/// pair basis.
pub fn two_excitation_hamiltonian(coupling: &CouplingMatrices) -> Result<Array2<C64>> {
    let n = coupling.n_atoms();
    if n < 2 {
        return Err(Error::Config("two-excitation manifold needs N ≥ 2".into()));
    }
    let basis = TruncatedBasis::new(n, 2)?;
    let h = embed_hamiltonian(&coupling.h_eff_single, &basis)?;
    Ok(manifold_block(&h, &basis, 2))
}

/// Two-excitation eigenmodes sorted by decay and labelled by greedy
/// maximal-overlap matching against the fermionic ansatz.
pub fn double_modes(
    coupling: &CouplingMatrices,
    basis: &TruncatedBasis,
) -> Result<Vec<TwoExcitationMode>> {
    let n = coupling.n_atoms();
    if basis.n_atoms() != n {
        return Err(Error::BasisMismatch(format!(
            "basis has {} atoms, couplings {n}",
            basis.n_atoms()
        )));
    }
    if basis.n_max() < 2 {
        return Err(Error::BasisMismatch("two-excitation modes need n_max ≥ 2".into()));
    }
    let singles = single_modes(coupling)?;
    let pairs = sorted_eigenpairs(&two_excitation_hamiltonian(coupling)?)?;

    let mut labels = Vec::with_capacity(pairs.len());
    for x1 in 1..=n {
        for x2 in (x1 + 1)..=n {
            labels.push(((x1, x2), fermionic_ansatz(&singles, x1, x2)?));
        }
    }
    // (overlap, mode index, label index), greedy from the largest overlap
    let mut candidates = Vec::with_capacity(pairs.len() * labels.len());
    for (i, p) in pairs.iter().enumerate() {
        for (j, (_, ansatz)) in labels.iter().enumerate() {
            let overlap = ansatz
                .iter()
                .zip(p.vector.iter())
                .map(|(a, b)| a.conj() * b)
                .sum::<C64>()
                .norm();
            candidates.push((overlap, i, j));
        }
    }
    candidates.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(Ordering::Equal)
            .then(a.2.cmp(&b.2))
            .then(a.1.cmp(&b.1))
    });
    let mut assigned: Vec<Option<(usize, f64)>> = vec![None; pairs.len()];
    let mut claimed = vec![false; labels.len()];
    for (overlap, i, j) in candidates {
        if assigned[i].is_none() && !claimed[j] {
            assigned[i] = Some((j, overlap));
            claimed[j] = true;
        }
    }

    Ok(pairs
        .into_iter()
        .zip(assigned)
        .enumerate()
        .map(|(k, (p, slot))| {
            let (j, overlap) = slot.expect("square assignment is complete");
            TwoExcitationMode {
                rank: k + 1,
                pair_label: labels[j].0,
                label_overlap: overlap,
                amplitudes: p.vector,
                shift: p.shift,
                decay: p.decay,
            }
        })
        .collect())
}

/// Finds the double mode carrying a given pair label.
pub fn find_pair(modes: &[TwoExcitationMode], xi1: usize, xi2: usize) -> Option<&TwoExcitationMode> {
    let key = (xi1.min(xi2), xi1.max(xi2));
    modes.iter().find(|m| m.pair_label == key)
}

/// Overlap of the sine-ansatz pair state `(ξ₁, ξ₂)` with two applications
/// of the superradiant-shaped field,
///
/// ```text
/// Σ_{i<j} 4Ω²/(N+1)² sin(iπ/(N+1)) sin(jπ/(N+1))
///        × [sin(q₁ i) sin(q₂ j) − sin(q₂ i) sin(q₁ j)],   q = (N+1-ξ)π/(N+1),
/// ```
///
/// i.e. the matrix element with the ansatz normalization factor removed.
/// Zero when `ξ₁ = ξ₂`.
pub fn two_photon_drive_overlap(n_atoms: usize, xi1: usize, xi2: usize, rabi: f64) -> Result<f64> {
    check_label(n_atoms, xi1)?;
    check_label(n_atoms, xi2)?;
    if xi1 == xi2 {
        return Ok(0.0);
    }
    let c_drive = sine_ansatz(n_atoms, n_atoms)?;
    let c1 = sine_ansatz(n_atoms, xi1)?;
    let c2 = sine_ansatz(n_atoms, xi2)?;
    let mut sum = 0.0;
    for i in 0..n_atoms {
        for j in (i + 1)..n_atoms {
            sum += c_drive[i] * c_drive[j] * (c1[i] * c2[j] - c2[i] * c1[j]);
        }
    }
    Ok(rabi * rabi * sum)
}
