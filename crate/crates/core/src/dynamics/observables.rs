use ndarray::{Array1, Array2};

use crate::fock_space::{DensityMatrix, MasterEquation, SparseMatrix, TruncatedBasis};
use crate::modes::{CollectiveMode, TwoExcitationMode};
use crate::{Error, Result, C64};

/// Probability in each manifold `0..=n_max`.
pub fn manifold_populations(rho: &DensityMatrix, basis: &TruncatedBasis) -> Result<Vec<f64>> {
    rho.check_basis(basis)?;
    let m = rho.matrix();
    Ok((0..=basis.n_max())
        .map(|k| basis.manifold(k).map(|i| m[[i, i]].re).sum())
        .collect())
}

/// `⟨N̂_exc⟩`, the atomic excited population.
pub fn excited_population(rho: &DensityMatrix, basis: &TruncatedBasis) -> Result<f64> {
    Ok(manifold_populations(rho, basis)?
        .iter()
        .enumerate()
        .map(|(k, p)| k as f64 * p)
        .sum())
}

/// A mode to project on.
#[derive(Clone, Copy, Debug)]
pub enum ModeRef<'a> {
    Single(&'a CollectiveMode),
    Double(&'a TwoExcitationMode),
}

impl ModeRef<'_> {
    fn manifold(&self) -> usize {
        match self {
            ModeRef::Single(_) => 1,
            ModeRef::Double(_) => 2,
        }
    }

    fn amplitudes(&self) -> &Array1<C64> {
        match self {
            ModeRef::Single(m) => &m.amplitudes,
            ModeRef::Double(m) => &m.amplitudes,
        }
    }
}

/// `Re⟨ψ|ρ|ψ⟩` for the unit-normalized right eigenvector `ψ`.
///
/// This is a probability; the excited-atom population carried by a
/// two-excitation mode is twice it.
pub fn mode_projection(rho: &DensityMatrix, basis: &TruncatedBasis, mode: ModeRef<'_>) -> Result<f64> {
    rho.check_basis(basis)?;
    let k = mode.manifold();
    if basis.n_max() < k {
        return Err(Error::BasisMismatch(format!(
            "a {k}-excitation mode needs n_max ≥ {k}"
        )));
    }
    let range = basis.manifold(k);
    let v = mode.amplitudes();
    if v.len() != range.len() {
        return Err(Error::DimensionMismatch {
            expected: range.len(),
            found: v.len(),
        });
    }
    Ok(block_expectation(rho.matrix(), range.start, v))
}

/// `Re Σ_ij v_i* ρ[o+i, o+j] v_j`.
pub(crate) fn block_expectation(m: &Array2<C64>, offset: usize, v: &Array1<C64>) -> f64 {
    let d = v.len();
    let mut total = 0.0;
    for i in 0..d {
        let row = m.row(offset + i);
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..d {
            acc += row[offset + j] * v[j];
        }
        total += (v[i].conj() * acc).re;
    }
    total
}

/// `γ = -Tr(N̂ dρ/dt) / Tr(N̂ ρ)`; `None` below the population floor.
pub fn instantaneous_decay(
    rho: &DensityMatrix,
    h_total: &SparseMatrix,
    me: &MasterEquation,
) -> Option<f64> {
    let d = me.dim();
    let mut work = Array2::zeros((d, d));
    let mut out = Array2::zeros((d, d));
    me.rhs_into(rho.matrix(), h_total, &mut work, &mut out);
    decay_from_derivative(rho.matrix(), &out, me)
}

pub(crate) const POPULATION_FLOOR: f64 = 1e-12;

pub(crate) fn decay_from_derivative(
    rho: &Array2<C64>,
    drho: &Array2<C64>,
    me: &MasterEquation,
) -> Option<f64> {
    let pop = me.excitation_trace(rho);
    (pop > POPULATION_FLOOR).then(|| -me.excitation_trace(drho) / pop)
}

/// `⟨σ_ge^n⟩ = Σ_{T∌n} ρ_{T∪n, T}`: the dipole amplitudes radiating the
/// coherent field.
pub fn dipole_coherences(rho: &DensityMatrix, basis: &TruncatedBasis) -> Result<Array1<C64>> {
    rho.check_basis(basis)?;
    let m = rho.matrix();
    let mut out = Array1::zeros(basis.n_atoms());
    let mut grown = Vec::with_capacity(basis.n_max());
    for t in 0..basis.dim() {
        let state = basis.state(t);
        if state.len() == basis.n_max() {
            continue;
        }
        for n in 0..basis.n_atoms() {
            if state.contains(&n) {
                continue;
            }
            grown.clear();
            grown.extend_from_slice(state);
            grown.push(n);
            grown.sort_unstable();
            let s = basis.index_of(&grown).expect("state below the truncation");
            out[n] += m[[s, t]];
        }
    }
    Ok(out)
}

/// First time after which `|γ - Γ_target| / Γ_target < 0.1` holds for every
/// remaining sample. `None` when the last sample is still outside.
///
/// Samples with an undefined `γ` count as not converged.
pub fn extract_transition_time(
    times: &[f64],
    gamma: &[Option<f64>],
    target: f64,
) -> Result<Option<f64>> {
    const TOLERANCE: f64 = 0.1;
    if times.len() != gamma.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            found: gamma.len(),
        });
    }
    if times.len() < 3 {
        return Err(Error::Inconclusive(format!(
            "{} samples are too few to judge convergence",
            times.len()
        )));
    }
    if !(target > 0.0) {
        return Err(Error::Domain(format!("target rate {target} must be positive")));
    }
    let inside = |g: &Option<f64>| g.is_some_and(|g| ((g - target) / target).abs() < TOLERANCE);
    let mut first = None;
    for (i, g) in gamma.iter().enumerate().rev() {
        if inside(g) {
            first = Some(i);
        } else {
            break;
        }
    }
    Ok(first.map(|i| times[i]))
}
