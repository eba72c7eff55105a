//! Reduced-order description of the storage step: the three-state cascade
//! `ψ^{(2)}_{(1,2)} → {ψ_1, ψ_2}`, its "last two survivors" closed forms, and
//! the `κ` ratio of the most subradiant pair and single decay rates.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::fock_space::TruncatedBasis;
use crate::lattice_green::{coupling_matrices, ChainGeometry, CouplingMatrices};
use crate::modes::{double_modes, find_pair, single_modes, CollectiveMode, TwoExcitationMode};
use crate::{Error, Result, C64};

/// Branching rate `γ_{ξ,ξ'} = ⟨ψ_ξ| J(|ψ_ξ'⟩⟨ψ_ξ'|) |ψ_ξ⟩` from a pair mode
/// to a single mode through the recycling term.
///
/// With `v_m = ⟨ψ_ξ|σ_ge^m|ψ_ξ'⟩` this is `Σ_mn Γ_mn v_m v_n*`, non-negative
/// because `Γ` is positive semi-definite.
pub fn pair_decay_rate(
    single: &CollectiveMode,
    double: &TwoExcitationMode,
    coupling: &CouplingMatrices,
    basis: &TruncatedBasis,
) -> Result<f64> {
    let n = coupling.n_atoms();
    if basis.n_atoms() != n || basis.n_max() < 2 {
        return Err(Error::BasisMismatch(format!(
            "branching needs a basis with N = {n} and n_max ≥ 2"
        )));
    }
    if single.amplitudes.len() != n || double.amplitudes.len() != basis.manifold_dim(2) {
        return Err(Error::DimensionMismatch {
            expected: basis.manifold_dim(2),
            found: double.amplitudes.len(),
        });
    }
    let offset = basis.manifold(2).start;
    let mut v = vec![C64::new(0.0, 0.0); n];
    for (m, vm) in v.iter_mut().enumerate() {
        for k in 0..n {
            if k == m {
                continue;
            }
            let pair = basis.pair_index(m, k).expect("pairs are in the basis") - offset;
            *vm += single.amplitudes[k].conj() * double.amplitudes[pair];
        }
    }
    Ok(quadratic_form(&coupling.decay, &v))
}

fn quadratic_form(g: &Array2<f64>, v: &[C64]) -> f64 {
    let mut total = 0.0;
    for (m, vm) in v.iter().enumerate() {
        for (k, vk) in v.iter().enumerate() {
            total += g[[m, k]] * (vm * vk.conj()).re;
        }
    }
    total
}

/// Rates and initial populations of the three-state cascade.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateModelConfig {
    /// `Γ^{(1)}_{ξ=1}`.
    pub gamma1: f64,
    /// `Γ^{(1)}_{ξ=2}`.
    pub gamma2: f64,
    /// `Γ^{(2)}_{(1,2)}`.
    pub gamma12: f64,
    /// `γ_{1,(1,2)}`.
    pub branch1: f64,
    /// `γ_{2,(1,2)}`.
    pub branch2: f64,
    /// Initial probabilities `(c^{(2)}, c^{(1)}_1, c^{(1)}_2)`.
    pub initial: RateModelState,
}

/// Mode probabilities of the cascade.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RateModelState {
    pub pair: f64,
    pub single1: f64,
    pub single2: f64,
}

impl RateModelState {
    /// Excited-atom population `c₁ + c₂ + 2 c^{(2)}`.
    pub fn total_population(&self) -> f64 {
        self.single1 + self.single2 + 2.0 * self.pair
    }
}

impl RateModelConfig {
    /// Initial state after an illumination of area `Ωt₁`:
    /// `c^{(1)}_1 = (Ωt₁)²`, `2c^{(2)} = (Ωt₁)⁴`.
    pub fn after_illumination(omega_t1: f64, gamma1: f64, gamma2: f64, gamma12: f64, branch1: f64, branch2: f64) -> Self {
        let x2 = omega_t1 * omega_t1;
        RateModelConfig {
            gamma1,
            gamma2,
            gamma12,
            branch1,
            branch2,
            initial: RateModelState {
                pair: 0.5 * x2 * x2,
                single1: x2,
                single2: 0.0,
            },
        }
    }

    /// Rates of the chain `geometry` from its modes.
    pub fn from_geometry(geometry: &ChainGeometry, omega_t1: f64) -> Result<Self> {
        let n = geometry.n_atoms();
        if n < 3 {
            return Err(Error::Config("the cascade needs N ≥ 3".into()));
        }
        let coupling = coupling_matrices(geometry);
        let basis = TruncatedBasis::new(n, 2)?;
        let singles = single_modes(&coupling)?;
        let doubles = double_modes(&coupling, &basis)?;
        let pair = most_subradiant_pair(&doubles)?;
        let b1 = pair_decay_rate(&singles[0], pair, &coupling, &basis)?;
        let b2 = pair_decay_rate(&singles[1], pair, &coupling, &basis)?;
        Ok(Self::after_illumination(
            omega_t1,
            singles[0].decay,
            singles[1].decay,
            pair.decay,
            b1,
            b2,
        ))
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [self.gamma1, self.gamma2, self.gamma12, self.branch1, self.branch2];
        if rates.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
            return Err(Error::Config(format!("rates must be finite and ≥ 0: {rates:?}")));
        }
        if self.branch1 + self.branch2 > self.gamma12 + 1e-9 {
            return Err(Error::Config(format!(
                "branches {} + {} exceed the pair decay {}",
                self.branch1, self.branch2, self.gamma12
            )));
        }
        Ok(())
    }
}

/// `(e^{-at} - e^{-bt}) / (b - a)`, continuous through `a = b` where it is
/// `t e^{-at}`.
fn cascade_kernel(a: f64, b: f64, t: f64) -> f64 {
    let d = b - a;
    if d * t == 0.0 {
        return t * (-a * t).exp();
    }
    (-a * t).exp() * -(-d * t).exp_m1() / d
}

/// Exact solution of
/// `ċ^{(2)} = -Γ₁₂c^{(2)}`, `ċ_i = -Γ_i c_i + γ_{i,(1,2)} c^{(2)}`.
pub fn evolve_rate_model(cfg: &RateModelConfig, t: f64) -> Result<RateModelState> {
    cfg.validate()?;
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time {t} must be ≥ 0")));
    }
    let c0 = cfg.initial;
    Ok(RateModelState {
        pair: c0.pair * (-cfg.gamma12 * t).exp(),
        single1: c0.single1 * (-cfg.gamma1 * t).exp()
            + cfg.branch1 * c0.pair * cascade_kernel(cfg.gamma1, cfg.gamma12, t),
        single2: c0.single2 * (-cfg.gamma2 * t).exp()
            + cfg.branch2 * c0.pair * cascade_kernel(cfg.gamma2, cfg.gamma12, t),
    })
}

/// `Pop(t) = (Ωt₁)² e^{-Γ₁t} + (Ωt₁)⁴ e^{-Γ₁₂t}`.
pub fn pop_closed_form(omega_t1: f64, gamma1: f64, gamma12: f64, t: f64) -> f64 {
    let x2 = omega_t1 * omega_t1;
    x2 * (-gamma1 * t).exp() + x2 * x2 * (-gamma12 * t).exp()
}

/// `γ(t) = Γ₁ [e^{-Γ₁t} + κ(Ωt₁)² e^{-κΓ₁t}] / [e^{-Γ₁t} + (Ωt₁)² e^{-κΓ₁t}]`.
pub fn gamma_closed_form(omega_t1: f64, gamma1: f64, kappa: f64, t: f64) -> f64 {
    let x2 = omega_t1 * omega_t1;
    // divide through by e^{-Γ₁t} to stay finite at long times
    let w = x2 * (-(kappa - 1.0) * gamma1 * t).exp();
    gamma1 * (1.0 + kappa * w) / (1.0 + w)
}

/// `t_tr = log(κ(Ωt₁)²) N³ / ((κ-1) α₁)`, or `None` when `κ(Ωt₁)² ≤ 1`
/// (linear regime).
pub fn transition_time_formula(omega_t1: f64, kappa: f64, alpha1: f64, n_atoms: usize) -> Result<Option<f64>> {
    if !(kappa > 1.0) || !(alpha1 > 0.0) {
        return Err(Error::Domain(format!(
            "need κ > 1 and α₁ > 0, got κ = {kappa}, α₁ = {alpha1}"
        )));
    }
    let arg = kappa * omega_t1 * omega_t1;
    if arg <= 1.0 {
        return Ok(None);
    }
    Ok(Some(arg.ln() * (n_atoms as f64).powi(3) / ((kappa - 1.0) * alpha1)))
}

fn most_subradiant_pair(doubles: &[TwoExcitationMode]) -> Result<&TwoExcitationMode> {
    find_pair(doubles, 1, 2).ok_or_else(|| Error::Inconclusive("no pair mode labelled (1, 2)".into()))
}

/// `κ = Γ^{(2)}_{(1,2)} / Γ^{(1)}_{ξ=1}`.
pub fn kappa_ratio(geometry: &ChainGeometry, basis: &TruncatedBasis) -> Result<f64> {
    if geometry.n_atoms() < 3 {
        return Err(Error::Config("κ needs N ≥ 3".into()));
    }
    let coupling = coupling_matrices(geometry);
    let singles = single_modes(&coupling)?;
    let doubles = double_modes(&coupling, basis)?;
    Ok(most_subradiant_pair(&doubles)?.decay / singles[0].decay)
}

/// Least-squares fit `y = A x^p` in log–log space; returns `(p, A)`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Inconclusive(format!(
            "power-law fit needs ≥ 2 paired points, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::Domain("power-law fit needs positive data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Inconclusive("power-law fit needs distinct abscissae".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, (my - slope * mx).exp()))
}

/// Most subradiant single decay rates `Γ₁(N)` of chains with spacing `a`.
pub fn most_subradiant_rates(spacing: f64, sizes: &[usize]) -> Result<Vec<f64>> {
    sizes
        .iter()
        .map(|&n| {
            let c = coupling_matrices(&ChainGeometry::new(n, spacing)?);
            Ok(single_modes(&c)?[0].decay)
        })
        .collect()
}

/// `α₁` in `Γ₁ = α₁ N⁻³`, fitted with the exponent pinned to −3 (geometric
/// mean of `Γ₁ N³`).
pub fn alpha1_fit(spacing: f64, sizes: &[usize]) -> Result<f64> {
    if sizes.is_empty() {
        return Err(Error::Inconclusive("α₁ fit needs at least one size".into()));
    }
    let rates = most_subradiant_rates(spacing, sizes)?;
    let mean_log = sizes
        .iter()
        .zip(&rates)
        .map(|(&n, g)| (g * (n as f64).powi(3)).ln())
        .sum::<f64>()
        / sizes.len() as f64;
    Ok(mean_log.exp())
}

/// Default size range of the `α₁` fit.
pub fn alpha1_sizes() -> Vec<usize> {
    (10..=40).collect()
}
