use std::f64::consts::PI;

use super::polylog;
use crate::{Error, Result, C64, K0};

/// Bloch wavenumber associated with mode `ξ` of an `N`-atom chain,
/// `π(N+1-ξ)/(a(N+1))`.
pub fn kz_of_mode(n_atoms: usize, spacing: f64, xi: usize) -> Result<f64> {
    check_label(n_atoms, xi)?;
    let np1 = (n_atoms + 1) as f64;
    Ok(PI * (np1 - xi as f64) / (spacing * np1))
}

/// Decay and shift `(Γ, ω)` of an infinite chain's spin wave with Bloch
/// wavenumber `k_z` (longitudinal dipoles).
///
/// `Γ` sums the diffraction orders inside the light cone; `ω` is the
/// polylogarithm lattice sum.
pub fn analytic_dispersion(kz: f64, spacing: f64) -> Result<(f64, f64)> {
    if !(spacing > 0.0) || !kz.is_finite() {
        return Err(Error::Domain(format!("dispersion at k_z = {kz}, a = {spacing}")));
    }
    let k0a = K0 * spacing;
    let g = 2.0 * PI / spacing;
    let m_max = (K0 / g).ceil() as i64 + 1 + (kz.abs() / g).ceil() as i64;
    let mut decay = 0.0;
    for m in -m_max..=m_max {
        let q = kz + m as f64 * g;
        if q.abs() < K0 {
            decay += 1.0 - (q / K0).powi(2);
        }
    }
    decay *= 3.0 * PI / (2.0 * k0a);

    let z1 = C64::from_polar(1.0, (K0 + kz) * spacing);
    let z2 = C64::from_polar(1.0, (K0 - kz) * spacing);
    let li3 = polylog(3, z1)? + polylog(3, z2)?;
    let li2 = polylog(2, z1)? + polylog(2, z2)?;
    let shift = -1.5 / k0a.powi(3) * (li3 - C64::new(0.0, k0a) * li2).re;
    Ok((decay, shift))
}

pub(crate) fn check_label(n_atoms: usize, xi: usize) -> Result<()> {
    if xi == 0 || xi > n_atoms {
        return Err(Error::IndexOutOfRange(format!(
            "mode label {xi} outside 1..={n_atoms}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kz_endpoints() {
        let (n, a) = (100, 0.35);
        assert!((kz_of_mode(n, a, n).unwrap() - PI / (a * 101.0)).abs() < 1e-14);
        assert!((kz_of_mode(n, a, 1).unwrap() - PI * 100.0 / (a * 101.0)).abs() < 1e-12);
        // 51π/(0.35·101)
        assert!((kz_of_mode(n, a, 50).unwrap() - 4.532_425_044_783_012).abs() < 1e-12);
        assert!(kz_of_mode(n, a, 0).is_err());
        assert!(kz_of_mode(n, a, 101).is_err());
    }

    #[test]
    fn decay_light_cone() {
        let (g, _) = analytic_dispersion(0.0, 0.35).unwrap();
        assert!((g - 3.0 / 1.4).abs() < 1e-12);
        let (g, _) = analytic_dispersion(1.05 * K0, 0.35).unwrap();
        assert_eq!(g, 0.0);
    }

    #[test]
    fn shift_is_real_lattice_sum() {
        // slowly converging real-space Bloch sum of Re H_{0j}
        let (a, kz) = (0.35, 7.0);
        let mut direct = 0.0;
        for j in 1..400_000 {
            let x = K0 * a * j as f64;
            direct += -3.0 * (kz * a * j as f64).cos() * (x.cos() / x.powi(3) + x.sin() / x.powi(2));
        }
        let (_, w) = analytic_dispersion(kz, a).unwrap();
        assert!((w - direct).abs() < 1e-4, "{w} vs {direct}");
    }
}
