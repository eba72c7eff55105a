//! Far-field intensity radiated by the atomic dipoles `⟨σ_ge^n⟩` and the
//! emission cone of a propagating spin wave.

use ndarray::{Array1, Array2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice_green::ChainGeometry;
use crate::modes::kz_of_mode;
use crate::{Error, Result, C64, K0};

/// Uniform `(θ, φ)` grid on a sphere of radius `radius` (in `λ`) centred on
/// the origin. `θ` is measured from the chain axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AngularGrid {
    /// Points in `φ ∈ [0, 2π]`, both ends included.
    pub n_phi: usize,
    /// Points in `θ ∈ [0, π]`, both ends included.
    pub n_theta: usize,
    pub radius: f64,
}

impl Default for AngularGrid {
    fn default() -> Self {
        AngularGrid {
            n_phi: 361,
            n_theta: 181,
            radius: 1e3,
        }
    }
}

impl AngularGrid {
    pub fn thetas(&self) -> Vec<f64> {
        linspace(0.0, std::f64::consts::PI, self.n_theta)
    }

    pub fn phis(&self) -> Vec<f64> {
        linspace(0.0, std::f64::consts::TAU, self.n_phi)
    }

    /// Angular step in `θ`.
    pub fn theta_resolution(&self) -> f64 {
        std::f64::consts::PI / (self.n_theta.max(2) - 1) as f64
    }

    fn validate(&self) -> Result<()> {
        if self.n_phi == 0 || self.n_theta == 0 {
            return Err(Error::Config("angular grid is empty".into()));
        }
        if !(self.radius >= 10.0) || !self.radius.is_finite() {
            return Err(Error::Config(format!(
                "far-field radius {} λ is not in the far field",
                self.radius
            )));
        }
        Ok(())
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `|E|²` on the grid, normalized to a peak of 1.
#[derive(Clone, Debug, PartialEq)]
pub struct FarFieldPattern {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    /// `intensity[[i, j]]` at `(theta[i], phi[j])`.
    pub intensity: Array2<f64>,
}

impl FarFieldPattern {
    /// `(θ, φ)` of the brightest grid point (first in row-major order).
    pub fn peak(&self) -> (f64, f64) {
        let mut best = (0, 0, f64::NEG_INFINITY);
        for ((i, j), &v) in self.intensity.indexed_iter() {
            if v > best.2 {
                best = (i, j, v);
            }
        }
        (self.theta[best.0], self.phi[best.1])
    }

    /// Polar angle of the brightest ring, folded onto `[0, π/2]` so that it
    /// compares with [`cone_angle`] for either end of the chain.
    pub fn cone_peak(&self) -> f64 {
        let theta = self.peak().0;
        theta.min(std::f64::consts::PI - theta)
    }

    /// Azimuthal average `I(θ)`.
    pub fn polar_profile(&self) -> Vec<f64> {
        self.intensity
            .rows()
            .into_iter()
            .map(|r| r.sum() / r.len() as f64)
            .collect()
    }
}

/// Far field of dipoles `p⟨σ_ge^n⟩` at the chain sites, using the radiative
/// part of the Green tensor, `e^{ikR}/(4πR) (I - R̂R̂)`, from each atom.
pub fn far_field_pattern(
    coherences: &Array1<C64>,
    geometry: &ChainGeometry,
    grid: &AngularGrid,
) -> Result<FarFieldPattern> {
    grid.validate()?;
    if coherences.len() != geometry.n_atoms() {
        return Err(Error::DimensionMismatch {
            expected: geometry.n_atoms(),
            found: coherences.len(),
        });
    }
    if coherences.iter().all(|c| c.norm() == 0.0) {
        return Err(Error::ZeroField);
    }
    let theta = grid.thetas();
    let phi = grid.phis();
    let p = geometry.dipole();
    let positions = geometry.positions();
    let rows: Vec<Vec<f64>> = theta
        .par_iter()
        .map(|&t| {
            phi.iter()
                .map(|&f| {
                    let r = [
                        grid.radius * t.sin() * f.cos(),
                        grid.radius * t.sin() * f.sin(),
                        grid.radius * t.cos(),
                    ];
                    intensity_at(r, p, &positions, coherences)
                })
                .collect()
        })
        .collect();
    let mut intensity = Array2::from_shape_vec(
        (theta.len(), phi.len()),
        rows.into_iter().flatten().collect(),
    )
    .expect("rows have the grid shape");
    let peak = intensity.fold(0.0f64, |m, &v| m.max(v));
    if !(peak > 0.0) {
        return Err(Error::ZeroField);
    }
    intensity.mapv_inplace(|v| v / peak);
    Ok(FarFieldPattern {
        theta,
        phi,
        intensity,
    })
}

fn intensity_at(r: [f64; 3], p: [f64; 3], positions: &[[f64; 3]], c: &Array1<C64>) -> f64 {
    let mut e = [C64::new(0.0, 0.0); 3];
    for (pos, &cn) in positions.iter().zip(c) {
        let d = [r[0] - pos[0], r[1] - pos[1], r[2] - pos[2]];
        let dist = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        let u = [d[0] / dist, d[1] / dist, d[2] / dist];
        let pu = p[0] * u[0] + p[1] * u[1] + p[2] * u[2];
        let amp = cn * C64::from_polar(1.0 / dist, K0 * dist);
        for i in 0..3 {
            e[i] += amp * (p[i] - pu * u[i]);
        }
    }
    e.iter().map(|x| x.norm_sqr()).sum()
}

/// `θ = atan(k_⊥/k_z)` with `k_⊥ = √(k₀² - k_z²)`, or `None` for a mode
/// outside the light cone.
pub fn cone_angle(xi_aim: usize, n_atoms: usize, spacing: f64) -> Result<Option<f64>> {
    let kz = kz_of_mode(n_atoms, spacing, xi_aim)?;
    Ok(cone_angle_of_kz(kz))
}

pub fn cone_angle_of_kz(kz: f64) -> Option<f64> {
    let kz = kz.abs();
    if kz >= K0 {
        return None;
    }
    Some((K0 * K0 - kz * kz).sqrt().atan2(kz))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_green::{coupling_matrices, dyadic_green};
    use crate::modes::single_modes;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn coarse() -> AngularGrid {
        AngularGrid {
            n_phi: 13,
            n_theta: 181,
            radius: 1e3,
        }
    }

    #[test]
    fn single_dipole_donut() {
        let g = ChainGeometry::new(1, 0.35).unwrap();
        let p = far_field_pattern(&Array1::from(vec![C64::new(0.3, 0.1)]), &g, &coarse()).unwrap();
        for (i, t) in p.theta.iter().enumerate() {
            for j in 0..p.phi.len() {
                // the dipole sits at z = a, so the sin²θ of the origin is
                // slightly off; a/r ~ 3.5e-4
                assert!((p.intensity[[i, j]] - t.sin().powi(2)).abs() < 1e-3);
            }
        }
        assert!(p.intensity[[0, 0]] < 1e-10);
        assert!(p.intensity[[180, 5]] < 1e-10);
    }

    #[test]
    fn cone_angle_special_points() {
        assert!((cone_angle_of_kz(K0 / 2f64.sqrt()).unwrap() - FRAC_PI_4).abs() < 1e-12);
        assert!((cone_angle_of_kz(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(cone_angle(1, 100, 0.35).unwrap(), None);
        assert!(cone_angle(0, 10, 0.35).is_err());
    }

    #[test]
    fn matches_the_full_green_tensor() {
        let geometry = ChainGeometry::new(8, 0.35).unwrap();
        let c: Array1<C64> = (0..8).map(|n| C64::from_polar(1.0 + 0.1 * n as f64, 0.7 * n as f64)).collect();
        let grid = AngularGrid {
            n_phi: 5,
            n_theta: 37,
            radius: 1e3,
        };
        let approx = far_field_pattern(&c, &geometry, &grid).unwrap();
        let mut exact = Array2::<f64>::zeros(approx.intensity.dim());
        for (i, t) in approx.theta.iter().enumerate() {
            for (j, f) in approx.phi.iter().enumerate() {
                let r = [1e3 * t.sin() * f.cos(), 1e3 * t.sin() * f.sin(), 1e3 * t.cos()];
                let mut e = [C64::new(0.0, 0.0); 3];
                for (n, pos) in geometry.positions().iter().enumerate() {
                    let g = dyadic_green(*pos, r).unwrap();
                    for (k, ek) in e.iter_mut().enumerate() {
                        *ek += g[k][2] * c[n];
                    }
                }
                exact[[i, j]] = e.iter().map(|x| x.norm_sqr()).sum();
            }
        }
        let peak = exact.fold(0.0f64, |m, &v| m.max(v));
        for (a, b) in approx.intensity.iter().zip(exact.iter()) {
            assert!((a - b / peak).abs() < 1e-3);
        }
    }

    #[test]
    fn global_phase_and_azimuthal_symmetry() {
        let geometry = ChainGeometry::new(6, 0.35).unwrap();
        let c: Array1<C64> = (0..6).map(|n| C64::new(n as f64 - 2.0, 0.5)).collect();
        let a = far_field_pattern(&c, &geometry, &coarse()).unwrap();
        let rotated = c.mapv(|x| x * C64::from_polar(1.0, 1.234));
        let b = far_field_pattern(&rotated, &geometry, &coarse()).unwrap();
        for (x, y) in a.intensity.iter().zip(b.intensity.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
        for row in a.intensity.rows() {
            for v in row.iter() {
                assert!((v - row[0]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_field_and_bad_input() {
        let g = ChainGeometry::new(3, 0.35).unwrap();
        assert!(matches!(
            far_field_pattern(&Array1::zeros(3), &g, &coarse()),
            Err(Error::ZeroField)
        ));
        assert!(far_field_pattern(&Array1::zeros(2), &g, &coarse()).is_err());
        let empty = AngularGrid {
            n_phi: 0,
            ..AngularGrid::default()
        };
        assert!(far_field_pattern(&Array1::ones(3), &g, &empty).is_err());
    }

    #[test]
    fn mode_pattern_peaks_on_the_cone() {
        let (n, a) = (20, 0.35);
        let modes = single_modes(&coupling_matrices(&ChainGeometry::new(n, a).unwrap())).unwrap();
        let geometry = ChainGeometry::new(n, a).unwrap();
        for xi in [13, 15, 17] {
            let theta = cone_angle(xi, n, a).unwrap().unwrap();
            let p = far_field_pattern(&modes[xi - 1].amplitudes, &geometry, &coarse()).unwrap();
            let err = (p.cone_peak() - theta).abs().to_degrees();
            assert!(err < 2.0 + 1.0, "ξ = {xi}: peak off by {err}°");
        }
    }
}
