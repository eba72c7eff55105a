use ndarray::Array2;
use proptest::prelude::*;
use subradiant_chain::fock_space::{
    embed_hamiltonian, me_rhs, number_operator, truncated_dimension, DensityMatrix, TruncatedBasis,
};
use subradiant_chain::lattice_green::{coupling_matrices, dyadic_green, ChainGeometry};
use subradiant_chain::linalg::symmetric_eigenvalues;
use subradiant_chain::modes::{kz_of_mode, single_modes};
use subradiant_chain::radiation::cone_angle_of_kz;
use subradiant_chain::rate_model::{evolve_rate_model, gamma_closed_form, pop_closed_form, RateModelConfig};
use subradiant_chain::{C64, K0};

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Random density matrix `A A† / Tr(A A†)` from a seed-free strategy.
fn density(basis: &TruncatedBasis, entries: &[(f64, f64)]) -> DensityMatrix {
    let d = basis.dim();
    let a = Array2::from_shape_fn((d, d), |(i, j)| {
        let (re, im) = entries[(i * d + j) % entries.len()];
        C64::new(re + 0.1 * i as f64, im - 0.07 * j as f64)
    });
    let mut m = a.dot(&a.t().mapv(|z| z.conj()));
    let tr: f64 = m.diag().iter().map(|z| z.re).sum();
    m.mapv_inplace(|z| z / tr);
    // symmetrize away round-off before the Hermiticity check
    let m = (&m + &m.t().mapv(|z| z.conj())).mapv(|z| z * 0.5);
    DensityMatrix::from_matrix(basis, m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn green_tensor_is_reciprocal(x in -2.0..2.0f64, y in -2.0..2.0f64, z in 0.05..3.0f64) {
        let a = [0.0, 0.0, 0.0];
        let b = [x, y, z];
        let g = dyadic_green(a, b).unwrap();
        let h = dyadic_green(b, a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((g[i][j] - h[j][i]).norm() < 1e-12 * (1.0 + g[i][j].norm()));
                prop_assert!((g[i][j] - g[j][i]).norm() < 1e-12 * (1.0 + g[i][j].norm()));
            }
        }
    }

    #[test]
    fn decay_matrix_is_psd_with_unit_diagonal(n in 1usize..30, a in 0.05..0.49f64) {
        let c = coupling_matrices(&ChainGeometry::new(n, a).unwrap());
        for i in 0..n {
            prop_assert!((c.decay[[i, i]] - 1.0).abs() < 1e-12);
            prop_assert!((c.h_eff_single[[i, i]] - C64::new(0.0, -0.5)).norm() < 1e-12);
            for j in 0..n {
                prop_assert!((c.decay[[i, j]] - c.decay[[j, i]]).abs() < 1e-12);
                prop_assert!((c.h_eff_single[[i, j]] - c.h_eff_single[[j, i]]).norm() < 1e-12);
            }
        }
        let eig = symmetric_eigenvalues(&c.decay).unwrap();
        prop_assert!(eig.iter().all(|&e| e > -1e-8));
    }

    #[test]
    fn mode_rates_sum_to_n(n in 2usize..40, a in 0.1..0.45f64) {
        let modes = single_modes(&coupling_matrices(&ChainGeometry::new(n, a).unwrap())).unwrap();
        // Tr(-2 Im H_eff) = N and the decay ordering is ascending
        let total: f64 = modes.iter().map(|m| m.decay).sum();
        prop_assert!((total - n as f64).abs() < 1e-8);
        prop_assert!(modes.windows(2).all(|w| w[0].decay <= w[1].decay + 1e-12));
        for m in &modes {
            let norm: f64 = m.amplitudes.iter().map(|c| c.norm_sqr()).sum();
            prop_assert!((norm - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn basis_dimension_matches_binomials(n in 1usize..25, n_max in 1usize..=3) {
        let n_max = n_max.min(n);
        let expect: usize = (0..=n_max).map(|k| binomial(n, k)).sum();
        prop_assert_eq!(truncated_dimension(n, n_max), expect);
        let basis = TruncatedBasis::new(n, n_max).unwrap();
        prop_assert_eq!(basis.dim(), expect);
        for i in 0..basis.dim() {
            let s = basis.state(i);
            prop_assert_eq!(basis.index_of(s), Some(i));
        }
    }

    #[test]
    fn master_equation_preserves_trace_and_hermiticity(
        n in 2usize..6,
        n_max in 1usize..=3,
        a in 0.1..0.45f64,
        entries in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 7..13),
    ) {
        let n_max = n_max.min(n);
        let geometry = ChainGeometry::new(n, a).unwrap();
        let c = coupling_matrices(&geometry);
        let basis = TruncatedBasis::new(n, n_max).unwrap();
        let rho = density(&basis, &entries);
        let h = embed_hamiltonian(&c.h_eff_single, &basis).unwrap();
        let d = me_rhs(&rho, &h, &c.decay, &basis).unwrap();
        let tr: C64 = d.diag().sum();
        prop_assert!(tr.norm() < 1e-12, "trace derivative {tr}");
        for i in 0..basis.dim() {
            for j in 0..basis.dim() {
                prop_assert!((d[[i, j]] - d[[j, i]].conj()).norm() < 1e-12);
            }
        }
        // the excitation number can only go down when nothing drives
        let nd: f64 = number_operator(&basis).iter().map(|(i, j, v)| (v * d[[j, i]]).re).sum();
        prop_assert!(nd <= 1e-12);
    }

    #[test]
    fn closed_form_rate_lies_between_single_and_pair(
        x in 0.01..1.0f64, g1 in 1e-4..1e-1f64, kappa in 1.01..30.0f64, t in 0.0..1e4f64,
    ) {
        let g = gamma_closed_form(x, g1, kappa, t);
        prop_assert!(g >= g1 * (1.0 - 1e-12) && g <= kappa * g1 * (1.0 + 1e-12));
        let p0 = pop_closed_form(x, g1, kappa * g1, t);
        let p1 = pop_closed_form(x, g1, kappa * g1, t + 1.0);
        prop_assert!(p1 <= p0);
    }

    #[test]
    fn rate_model_population_decreases(
        x in 0.05..1.0f64, g1 in 1e-3..0.5f64, g2 in 1e-3..0.5f64, b1 in 0.0..1.0f64, b2 in 0.0..1.0f64,
        extra in 0.0..1.0f64, t in 0.0..50.0f64,
    ) {
        let g12 = b1 + b2 + extra;
        let cfg = RateModelConfig::after_illumination(x, g1, g2, g12, b1, b2);
        let s0 = evolve_rate_model(&cfg, t).unwrap();
        let s1 = evolve_rate_model(&cfg, t + 0.5).unwrap();
        prop_assert!(s0.pair >= 0.0 && s0.single1 >= 0.0 && s0.single2 >= 0.0);
        prop_assert!(s1.total_population() <= s0.total_population() + 1e-12);
    }

    #[test]
    fn cone_angle_is_within_the_light_cone(n in 2usize..60, a in 0.1..0.49f64, pick in 0.0..1.0f64) {
        let xi = 1 + ((n - 1) as f64 * pick) as usize;
        let kz = kz_of_mode(n, a, xi).unwrap();
        match cone_angle_of_kz(kz) {
            Some(theta) => {
                prop_assert!(kz.abs() < K0);
                prop_assert!((0.0..=std::f64::consts::FRAC_PI_2).contains(&theta));
                prop_assert!((theta.cos() * K0 - kz.abs()).abs() < 1e-9);
            }
            None => prop_assert!(kz.abs() >= K0),
        }
    }
}
