use ng_geometry::gaussian::{h_function, thermal_box, thermal_distribution};
use ng_geometry::perturb::{poisson_distribution, MIN_COHERENCE_GAP};
use ng_geometry::verify::{
    project_energy_simplex, random_classical_direction, search_max_ng, substream, verify_second_order, CheckKind,
    SearchConfig, SecondOrderConfig, Stream,
};
use ng_geometry::{
    coherence_perturbation, concavity_bound, convex_combination, covariance_of, fidelity, gaussian_state,
    ng_exact_diagonal, non_gaussianity, relative_entropy, thermal_state, Complex, DensityMatrix, GaussianParams,
    NumberDistribution,
};
use proptest::prelude::*;

fn weights(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0f64, len).prop_filter("not all zero", |w| w.iter().sum::<f64>() > 1e-3)
}

fn padded(w: Vec<f64>, len: usize) -> NumberDistribution {
    let mut w = w;
    w.resize(len, 0.0);
    NumberDistribution::normalized(w).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn h_is_increasing_from_zero(x in 0.5..50.0f64, dx in 1e-3..5.0f64) {
        prop_assert!(h_function(0.5_f64).unwrap().abs() < 1e-15);
        prop_assert!(h_function(x + dx).unwrap() > h_function(x).unwrap());
        prop_assert!(h_function(x).unwrap() >= 0.0);
    }

    #[test]
    fn diagonal_non_gaussianity_is_non_negative(w in weights(12)) {
        let q = padded(w, 48);
        let d = ng_exact_diagonal(&q).unwrap();
        prop_assert!(d >= -1e-12, "delta {}", d);
        let rho = DensityMatrix::from_distribution(&q).unwrap();
        prop_assert!((non_gaussianity(&rho).unwrap() - d).abs() < 1e-10);
    }

    #[test]
    fn relative_entropy_is_non_negative(w in weights(10), v in weights(10), n in 0.1..3.0f64) {
        let dim = thermal_box(3.0_f64);
        let p = thermal_distribution(n, dim).unwrap();
        let a = padded(w, dim);
        let b = padded(v, dim);
        // mixing in the thermal state keeps the second argument full rank
        let tau = convex_combination(&p, &b, 0.5).unwrap();
        let rho = DensityMatrix::from_distribution(&a).unwrap();
        let tau = DensityMatrix::from_distribution(&tau).unwrap();
        prop_assert!(relative_entropy(&rho, &tau).unwrap() >= -1e-12);
        prop_assert!(relative_entropy(&tau, &tau).unwrap().abs() < 1e-12);
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(w in weights(8), v in weights(8)) {
        let a = DensityMatrix::from_distribution(&padded(w, 24)).unwrap();
        let b = DensityMatrix::from_distribution(&padded(v, 24)).unwrap();
        let f = fidelity(&a, &b).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
        prop_assert!((f - fidelity(&b, &a).unwrap()).abs() < 1e-10);
        prop_assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn classical_directions_are_normalized(seed in any::<u64>(), n in 0.2..8.0f64, fix in any::<bool>()) {
        let p = thermal_distribution(n, thermal_box(n)).unwrap();
        let dp = random_classical_direction(&p, fix, &mut substream(seed, Stream::Theorem1, 0));
        prop_assert!(dp.iter().sum::<f64>().abs() < 1e-12);
        let fisher: f64 = p.probs().iter().zip(&dp).filter(|(a, _)| **a > 0.0).map(|(a, d)| d * d / a).sum();
        prop_assert!((fisher - 1.0).abs() < 1e-12);
        if fix {
            let dn: f64 = dp.iter().enumerate().map(|(k, d)| k as f64 * d).sum();
            prop_assert!(dn.abs() < 1e-10, "energy shift {}", dn);
        }
    }

    #[test]
    fn mixing_respects_the_concavity_bound(w in weights(15), n_t in 0.5..6.0f64, eps in 0.0..=1.0f64) {
        let dim = 200;
        let p = thermal_distribution(n_t, dim).unwrap();
        let mu = padded(w, dim);
        let q = convex_combination(&p, &mu, eps).unwrap();
        let exact = ng_exact_diagonal(&q).unwrap();
        let bound = concavity_bound(n_t, &mu, eps).unwrap();
        prop_assert!(exact <= bound + 1e-10, "{} > {}", exact, bound);
    }

    #[test]
    fn poisson_targets_are_normalized(n in 0.0..25.0f64) {
        let mu = poisson_distribution(n, 200).unwrap();
        prop_assert!((mu.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!((mu.mean() - n).abs() < 1e-9);
    }

    #[test]
    fn projection_lands_on_the_constraint_set(y in prop::collection::vec(-1.0..1.0f64, 12), n_mu in 0.5..10.5f64) {
        let x = project_energy_simplex(&y, n_mu);
        let total: f64 = x.iter().sum();
        let mean: f64 = x.iter().enumerate().map(|(k, v)| k as f64 * v).sum();
        prop_assert!(x.iter().all(|&v| v >= 0.0));
        prop_assert!((total - 1.0).abs() < 1e-12, "total {}", total);
        prop_assert!((mean - n_mu).abs() < 1e-10, "mean {}", mean);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn gaussian_states_have_no_non_gaussianity(
        n in 0.0..1.5f64,
        r in 0.0..0.35f64,
        phi in -3.0..3.0f64,
        re in -0.8..0.8f64,
        im in -0.8..0.8f64,
    ) {
        let params = GaussianParams::new(n, Complex::from_polar(r, phi), Complex::new(re, im)).unwrap();
        let rho = gaussian_state(&params, 120).unwrap();
        let d = non_gaussianity(&rho).unwrap();
        prop_assert!(d.abs() <= 1e-6, "delta {}", d);
    }

    #[test]
    fn far_coherences_keep_the_covariance(j in 0usize..20, gap in MIN_COHERENCE_GAP..10, phase in -3.0..3.0f64) {
        let tau = thermal_state(1.0_f64, 64).unwrap();
        let k = j + gap;
        let amp: f64 = 0.5 * (tau.matrix()[(j, j)].re * tau.matrix()[(k, k)].re).sqrt();
        let rho = coherence_perturbation(&tau, j, k, Complex::from_polar(1.0, phase), amp).unwrap();
        let before = covariance_of(&tau).unwrap();
        let after = covariance_of(&rho).unwrap();
        prop_assert!((before.sigma - after.sigma).amax() < 1e-12);
        prop_assert!((before.mean - after.mean).amax() < 1e-12);
    }

    #[test]
    fn report_verdict_follows_its_worst_case(tol in 0.0..2e-3f64, seed in any::<u64>()) {
        let report = verify_second_order(&SecondOrderConfig { count: 6, seed, tolerance: tol, ..Default::default() }).unwrap();
        let within = match report.kind {
            CheckKind::Equality => report.worst <= tol,
            CheckKind::Inequality => report.worst >= -tol,
        };
        prop_assert_eq!(report.passed, within);
        prop_assert_eq!(report.residuals.len(), 6);
    }
}

#[test]
fn two_level_search_finds_the_fock_state() {
    let cfg = SearchConfig {
        n_mu: 1.0,
        support: 2,
        restarts: 2,
        iterations: 40,
        ..SearchConfig::default()
    };
    let result = search_max_ng(&cfg).unwrap();
    assert_eq!(result.support, vec![1]);
    assert_eq!(result.fock_match, Some(true));
}

#[test]
fn search_beats_random_targets() {
    let cfg = SearchConfig {
        support: 12,
        restarts: 4,
        iterations: 100,
        ..SearchConfig::default()
    };
    let found = search_max_ng(&cfg).unwrap();
    let (baseline, _) = ng_geometry::verify::random_target_baseline(&cfg, 50).unwrap();
    assert!(found.delta >= baseline);
}

#[test]
fn fractional_energy_search_uses_two_levels() {
    let cfg = SearchConfig {
        n_mu: 3.5,
        support: 12,
        restarts: 4,
        iterations: 100,
        ..SearchConfig::default()
    };
    let result = search_max_ng(&cfg).unwrap();
    assert_eq!(result.support.len(), 2);
    assert!(result.support[0] < 4 && result.support[1] > 3);
    assert!(result.fock_match.is_none());
}
