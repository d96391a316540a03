use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use su2_tomography::measure::{build_grid, displaced_probabilities, exact_probability_grid, sample_measurements};
use su2_tomography::reconstruct::{
    density_from_multipoles, fidelity, max_abs_diff, multipoles_from_density, multipoles_from_probabilities,
    q_function, trace_distance,
};
use su2_tomography::states::{make_coherent, random, DensityMatrix, Operator};
use su2_tomography::{Execution, HalfInteger, SpherePoint};

fn mixed(two_j: i32, rank: usize, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random::mixed(HalfInteger::from_twice(two_j), rank, &mut rng)
}

fn point() -> impl Strategy<Value = SpherePoint> {
    (0.0..=std::f64::consts::PI, 0.0..std::f64::consts::TAU).prop_map(|(t, p)| SpherePoint::new(t, p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn displaced_populations_form_a_distribution(two_j in 0i32..=10, seed: u64, n in point()) {
        let rho = mixed(two_j, 2, seed);
        let p = displaced_probabilities(&rho, n);
        prop_assert_eq!(p.len(), rho.dim());
        prop_assert!(p.iter().all(|v| (-1e-14..=1.0 + 1e-14).contains(v)));
        assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn husimi_is_top_population(two_j in 0i32..=10, seed: u64, n in point()) {
        let rho = mixed(two_j, 3, seed);
        assert_abs_diff_eq!(q_function(&rho, n), displaced_probabilities(&rho, n)[0], epsilon = 1e-12);
    }

    #[test]
    fn coherent_overlap_falls_off_with_angle(two_j in 1i32..=12, a in point(), b in point()) {
        let j = HalfInteger::from_twice(two_j);
        let ka = make_coherent(j, a).unwrap();
        let kb = make_coherent(j, b).unwrap();
        let want = ((1.0 + a.dot(b)) / 2.0).powi(two_j);
        assert_abs_diff_eq!(ka.inner(&kb).norm_sqr(), want, epsilon = 1e-12);
    }

    #[test]
    fn multipole_expansion_is_invertible(two_j in 0i32..=10, seed: u64) {
        let rho = mixed(two_j, 2, seed);
        let back = density_from_multipoles(&multipoles_from_density(&rho));
        prop_assert!(max_abs_diff(&rho, &back).unwrap() < 1e-12);
    }

    #[test]
    fn exact_data_reconstruct_any_state(two_j in 0i32..=8, seed: u64) {
        let rho = mixed(two_j, 3, seed);
        let j = rho.j();
        let grid = build_grid(j, 1.0).unwrap();
        let pg = exact_probability_grid(&rho, &grid, j).unwrap();
        let est = density_from_multipoles(&multipoles_from_probabilities(&pg).unwrap());
        prop_assert!(max_abs_diff(&rho, &est).unwrap() < 1e-10);
    }

    #[test]
    fn fidelity_and_trace_distance_bounds(two_j in 0i32..=8, s1: u64, s2: u64) {
        let a = mixed(two_j, 2, s1);
        let b = mixed(two_j, 3, s2);
        let f = fidelity(&a, &b).unwrap();
        let t = trace_distance(&a, &b).unwrap();
        assert_abs_diff_eq!(f, fidelity(&b, &a).unwrap(), epsilon = 1e-9);
        prop_assert!((0.0..=1.0).contains(&f) && (0.0..=1.0 + 1e-12).contains(&t));
        prop_assert!(1.0 - f.sqrt() <= t + 1e-9);
        prop_assert!(t <= (1.0 - f).max(0.0).sqrt() + 1e-9);
    }

    #[test]
    fn sampling_is_execution_independent(two_j in 0i32..=6, seed: u64, shots in 1u64..500) {
        let rho = mixed(two_j, 2, seed);
        let grid = build_grid(rho.j(), 1.0).unwrap();
        let a = su2_tomography::measure::sample_measurements_with(&rho, &grid, shots, seed, Execution::Sequential).unwrap();
        let b = sample_measurements(&rho, &grid, shots, seed).unwrap();
        prop_assert_eq!(a.counts(), b.counts());
        prop_assert!(a.counts().iter().all(|row| row.iter().sum::<u64>() == shots));
    }
}
