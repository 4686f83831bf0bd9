//! Property tests of the algebraic invariants.

use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;
use strad::{hardness, realify, tnn, AffineFamily};

fn matrix_strategy(rows: usize, cols: usize) -> impl Strategy<Value = DMatrix<f64>> {
    proptest::collection::vec(-10.0f64..10.0, rows * cols)
        .prop_map(move |data| DMatrix::from_vec(rows, cols, data))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn realified_spectrum_doubles_the_complex_one(
        (rows, cols) in (1usize..5, 1usize..6),
        seed in any::<u64>(),
    ) {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x = DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-5.0..5.0));
        let y = DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-5.0..5.0));
        let zc = DMatrix::<Complex<f64>>::from_fn(rows, cols, |i, j| {
            Complex::new(x[(i, j)], y[(i, j)])
        });
        let mut sc: Vec<f64> = zc.svd(false, false).singular_values.iter().copied().collect();
        sc.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let sw = tnn::singular_values(&realify(&x, &y).unwrap()).unwrap();
        let scale = 1.0 + sc[0];
        for (k, s) in sc.iter().enumerate() {
            prop_assert!((sw[2 * k] - s).abs() / scale < 1e-10);
            prop_assert!((sw[2 * k + 1] - s).abs() / scale < 1e-10);
        }
    }

    #[test]
    fn truncated_norm_is_the_tail_of_the_spectrum(
        z in matrix_strategy(4, 6),
        r in 0usize..5,
    ) {
        let sv = tnn::singular_values(&z).unwrap();
        let direct: f64 = sv[r.min(sv.len())..].iter().sum();
        let via = tnn::tnnr(&z, r.min(sv.len())).unwrap();
        prop_assert!((direct - via).abs() < 1e-9 * (1.0 + sv[0]));
        prop_assert!(via >= -1e-12);
    }

    #[test]
    fn family_evaluation_is_affine(
        base in matrix_strategy(3, 4),
        g1 in matrix_strategy(3, 4),
        g2 in matrix_strategy(3, 4),
        t1 in proptest::collection::vec(-3.0f64..3.0, 2),
        t2 in proptest::collection::vec(-3.0f64..3.0, 2),
        alpha in 0.0f64..1.0,
    ) {
        let fam = AffineFamily::new(base, vec![g1, g2]).unwrap();
        let mix: Vec<f64> = t1.iter().zip(&t2)
            .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
            .collect();
        let lhs = fam.evaluate(&mix).unwrap();
        let rhs = fam.evaluate(&t1).unwrap() * alpha + fam.evaluate(&t2).unwrap() * (1.0 - alpha);
        prop_assert!((lhs - rhs).abs().max() < 1e-10);
    }

    #[test]
    fn subset_sum_bruteforce_matches_dp(
        values in proptest::collection::vec(-15i64..=15, 1..10),
        target in -25i64..=25,
    ) {
        let inst = hardness::SubsetSumInstance::new(values.clone(), target).unwrap();
        let brute = hardness::subset_sum_bruteforce(&inst).unwrap();
        // Independent oracle: dynamic programming over reachable sums.
        let mut reachable = std::collections::HashSet::new();
        for &v in &values {
            let mut next = reachable.clone();
            next.insert(v);
            for &s in &reachable {
                next.insert(s + v);
            }
            reachable = next;
        }
        prop_assert_eq!(brute.is_some(), reachable.contains(&target));
    }

    #[test]
    fn reduction_equivalence_on_random_binary_points(
        values in proptest::collection::vec(-10i64..=10, 1..8),
        mask in any::<u64>(),
    ) {
        let p = values.len();
        let inst = hardness::SubsetSumInstance::with_unit_target(values.clone()).unwrap();
        let theta: Vec<bool> = (0..p).map(|i| mask & (1 << i) != 0).collect();
        let picked: i64 = theta.iter().zip(&values)
            .filter_map(|(&t, &a)| t.then_some(a))
            .sum();
        let uncontrollable = hardness::binary_uncontrollable(&inst, &theta).unwrap();
        prop_assert_eq!(uncontrollable, picked == -1);
    }
}
