mod common;

use algdyn::analytic::{vk_decompose, vk_verify_uniqueness, zero_divisor_check, FiniteSupport, TrigLift};
use common::laurent;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn lift_and_character(m: usize) -> impl Strategy<Value = (TrigLift, Vec<i64>)> {
    (
        any::<u64>(),
        1usize..=4,
        0.0f64..4.9,
        prop::collection::vec(-3i64..=3, m),
    )
        .prop_map(move |(seed, modes, amp, c)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (TrigLift::random(m, modes, amp, &mut rng), c)
        })
}

fn grid_point(idx: &[usize], n: usize) -> Vec<f64> {
    idx.iter().map(|&j| j as f64 / n as f64).collect()
}

fn unflatten(mut i: usize, m: usize, n: usize) -> Vec<usize> {
    let mut idx = vec![0; m];
    for k in (0..m).rev() {
        idx[k] = i % n;
        i /= n;
    }
    idx
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn circle_round_trip((s, c) in lift_and_character(1)) {
        let n = 1024;
        let d = vk_decompose(&s.sample(&c, n).unwrap()).unwrap();
        prop_assert_eq!(&d.character, &c);
        for (i, got) in d.lift.iter().enumerate() {
            let want = s.eval(&grid_point(&[i], n));
            prop_assert!((got - want).abs() < 1e-9, "at {}: {} vs {}", i, got, want);
        }
    }

    #[test]
    fn torus_round_trip((s, c) in lift_and_character(2)) {
        let n = 256;
        let f = s.sample(&c, n).unwrap();
        let d = vk_decompose(&f).unwrap();
        prop_assert_eq!(&d.character, &c);
        for (i, got) in d.lift.iter().enumerate() {
            let want = s.eval(&grid_point(&unflatten(i, 2, n), n));
            prop_assert!((got - want).abs() < 1e-9);
        }
        prop_assert!(vk_verify_uniqueness(&f).unwrap().unique);
    }

    #[test]
    fn translation_shifts_the_lift((s, c) in lift_and_character(2), a in prop::collection::vec(0usize..256, 2)) {
        let n = 256;
        let f = s.sample(&c, n).unwrap();
        let base = vk_decompose(&f).unwrap();
        let moved = vk_decompose(&f.translate(&a).unwrap()).unwrap();
        prop_assert_eq!(&moved.character, &base.character);
        let at = |idx: &[usize]| base.lift[idx[0] * n + idx[1]];
        let origin = at(&a);
        for (i, got) in moved.lift.iter().enumerate() {
            let idx = unflatten(i, 2, n);
            let shifted: Vec<usize> = idx.iter().zip(&a).map(|(j, t)| (j + t) % n).collect();
            let want = at(&shifted) - origin;
            prop_assert!((got - want).abs() < 1e-9, "{} vs {}", got, want);
        }
    }

    #[test]
    fn fourier_identity_and_no_kernel(g in (1usize..=2).prop_flat_map(|d| laurent(d, 4, 2, 3)), seed in any::<u64>()) {
        prop_assume!(!g.is_zero());
        let r = zero_divisor_check(&FiniteSupport::from_poly(&g), 100, 3, seed).unwrap();
        prop_assert!(r.fourier_residual < 1e-10);
        prop_assert_eq!(r.kernel_dim, 0);
        prop_assert!(r.norm_ratio < 1e-6);
    }
}
