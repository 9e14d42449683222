use approx::assert_relative_eq;
use proptest::prelude::*;
use uavnet_core::specfun::{binomial, factorial, gamma, gauss_2f1, pochhammer, upper_gamma_ratio, Hyp2F1Args};

proptest! {
    #[test]
    fn pochhammer_recurrence(x in 0.1f64..20.0, n in 0u32..15) {
        let lhs = pochhammer(x, n + 1);
        let rhs = pochhammer(x, n) * (x + f64::from(n));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn gamma_recurrence(x in 0.05f64..30.0) {
        let lhs = gamma(x + 1.0);
        let rhs = x * gamma(x);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
    }

    #[test]
    fn upper_gamma_ratio_is_a_survival_function(m in 1u32..8, x in 0.0f64..50.0, dx in 0.0f64..5.0) {
        let q = upper_gamma_ratio(m, x);
        prop_assert!((0.0..=1.0).contains(&q));
        prop_assert!(upper_gamma_ratio(m, x + dx) <= q + 1e-15);
        prop_assert!(upper_gamma_ratio(m + 1, x) >= q - 1e-15);
    }

    #[test]
    fn hyp2f1_is_symmetric_in_a_and_b(a in 0.1f64..3.0, b in 0.1f64..3.0, c in 1.1f64..4.0, z in -1e4f64..0.0) {
        let ab = gauss_2f1(Hyp2F1Args::new(a, b, c, z)).unwrap();
        let ba = gauss_2f1(Hyp2F1Args::new(b, a, c, z)).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-10 * ab.abs().max(1e-300));
    }

    #[test]
    fn hyp2f1_matches_binomial_series(a in 0.1f64..4.0, z in -1e3f64..0.0) {
        // 2F1(a, b; b; z) = (1 - z)^-a
        let v = gauss_2f1(Hyp2F1Args::new(a, 1.7, 1.7, z)).unwrap();
        let expected = (1.0 - z).powf(-a);
        prop_assert!((v - expected).abs() <= 1e-10 * expected);
    }
}

#[test]
fn hyp2f1_log_identity() {
    // z 2F1(1, 1; 2; -z) = ln(1 + z)
    for z in [1e-3, 0.3, 0.9, 1.0, 2.5, 40.0, 1e6] {
        let v = z * gauss_2f1(Hyp2F1Args::new(1.0, 1.0, 2.0, -z)).unwrap();
        assert_relative_eq!(v, (1.0f64 + z).ln(), max_relative = 1e-10);
    }
}

#[test]
fn hyp2f1_arctan_identity() {
    // 2F1(1/2, 1; 3/2; -x^2) = atan(x) / x
    for x in [0.1f64, 0.7, 1.0, 3.0, 100.0] {
        let v = gauss_2f1(Hyp2F1Args::new(0.5, 1.0, 1.5, -x * x)).unwrap();
        assert_relative_eq!(v, x.atan() / x, max_relative = 1e-12);
    }
}

#[test]
fn integer_helpers() {
    assert_eq!(factorial(0), 1.0);
    assert_eq!(factorial(6), 720.0);
    assert_eq!(binomial(6, 2), 15.0);
    assert_eq!(binomial(5, 0), 1.0);
    assert_relative_eq!(upper_gamma_ratio(1, 2.0), (-2.0f64).exp(), max_relative = 1e-15);
}
