use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use casimir_core::analysis::scaled_real;
use casimir_core::specfun::{binomial, gamma_half, HalfInteger};
use casimir_core::{dirichlet_energy, to_sig_digits, PrecisionContext, Real};

fn ctx(d: u32) -> PrecisionContext {
    PrecisionContext::new(d).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn division_is_correctly_rounded(n in -10_000_000i64..10_000_000, d in 1i64..1_000_000, digits in 10u32..40) {
        let q = Real::from_int(n, digits).div_with(&Real::from_int(d, digits), digits).unwrap();
        let exact = Real::from_rational(&BigRational::new(BigInt::from(n), BigInt::from(d)), digits);
        prop_assert_eq!(q, exact);
    }

    #[test]
    fn addition_commutes_and_is_deterministic(a in -1e6f64..1e6, b in -1e6f64..1e6, digits in 10u32..30) {
        let x = Real::from_f64(a, 40).unwrap();
        let y = Real::from_f64(b, 40).unwrap();
        prop_assert_eq!(x.add_with(&y, digits), y.add_with(&x, digits));
        prop_assert_eq!(x.mul_with(&y, digits), x.mul_with(&y, digits));
    }

    #[test]
    fn rounding_is_idempotent(a in -1e12f64..1e12, n in 10u32..25) {
        let x = Real::from_f64(a, 40).unwrap();
        prop_assert_eq!(x.with_digits(n).with_digits(n), x.with_digits(n));
    }

    #[test]
    fn sig_digit_strings_round_trip(a in -1e9f64..1e9, n in 1u32..15) {
        prop_assume!(a != 0.0);
        let x = Real::from_f64(a, 40).unwrap();
        let s = to_sig_digits(&x, n).unwrap();
        prop_assert_eq!(Real::parse_with_digits(&s, n).unwrap(), x.with_digits(n));
    }

    #[test]
    fn scaled_value_preserves_sign(m in 1u64..999_999, e in 0u32..30, negative: bool) {
        let text = format!("{}{}e-{}", if negative { "-" } else { "" }, m, e + 7);
        let x = Real::parse_with_digits(&text, 30).unwrap();
        prop_assert_eq!(scaled_real(&x).unwrap().signum(), x.signum());
    }

    #[test]
    fn binomial_symmetry(n in 0i64..150, k in 0i64..150) {
        prop_assume!(k <= n);
        prop_assert_eq!(binomial(n, k).unwrap(), binomial(n, n - k).unwrap());
    }

    #[test]
    fn gamma_recurrence(twice in 1u64..=240) {
        let c = ctx(40);
        let x = HalfInteger::from_twice(twice).unwrap();
        let lhs = gamma_half(x.succ(), &c);
        let rhs = Real::from_rational(&x.to_rational(), 60).mul_with(&gamma_half(x, &c), 40);
        let diff = lhs.add_with(&-&rhs, 60);
        prop_assert!(diff.is_zero() || diff.log10_abs() - lhs.log10_abs() < -38.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dirichlet_energy_is_stable_under_more_precision(d in 1u32..=110) {
        let low = dirichlet_energy(d, &ctx(30)).unwrap();
        let high = dirichlet_energy(d, &ctx(60)).unwrap();
        prop_assert_eq!(low.value, high.value.with_digits(30));
        prop_assert_eq!(low.sign, high.sign);
    }
}
