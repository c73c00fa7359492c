use casimir_core::energy::{dirichlet_energy_with, dirichlet_sum_ordered, EvalPolicy};
use casimir_core::specfun::zeta_int;
use casimir_core::{const_pi, dirichlet_energy, neumann_energy, EnergySign, Error, PrecisionContext, Real};

fn ctx(d: u32) -> PrecisionContext {
    PrecisionContext::new(d).unwrap()
}

fn agreeing_digits(a: &Real, b: &Real) -> f64 {
    let w = a.digits().max(b.digits()) + 10;
    let diff = a.with_digits(w).add_with(&-b.with_digits(w), w);
    if diff.is_zero() {
        f64::INFINITY
    } else {
        b.log10_abs() - diff.log10_abs()
    }
}

#[test]
fn magnitude_decays_while_signs_alternate() {
    let c = ctx(40);
    for d in 1..34 {
        let a = dirichlet_energy(d, &c).unwrap().value.abs();
        let b = dirichlet_energy(d + 1, &c).unwrap().value.abs();
        assert!(b < a, "D={d}");
    }
}

#[test]
fn fifty_and_hundred_digits_agree() {
    for d in 1..=110 {
        let lo = dirichlet_energy(d, &ctx(50)).unwrap().value;
        let hi = dirichlet_energy(d, &ctx(100)).unwrap().value;
        assert!(agreeing_digits(&lo, &hi) >= 40.0, "D={d}");
    }
}

#[test]
fn summation_order_is_immaterial_with_guard_digits() {
    for d in [10u32, 40, 60, 110] {
        let c = ctx(30).with_guard_floor(10 + d.div_ceil(2));
        let (up, _) = dirichlet_sum_ordered(d, &c, false).unwrap();
        let (down, _) = dirichlet_sum_ordered(d, &c, true).unwrap();
        assert!(agreeing_digits(&up, &down) >= 28.0, "D={d}");
    }
}

#[test]
fn pi_squared_over_six_is_zeta_two() {
    let c = ctx(60);
    let w = c.working_digits();
    let pi = const_pi(&c);
    let lhs = pi.mul_with(&pi, w).div_with(&Real::from_int(6, w), w).unwrap();
    assert!(agreeing_digits(&lhs, &zeta_int(2, &c).unwrap()) >= 59.0);
}

#[test]
fn neumann_exceeds_unit_magnitude_eventually() {
    // |E_N| grows with D; the scaled plot value is undefined once it passes 1.
    let c = ctx(30);
    let big = neumann_energy(60, &c).unwrap();
    assert_eq!(big.sign, EnergySign::Negative);
    assert!(big.value.abs() > Real::one(30));
}

#[test]
fn unguarded_evaluation_is_refused() {
    let policy = EvalPolicy {
        enforce_guard_floor: false,
        refuse_insufficient: true,
    };
    match dirichlet_energy_with(100, &ctx(16), policy) {
        Err(Error::InsufficientPrecision { dimension, .. }) => assert_eq!(dimension, 100),
        other => panic!("expected refusal, got {other:?}"),
    }
    assert!(dirichlet_energy_with(100, &ctx(16), EvalPolicy::raw()).is_ok());
}
