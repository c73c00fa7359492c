use casimir_core::oracle::{anchor_1d, extract_constant, regularized_sum, CutoffGrid, SumKernel};
use casimir_core::{dirichlet_energy, neumann_energy, BoundaryCondition, PrecisionContext, Real};

fn ctx() -> PrecisionContext {
    PrecisionContext::new(30).unwrap()
}

fn r(s: &str) -> Real {
    Real::parse_with_digits(s, 30).unwrap()
}

fn gap(a: &Real, b: &Real) -> f64 {
    (a.to_f64() - b.to_f64()).abs()
}

// Independent numpy evaluation (float64, direct lattice loop).
const D2_A005_T40: f64 = 38850.14011230306;

#[test]
fn d2_sum_matches_frozen_value() {
    let s = regularized_sum(2, BoundaryCondition::Dirichlet, &r("0.05"), &r("40"), &ctx()).unwrap();
    assert_eq!(s.kernel, SumKernel::Binary64);
    let rel = (s.value.to_f64() - D2_A005_T40).abs() / D2_A005_T40;
    assert!(rel < 1e-12, "relative deviation {rel:e}");
    assert!(s.relative_tail_bound < 1e-12);
}

#[test]
fn truncation_stable_from_40_to_50() {
    for (d, a) in [(2, "0.05"), (3, "0.1"), (1, "0.05")] {
        let lo = regularized_sum(d, BoundaryCondition::Dirichlet, &r(a), &r("40"), &ctx()).unwrap();
        let hi = regularized_sum(d, BoundaryCondition::Dirichlet, &r(a), &r("50"), &ctx()).unwrap();
        let rel = gap(&lo.value, &hi.value) / hi.value.to_f64().abs();
        assert!(rel < 1e-12, "D={d} a={a}: {rel:e}");
    }
}

#[test]
fn dirichlet_constants_within_tolerance() {
    let c = ctx();
    let grid = CutoffGrid::default_grid(c.working_digits());
    for d in 1..=3 {
        let fit = extract_constant(d, BoundaryCondition::Dirichlet, &grid, &c).unwrap();
        let exact = dirichlet_energy(d, &c).unwrap().value;
        let err = gap(&fit.extracted_constant, &exact);
        assert!(
            err < 1e-3,
            "D={d}: fit {} vs {} ({err:e})",
            fit.extracted_constant,
            exact
        );
        assert!(
            fit.max_relative_residual < 1e-6,
            "D={d}: residual {}",
            fit.max_relative_residual
        );
    }
}

#[test]
fn neumann_constant_d2() {
    let c = ctx();
    let grid = CutoffGrid::default_grid(c.working_digits());
    let fit = extract_constant(2, BoundaryCondition::Neumann, &grid, &c).unwrap();
    let exact = neumann_energy(2, &c).unwrap().value;
    assert!(gap(&fit.extracted_constant, &exact) < 1e-3);
}

#[test]
fn one_dimensional_anchor() {
    let c = ctx();
    let grid = CutoffGrid::geometric(0.1, 0.8, 12, 45.0, c.working_digits()).unwrap();
    let fit = anchor_1d(&grid, &c).unwrap();
    let minus_pi_24 = -std::f64::consts::PI / 24.0;
    assert!((fit.extracted_constant.to_f64() - minus_pi_24).abs() < 1e-6);
    // leading divergence is (π/2)/a²
    assert!((fit.coefficients[0].to_f64() - std::f64::consts::FRAC_PI_2).abs() < 1e-8);
}

#[test]
fn rejects_out_of_range_requests() {
    let c = ctx();
    let grid = CutoffGrid::default_grid(c.working_digits());
    assert!(extract_constant(4, BoundaryCondition::Dirichlet, &grid, &c).is_err());
    let narrow = CutoffGrid::geometric(0.4, 0.95, 12, 45.0, c.working_digits()).unwrap();
    assert!(extract_constant(1, BoundaryCondition::Dirichlet, &narrow, &c).is_err());
    assert!(regularized_sum(2, BoundaryCondition::Dirichlet, &r("0.05"), &r("30"), &c).is_err());
}
