//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use casimir_core::analysis::{precision_study, scan};
use casimir_core::oracle::{anchor_1d, extract_constant, verify_neumann_negativity, CutoffGrid};
use casimir_core::specfun::{bernoulli, gamma_half, zeta_even_closed_form, zeta_int, zeta_int_eta, HalfInteger};
use casimir_core::{
    dirichlet_energy, neumann_energy, to_sig_digits, BoundaryCondition, EnergySign, PrecisionContext, Real, Result,
};

const B120_NUMERATOR: &str =
    "-51507486535079109061843996857849983274095170353262675213092869167199297474922985358811329367077682677803282070131";

type Check = fn() -> Result<Outcome>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn ctx(d: u32) -> PrecisionContext {
    PrecisionContext::new(d).unwrap()
}

/// |a - b| within one unit in the `digits`-th significant place of b.
fn agree(a: &Real, b: &Real, digits: u32) -> bool {
    let w = digits + 10;
    let diff = a.with_digits(w).add_with(&-b.with_digits(w), w);
    diff.is_zero() || diff.log10_abs() - b.log10_abs() <= -(digits as f64) + 1.0
}

fn within(limit: Duration, elapsed: Duration) -> std::result::Result<(), String> {
    if elapsed <= limit {
        Ok(())
    } else {
        Err(format!("took {elapsed:.1?}, limit {limit:?}"))
    }
}

fn low_dimension_values() -> Result<Outcome> {
    let started = Instant::now();
    let di = ["-0.131", "0.0415", "-0.0157", "0.00625", "-0.00261", "0.00112"];
    let ne = ["-0.131", "-0.220", "-0.284", "-0.331", "-0.367", "-0.396"];
    let c = ctx(30);
    let mut bad = Vec::new();
    for d in 1..=6u32 {
        let a = to_sig_digits(&dirichlet_energy(d, &c)?.value, 3)?;
        let b = to_sig_digits(&neumann_energy(d, &c)?.value, 3)?;
        if a != di[d as usize - 1] {
            bad.push(format!("Di D={d}: {a}"));
        }
        if b != ne[d as usize - 1] {
            bad.push(format!("N D={d}: {b}"));
        }
    }
    let time = within(Duration::from_secs(1), started.elapsed());
    Ok(Outcome {
        pass: bad.is_empty() && time.is_ok(),
        detail: if bad.is_empty() {
            format!("12/12 values match at 3 significant digits ({:.0?})", started.elapsed())
        } else {
            format!("mismatches: {}", bad.join("; "))
        } + &time.err().map(|e| format!("; {e}")).unwrap_or_default(),
    })
}

fn critical_dimension() -> Result<Outcome> {
    let started = Instant::now();
    let report = scan(BoundaryCondition::Dirichlet, 1, 110, &ctx(50))?;
    let alternating = report.results[..34]
        .iter()
        .all(|r| r.sign == EnergySign::alternating(r.dimension));
    let negative = report.results[34..].iter().all(|r| r.sign == EnergySign::Negative);
    let time = within(Duration::from_secs(30), started.elapsed());
    Ok(Outcome {
        pass: alternating && negative && report.critical_dimension == Some(36) && time.is_ok(),
        detail: format!(
            "critical dimension {:?}, (-1)^D through 34: {alternating}, negative 35..110: {negative} ({:.1?})",
            report.critical_dimension,
            started.elapsed()
        ),
    })
}

fn neumann_negativity() -> Result<Outcome> {
    let started = Instant::now();
    let c = ctx(50);
    let mut non_negative = Vec::new();
    for d in 1..=200 {
        if neumann_energy(d, &c)?.sign != EnergySign::Negative {
            non_negative.push(d);
        }
    }
    let report = verify_neumann_negativity(60);
    let time = within(Duration::from_secs(60), started.elapsed());
    Ok(Outcome {
        pass: non_negative.is_empty() && report.passed() && time.is_ok(),
        detail: format!(
            "E_N < 0 for D=1..200 except {non_negative:?}; exact check to D=60: {} pairs, {} violations ({:.1?})",
            report.pairs_checked,
            report.violations.len(),
            started.elapsed()
        ),
    })
}

fn oracle_equivalence() -> Result<Outcome> {
    let started = Instant::now();
    let c = ctx(30);
    let grid = CutoffGrid::default_grid(c.working_digits());
    let mut pass = true;
    let mut parts = Vec::new();
    for d in 1..=3 {
        let fit = extract_constant(d, BoundaryCondition::Dirichlet, &grid, &c)?;
        let exact = dirichlet_energy(d, &c)?.value;
        let err = (fit.extracted_constant.to_f64() - exact.to_f64()).abs();
        pass &= err < 1e-3;
        parts.push(format!("D={d} |Δ|={err:.1e}"));
    }
    let fine = CutoffGrid::geometric(0.1, 0.8, 12, 45.0, c.working_digits())?;
    let anchor = anchor_1d(&fine, &c)?;
    let anchor_err = (anchor.extracted_constant.to_f64() + std::f64::consts::PI / 24.0).abs();
    pass &= anchor_err < 1e-6;
    parts.push(format!("D=1 analytic anchor |c0 + π/24|={anchor_err:.1e}"));
    let time = within(Duration::from_secs(600), started.elapsed());
    Ok(Outcome {
        pass: pass && time.is_ok(),
        detail: format!("{} ({:.1?})", parts.join(", "), started.elapsed()),
    })
}

fn precision_agreement() -> Result<Outcome> {
    let study = precision_study(1, 80, &[24, 50], 100)?;
    let mismatches = study.disagreements(24, 50, 4)?;
    let mut detail = format!("fixed-width emulation, D=1..80, 4-digit mismatches at {mismatches:?}");
    for d in &mismatches {
        detail += &format!(
            "; D={d}: 24→{} 50→{}",
            to_sig_digits(study.value(24, *d).unwrap(), 8)?,
            to_sig_digits(study.value(50, *d).unwrap(), 8)?
        );
    }
    // The guarded evaluation at a 24-digit target is reported for context only.
    let guarded = (1..=80)
        .filter(|&d| {
            let a = dirichlet_energy(d, &ctx(24)).unwrap().value;
            let b = dirichlet_energy(d, &ctx(50)).unwrap().value;
            to_sig_digits(&a, 4).unwrap() != to_sig_digits(&b, 4).unwrap()
        })
        .count();
    detail += &format!("; guarded 24-digit target: {guarded} mismatches");
    Ok(Outcome {
        pass: mismatches.is_empty(),
        detail,
    })
}

fn precision_degradation() -> Result<Outcome> {
    let study = precision_study(1, 80, &[16], 100)?;
    let o = &study.per_setting[&16];
    Ok(Outcome {
        pass: matches!(o.first_sign_error, Some(d) if (40..=60).contains(&d)),
        detail: format!(
            "16-digit emulation: first sign error at D={:?}, first leading-digit error at D={:?}",
            o.first_sign_error, o.first_first_digit_error
        ),
    })
}

fn magnitude_span() -> Result<Outcome> {
    let c = ctx(50);
    let e36 = dirichlet_energy(36, &c)?.value;
    let e1 = dirichlet_energy(1, &c)?.value;
    let ratio = e36.abs().div_with(&e1.abs(), 50)?;
    let lo = Real::parse_with_digits("1e-13", 50)?;
    let hi = Real::parse_with_digits("1e-11", 50)?;
    Ok(Outcome {
        pass: ratio >= lo && ratio <= hi,
        detail: format!("|E(36)|/|E(1)| = {}", to_sig_digits(&ratio, 4)?),
    })
}

fn special_functions() -> Result<Outcome> {
    let started = Instant::now();
    let c = ctx(100);
    let mut bad = Vec::new();
    for s in 2..=120 {
        if !agree(&zeta_int(s, &c)?, &zeta_int_eta(s, &c)?, 100) {
            bad.push(format!("zeta({s})"));
        }
    }
    for twice in 1..=120u64 {
        let x = HalfInteger::from_twice(twice)?;
        let lhs = gamma_half(x.succ(), &c);
        let rhs = Real::from_rational(&x.to_rational(), 110).mul_with(&gamma_half(x, &c), 110);
        if !agree(&lhs, &rhs, 100) {
            bad.push(format!("gamma({twice}/2)"));
        }
    }
    for m in 1..=60 {
        if !agree(&zeta_int(2 * m as i64, &c)?, &zeta_even_closed_form(m, &c)?, 100) {
            bad.push(format!("zeta({})", 2 * m));
        }
    }
    let b = bernoulli(120)?;
    // independent value (sympy)
    let b_ok = b.numer().to_string() == B120_NUMERATOR && b.denom().to_string() == "2328255930";
    if !b_ok {
        bad.push("B_120".into());
    }
    let time = within(Duration::from_secs(30), started.elapsed());
    Ok(Outcome {
        pass: bad.is_empty() && time.is_ok(),
        detail: format!(
            "dual zeta s=2..120, gamma recurrence x=1/2..60, even zeta m=1..60 at 100 digits; failures {bad:?} ({:.1?})",
            started.elapsed()
        ) + &time.err().map(|e| format!("; {e}")).unwrap_or_default(),
    })
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 8] = [
        ("low-dimension values", low_dimension_values),
        ("critical dimension", critical_dimension),
        ("neumann negativity", neumann_negativity),
        ("oracle equivalence", oracle_equivalence),
        ("precision agreement", precision_agreement),
        ("precision degradation", precision_degradation),
        ("magnitude span", magnitude_span),
        ("special functions", special_functions),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {} [{name}]: {} — {detail}",
            i + 1,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
