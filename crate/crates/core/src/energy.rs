//! Closed-form Casimir energies in units of β.
//!
//! The Dirichlet energy of the D-cube is the finite alternating sum
//!
//! ```text
//! E_Di(D) = 2^(-D-1) Σ_{p=0}^{D-1} C(D-1,p) (-1)^(p+D) π^(-(p+2)/2) Γ((p+2)/2) ζ(p+2)
//! ```
//!
//! and the Neumann energy is E_N(D) = Σ_{k=1}^{D} C(D,k) E_Di(k). The
//! Dirichlet terms grow much faster than their sum, so evaluation carries
//! at least `10 + ceil(D/2)` guard digits and refuses to report a value when
//! the observed cancellation eats into the last five working digits.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::arithmetic::{pi_digits, pow2, PrecisionContext, Real};
use crate::error::{Error, Result};
use crate::specfun::{binomial, gamma_half, zeta_int, HalfInteger};

/// Digits of headroom required beyond the observed cancellation.
pub const REFUSAL_MARGIN_DIGITS: f64 = 5.0;

const INNER_PRECISION_STEP: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl BoundaryCondition {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dirichlet" | "di" | "d" => Ok(BoundaryCondition::Dirichlet),
            "neumann" | "n" => Ok(BoundaryCondition::Neumann),
            other => Err(Error::invalid(format!("unknown boundary condition {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergySign {
    Positive,
    Negative,
}

impl EnergySign {
    pub fn of(x: &Real) -> Option<Self> {
        match x.signum() {
            1 => Some(EnergySign::Positive),
            -1 => Some(EnergySign::Negative),
            _ => None,
        }
    }

    /// (-1)^d
    pub fn alternating(d: u32) -> Self {
        if d.is_multiple_of(2) {
            EnergySign::Positive
        } else {
            EnergySign::Negative
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            EnergySign::Positive => "+",
            EnergySign::Negative => "-",
        }
    }
}

/// One evaluated energy with its cancellation diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyResult {
    pub dimension: u32,
    pub bc: BoundaryCondition,
    /// Units of β, rounded to the context's target digits.
    pub value: Real,
    pub sign: EnergySign,
    pub max_abs_term: Real,
    /// log10(max_abs_term / |value|), clamped at zero.
    pub cancellation_digits_lost: f64,
    /// The context actually used, including the guard-digit floor.
    pub context: PrecisionContext,
}

/// How strictly an evaluation guards its precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalPolicy {
    /// Raise guard digits to at least `guard_digit_floor(D)`.
    pub enforce_guard_floor: bool,
    /// Return `InsufficientPrecision` instead of a value swamped by rounding.
    pub refuse_insufficient: bool,
}

impl Default for EvalPolicy {
    fn default() -> Self {
        EvalPolicy {
            enforce_guard_floor: true,
            refuse_insufficient: true,
        }
    }
}

impl EvalPolicy {
    /// Evaluate exactly at the requested working precision, whatever comes out.
    pub fn raw() -> Self {
        EvalPolicy {
            enforce_guard_floor: false,
            refuse_insufficient: false,
        }
    }
}

pub fn guard_digit_floor(dimension: u32) -> u32 {
    10 + dimension.div_ceil(2)
}

fn check_dimension(d: u32) -> Result<()> {
    if d == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    Ok(())
}

/// π^(n/2) rounded to `digits`.
fn pi_half_power(n: i64, digits: u32) -> Result<Real> {
    let work = digits + 5;
    let pi = pi_digits(work);
    let whole = pi.powi(n.div_euclid(2))?;
    let v = if n.rem_euclid(2) == 1 {
        whole.mul_with(&pi.sqrt()?, work)
    } else {
        whole
    };
    Ok(v.with_digits(digits))
}

/// The p-th summand of the Dirichlet sum at the working precision of `ctx`.
///
/// Each factor is rounded to working precision and the product is formed
/// left to right, so at low precision this reproduces what a fixed-width
/// evaluation of the formula would produce.
pub fn dirichlet_term(dimension: u32, p: u32, ctx: &PrecisionContext) -> Result<Real> {
    check_dimension(dimension)?;
    if p >= dimension {
        return Err(Error::invalid(format!(
            "term index p={p} outside [0, {}]",
            dimension - 1
        )));
    }
    let digits = ctx.working_digits();
    let d = dimension as i64;
    let p_i = p as i64;
    let scale = Real::from_ratio(&1.into(), &pow2(dimension + 1), digits);
    let choose = Real::from_bigint(&binomial(d - 1, p_i)?, digits);
    let pi_factor = pi_half_power(-(p_i + 2), digits)?;
    let gamma = gamma_half(HalfInteger::from_twice(p as u64 + 2)?, ctx);
    let zeta = zeta_int(p_i + 2, ctx)?;
    let mut term = scale
        .mul_with(&choose, digits)
        .mul_with(&pi_factor, digits)
        .mul_with(&gamma, digits)
        .mul_with(&zeta, digits);
    if (p + dimension) % 2 == 1 {
        term = -term;
    }
    Ok(term)
}

/// Sum of the Dirichlet terms in ascending p at exactly the working
/// precision of `ctx`; returns (sum, max |term|).
pub fn dirichlet_sum(dimension: u32, ctx: &PrecisionContext) -> Result<(Real, Real)> {
    dirichlet_sum_ordered(dimension, ctx, false)
}

/// As [`dirichlet_sum`], optionally summing from the largest p down.
pub fn dirichlet_sum_ordered(dimension: u32, ctx: &PrecisionContext, descending: bool) -> Result<(Real, Real)> {
    check_dimension(dimension)?;
    let digits = ctx.working_digits();
    let terms = (0..dimension)
        .map(|p| dirichlet_term(dimension, p, ctx))
        .collect::<Result<Vec<_>>>()?;
    let mut sum = Real::zero(digits);
    let mut max_abs = Real::zero(digits);
    let order: Box<dyn Iterator<Item = &Real>> = if descending {
        Box::new(terms.iter().rev())
    } else {
        Box::new(terms.iter())
    };
    for t in order {
        sum = sum.add_with(t, digits);
        let a = t.abs();
        if a > max_abs {
            max_abs = a;
        }
    }
    Ok((sum, max_abs))
}

fn digits_lost(max_abs_term: &Real, value: &Real) -> f64 {
    if value.is_zero() {
        return f64::INFINITY;
    }
    (max_abs_term.log10_abs() - value.log10_abs()).max(0.0)
}

/// (dimension, working digits) -> (sum, max |term|)
type SumCache = RwLock<HashMap<(u32, u32), (Real, Real)>>;

fn dirichlet_cache() -> &'static SumCache {
    static CACHE: OnceLock<SumCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Dirichlet sum memoized by (dimension, working digits).
fn cached_dirichlet_sum(dimension: u32, ctx: &PrecisionContext) -> Result<(Real, Real)> {
    let key = (dimension, ctx.working_digits());
    if let Some(v) = dirichlet_cache().read().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let v = dirichlet_sum(dimension, ctx)?;
    dirichlet_cache().write().unwrap().insert(key, v.clone());
    Ok(v)
}

fn finish(
    dimension: u32,
    bc: BoundaryCondition,
    sum: Real,
    max_abs_term: Real,
    lost_for_refusal: f64,
    ctx: PrecisionContext,
    policy: EvalPolicy,
) -> Result<EnergyResult> {
    let lost = digits_lost(&max_abs_term, &sum);
    let working = ctx.working_digits();
    if policy.refuse_insufficient && (working as f64) < lost_for_refusal.max(lost) + REFUSAL_MARGIN_DIGITS {
        return Err(Error::InsufficientPrecision {
            dimension,
            working_digits: working,
            digits_lost: lost_for_refusal.max(lost),
        });
    }
    let sign = EnergySign::of(&sum)
        .ok_or_else(|| Error::Numerical(format!("{bc} energy at D={dimension} evaluated to zero")))?;
    Ok(EnergyResult {
        dimension,
        bc,
        value: sum.with_digits(ctx.target_digits()),
        sign,
        max_abs_term,
        cancellation_digits_lost: lost,
        context: ctx,
    })
}

fn effective_context(dimension: u32, ctx: &PrecisionContext, policy: EvalPolicy) -> PrecisionContext {
    if policy.enforce_guard_floor {
        ctx.with_guard_floor(guard_digit_floor(dimension))
    } else {
        *ctx
    }
}

/// Dirichlet Casimir energy of the D-cube in units of β.
pub fn dirichlet_energy(dimension: u32, ctx: &PrecisionContext) -> Result<EnergyResult> {
    dirichlet_energy_with(dimension, ctx, EvalPolicy::default())
}

pub fn dirichlet_energy_with(dimension: u32, ctx: &PrecisionContext, policy: EvalPolicy) -> Result<EnergyResult> {
    check_dimension(dimension)?;
    let ctx = effective_context(dimension, ctx, policy);
    let (sum, max_abs) = cached_dirichlet_sum(dimension, &ctx)?;
    finish(dimension, BoundaryCondition::Dirichlet, sum, max_abs, 0.0, ctx, policy)
}

/// Neumann Casimir energy of the D-cube in units of β.
pub fn neumann_energy(dimension: u32, ctx: &PrecisionContext) -> Result<EnergyResult> {
    neumann_energy_with(dimension, ctx, EvalPolicy::default())
}

pub fn neumann_energy_with(dimension: u32, ctx: &PrecisionContext, policy: EvalPolicy) -> Result<EnergyResult> {
    check_dimension(dimension)?;
    let ctx = effective_context(dimension, ctx, policy);
    let digits = ctx.working_digits();
    // Inner sums use a coarser precision ladder so neighbouring dimensions
    // share cached Dirichlet sums and zeta values.
    let inner_ctx = ctx.widened(digits.next_multiple_of(INNER_PRECISION_STEP) - digits);
    let mut sum = Real::zero(digits);
    let mut max_abs = Real::zero(digits);
    let mut worst_inner_loss: f64 = 0.0;
    for k in 1..=dimension {
        let (inner, inner_max) = cached_dirichlet_sum(k, &inner_ctx)?;
        worst_inner_loss = worst_inner_loss.max(digits_lost(&inner_max, &inner));
        let weight = Real::from_bigint(&binomial(dimension as i64, k as i64)?, digits);
        let term = weight.mul_with(&inner, digits);
        let a = term.abs();
        if a > max_abs {
            max_abs = a;
        }
        sum = sum.add_with(&term, digits);
    }
    // The Dirichlet sums' own cancellation compounds with the outer sum's.
    let outer = digits_lost(&max_abs, &sum);
    finish(
        dimension,
        BoundaryCondition::Neumann,
        sum,
        max_abs,
        worst_inner_loss + outer,
        ctx,
        policy,
    )
}

pub fn energy(bc: BoundaryCondition, dimension: u32, ctx: &PrecisionContext) -> Result<EnergyResult> {
    match bc {
        BoundaryCondition::Dirichlet => dirichlet_energy(dimension, ctx),
        BoundaryCondition::Neumann => neumann_energy(dimension, ctx),
    }
}
