//! Arbitrary-precision decimal arithmetic and exact integer/rational helpers.

mod exact;
mod real;

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use exact::{factorial, falling_factorial, ExactInteger, ExactRational};
pub(crate) use real::pow10;
pub use real::Real;

/// Smallest accepted `target_digits`.
pub const MIN_TARGET_DIGITS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RoundingPolicy {
    #[default]
    NearestEven,
}

/// Requested decimal precision for a computation.
///
/// Values are evaluated with `target_digits + guard_digits` significant
/// digits and reported to `target_digits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecisionContext {
    target_digits: u32,
    guard_digits: u32,
    rounding: RoundingPolicy,
}

impl PrecisionContext {
    pub fn new(target_digits: u32) -> Result<Self> {
        Self::with_guard(target_digits, 0)
    }

    pub fn with_guard(target_digits: u32, guard_digits: u32) -> Result<Self> {
        if target_digits < MIN_TARGET_DIGITS {
            return Err(Error::invalid(format!(
                "target_digits must be at least {MIN_TARGET_DIGITS}, got {target_digits}"
            )));
        }
        Ok(PrecisionContext {
            target_digits,
            guard_digits,
            rounding: RoundingPolicy::NearestEven,
        })
    }

    pub fn target_digits(&self) -> u32 {
        self.target_digits
    }

    pub fn guard_digits(&self) -> u32 {
        self.guard_digits
    }

    pub fn rounding(&self) -> RoundingPolicy {
        self.rounding
    }

    pub fn working_digits(&self) -> u32 {
        self.target_digits + self.guard_digits
    }

    /// Same target with at least `floor` guard digits.
    pub fn with_guard_floor(&self, floor: u32) -> Self {
        PrecisionContext {
            guard_digits: self.guard_digits.max(floor),
            ..*self
        }
    }

    /// Same target with `extra` more guard digits.
    pub fn widened(&self, extra: u32) -> Self {
        PrecisionContext {
            guard_digits: self.guard_digits + extra,
            ..*self
        }
    }

    pub fn real(&self, n: i64) -> Real {
        Real::from_int(n, self.working_digits())
    }
}

fn pi_cache() -> &'static RwLock<HashMap<u32, Real>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Real>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// arctan(1/x) scaled by `scale`, truncated term by term.
fn arccot_scaled(x: u32, scale: &BigInt) -> BigInt {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = scale / &x;
    let mut sum = power.clone();
    let mut k = 1u32;
    loop {
        power /= &x2;
        if power.is_zero() {
            break;
        }
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        k += 1;
    }
    sum
}

/// π rounded to `digits` significant digits.
pub fn pi_digits(digits: u32) -> Real {
    if let Some(v) = pi_cache().read().unwrap().get(&digits) {
        return v.clone();
    }
    // Machin: pi = 16 arccot(5) - 4 arccot(239); truncation error stays far
    // below the ten extra digits carried here.
    let extra = 12;
    let scale = BigInt::from(pow10(digits + extra));
    let scaled = arccot_scaled(5, &scale) * 16 - arccot_scaled(239, &scale) * 4;
    let value = Real::from_scaled(scaled, -((digits + extra) as i64), digits);
    pi_cache().write().unwrap().insert(digits, value.clone());
    value
}

/// π at the working precision of `ctx`.
pub fn const_pi(ctx: &PrecisionContext) -> Real {
    pi_digits(ctx.working_digits())
}

/// Formats `x` with exactly `n` significant digits, rounding half to even.
///
/// Positional notation is used when the leading digit's decimal exponent lies
/// in `[-7, n-1]`, scientific notation (`d.ddde-13`) otherwise. Zero is
/// written as `0.` followed by `n-1` zeros.
pub fn to_sig_digits(x: &Real, n: u32) -> Result<String> {
    if n == 0 {
        return Err(Error::invalid("significant digit count must be positive"));
    }
    if x.is_zero() {
        return Ok(if n == 1 {
            "0".to_string()
        } else {
            format!("0.{}", "0".repeat(n as usize - 1))
        });
    }
    let rounded = x.with_digits(n);
    let digits = rounded.mantissa().abs().to_string();
    debug_assert_eq!(digits.len(), n as usize);
    let lead = rounded.leading_exponent().unwrap();
    let sign = if rounded.is_negative() { "-" } else { "" };
    let n = n as i64;
    let body = if (-7..n).contains(&lead) {
        if lead >= 0 {
            let split = (lead + 1) as usize;
            let (int_part, frac) = digits.split_at(split);
            if frac.is_empty() {
                int_part.to_string()
            } else {
                format!("{int_part}.{frac}")
            }
        } else {
            format!("0.{}{}", "0".repeat((-lead - 1) as usize), digits)
        }
    } else {
        let (head, tail) = digits.split_at(1);
        if tail.is_empty() {
            format!("{head}e{lead}")
        } else {
            format!("{head}.{tail}e{lead}")
        }
    };
    Ok(format!("{sign}{body}"))
}

/// 2^n as an exact integer.
pub(crate) fn pow2(n: u32) -> BigInt {
    BigInt::one() << n as usize
}
