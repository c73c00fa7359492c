//! Decimal floating-point numbers with a per-value significand length.
//!
//! A [`Real`] is `mantissa * 10^exponent` where a nonzero mantissa always has
//! exactly `digits` decimal digits. Every operation rounds its exact result
//! to the precision of the result (the larger of the operand precisions)
//! using round-half-to-even, so evaluation at a given precision is fully
//! deterministic. Addition, subtraction, multiplication, division and square
//! root are correctly rounded; `exp`, `ln` and `pow` are evaluated with
//! internal guard digits and are within one unit in the last place.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const LOG10_2: f64 = std::f64::consts::LOG10_2;

pub(crate) fn pow10(n: u32) -> BigUint {
    BigUint::from(10u32).pow(n)
}

/// Number of decimal digits of a nonzero magnitude.
pub(crate) fn decimal_digits(m: &BigUint) -> u32 {
    if m.is_zero() {
        return 0;
    }
    let bits = m.bits();
    let mut est = (((bits - 1) as f64) * LOG10_2).floor() as u32 + 1;
    // `est` can only be an underestimate by one.
    if *m >= pow10(est) {
        est += 1;
    }
    est
}

/// Rounds `mag * 10^exp` to `digits` significant digits, half to even.
///
/// `sticky` marks a nonzero remainder below the last supplied digit; callers
/// that set it must supply at least `digits + 1` digits.
fn round_magnitude(mag: BigUint, exp: i64, digits: u32, sticky: bool) -> (BigUint, i64) {
    if mag.is_zero() {
        return (mag, 0);
    }
    let n = decimal_digits(&mag);
    match n.cmp(&digits) {
        Ordering::Greater => {
            let k = n - digits;
            let divisor = pow10(k);
            let (mut q, r) = mag.div_rem(&divisor);
            let twice = r << 1usize;
            let round_up = match twice.cmp(&divisor) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => sticky || q.is_odd(),
            };
            let mut e = exp + k as i64;
            if round_up {
                q += 1u32;
                if decimal_digits(&q) > digits {
                    q /= 10u32;
                    e += 1;
                }
            }
            (q, e)
        }
        Ordering::Less => {
            let k = digits - n;
            (mag * pow10(k), exp - k as i64)
        }
        Ordering::Equal => (mag, exp),
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Real {
    mantissa: BigInt,
    exponent: i64,
    digits: u32,
}

impl Real {
    fn from_parts(sign: Sign, mag: BigUint, exp: i64, digits: u32, sticky: bool) -> Self {
        let (mag, exponent) = round_magnitude(mag, exp, digits, sticky);
        let sign = if mag.is_zero() { Sign::NoSign } else { sign };
        Real {
            mantissa: BigInt::from_biguint(sign, mag),
            exponent,
            digits,
        }
    }

    /// Rounds the exact value `m * 10^exp` to `digits` significant digits.
    pub fn from_scaled(m: BigInt, exp: i64, digits: u32) -> Self {
        let (sign, mag) = m.into_parts();
        Self::from_parts(sign, mag, exp, digits, false)
    }

    pub fn zero(digits: u32) -> Self {
        Real {
            mantissa: BigInt::zero(),
            exponent: 0,
            digits,
        }
    }

    pub fn one(digits: u32) -> Self {
        Self::from_int(1, digits)
    }

    pub fn from_int(n: i64, digits: u32) -> Self {
        Self::from_scaled(BigInt::from(n), 0, digits)
    }

    pub fn from_bigint(n: &BigInt, digits: u32) -> Self {
        Self::from_scaled(n.clone(), 0, digits)
    }

    /// Correctly rounded quotient `num / den`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, digits: u32) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero(digits);
        }
        let sign = if num.sign() == den.sign() {
            Sign::Plus
        } else {
            Sign::Minus
        };
        let n = num.magnitude();
        let d = den.magnitude();
        let shift = (digits as i64 + 2 + decimal_digits(d) as i64 - decimal_digits(n) as i64).max(0) as u32;
        let (q, r) = (n * pow10(shift)).div_rem(d);
        Self::from_parts(sign, q, -(shift as i64), digits, !r.is_zero())
    }

    pub fn from_rational(q: &BigRational, digits: u32) -> Self {
        Self::from_ratio(q.numer(), q.denom(), digits)
    }

    /// Shortest round-trip decimal form of `x`, rounded to `digits`.
    pub fn from_f64(x: f64, digits: u32) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::invalid(format!("non-finite value {x}")));
        }
        let text = format!("{x:e}");
        Self::parse_with_digits(&text, digits)
    }

    pub fn parse_with_digits(text: &str, digits: u32) -> Result<Self> {
        let bad = || Error::invalid(format!("malformed decimal literal {text:?}"));
        let s = text.trim();
        let (body, exp_part) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], Some(&s[i + 1..])),
            None => (s, None),
        };
        let mut exp: i64 = match exp_part {
            Some(e) => e.parse().map_err(|_| bad())?,
            None => 0,
        };
        let (negative, body) = match body.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, body.strip_prefix('+').unwrap_or(body)),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        let all: String = [int_part, frac_part].concat();
        if !all.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        exp -= frac_part.len() as i64;
        let mag = BigUint::from_str(&all).map_err(|_| bad())?;
        let sign = if negative { Sign::Minus } else { Sign::Plus };
        Ok(Self::from_parts(sign, mag, exp, digits, false))
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        match self.mantissa.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Real {
            mantissa: self.mantissa.abs(),
            ..self.clone()
        }
    }

    /// Re-rounds to a different significand length.
    pub fn with_digits(&self, digits: u32) -> Self {
        Self::from_scaled(self.mantissa.clone(), self.exponent, digits)
    }

    /// Decimal exponent of the leading digit, i.e. floor(log10|x|).
    pub fn leading_exponent(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exponent + decimal_digits(self.mantissa.magnitude()) as i64 - 1)
        }
    }

    /// Approximate log10|x| in double precision.
    pub fn log10_abs(&self) -> f64 {
        let Some(lead) = self.leading_exponent() else {
            return f64::NEG_INFINITY;
        };
        let mag = self.mantissa.magnitude();
        let n = decimal_digits(mag);
        let top = if n > 17 { mag / pow10(n - 17) } else { mag.clone() };
        let top_digits = decimal_digits(&top);
        let frac = top.to_f64().unwrap_or(f64::MAX).log10() - (top_digits as f64 - 1.0);
        lead as f64 + frac
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        format!("{}e{}", self.mantissa, self.exponent)
            .parse()
            .unwrap_or(f64::NAN)
    }

    fn binary_digits(&self, other: &Real) -> u32 {
        self.digits.max(other.digits)
    }

    pub fn add_with(&self, other: &Real, digits: u32) -> Real {
        if other.is_zero() {
            return self.with_digits(digits);
        }
        if self.is_zero() {
            return other.with_digits(digits);
        }
        let top_a = self.leading_exponent().unwrap();
        let top_b = other.leading_exponent().unwrap();
        let (big, small) = if top_a >= top_b { (self, other) } else { (other, self) };
        let lowest = top_a.max(top_b) - digits as i64 - 3;
        // An operand entirely below the rounding position only matters as a
        // sticky contribution of its sign.
        let small_scaled;
        let small = if top_a.min(top_b) < lowest {
            small_scaled = Real {
                mantissa: BigInt::from(small.signum()),
                exponent: lowest,
                digits: 1,
            };
            &small_scaled
        } else {
            small
        };
        let e = big.exponent.min(small.exponent);
        let align = |x: &Real| -> BigInt { &x.mantissa * BigInt::from(pow10((x.exponent - e) as u32)) };
        Self::from_scaled(align(big) + align(small), e, digits)
    }

    pub fn mul_with(&self, other: &Real, digits: u32) -> Real {
        Self::from_scaled(&self.mantissa * &other.mantissa, self.exponent + other.exponent, digits)
    }

    pub fn div_with(&self, other: &Real, digits: u32) -> Result<Real> {
        if other.is_zero() {
            return Err(Error::Numerical("division by zero".into()));
        }
        if self.is_zero() {
            return Ok(Self::zero(digits));
        }
        let q = Self::from_ratio(&self.mantissa, &other.mantissa, digits);
        Ok(Real {
            exponent: q.exponent + self.exponent - other.exponent,
            ..q
        })
    }

    /// Correctly rounded square root.
    pub fn sqrt(&self) -> Result<Real> {
        if self.is_negative() {
            return Err(Error::Numerical("square root of a negative number".into()));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let mag = self.mantissa.magnitude();
        let want = 2 * (self.digits as i64 + 2);
        let mut shift = (want - decimal_digits(mag) as i64).max(0);
        if (self.exponent - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let scaled = mag * pow10(shift as u32);
        let root = scaled.sqrt();
        let sticky = &root * &root != scaled;
        Ok(Self::from_parts(
            Sign::Plus,
            root,
            (self.exponent - shift) / 2,
            self.digits,
            sticky,
        ))
    }

    pub fn recip(&self) -> Result<Real> {
        Self::one(self.digits).div_with(self, self.digits)
    }

    /// Integer power by repeated squaring, within one ulp.
    pub fn powi(&self, n: i64) -> Result<Real> {
        let digits = self.digits;
        if n == 0 {
            return Ok(Self::one(digits));
        }
        if self.is_zero() {
            return if n > 0 {
                Ok(Self::zero(digits))
            } else {
                Err(Error::Numerical("zero to a negative power".into()))
            };
        }
        let bits = 64 - n.unsigned_abs().leading_zeros();
        let work = digits + 2 * ((bits as f64 * 0.7) as u32) + 6;
        let mut base = self.with_digits(work);
        let mut acc = Self::one(work);
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_with(&base, work);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_with(&base, work);
            }
        }
        if n < 0 {
            acc = Self::one(work).div_with(&acc, work)?;
        }
        Ok(acc.with_digits(digits))
    }

    /// e^x within one ulp.
    pub fn exp(&self) -> Result<Real> {
        let digits = self.digits;
        if self.is_zero() {
            return Ok(Self::one(digits));
        }
        let x = self.to_f64();
        if x.abs() > 1e17 {
            return Err(Error::Numerical(format!("exp argument {x:e} out of range")));
        }
        // Scale into |r| < 2^-8 then square back up.
        let halvings = if x.abs() > 0.0 {
            (x.abs().log2().ceil() as i64 + 8).max(0) as u32
        } else {
            0
        };
        let work = digits + 8 + (halvings as f64 * LOG10_2).ceil() as u32 + (x.abs().log10().max(0.0)) as u32;
        let scale = Real::from_bigint(&(BigInt::one() << halvings as usize), work);
        let r = self.with_digits(work).div_with(&scale, work)?;
        let eps_exp = -(work as i64) - 2;
        let mut sum = Self::one(work);
        let mut term = Self::one(work);
        for k in 1u32.. {
            term = term
                .mul_with(&r, work)
                .div_with(&Real::from_int(k as i64, work), work)?;
            if term.is_zero() || term.leading_exponent().unwrap() < eps_exp {
                break;
            }
            sum = sum.add_with(&term, work);
        }
        for _ in 0..halvings {
            sum = sum.mul_with(&sum, work);
        }
        Ok(sum.with_digits(digits))
    }

    /// Natural logarithm within one ulp, by Halley iteration on `exp`.
    pub fn ln(&self) -> Result<Real> {
        if !self.is_positive() {
            return Err(Error::Numerical("logarithm of a non-positive number".into()));
        }
        let digits = self.digits;
        if *self == Self::one(digits) {
            return Ok(Self::zero(digits));
        }
        let ln_estimate = self.log10_abs() * std::f64::consts::LN_10;
        let magnitude = ln_estimate.abs().max(1.0).log10().ceil() as u32;
        let work = digits + 10 + magnitude;
        let x = self.with_digits(work);
        let mut y = Real::from_f64(ln_estimate, work)?;
        let two = Real::from_int(2, work);
        for _ in 0..64 {
            let ey = y.exp()?;
            let num = two.mul_with(&x.add_with(&ey.neg_ref(), work), work);
            let den = x.add_with(&ey, work);
            let step = num.div_with(&den, work)?;
            y = y.add_with(&step, work);
            let converged = match (step.leading_exponent(), y.leading_exponent()) {
                (None, _) => true,
                (Some(s), Some(v)) => s < v - work as i64 + 2 || s < -(work as i64),
                (Some(s), None) => s < -(work as i64),
            };
            if converged {
                return Ok(y.with_digits(digits));
            }
        }
        Err(Error::Numerical("logarithm iteration did not converge".into()))
    }

    /// x^y for x > 0.
    pub fn pow(&self, y: &Real) -> Result<Real> {
        let digits = self.digits.max(y.digits);
        let growth = (y.to_f64().abs() * self.log10_abs().abs()).max(1.0).log10().ceil() as u32;
        let work = digits + 4 + growth;
        let l = self.with_digits(work).ln()?;
        l.mul_with(&y.with_digits(work), work)
            .exp()
            .map(|v| v.with_digits(digits))
    }

    fn neg_ref(&self) -> Real {
        Real {
            mantissa: -&self.mantissa,
            ..self.clone()
        }
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb || sa == 0 {
            return sa.cmp(&sb);
        }
        let magnitude = match (self.leading_exponent(), other.leading_exponent()) {
            (Some(a), Some(b)) if a != b => a.cmp(&b),
            _ => {
                let e = self.exponent.min(other.exponent);
                let a = self.mantissa.magnitude() * pow10((self.exponent - e) as u32);
                let b = other.mantissa.magnitude() * pow10((other.exponent - e) as u32);
                a.cmp(&b)
            }
        };
        if sa > 0 {
            magnitude
        } else {
            magnitude.reverse()
        }
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({}e{} @{})", self.mantissa, self.exponent, self.digits)
    }
}

/// Full-precision scientific notation.
impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let s = self.mantissa.magnitude().to_string();
        let sign = if self.is_negative() { "-" } else { "" };
        let lead = self.leading_exponent().unwrap();
        let (head, tail) = s.split_at(1);
        let tail = tail.trim_end_matches('0');
        if tail.is_empty() {
            write!(f, "{sign}{head}e{lead}")
        } else {
            write!(f, "{sign}{head}.{tail}e{lead}")
        }
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real {
            mantissa: -self.mantissa,
            ..self
        }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        self.neg_ref()
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let digits = self.binary_digits(rhs);
                $body(self, rhs, digits)
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &Real, b: &Real, d| a.add_with(b, d));
forward_binop!(Sub, sub, |a: &Real, b: &Real, d| a.add_with(&b.neg_ref(), d));
forward_binop!(Mul, mul, |a: &Real, b: &Real, d| a.mul_with(b, d));
// Panics on a zero divisor, like primitive division; use `div_with` to handle it.
forward_binop!(Div, div, |a: &Real, b: &Real, d| a
    .div_with(b, d)
    .expect("division by zero"));
