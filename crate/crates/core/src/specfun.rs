//! Riemann zeta at integers, gamma at integers and half-integers, binomial
//! coefficients and Bernoulli numbers.
//!
//! ζ(s) has two independent evaluators: [`zeta_int`] uses Euler-Maclaurin
//! summation with Bernoulli corrections, [`zeta_int_eta`] uses the
//! Borwein-accelerated alternating eta series. Gamma is never approximated:
//! Γ(k) = (k-1)! and Γ(k+1/2) = (2k)!/(4^k k!)·√π are formed exactly and
//! rounded once.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arithmetic::{factorial, pi_digits, ExactInteger, ExactRational, PrecisionContext, Real};
use crate::error::{Error, Result};

/// A positive half-integer `twice_value / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInteger {
    twice_value: u64,
}

impl HalfInteger {
    pub fn from_twice(twice_value: u64) -> Result<Self> {
        if twice_value == 0 {
            return Err(Error::invalid("half-integer argument must be positive"));
        }
        Ok(HalfInteger { twice_value })
    }

    pub fn integer(n: u64) -> Result<Self> {
        Self::from_twice(2 * n)
    }

    pub fn twice_value(&self) -> u64 {
        self.twice_value
    }

    pub fn is_integer(&self) -> bool {
        self.twice_value.is_multiple_of(2)
    }

    /// x + 1.
    pub fn succ(&self) -> Self {
        HalfInteger {
            twice_value: self.twice_value + 2,
        }
    }

    pub fn to_rational(&self) -> ExactRational {
        BigRational::new(BigInt::from(self.twice_value), BigInt::from(2))
    }
}

/// Γ(x) split into an exact rational and a power of √π (0 or 1).
pub fn gamma_half_exact(x: HalfInteger) -> (ExactRational, bool) {
    if x.is_integer() {
        let k = x.twice_value / 2;
        (BigRational::from_integer(factorial(k - 1)), false)
    } else {
        let k = (x.twice_value - 1) / 2;
        let num = factorial(2 * k);
        let den = (BigInt::one() << (2 * k) as usize) * factorial(k);
        (BigRational::new(num, den), true)
    }
}

/// Γ(x) for a positive half-integer, rounded to working precision.
pub fn gamma_half(x: HalfInteger, ctx: &PrecisionContext) -> Real {
    let digits = ctx.working_digits();
    let (rational, with_sqrt_pi) = gamma_half_exact(x);
    if with_sqrt_pi {
        let work = digits + 5;
        let root = pi_digits(work).sqrt().expect("pi is positive");
        Real::from_rational(&rational, work).mul_with(&root, digits)
    } else {
        Real::from_rational(&rational, digits)
    }
}

/// Exact binomial coefficient C(n, k) for 0 <= k <= n.
pub fn binomial(n: i64, k: i64) -> Result<ExactInteger> {
    if n < 0 || k < 0 || k > n {
        return Err(Error::invalid(format!("binomial({n}, {k}) requires 0 <= k <= n")));
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc *= n - j;
        acc /= j + 1;
    }
    Ok(acc)
}

fn bernoulli_cache() -> &'static Mutex<Vec<ExactRational>> {
    static CACHE: OnceLock<Mutex<Vec<ExactRational>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// B_2, B_4, ..., B_{2n} from the tangent numbers (Brent-Harvey).
fn even_bernoulli_table(n: usize) -> Vec<ExactRational> {
    let mut t: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    if n == 0 {
        return Vec::new();
    }
    t[1] = BigInt::one();
    for k in 2..=n {
        t[k] = &t[k - 1] * (k - 1);
    }
    for k in 2..=n {
        for j in k..=n {
            t[j] = &t[j - 1] * (j - k) + &t[j] * (j - k + 2);
        }
    }
    (1..=n)
        .map(|k| {
            let four_k = BigInt::one() << (2 * k);
            let num = BigInt::from(2 * k) * &t[k];
            let den = &four_k * (&four_k - 1);
            let b = BigRational::new(num, den);
            if k % 2 == 1 {
                b
            } else {
                -b
            }
        })
        .collect()
}

/// Exact Bernoulli number B_m for even m >= 2.
pub fn bernoulli(m: u32) -> Result<ExactRational> {
    if m < 2 || m % 2 == 1 {
        return Err(Error::invalid(format!(
            "bernoulli({m}): only even indices >= 2 are supported"
        )));
    }
    let idx = (m / 2) as usize;
    let mut cache = bernoulli_cache().lock().unwrap();
    if cache.len() < idx {
        let want = idx.max(2 * cache.len()).max(16);
        *cache = even_bernoulli_table(want);
    }
    Ok(cache[idx - 1].clone())
}

type ZetaKey = (u32, u32);

fn zeta_cache() -> &'static RwLock<HashMap<ZetaKey, Real>> {
    static CACHE: OnceLock<RwLock<HashMap<ZetaKey, Real>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn check_zeta_arg(s: i64) -> Result<u32> {
    if s < 2 {
        return Err(Error::invalid(format!("zeta({s}) requires s >= 2")));
    }
    u32::try_from(s).map_err(|_| Error::invalid(format!("zeta argument {s} too large")))
}

/// ζ(s) for integer s >= 2 by Euler-Maclaurin summation.
///
/// With N = working/2 + 10 leading terms summed directly, the correction
/// terms decrease until 2k ≈ 2πN, so they are added until one falls below
/// 10^-(working+5); the remainder is bounded by the first omitted term.
pub fn zeta_int(s: i64, ctx: &PrecisionContext) -> Result<Real> {
    let s = check_zeta_arg(s)?;
    let digits = ctx.working_digits();
    if let Some(v) = zeta_cache().read().unwrap().get(&(s, digits)) {
        return Ok(v.clone());
    }
    let value = zeta_euler_maclaurin(s, digits)?;
    zeta_cache().write().unwrap().insert((s, digits), value.clone());
    Ok(value)
}

fn zeta_euler_maclaurin(s: u32, digits: u32) -> Result<Real> {
    let work = digits + 10;
    let n_cut = (digits / 2 + 10) as i64;
    let tol_exp = -(work as i64) - 2;

    // The direct sum goes from the smallest terms up.
    let mut sum = Real::zero(work);
    for n in (1..n_cut).rev() {
        let term = Real::from_int(n, work).powi(-(s as i64))?;
        sum = sum.add_with(&term, work);
    }
    let n_real = Real::from_int(n_cut, work);
    let n_pow = n_real.powi(-(s as i64))?;
    let integral = n_pow
        .mul_with(&n_real, work)
        .div_with(&Real::from_int(s as i64 - 1, work), work)?;
    sum = sum.add_with(&integral, work);
    sum = sum.add_with(&n_pow.div_with(&Real::from_int(2, work), work)?, work);

    let inv_n2 = n_real.mul_with(&n_real, work).recip()?;
    // rising = s (s+1) ... (s+2k-2); power = N^(-s-2k+1)
    let mut rising = BigInt::from(s);
    let mut power = n_pow.div_with(&n_real, work)?;
    let mut fact = BigInt::from(2);
    let mut last_magnitude = i64::MAX;
    for k in 1u32.. {
        let b = bernoulli(2 * k)?;
        let coeff = BigRational::new(b.numer() * &rising, b.denom() * &fact);
        let term = Real::from_rational(&coeff, work).mul_with(&power, work);
        let Some(mag) = term.leading_exponent() else {
            break;
        };
        if mag < tol_exp {
            break;
        }
        if mag > last_magnitude {
            return Err(Error::Numerical(format!(
                "Euler-Maclaurin corrections for zeta({s}) stopped decreasing"
            )));
        }
        last_magnitude = mag;
        sum = sum.add_with(&term, work);
        let a = BigInt::from(s + 2 * k - 1);
        rising = rising * &a * (&a + 1);
        fact *= BigInt::from((2 * k + 1) * (2 * k + 2));
        power = power.mul_with(&inv_n2, work);
    }
    Ok(sum.with_digits(digits))
}

/// ζ(s) from the alternating eta series with Borwein's acceleration,
/// ζ(s) = η(s) / (1 - 2^(1-s)). Independent of [`zeta_int`].
pub fn zeta_int_eta(s: i64, ctx: &PrecisionContext) -> Result<Real> {
    let s = check_zeta_arg(s)?;
    let digits = ctx.working_digits();
    // Error <= 3 / (3 + sqrt 8)^n, and log10(3 + sqrt 8) > 0.765.
    let n = ((digits as f64 + 2.0) / 0.765).ceil() as usize + 1;
    let work = digits + 10 + (n as f64).log10().ceil() as u32;

    // d_k = n * sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)
    let mut d = Vec::with_capacity(n + 1);
    let mut term = BigRational::new(BigInt::one(), BigInt::from(n as u64));
    let mut acc = BigRational::zero();
    for i in 0..=n {
        if i > 0 {
            // term_i / term_{i-1} = (n+i-1)(n-i+1) 4 / ((2i-1)(2i))
            let num = BigInt::from(((n + i - 1) * (n - i + 1) * 4) as u64);
            let den = BigInt::from(((2 * i - 1) * (2 * i)) as u64);
            term *= BigRational::new(num, den);
        }
        acc += &term;
        d.push(&acc * BigInt::from(n as u64));
    }
    let dn = d[n].clone();
    let mut sum = Real::zero(work);
    for k in (0..n).rev() {
        let numer = &d[k] - &dn;
        let coeff = Real::from_rational(&numer, work);
        let denom = Real::from_int(k as i64 + 1, work).powi(s as i64)?;
        let mut t = coeff.div_with(&denom, work)?;
        if k % 2 == 1 {
            t = -t;
        }
        sum = sum.add_with(&t, work);
    }
    let eta = -sum.div_with(&Real::from_rational(&dn, work), work)?;
    let two_pow = Real::from_int(2, work).powi(1 - s as i64)?;
    let factor = Real::one(work).add_with(&-two_pow, work);
    Ok(eta.div_with(&factor, work)?.with_digits(digits))
}

/// ζ(2m) = (-1)^(m+1) B_2m (2π)^2m / (2 (2m)!).
pub fn zeta_even_closed_form(m: u32, ctx: &PrecisionContext) -> Result<Real> {
    if m == 0 {
        return Err(Error::invalid("zeta_even_closed_form requires m >= 1"));
    }
    let digits = ctx.working_digits();
    let work = digits + 10;
    let b = bernoulli(2 * m)?;
    let mut q = b / (BigInt::from(2) * factorial(2 * m as u64));
    if m.is_multiple_of(2) {
        q = -q;
    }
    let two_pi = pi_digits(work).mul_with(&Real::from_int(2, work), work);
    let v = Real::from_rational(&q, work).mul_with(&two_pi.powi(2 * m as i64)?, work);
    Ok(v.with_digits(digits))
}
