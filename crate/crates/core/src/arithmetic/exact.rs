use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

/// Arbitrary-size integer; no rounding ever occurs.
pub type ExactInteger = BigInt;

/// Rational in lowest terms with a positive denominator.
pub type ExactRational = BigRational;

pub fn factorial(n: u64) -> ExactInteger {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// n (n-1) ... (n-len+1); the empty product is 1.
pub fn falling_factorial(n: i64, len: u64) -> ExactInteger {
    (0..len as i64).fold(BigInt::one(), |acc, j| acc * (n - j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), BigInt::one());
        assert_eq!(factorial(20), BigInt::from(2432902008176640000u64));
        assert_eq!(falling_factorial(5, 0), BigInt::one());
        assert_eq!(falling_factorial(5, 3), BigInt::from(60));
        assert!(falling_factorial(2, 3).is_zero());
    }

    #[test]
    fn rationals_are_normalized() {
        let q = ExactRational::new(BigInt::from(6), BigInt::from(-4));
        assert_eq!(q.numer(), &BigInt::from(-3));
        assert_eq!(q.denom(), &BigInt::from(2));
    }
}
