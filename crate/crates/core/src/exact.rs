//! Conversions between `f64` and exact big rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// The exact dyadic rational equal to a finite `f64`.
pub fn from_f64(x: f64) -> Q {
    Q::from_float(x).expect("finite float")
}

pub fn to_f64(x: &Q) -> f64 {
    // Ratio::to_f64 rounds correctly even for huge numerators and denominators.
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parse a decimal literal ("0.001", "-2.5", "7/13", "3") exactly.
pub fn parse_decimal(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = digits.parse().ok()?;
    let d = num_traits::pow(BigInt::from(10), frac_part.len());
    let v = Q::new(n, d);
    Some(if neg { -v } else { v })
}

/// "num/den" rendering used in CSV output; integers render without a slash.
pub fn render(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

pub fn floor_to_bigint(x: &Q) -> BigInt {
    x.floor().to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(parse_decimal("0.001").unwrap(), q(1, 1000));
        assert_eq!(parse_decimal("-2.5").unwrap(), q(-5, 2));
        assert_eq!(parse_decimal("7/13").unwrap(), q(7, 13));
        assert_eq!(parse_decimal("3").unwrap(), qi(3));
        assert!(parse_decimal("1e3").is_none());
        assert!(parse_decimal("").is_none());
    }

    #[test]
    fn float_roundtrip() {
        for x in [0.1, 1.5, -3.25, 1e-300] {
            assert_eq!(to_f64(&from_f64(x)), x);
        }
        assert_ne!(from_f64(0.1), q(1, 10));
    }

    #[test]
    fn rendering() {
        assert_eq!(render(&q(14, 27)), "14/27");
        assert_eq!(render(&q(-7, 9)), "-7/9");
        assert_eq!(render(&qi(15)), "15");
    }
}
