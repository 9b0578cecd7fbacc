use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

use super::ntheory::valuation;

/// Exact rational number; always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Canonical text encoding `num/den`.
pub fn rational_to_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `num/den` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
    }
}

/// v_p(q); `None` for q = 0.
pub fn rational_valuation(q: &Rational, p: u64) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    let vn = valuation(q.numer(), p).unwrap_or(0) as i64;
    let vd = valuation(&q.denom().abs(), p).unwrap_or(0) as i64;
    Some(vn - vd)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_and_parse() {
        let q = rat(-691, 2730);
        assert_eq!(rational_to_string(&q), "-691/2730");
        assert_eq!(parse_rational("-691/2730").unwrap(), q);
        assert_eq!(parse_rational("4/-6").unwrap(), rat(-2, 3));
        assert_eq!(parse_rational("17").unwrap(), rat(17, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn valuations() {
        assert_eq!(rational_valuation(&rat(10, 3), 5), Some(1));
        assert_eq!(rational_valuation(&rat(-691, 2730), 5), Some(-1));
        assert_eq!(rational_valuation(&rat(0, 1), 5), None);
    }
}
