//! Exact rational helpers. Values are always printed as `p/q`, including
//! integers (`0/1`, `1/1`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn fmt_pq(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parse `p/q` or a bare integer.
pub fn parse_pq(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// Decimal rendering rounded half-away-from-zero to `places` digits.
pub fn fmt_decimal(q: &Rational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let scaled = q.abs() * Rational::from_integer(scale.clone());
    let rounded = (scaled + ratio(1, 2)).floor().to_integer();
    let int_part = &rounded / &scale;
    let frac_part = &rounded % &scale;
    let sign = if q.is_negative() && !rounded.is_zero() { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{int_part}");
    }
    format!(
        "{sign}{int_part}.{:0>width$}",
        frac_part.to_string(),
        width = places as usize
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pq_formatting() {
        assert_eq!(fmt_pq(&ratio(6, 14)), "3/7");
        assert_eq!(fmt_pq(&int(0)), "0/1");
        assert_eq!(fmt_pq(&int(1)), "1/1");
        assert_eq!(parse_pq("3/6"), Some(ratio(1, 2)));
        assert_eq!(parse_pq("4"), Some(int(4)));
        assert_eq!(parse_pq("1/0"), None);
    }

    #[test]
    fn decimals() {
        assert_eq!(fmt_decimal(&ratio(3, 7), 6), "0.428571");
        assert_eq!(fmt_decimal(&ratio(2, 3), 6), "0.666667");
        assert_eq!(fmt_decimal(&int(1), 6), "1.000000");
        assert_eq!(fmt_decimal(&ratio(-1, 8), 2), "-0.13");
    }
}
