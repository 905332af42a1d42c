//! Exact rational scalars.
//!
//! Every utility, probability and weight in the crate is a [`Rational`]:
//! an arbitrary-precision fraction kept in lowest terms with a positive
//! denominator. Text form is `"a/b"` or `"a"`, never a float.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `"a/b"` (with `b > 0`) or a bare integer `"a"`.
pub fn parse(text: &str) -> Result<Rational, Error> {
    let bad = || Error::Parse(format!("invalid rational {text:?}"));
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if !den.is_positive() {
        return Err(Error::Parse(format!(
            "rational {text:?} must have a positive denominator"
        )));
    }
    Ok(Rational::new(num, den))
}

/// Canonical text form: `"a"` for integers, `"a/b"` otherwise.
pub fn format(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Short decimal hint for human output. Never used in machine-readable output.
pub fn decimal_hint(value: &Rational) -> String {
    use num_traits::ToPrimitive;
    match value.to_f64() {
        Some(x) => format!("{x:.6}"),
        None => "?".to_string(),
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_of(values: &[(i64, i64)]) -> Vec<Rational> {
    values.iter().map(|&(n, d)| ratio(n, d)).collect()
}

pub fn ints(values: &[i64]) -> Vec<Rational> {
    values.iter().map(|&n| int(n)).collect()
}

/// Displays a rational vector as `(a, b/c, ...)`.
pub struct VecDisplay<'a>(pub &'a [Rational]);

impl fmt::Display for VecDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&format(x))?;
        }
        f.write_str(")")
    }
}

/// Serde adapter storing a [`Rational`] as its canonical string.
pub mod as_string {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>` as a list of strings.
pub mod vec_as_strings {
    use super::*;

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let texts: Vec<String> = values.iter().map(format).collect();
        texts.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| parse(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse("-2").unwrap(), int(-2));
        assert_eq!(parse(" 6/8 ").unwrap(), ratio(3, 4));
        assert_eq!(parse("-6/8").unwrap(), ratio(-3, 4));
    }

    #[test]
    fn rejects_bad_denominators() {
        assert!(parse("1/0").is_err());
        assert!(parse("1/-2").is_err());
        assert!(parse("0.5").is_err());
        assert!(parse("").is_err());
        assert!(parse("a/b").is_err());
    }

    #[test]
    fn canonical_text() {
        assert_eq!(format(&ratio(2, 4)), "1/2");
        assert_eq!(format(&ratio(4, 2)), "2");
        assert_eq!(format(&ratio(0, 7)), "0");
        assert_eq!(format(&ratio(1, -3)), "-1/3");
    }

    #[test]
    fn dot_is_exact() {
        let a = vec_of(&[(1, 3), (2, 3)]);
        let b = vec_of(&[(3, 4), (3, 8)]);
        assert_eq!(dot(&a, &b), ratio(1, 2));
    }
}
