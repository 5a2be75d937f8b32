//! Exact rational numbers and their `"p/q"` text form.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

/// Integer as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n / d` reduced to lowest terms. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// `[a, b, c]` using the short display form (`2` rather than `2/1`).
pub fn show(values: &[Rational]) -> String {
    let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

/// Canonical text form `"p/q"`; integers keep the `/1` suffix.
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {literal:?}: {reason}")]
pub struct RationalParseError {
    pub literal: String,
    pub reason: &'static str,
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-0.25"`.
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    let literal = text.trim();
    let fail = |reason| RationalParseError {
        literal: text.to_string(),
        reason,
    };
    if literal.is_empty() {
        return Err(fail("empty"));
    }
    if let Some((num, den)) = literal.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| fail("bad numerator"))?;
        let den: BigInt = den.trim().parse().map_err(|_| fail("bad denominator"))?;
        if den.is_zero() {
            return Err(fail("zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = literal.split_once('.') {
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(fail("bad decimal fraction"));
        }
        if !whole_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(fail("bad decimal integer part"));
        }
        let digits = format!("{whole_digits}{frac}");
        let magnitude: BigInt = digits.parse().map_err(|_| fail("bad decimal"))?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let value = Rational::new(magnitude, scale);
        return Ok(if negative { -value } else { value });
    }
    let num: BigInt = literal.parse().map_err(|_| fail("bad integer"))?;
    Ok(Rational::from_integer(num))
}

/// Serde adapter that reads and writes rationals as `"p/q"` strings.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub Rational);

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl From<Rational> for Exact {
    fn from(value: Rational) -> Self {
        Exact(value)
    }
}

impl From<&Rational> for Exact {
    fn from(value: &Rational) -> Self {
        Exact(value.clone())
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ExactVisitor;

        impl Visitor<'_> for ExactVisitor {
            type Value = Exact;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string \"p/q\" or an integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Exact, E> {
                parse_rational(v).map(Exact).map_err(E::custom)
            }

            // Bare JSON integers are exact, so they are accepted; floats are not.
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Exact, E> {
                Ok(Exact(int(v)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Exact, E> {
                Ok(Exact(Rational::from_integer(BigInt::from(v))))
            }

            fn visit_f64<E: de::Error>(self, _: f64) -> Result<Exact, E> {
                Err(E::custom(
                    "floating-point numbers are not accepted; write \"p/q\"",
                ))
            }
        }

        deserializer.deserialize_any(ExactVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("1/-2").unwrap(), rat(-1, 2));
    }

    #[test]
    fn rejects_bad_literals() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn formats_with_denominator() {
        assert_eq!(format_rational(&int(2)), "2/1");
        assert_eq!(format_rational(&rat(-4, 6)), "-2/3");
    }

    #[test]
    fn serde_uses_strings() {
        let json = serde_json::to_string(&Exact(rat(2, 3))).unwrap();
        assert_eq!(json, "\"2/3\"");
        let back: Exact = serde_json::from_str(&json).unwrap();
        assert_eq!(back.0, rat(2, 3));
        let from_int: Exact = serde_json::from_str("5").unwrap();
        assert_eq!(from_int.0, int(5));
        assert!(serde_json::from_str::<Exact>("0.5").is_err());
    }
}
