//! Arbitrary-precision rationals and their text form.
//!
//! The text form is `p/q` or `p` with an optional leading `-`, `q > 0`.
//! Output is always in lowest terms; [`parse_rational`] accepts any
//! well-formed fraction and reduces it, [`parse_canonical_rational`] also
//! rejects non-reduced spellings.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use num_rational::BigRational as Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RationalParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal {0:?}")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("rational {given:?} is not in lowest terms (expected {canonical:?})")]
    NotCanonical { given: String, canonical: String },
}

/// `n / d` as an exact rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

fn parse_digits(s: &str, whole: &str) -> Result<BigInt, RationalParseError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(RationalParseError::Malformed(whole.to_string()));
    }
    s.parse::<BigInt>()
        .map_err(|_| RationalParseError::Malformed(whole.to_string()))
}

pub fn parse_rational(s: &str) -> Result<Rational, RationalParseError> {
    if s.is_empty() {
        return Err(RationalParseError::Empty);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (parse_digits(n, s)?, parse_digits(d, s)?),
        None => (parse_digits(body, s)?, BigInt::one()),
    };
    if den.is_zero() {
        return Err(RationalParseError::ZeroDenominator(s.to_string()));
    }
    let num = if neg { -num } else { num };
    Ok(Rational::new(num, den))
}

/// Like [`parse_rational`] but the literal must already be the canonical
/// spelling (lowest terms, no `-0`, no `/1`, no leading zeros).
pub fn parse_canonical_rational(s: &str) -> Result<Rational, RationalParseError> {
    let value = parse_rational(s)?;
    let canonical = format_rational(&value);
    if canonical != s {
        return Err(RationalParseError::NotCanonical {
            given: s.to_string(),
            canonical,
        });
    }
    Ok(value)
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Display adapter that always renders the canonical text form.
pub struct Exact<'a>(pub &'a Rational);

impl fmt::Display for Exact<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(self.0))
    }
}

pub fn is_positive(q: &Rational) -> bool {
    q.is_positive()
}

pub fn is_negative(q: &Rational) -> bool {
    q.is_negative()
}
