use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// An exact rational.
pub type Rational = BigRational;

/// A concrete-domain constant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Rational(Rational),
    /// A closed interval `[start, end]` with `start < end`.
    Interval(Rational, Rational),
}

impl Value {
    pub fn int(n: i64) -> Value {
        Value::Rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Value {
        Value::Rational(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn interval(s: i64, e: i64) -> Value {
        Value::Interval(
            Rational::from_integer(BigInt::from(s)),
            Rational::from_integer(BigInt::from(e)),
        )
    }
}

pub(crate) fn fmt_rational(q: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if q.denom().is_one() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

pub(crate) fn rational_from_index(i: usize) -> Rational {
    let mut q = Rational::zero();
    q += BigInt::from(i);
    q
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Rational(q) => fmt_rational(q, f),
            Value::Interval(s, e) => {
                f.write_str("[")?;
                fmt_rational(s, f)?;
                f.write_str(", ")?;
                fmt_rational(e, f)?;
                f.write_str("]")
            }
        }
    }
}
