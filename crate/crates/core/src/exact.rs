//! Exact-versus-float value arithmetic.
//!
//! Tabulated and linear utilities are carried as big rationals end to end, so
//! deficits, coin counts and tie handling stay bit-exact. Power and log
//! utilities live in `f64` and are compared with a tolerance.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

/// Default tolerance for comparisons that involve a float-backed value.
pub const DEFAULT_EPSILON: f64 = 1e-9;

/// A utility or welfare value: exact big rational, or double precision.
///
/// Mixed-kind arithmetic promotes the rational side to `f64`; two rationals
/// never lose exactness.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactValue {
    Rational(BigRational),
    Float(f64),
}

impl ExactValue {
    pub fn zero() -> Self {
        ExactValue::Rational(BigRational::zero())
    }

    pub fn from_int(v: i64) -> Self {
        ExactValue::Rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_nat(v: u64) -> Self {
        ExactValue::Rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        ExactValue::Rational(r)
    }

    pub fn from_f64(v: f64) -> Self {
        ExactValue::Float(v)
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ExactValue::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactValue::Rational(r) => Some(r),
            ExactValue::Float(_) => None,
        }
    }

    /// Explicit promotion; the only sanctioned way to mix kinds.
    pub fn to_f64(&self) -> f64 {
        match self {
            ExactValue::Rational(r) => r.to_f64().unwrap_or_else(|| {
                // Values beyond f64 range collapse to +/- infinity.
                if r.is_negative() {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }),
            ExactValue::Float(v) => *v,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ExactValue::Rational(r) => r.is_zero(),
            ExactValue::Float(v) => *v == 0.0,
        }
    }

    /// Total order: exact on rational pairs, `f64::total_cmp` after promotion
    /// otherwise. Used wherever determinism matters (argmax scans, heaps).
    pub fn cmp_total(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExactValue::Rational(a), ExactValue::Rational(b)) => a.cmp(b),
            _ => self.to_f64().total_cmp(&other.to_f64()),
        }
    }

    /// Tolerant comparison: decisive on rational pairs, within `eps` equal
    /// otherwise.
    pub fn cmp_eps(&self, other: &Self, eps: f64) -> Ordering {
        match (self, other) {
            (ExactValue::Rational(a), ExactValue::Rational(b)) => a.cmp(b),
            _ => {
                let a = self.to_f64();
                let b = other.to_f64();
                if (a - b).abs() <= eps {
                    Ordering::Equal
                } else {
                    a.total_cmp(&b)
                }
            }
        }
    }

    pub fn ge_eps(&self, other: &Self, eps: f64) -> bool {
        self.cmp_eps(other, eps) != Ordering::Less
    }

    pub fn eq_eps(&self, other: &Self, eps: f64) -> bool {
        self.cmp_eps(other, eps) == Ordering::Equal
    }

    fn binop(
        &self,
        other: &Self,
        rat: impl Fn(&BigRational, &BigRational) -> BigRational,
        flt: impl Fn(f64, f64) -> f64,
    ) -> Self {
        match (self, other) {
            (ExactValue::Rational(a), ExactValue::Rational(b)) => ExactValue::Rational(rat(a, b)),
            _ => ExactValue::Float(flt(self.to_f64(), other.to_f64())),
        }
    }
}

impl Add for &ExactValue {
    type Output = ExactValue;
    fn add(self, rhs: Self) -> ExactValue {
        self.binop(rhs, |a, b| a + b, |a, b| a + b)
    }
}

impl Sub for &ExactValue {
    type Output = ExactValue;
    fn sub(self, rhs: Self) -> ExactValue {
        self.binop(rhs, |a, b| a - b, |a, b| a - b)
    }
}

impl Mul for &ExactValue {
    type Output = ExactValue;
    fn mul(self, rhs: Self) -> ExactValue {
        self.binop(rhs, |a, b| a * b, |a, b| a * b)
    }
}

impl Div for &ExactValue {
    type Output = ExactValue;
    fn div(self, rhs: Self) -> ExactValue {
        self.binop(rhs, |a, b| a / b, |a, b| a / b)
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactValue::Rational(r) => write!(f, "{}", format_rational(r)),
            ExactValue::Float(v) => write!(f, "{v}"),
        }
    }
}

/// Wrapper giving `ExactValue` the total order of [`ExactValue::cmp_total`],
/// so it can key heaps and sorts.
#[derive(Clone, Debug)]
pub struct TotalOrd(pub ExactValue);

impl PartialEq for TotalOrd {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp_total(&other.0) == Ordering::Equal
    }
}

impl Eq for TotalOrd {}

impl PartialOrd for TotalOrd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TotalOrd {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp_total(&other.0)
    }
}

/// Canonical text form: `"p/q"` reduced, or the bare integer when q = 1.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"`, plain integers, and decimal strings such as `"1.25"`.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty rational".to_string());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in '{s}'"))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in '{s}'"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in '{s}'"));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad decimal '{s}'"));
        }
        let (sign, int_digits) = match int_part.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, int_part.strip_prefix('+').unwrap_or(int_part)),
        };
        let int_val: BigInt = if int_digits.is_empty() {
            BigInt::zero()
        } else {
            int_digits
                .parse()
                .map_err(|_| format!("bad decimal '{s}'"))?
        };
        let frac_val: BigInt = frac_part
            .parse()
            .map_err(|_| format!("bad decimal '{s}'"))?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let numer = int_val * &scale + frac_val;
        return Ok(BigRational::new(numer * BigInt::from(sign), scale));
    }
    let n: BigInt = s.parse().map_err(|_| format!("bad rational '{s}'"))?;
    Ok(BigRational::from_integer(n))
}

/// Shorthand used throughout tests.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `n/d` as a rational; panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_rational_forms() {
        assert_eq!(parse_rational("4").unwrap(), rat(4));
        assert_eq!(parse_rational("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("1.25").unwrap(), ratio(5, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), rat(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    #[test]
    fn canonical_formatting() {
        assert_eq!(format_rational(&rat(4)), "4");
        assert_eq!(format_rational(&ratio(8, 2)), "4");
        assert_eq!(format_rational(&ratio(2, 3)), "2/3");
        assert_eq!(format_rational(&ratio(-2, 4)), "-1/2");
    }

    #[test]
    fn rational_comparisons_are_decisive() {
        let a = ExactValue::from_rational(ratio(1, 3));
        let b = ExactValue::from_rational(ratio(333333333, 1000000000));
        assert_eq!(a.cmp_total(&b), Ordering::Greater);
        assert_eq!(a.cmp_eps(&b, 1e-3), Ordering::Greater);
    }

    #[test]
    fn float_comparisons_use_epsilon() {
        let a = ExactValue::from_f64(1.0);
        let b = ExactValue::from_f64(1.0 + 1e-12);
        assert!(a.eq_eps(&b, DEFAULT_EPSILON));
        assert_eq!(a.cmp_total(&b), Ordering::Less);
    }

    #[test]
    fn mixing_promotes_to_float() {
        let a = ExactValue::from_rational(ratio(1, 2));
        let b = ExactValue::from_f64(0.25);
        match &a * &b {
            ExactValue::Float(v) => assert!((v - 0.125).abs() < 1e-15),
            other => panic!("expected float, got {other:?}"),
        }
    }

    #[test]
    fn arithmetic_stays_exact_on_rationals() {
        let a = ExactValue::from_rational(ratio(1, 3));
        let b = ExactValue::from_rational(ratio(1, 6));
        assert_eq!(&a + &b, ExactValue::from_rational(ratio(1, 2)));
        assert_eq!(&a - &b, ExactValue::from_rational(ratio(1, 6)));
        assert_eq!(&a / &b, ExactValue::from_rational(rat(2)));
    }
}
