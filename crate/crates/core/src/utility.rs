//! Utility functions over item counts: strictly increasing, zero at zero.

use crate::error::{Error, Result};
use crate::exact::ExactValue;
use num::bigint::BigInt;
use num::integer::Integer;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

/// Storage for tabulated utilities. Plain integer tables take the compact
/// path; anything else falls back to big rationals.
#[derive(Clone, Debug, PartialEq)]
pub enum TabulatedValues {
    Integers(Vec<u64>),
    Rationals(Vec<BigRational>),
}

impl TabulatedValues {
    pub fn len(&self) -> usize {
        match self {
            TabulatedValues::Integers(v) => v.len(),
            TabulatedValues::Rationals(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, x: usize) -> BigRational {
        match self {
            TabulatedValues::Integers(v) => BigRational::from_integer(BigInt::from(v[x])),
            TabulatedValues::Rationals(v) => v[x].clone(),
        }
    }
}

/// An increasing utility function on non-negative item counts with f(0) = 0.
#[derive(Clone, Debug, PartialEq)]
pub enum UtilityFunction {
    /// Explicit values `f(0..=m)`; the exact workhorse.
    Tabulated(TabulatedValues),
    /// `f(x) = rate * x`.
    Linear { rate: BigRational },
    /// `f(x) = coeff * x^exponent`; float-backed.
    Power { coeff: f64, exponent: f64 },
    /// `f(x) = ln(1 + x)`; float-backed. The `1 + x` shift keeps f(0) = 0.
    Log,
}

impl UtilityFunction {
    pub fn tabulated_integers(values: Vec<u64>) -> Self {
        UtilityFunction::Tabulated(TabulatedValues::Integers(values))
    }

    pub fn tabulated_rationals(values: Vec<BigRational>) -> Self {
        // Collapse to the compact form when every entry is a small integer.
        let ints: Option<Vec<u64>> = values
            .iter()
            .map(|v| {
                if v.denom().is_one() {
                    v.numer().to_u64()
                } else {
                    None
                }
            })
            .collect();
        match ints {
            Some(ints) => UtilityFunction::Tabulated(TabulatedValues::Integers(ints)),
            None => UtilityFunction::Tabulated(TabulatedValues::Rationals(values)),
        }
    }

    pub fn linear(rate: BigRational) -> Self {
        UtilityFunction::Linear { rate }
    }

    pub fn power(coeff: f64, exponent: f64) -> Self {
        UtilityFunction::Power { coeff, exponent }
    }

    pub fn log() -> Self {
        UtilityFunction::Log
    }

    /// Largest valid argument, when the domain is bounded.
    pub fn domain_max(&self) -> Option<u64> {
        match self {
            UtilityFunction::Tabulated(t) => Some(t.len().saturating_sub(1) as u64),
            _ => None,
        }
    }

    /// f(x). Exact rational for tabulated and linear kinds, float otherwise.
    pub fn eval(&self, x: u64) -> Result<ExactValue> {
        match self {
            UtilityFunction::Tabulated(t) => {
                let max = t.len().saturating_sub(1) as u64;
                if x > max {
                    return Err(Error::DomainExceeded { x, max });
                }
                Ok(ExactValue::Rational(t.get(x as usize)))
            }
            UtilityFunction::Linear { rate } => Ok(ExactValue::Rational(
                rate * BigRational::from_integer(BigInt::from(x)),
            )),
            UtilityFunction::Power { coeff, exponent } => {
                Ok(ExactValue::Float(coeff * (x as f64).powf(*exponent)))
            }
            UtilityFunction::Log => Ok(ExactValue::Float((1.0 + x as f64).ln())),
        }
    }

    /// f(x+1) - f(x).
    pub fn marginal(&self, x: u64) -> Result<ExactValue> {
        Ok(&self.eval(x + 1)? - &self.eval(x)?)
    }

    /// Smallest x with f(x) >= y. Errors when no count in the domain reaches y.
    pub fn ceil_inverse(&self, y: &ExactValue) -> Result<u64> {
        if y.cmp_total(&ExactValue::zero()) != std::cmp::Ordering::Greater {
            return Ok(0);
        }
        match self {
            UtilityFunction::Tabulated(t) => {
                let max = t.len().saturating_sub(1) as u64;
                if self.eval(max)?.cmp_total(y) == std::cmp::Ordering::Less {
                    return Err(Error::UnreachableValue { y: y.to_string() });
                }
                // Binary search on the integer domain; f is strictly increasing.
                let (mut lo, mut hi) = (0u64, max);
                while lo < hi {
                    let mid = lo + (hi - lo) / 2;
                    if self.eval(mid)?.cmp_total(y) == std::cmp::Ordering::Less {
                        lo = mid + 1;
                    } else {
                        hi = mid;
                    }
                }
                Ok(lo)
            }
            UtilityFunction::Linear { rate } => {
                let y = match y {
                    ExactValue::Rational(r) => r.clone(),
                    ExactValue::Float(v) => BigRational::from_float(*v)
                        .ok_or_else(|| Error::UnreachableValue { y: v.to_string() })?,
                };
                let q = y / rate;
                let mut x = q.ceil().to_integer();
                if x.is_negative() {
                    x = BigInt::zero();
                }
                Ok(x.to_u64().unwrap_or(u64::MAX))
            }
            UtilityFunction::Power { .. } | UtilityFunction::Log => {
                let target = y.to_f64();
                let guess = match self {
                    UtilityFunction::Power { coeff, exponent } => {
                        (target / coeff).powf(1.0 / exponent)
                    }
                    _ => target.exp() - 1.0,
                };
                if !guess.is_finite() || guess >= u64::MAX as f64 {
                    // The required count is not representable.
                    return Err(Error::UnreachableValue { y: y.to_string() });
                }
                let mut x = guess.ceil().max(0.0) as u64;
                // Float fix-up around the analytic guess.
                while x > 0 && self.eval(x - 1)?.cmp_total(y) != std::cmp::Ordering::Less {
                    x -= 1;
                }
                while self.eval(x)?.cmp_total(y) == std::cmp::Ordering::Less {
                    x = x
                        .checked_add(1)
                        .ok_or_else(|| Error::UnreachableValue { y: y.to_string() })?;
                }
                Ok(x)
            }
        }
    }

    /// True iff the marginal f(x+1) - f(x) is non-increasing over 0..m-1.
    pub fn is_concave(&self, m: u64) -> bool {
        match self {
            UtilityFunction::Tabulated(TabulatedValues::Integers(v)) => {
                let upto = v.len().min(m as usize + 1);
                v[..upto]
                    .windows(3)
                    .all(|w| w[1] as i128 - w[0] as i128 >= w[2] as i128 - w[1] as i128)
            }
            UtilityFunction::Tabulated(TabulatedValues::Rationals(v)) => {
                let upto = v.len().min(m as usize + 1);
                v[..upto].windows(3).all(|w| &w[1] - &w[0] >= &w[2] - &w[1])
            }
            UtilityFunction::Linear { .. } | UtilityFunction::Log => true,
            UtilityFunction::Power { exponent, .. } => *exponent <= 1.0,
        }
    }

    /// True iff f takes integer values on 0..=m.
    pub fn integer_valued(&self, _m: u64) -> bool {
        match self {
            UtilityFunction::Tabulated(TabulatedValues::Integers(_)) => true,
            UtilityFunction::Tabulated(TabulatedValues::Rationals(v)) => {
                v.iter().all(|x| x.denom().is_one())
            }
            UtilityFunction::Linear { rate } => rate.denom().is_one(),
            _ => false,
        }
    }

    /// Least common denominator of the values on 0..=m, when they are all
    /// rational. `None` for float-backed kinds.
    pub fn value_lcd(&self, _m: u64) -> Option<BigInt> {
        match self {
            UtilityFunction::Tabulated(TabulatedValues::Integers(_)) => Some(BigInt::one()),
            UtilityFunction::Tabulated(TabulatedValues::Rationals(v)) => {
                Some(v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom())))
            }
            UtilityFunction::Linear { rate } => Some(rate.denom().clone()),
            _ => None,
        }
    }

    pub fn is_float_backed(&self) -> bool {
        matches!(self, UtilityFunction::Power { .. } | UtilityFunction::Log)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            UtilityFunction::Tabulated(_) => "table",
            UtilityFunction::Linear { .. } => "linear",
            UtilityFunction::Power { .. } => "power",
            UtilityFunction::Log => "log",
        }
    }

    /// Checks the invariants for a column with `m` items: f(0)=0, strictly
    /// increasing, positive parameters, table length exactly m+1.
    pub fn validate(&self, m: u64, agent: &str, type_name: &str) -> Result<()> {
        let ctx = |msg: String| Error::InvalidScenario(msg);
        match self {
            UtilityFunction::Tabulated(t) => {
                if m.checked_add(1) != Some(t.len() as u64) {
                    return Err(ctx(format!(
                        "utility table for agent {agent} (type {type_name}) has {} entries, expected {}",
                        t.len(),
                        m.saturating_add(1)
                    )));
                }
                if !t.get(0).is_zero() {
                    return Err(ctx(format!(
                        "utility of agent {agent} (type {type_name}) must satisfy f(0)=0"
                    )));
                }
                match t {
                    TabulatedValues::Integers(v) => {
                        for x in 1..v.len() {
                            if v[x] <= v[x - 1] {
                                return Err(ctx(format!(
                                    "utility not strictly increasing at x={x} for agent {agent}"
                                )));
                            }
                        }
                    }
                    TabulatedValues::Rationals(v) => {
                        for x in 1..v.len() {
                            if v[x] <= v[x - 1] {
                                return Err(ctx(format!(
                                    "utility not strictly increasing at x={x} for agent {agent}"
                                )));
                            }
                        }
                    }
                }
                Ok(())
            }
            UtilityFunction::Linear { rate } => {
                if !rate.is_positive() {
                    return Err(ctx(format!(
                        "linear utility rate must be positive for agent {agent}"
                    )));
                }
                Ok(())
            }
            UtilityFunction::Power { coeff, exponent } => {
                if !(coeff.is_finite() && *coeff > 0.0)
                    || !(exponent.is_finite() && *exponent > 0.0)
                {
                    return Err(ctx(format!(
                        "power utility for agent {agent} needs finite positive c and a"
                    )));
                }
                Ok(())
            }
            UtilityFunction::Log => Ok(()),
        }
    }
}
