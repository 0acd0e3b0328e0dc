//! Allocation of identical indivisible goods among agents with weighted
//! entitlements and arbitrary increasing utility functions.
//!
//! The crate provides:
//!
//! - greedy welfare maximization (plain, capped, and Nash) for concave
//!   utilities;
//! - maximin and leximin allocation by a sorted-sweep construction whose
//!   outputs are equitable up to any good;
//! - fairness checkers (WEF/WEF1/WEFX, WEQ/WEQX, WMMS) with violation
//!   witnesses;
//! - weighted maximin share computation and existence decisions, and
//!   envy-free-up-to-any-good constructions for power utilities;
//! - total-weighted-deficit minimization per pivot and globally, coin
//!   compensation to exact equitability, and a fixed-type multi-type variant;
//! - exhaustive oracles and seeded scenario samplers for property testing.
//!
//! Tabulated and linear utilities are evaluated in exact rational arithmetic;
//! power and log utilities use doubles with tolerance-based comparisons.

pub mod deficit;
pub mod error;
pub mod exact;
pub mod fairness;
pub mod jsonio;
pub mod oracle;
pub mod report;
pub mod scenario;
pub mod shares;
pub mod solvers;
pub mod utility;

pub use error::{Error, Result};
pub use exact::{ExactValue, DEFAULT_EPSILON};
pub use fairness::{check_fairness, FairnessCheck, FairnessProperty};
pub use report::{welfare_report, NashWelfare, WelfareReport};
pub use scenario::{Allocation, Scenario};
pub use utility::UtilityFunction;

pub use num::bigint::BigInt;
pub use num::rational::BigRational;
