//! Greedy welfare maximization for concave utilities.
//!
//! Each item goes to the (agent, type) pair with the largest weighted
//! marginal gain among types with remaining stock; for concave utilities the
//! running optimum extends one item at a time. A priority queue replaces the
//! linear rescan of the marginal-gain table; both orderings break ties toward
//! the lowest agent index, then the lowest type index, and produce the same
//! allocation.

use crate::error::{Error, Result};
use crate::exact::{ExactValue, TotalOrd};
use crate::report::{self, WelfareReport};
use crate::scenario::{Allocation, Scenario};
use crate::utility::UtilityFunction;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

fn ensure_concave(s: &Scenario) -> Result<()> {
    for i in 0..s.n() {
        for j in 0..s.k() {
            if !s.utility(i, j).is_concave(s.count(j)) {
                return Err(Error::NonConcaveUtility {
                    agent: s.agent_name(i).to_string(),
                });
            }
        }
    }
    Ok(())
}

/// Maximum weighted utilitarian welfare over all complete allocations.
pub fn solve_utilitarian(s: &Scenario) -> Result<WelfareReport> {
    ensure_concave(s)?;
    let n = s.n();
    let k = s.k();
    let mut stock: Vec<u64> = s.counts().to_vec();
    let mut counts = vec![vec![0u64; k]; n];

    let mut heap: BinaryHeap<(TotalOrd, Reverse<usize>, Reverse<usize>)> = BinaryHeap::new();
    for i in 0..n {
        for j in 0..k {
            if stock[j] > 0 {
                let delta =
                    &ExactValue::Rational(s.weight(i, j).clone()) * &s.utility(i, j).marginal(0)?;
                heap.push((TotalOrd(delta), Reverse(i), Reverse(j)));
            }
        }
    }

    let mut remaining = s.total_items();
    while remaining > 0 {
        let (_, Reverse(i), Reverse(j)) = heap.pop().expect("heap cannot starve before stock");
        if stock[j] == 0 {
            continue; // stale entry for an exhausted type
        }
        counts[i][j] += 1;
        stock[j] -= 1;
        remaining -= 1;
        if counts[i][j] < s.count(j) {
            let delta = &ExactValue::Rational(s.weight(i, j).clone())
                * &s.utility(i, j).marginal(counts[i][j])?;
            heap.push((TotalOrd(delta), Reverse(i), Reverse(j)));
        }
    }

    let allocation = Allocation::trusted_complete(counts);
    report::welfare_report(s, &allocation)
}

/// Reference implementation: rescan every pair at each step. Used to check
/// the heap variant; also returns the running optimum after each item.
#[allow(dead_code)]
pub(crate) fn solve_utilitarian_rescan(s: &Scenario) -> Result<(Allocation, Vec<ExactValue>)> {
    ensure_concave(s)?;
    let n = s.n();
    let k = s.k();
    let mut stock: Vec<u64> = s.counts().to_vec();
    let mut counts = vec![vec![0u64; k]; n];
    let mut welfare = ExactValue::zero();
    let mut trace = Vec::with_capacity(s.total_items() as usize);

    for _ in 0..s.total_items() {
        let mut best: Option<(ExactValue, usize, usize)> = None;
        for i in 0..n {
            for j in 0..k {
                if stock[j] == 0 {
                    continue;
                }
                let delta = &ExactValue::Rational(s.weight(i, j).clone())
                    * &s.utility(i, j).marginal(counts[i][j])?;
                let replace = match &best {
                    None => true,
                    Some((d, _, _)) => delta.cmp_total(d) == std::cmp::Ordering::Greater,
                };
                if replace {
                    best = Some((delta, i, j));
                }
            }
        }
        let (delta, i, j) = best.expect("items remain, so some pair is extendible");
        counts[i][j] += 1;
        stock[j] -= 1;
        welfare = &welfare + &delta;
        trace.push(welfare.clone());
    }
    Ok((Allocation::trusted_complete(counts), trace))
}

/// Per-agent utility caps for the restricted problem.
#[derive(Clone, Debug)]
pub struct RestrictionVector {
    pub bounds: Vec<ExactValue>,
}

impl RestrictionVector {
    pub fn new(bounds: Vec<ExactValue>) -> Result<Self> {
        for b in &bounds {
            if b.cmp_total(&ExactValue::zero()) == std::cmp::Ordering::Less {
                return Err(Error::InvalidScenario(
                    "restriction bounds must be non-negative".into(),
                ));
            }
        }
        Ok(RestrictionVector { bounds })
    }
}

/// Outcome of the capped greedy: either no complete cap-respecting
/// allocation exists, or the maximizer with its welfare.
#[derive(Clone, Debug)]
pub enum RestrictedResult {
    Infeasible,
    Feasible {
        allocation: Allocation,
        welfare: ExactValue,
    },
}

impl RestrictedResult {
    pub fn welfare(&self) -> Option<&ExactValue> {
        match self {
            RestrictedResult::Infeasible => None,
            RestrictedResult::Feasible { welfare, .. } => Some(welfare),
        }
    }
}

/// Capped greedy core over an explicit agent subset. `objective_weights`
/// scales the marginal gains (the caps always apply to raw utilities).
/// Returns the per-agent counts and the objective value, or `None` when some
/// item cannot be placed.
pub(crate) fn capped_greedy(
    functions: &[&UtilityFunction],
    objective_weights: &[ExactValue],
    caps: &[ExactValue],
    items: u64,
) -> Result<Option<(Vec<u64>, ExactValue)>> {
    let n = functions.len();
    let mut counts = vec![0u64; n];
    let mut value = ExactValue::zero();
    for _ in 0..items {
        let mut best: Option<(ExactValue, usize)> = None;
        for r in 0..n {
            let next = match functions[r].eval(counts[r] + 1) {
                Ok(v) => v,
                Err(Error::DomainExceeded { .. }) => continue,
                Err(e) => return Err(e),
            };
            if next.cmp_total(&caps[r]) == std::cmp::Ordering::Greater {
                continue;
            }
            let delta = &objective_weights[r] * &(&next - &functions[r].eval(counts[r])?);
            let replace = match &best {
                None => true,
                Some((d, _)) => delta.cmp_total(d) == std::cmp::Ordering::Greater,
            };
            if replace {
                best = Some((delta, r));
            }
        }
        match best {
            None => return Ok(None),
            Some((delta, r)) => {
                counts[r] += 1;
                value = &value + &delta;
            }
        }
    }
    Ok(Some((counts, value)))
}

/// Maximum weighted welfare over allocations of `items` goods with every
/// agent's utility capped: f_i(x_i) <= bounds_i. Single-type scenarios.
pub fn solve_restricted_utilitarian(
    s: &Scenario,
    bounds: &RestrictionVector,
    items: u64,
) -> Result<RestrictedResult> {
    if s.k() != 1 {
        return Err(Error::InvalidScenario(
            "the restricted solver handles single-type scenarios".into(),
        ));
    }
    if bounds.bounds.len() != s.n() {
        return Err(Error::InvalidScenario(
            "one bound per agent required".into(),
        ));
    }
    if items > s.total_items() {
        return Err(Error::InvalidScenario(format!(
            "cannot place {items} items, supply is {}",
            s.total_items()
        )));
    }
    ensure_concave(s)?;

    let functions: Vec<&UtilityFunction> = (0..s.n()).map(|i| s.single_utility(i)).collect();
    let weights: Vec<ExactValue> = (0..s.n())
        .map(|i| ExactValue::Rational(s.single_weight(i).clone()))
        .collect();
    match capped_greedy(&functions, &weights, &bounds.bounds, items)? {
        None => Ok(RestrictedResult::Infeasible),
        Some((counts, welfare)) => {
            let matrix = counts.into_iter().map(|c| vec![c]).collect();
            let allocation = if items == s.total_items() {
                Allocation::trusted_complete(matrix)
            } else {
                Allocation::trusted_partial(matrix)
            };
            Ok(RestrictedResult::Feasible {
                allocation,
                welfare,
            })
        }
    }
}
