//! Weighted Nash welfare over item counts: maximize prod_i x_i^{w_i}.

use crate::error::{Error, Result};
use crate::exact::ExactValue;
use crate::oracle::nash_product;
use crate::report::{self, NashWelfare, WelfareReport};
use crate::scenario::{Allocation, Scenario};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Float key with a total order for the greedy heap.
#[derive(PartialEq)]
struct F64Ord(f64);

impl Eq for F64Ord {}

impl PartialOrd for F64Ord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for F64Ord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Maximizes the weighted product of bundle sizes. Every agent is seeded with
/// one item (the log gain from an empty bundle is unbounded); the remainder
/// follows the greedy marginal-gain loop with gains w_i (ln(x+1) - ln x).
///
/// With m < n the product is zero for every allocation; the result is flagged
/// degenerate and hands single items to the lowest-index agents.
pub fn solve_nash(s: &Scenario) -> Result<WelfareReport> {
    if s.k() != 1 {
        return Err(Error::InvalidScenario(
            "the Nash solver handles single-type scenarios".into(),
        ));
    }
    let n = s.n();
    let m = s.total_items();
    let weights: Vec<f64> = (0..n)
        .map(|i| ExactValue::Rational(s.single_weight(i).clone()).to_f64())
        .collect();

    if m < n as u64 {
        let counts: Vec<u64> = (0..n).map(|i| u64::from((i as u64) < m)).collect();
        let allocation = Allocation::from_single(s, counts)?;
        let mut rep = report::welfare_report(s, &allocation)?;
        rep.nash = Some(NashWelfare {
            log: f64::NEG_INFINITY,
            product: 0.0,
            degenerate: true,
        });
        return Ok(rep);
    }

    let mut counts = vec![1u64; n];
    let mut heap: BinaryHeap<(F64Ord, Reverse<usize>)> = (0..n)
        .map(|i| (F64Ord(weights[i] * (2f64.ln())), Reverse(i)))
        .collect();
    for _ in 0..(m - n as u64) {
        let (_, Reverse(i)) = heap.pop().expect("one entry per agent");
        counts[i] += 1;
        let x = counts[i] as f64;
        heap.push((F64Ord(weights[i] * ((x + 1.0).ln() - x.ln())), Reverse(i)));
    }

    let log: f64 = weights
        .iter()
        .zip(&counts)
        .map(|(w, &x)| w * (x as f64).ln())
        .sum();
    let scalar = s.scalar_weights().expect("k = 1 always has scalar weights");
    let product = nash_product(&scalar, &counts).to_f64();

    let allocation = Allocation::from_single(s, counts)?;
    let mut rep = report::welfare_report(s, &allocation)?;
    rep.nash = Some(NashWelfare {
        log,
        product,
        degenerate: false,
    });
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::oracle::{oracle_best, Objective, OracleLimits, ScenarioSampler};
    use crate::utility::UtilityFunction;

    fn identity_scenario(weights: &[i64], m: u64) -> Scenario {
        Scenario::single_type(
            weights.iter().map(|&w| rat(w)).collect(),
            weights
                .iter()
                .map(|_| UtilityFunction::linear(rat(1)))
                .collect(),
            m,
        )
        .unwrap()
    }

    #[test]
    fn even_split_of_four() {
        let r = solve_nash(&identity_scenario(&[1, 1], 4)).unwrap();
        assert_eq!(r.allocation.single_counts(), vec![2, 2]);
        assert_eq!(r.nash.as_ref().unwrap().product, 4.0);
    }

    #[test]
    fn five_items_tie_breaks_to_low_index_extension() {
        let r = solve_nash(&identity_scenario(&[1, 1], 5)).unwrap();
        assert_eq!(r.allocation.single_counts(), vec![3, 2]);
        assert_eq!(r.nash.as_ref().unwrap().product, 6.0);
    }

    #[test]
    fn single_agent_log_welfare() {
        let r = solve_nash(&identity_scenario(&[2], 3)).unwrap();
        assert_eq!(r.allocation.single_counts(), vec![3]);
        let log = r.nash.as_ref().unwrap().log;
        assert!((log - 2.0 * 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn too_few_items_is_degenerate() {
        let r = solve_nash(&identity_scenario(&[1, 1, 1], 2)).unwrap();
        let nash = r.nash.as_ref().unwrap();
        assert!(nash.degenerate);
        assert_eq!(nash.product, 0.0);
        assert_eq!(r.allocation.single_counts(), vec![1, 1, 0]);
    }

    #[test]
    fn product_matches_oracle_on_small_instances() {
        let mut sampler = ScenarioSampler::seeded(3);
        let limits = OracleLimits::default();
        for _ in 0..30 {
            let s = sampler.concave_single_type(4, 9);
            if s.total_items() < s.n() as u64 {
                continue;
            }
            let fast = solve_nash(&s).unwrap();
            let oracle = oracle_best(&s, Objective::Nash, &limits).unwrap();
            let fast_product = nash_product(
                &s.scalar_weights().unwrap(),
                &fast.allocation.single_counts(),
            );
            assert_eq!(
                fast_product.cmp_total(&oracle.value),
                std::cmp::Ordering::Equal,
                "products differ"
            );
        }
    }
}
