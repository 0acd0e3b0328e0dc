//! Weighted maximin and leximin allocation via a merged sorted sweep.
//!
//! Merge the value lists f_i(j)/w_i (j = 1..t) of all agents, sort
//! ascending, and sweep whole groups of equal values. After sweeping a group
//! the implied allocation gives each agent one item per swept entry plus one
//! (its zero entry): attainable totals are n plus the cumulative group sizes.
//! If the target lands on a group boundary the implied allocation is optimal
//! (and leximin); otherwise take the largest attainable total below the
//! target, whose minimum-ratio agents number strictly more than the deficit,
//! and top up the ones with the largest next ratios f_i(x_i + 1)/w_i.

use crate::error::{Error, Result};
use crate::exact::ExactValue;
use crate::report::{self, WelfareReport};
use crate::scenario::{Allocation, Scenario};

/// Maximin solution plus whether the sweep hit the item count exactly
/// (the case whose output carries the strict separation guarantee
/// f_i(x_i)/w_i > f_j(x_j - 1)/w_j for all pairs).
#[derive(Clone, Debug)]
pub struct MaximinSolution {
    pub report: WelfareReport,
    pub exact_counter_hit: bool,
}

fn single_type_only(s: &Scenario, what: &str) -> Result<()> {
    if s.k() != 1 {
        return Err(Error::InvalidScenario(format!(
            "{what} handles single-type scenarios"
        )));
    }
    Ok(())
}

/// Gives one item each to the `take` agents with the largest key, lowest
/// index first on ties.
fn top_up_largest(keys: &[(ExactValue, usize)], take: usize, counts: &mut [u64]) {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| {
        keys[b]
            .0
            .cmp_total(&keys[a].0)
            .then(keys[a].1.cmp(&keys[b].1))
    });
    for &idx in order.iter().take(take) {
        counts[keys[idx].1] += 1;
    }
}

fn sweep(s: &Scenario, t_items: u64) -> Result<(Vec<u64>, bool)> {
    let n = s.n() as u64;

    if t_items == 0 {
        return Ok((vec![0; s.n()], false));
    }

    if t_items < n {
        // Any threshold above zero already demands one item per agent, so the
        // best minimum ratio is zero; split by the largest first-item ratios.
        let keys: Vec<(ExactValue, usize)> = (0..s.n())
            .map(|i| {
                Ok((
                    &s.single_utility(i).eval(1)?
                        / &ExactValue::Rational(s.single_weight(i).clone()),
                    i,
                ))
            })
            .collect::<Result<_>>()?;
        let mut counts = vec![0u64; s.n()];
        top_up_largest(&keys, t_items as usize, &mut counts);
        return Ok((counts, false));
    }

    // Merged ascending value list; strict monotonicity keeps each agent's
    // entries distinct, so equal values always belong to distinct agents.
    let mut entries: Vec<(ExactValue, usize)> = Vec::with_capacity((n * t_items) as usize);
    for i in 0..s.n() {
        let w = ExactValue::Rational(s.single_weight(i).clone());
        for j in 1..=t_items {
            entries.push((&s.single_utility(i).eval(j)? / &w, i));
        }
    }
    entries.sort_by(|a, b| a.0.cmp_total(&b.0).then(a.1.cmp(&b.1)));

    let mut swept = vec![0u64; s.n()];
    let mut total = n; // the n zero entries are always swept
    let mut pos = 0usize;
    while total < t_items {
        // Sweep the whole group of the next distinct value.
        let group_start = pos;
        let value = entries[pos].0.clone();
        while pos < entries.len() && entries[pos].0.cmp_total(&value) == std::cmp::Ordering::Equal {
            pos += 1;
        }
        let group = pos - group_start;
        if total + group as u64 > t_items {
            // Case 2: the target is skipped. Roll back to the boundary and
            // top up minimum-ratio agents (the owners of this group).
            let mut counts: Vec<u64> = swept.iter().map(|&c| c + 1).collect();
            let missing = (t_items - total) as usize;
            let keys: Vec<(ExactValue, usize)> = entries[group_start..pos]
                .iter()
                .map(|(_, i)| {
                    Ok((
                        &s.single_utility(*i).eval(counts[*i] + 1)?
                            / &ExactValue::Rational(s.single_weight(*i).clone()),
                        *i,
                    ))
                })
                .collect::<Result<_>>()?;
            top_up_largest(&keys, missing, &mut counts);
            return Ok((counts, false));
        }
        for &(_, i) in &entries[group_start..pos] {
            swept[i] += 1;
        }
        total += group as u64;
    }

    let counts: Vec<u64> = swept.iter().map(|&c| c + 1).collect();
    Ok((counts, true))
}

/// Allocation of exactly `t_items` goods maximizing min_i f_i(x_i)/w_i.
pub fn solve_maximin(s: &Scenario, t_items: u64) -> Result<MaximinSolution> {
    single_type_only(s, "the maximin solver")?;
    if t_items > s.total_items() {
        return Err(Error::InvalidScenario(format!(
            "cannot allocate {t_items} items, supply is {}",
            s.total_items()
        )));
    }
    let (counts, exact_hit) = sweep(s, t_items)?;
    let matrix: Vec<Vec<u64>> = counts.into_iter().map(|c| vec![c]).collect();
    let allocation = if t_items == s.total_items() {
        Allocation::trusted_complete(matrix)
    } else {
        Allocation::trusted_partial(matrix)
    };
    Ok(MaximinSolution {
        report: report::build_report(s, &allocation)?,
        exact_counter_hit: exact_hit,
    })
}

/// Complete allocation maximizing the ascending vector of ratios
/// lexicographically. The sweep allocation is already leximin on boundary
/// hits; the top-up rule makes it leximin in the skipped case too.
pub fn solve_leximin(s: &Scenario) -> Result<WelfareReport> {
    single_type_only(s, "the leximin solver")?;
    Ok(solve_maximin(s, s.total_items())?.report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, DEFAULT_EPSILON};
    use crate::fairness::{check_fairness, FairnessProperty};
    use crate::oracle::{oracle_best, Objective, OracleLimits, ScenarioSampler};
    use crate::utility::UtilityFunction;

    fn linear(rates: &[i64], weights: &[i64], m: u64) -> Scenario {
        Scenario::single_type(
            weights.iter().map(|&w| rat(w)).collect(),
            rates
                .iter()
                .map(|&r| UtilityFunction::linear(rat(r)))
                .collect(),
            m,
        )
        .unwrap()
    }

    #[test]
    fn reference_scenario_maximin() {
        let s = linear(&[2, 4, 7, 7], &[1, 1, 1, 1], 7);
        let sol = solve_maximin(&s, 7).unwrap();
        assert!(sol.exact_counter_hit);
        assert_eq!(sol.report.allocation.single_counts(), vec![3, 2, 1, 1]);
        assert_eq!(
            sol.report.rawlsian.clone().unwrap(),
            ExactValue::from_int(6)
        );
    }

    #[test]
    fn symmetric_pair_splits_evenly() {
        let s = linear(&[1, 1], &[1, 1], 4);
        let sol = solve_maximin(&s, 4).unwrap();
        assert_eq!(sol.report.allocation.single_counts(), vec![2, 2]);
        assert_eq!(
            sol.report.rawlsian.clone().unwrap(),
            ExactValue::from_int(2)
        );
    }

    #[test]
    fn weight_two_agent_needs_double() {
        let s = linear(&[1, 1], &[1, 2], 3);
        let sol = solve_maximin(&s, 3).unwrap();
        assert_eq!(sol.report.allocation.single_counts(), vec![1, 2]);
        assert_eq!(
            sol.report.rawlsian.clone().unwrap(),
            ExactValue::from_int(1)
        );
    }

    #[test]
    fn reference_scenario_leximin() {
        let s = linear(&[2, 4, 7, 7], &[1, 1, 1, 1], 7);
        let r = solve_leximin(&s).unwrap();
        assert_eq!(r.allocation.single_counts(), vec![3, 2, 1, 1]);
        let mut ratios = r.ratios.clone().unwrap();
        ratios.sort_by(|a, b| a.cmp_total(b));
        let want: Vec<ExactValue> = [6, 7, 7, 8]
            .iter()
            .map(|&v| ExactValue::from_int(v))
            .collect();
        assert_eq!(ratios, want);
    }

    #[test]
    fn identical_pair_leximin_tie_break() {
        let s = linear(&[1, 1], &[1, 1], 5);
        let r = solve_leximin(&s).unwrap();
        assert_eq!(r.allocation.single_counts(), vec![3, 2]);
    }

    #[test]
    fn single_agent() {
        let s = linear(&[3], &[2], 4);
        let r = solve_leximin(&s).unwrap();
        assert_eq!(r.allocation.single_counts(), vec![4]);
    }

    #[test]
    fn fewer_items_than_agents() {
        let s = linear(&[1, 9, 5], &[1, 1, 1], 7);
        let sol = solve_maximin(&s, 2).unwrap();
        assert!(!sol.exact_counter_hit);
        assert_eq!(sol.report.allocation.single_counts(), vec![0, 1, 1]);
        assert_eq!(sol.report.rawlsian.clone().unwrap(), ExactValue::zero());
    }

    #[test]
    fn maximin_value_matches_oracle_and_is_monotone() {
        let mut sampler = ScenarioSampler::seeded(5);
        let limits = OracleLimits::default();
        for _ in 0..30 {
            let s = sampler.concave_single_type(4, 8);
            let mut prev: Option<ExactValue> = None;
            for t in 1..=s.total_items() {
                let sol = solve_maximin(&s, t).unwrap();
                let value = sol.report.rawlsian.clone().unwrap();
                if let Some(p) = &prev {
                    assert_ne!(
                        value.cmp_total(p),
                        std::cmp::Ordering::Less,
                        "maximin value dropped when adding an item"
                    );
                }
                prev = Some(value);
            }
            let full = solve_maximin(&s, s.total_items()).unwrap();
            let oracle = oracle_best(&s, Objective::Rawlsian, &limits).unwrap();
            assert_eq!(full.report.rawlsian.clone().unwrap(), oracle.value);
        }
    }

    #[test]
    fn strict_separation_on_exact_hits() {
        let mut sampler = ScenarioSampler::seeded(17);
        for _ in 0..40 {
            let s = sampler.concave_single_type(4, 10);
            let sol = solve_maximin(&s, s.total_items()).unwrap();
            if !sol.exact_counter_hit {
                continue;
            }
            let counts = sol.report.allocation.single_counts();
            for i in 0..s.n() {
                let ri = &s.single_utility(i).eval(counts[i]).unwrap()
                    / &ExactValue::Rational(s.single_weight(i).clone());
                for j in 0..s.n() {
                    assert!(counts[j] >= 1, "exact hits give every agent an item");
                    let rj = &s.single_utility(j).eval(counts[j] - 1).unwrap()
                        / &ExactValue::Rational(s.single_weight(j).clone());
                    assert_eq!(
                        ri.cmp_total(&rj),
                        std::cmp::Ordering::Greater,
                        "separation failed for pair ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn outputs_are_equitable_up_to_any_good() {
        let mut sampler = ScenarioSampler::seeded(29);
        for _ in 0..60 {
            let s = sampler.concave_single_type(4, 10);
            let r = solve_leximin(&s).unwrap();
            let check =
                check_fairness(&s, &r.allocation, FairnessProperty::Weqx, DEFAULT_EPSILON).unwrap();
            assert!(check.holds, "leximin output must be WEQX");
        }
    }

    #[test]
    fn leximin_is_undominated_on_small_instances() {
        let mut sampler = ScenarioSampler::seeded(41);
        let limits = OracleLimits::default();
        for _ in 0..25 {
            let s = sampler.concave_single_type(3, 7);
            let r = solve_leximin(&s).unwrap();
            let mut mine = r.ratios.clone().unwrap();
            mine.sort_by(|a, b| a.cmp_total(b));
            let oracle = oracle_best(&s, Objective::Leximin, &limits).unwrap();
            let best = oracle.sorted_ratios.unwrap();
            for (a, b) in mine.iter().zip(&best) {
                assert_eq!(a.cmp_total(b), std::cmp::Ordering::Equal);
            }
        }
    }
}
