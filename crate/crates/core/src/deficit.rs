//! Total-weighted-deficit minimization and coin compensation.
//!
//! For a fixed pivot p the deficit of an allocation where p holds the top
//! utility-to-weight ratio is
//!     sum_i (w_i u_p - w_p u_i) = (sum_{i != p} w_i) u_p - w_p sum_{i != p} u_i,
//! so with p receiving t items the best completion maximizes the plain sum of
//! the other agents' utilities under the caps u_i <= (w_i / w_p) f_p(t). That
//! inner problem is the capped greedy; scanning t from 1 to m yields the
//! per-pivot minimum, and the global minimum scans pivots.

use crate::error::{Error, Result};
use crate::exact::ExactValue;
use crate::scenario::{Allocation, Scenario};
use crate::solvers::capped_greedy;
use crate::utility::UtilityFunction;
use num::bigint::BigInt;
use num::integer::Integer;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

/// Minimum-deficit outcome for one pivot choice.
#[derive(Clone, Debug)]
pub struct DeficitResult {
    pub pivot: usize,
    pub allocation: Allocation,
    pub twd: ExactValue,
    /// Items handed to the pivot agent (across all types).
    pub pivot_items: u64,
    pub utilities: Vec<ExactValue>,
}

fn ensure_single_type_concave(s: &Scenario) -> Result<()> {
    if s.k() != 1 {
        return Err(Error::InvalidScenario(
            "deficit minimization over one pivot handles single-type scenarios".into(),
        ));
    }
    for i in 0..s.n() {
        if !s.single_utility(i).is_concave(s.total_items()) {
            return Err(Error::NonConcaveUtility {
                agent: s.agent_name(i).to_string(),
            });
        }
    }
    Ok(())
}

/// Minimum total weighted deficit over allocations in which agent `p` holds
/// the maximum utility-to-weight ratio.
pub fn psi_p(s: &Scenario, p: usize) -> Result<DeficitResult> {
    ensure_single_type_concave(s)?;
    if p >= s.n() {
        return Err(Error::InvalidScenario(format!(
            "pivot index {p} out of range for {} agents",
            s.n()
        )));
    }
    let n = s.n();
    let m = s.total_items();
    if m == 0 {
        return zero_items_result(s, p);
    }

    let others: Vec<usize> = (0..n).filter(|&i| i != p).collect();
    let functions: Vec<&UtilityFunction> = others.iter().map(|&i| s.single_utility(i)).collect();
    let unit = vec![ExactValue::from_int(1); others.len()];
    let w_p = ExactValue::Rational(s.single_weight(p).clone());
    let sum_w_others = ExactValue::Rational(
        others
            .iter()
            .map(|&i| s.single_weight(i))
            .fold(BigRational::zero(), |a, b| a + b),
    );

    let mut best: Option<(ExactValue, u64, Vec<u64>)> = None;
    for t in 1..=m {
        let f_pt = s.single_utility(p).eval(t)?;
        let caps: Vec<ExactValue> = others
            .iter()
            .map(|&i| &(&ExactValue::Rational(s.single_weight(i).clone()) * &f_pt) / &w_p)
            .collect();
        // Unit objective weights: the deficit depends on the raw utility sum.
        let Some((counts, sum_u)) = capped_greedy(&functions, &unit, &caps, m - t)? else {
            continue;
        };
        let twd = &(&sum_w_others * &f_pt) - &(&w_p * &sum_u);
        let better = match &best {
            None => true,
            Some((cur, _, _)) => twd.cmp_total(cur) == std::cmp::Ordering::Less,
        };
        if better {
            best = Some((twd, t, counts));
        }
    }

    // t = m is always feasible, so a minimum exists.
    let (twd, t, other_counts) = best.expect("pivot taking everything is feasible");
    let mut counts = vec![0u64; n];
    counts[p] = t;
    for (idx, &i) in others.iter().enumerate() {
        counts[i] = other_counts[idx];
    }
    let utilities: Vec<ExactValue> = (0..n)
        .map(|i| s.single_utility(i).eval(counts[i]))
        .collect::<Result<_>>()?;
    let allocation = Allocation::from_single(s, counts)?;
    Ok(DeficitResult {
        pivot: p,
        allocation,
        twd,
        pivot_items: t,
        utilities,
    })
}

fn zero_items_result(s: &Scenario, p: usize) -> Result<DeficitResult> {
    let counts = vec![0u64; s.n()];
    let utilities = vec![ExactValue::zero(); s.n()];
    Ok(DeficitResult {
        pivot: p,
        allocation: Allocation::from_single(s, counts)?,
        twd: ExactValue::zero(),
        pivot_items: 0,
        utilities,
    })
}

/// Minimum total weighted deficit over all pivots; zero exactly when an
/// exactly-equitable allocation exists.
pub fn psi(s: &Scenario) -> Result<DeficitResult> {
    ensure_single_type_concave(s)?;
    let mut best: Option<DeficitResult> = None;
    for p in 0..s.n() {
        let r = psi_p(s, p)?;
        let better = match &best {
            None => true,
            Some(cur) => r.twd.cmp_total(&cur.twd) == std::cmp::Ordering::Less,
        };
        if better {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one agent"))
}

/// Independent per-type deficit minimization for multi-type scenarios where
/// types cannot compensate each other.
pub fn psi_per_type(s: &Scenario) -> Result<Vec<DeficitResult>> {
    (0..s.k()).map(|j| psi(&s.restrict_to_type(j)?)).collect()
}

/// Compensation plan: identical coins of value 1/(scale * w_pivot) handed to
/// the non-pivot agents until every utility-to-weight ratio matches the
/// pivot's. Uses the deficit-minimizing allocation, so the coin count is the
/// smallest possible.
#[derive(Clone, Debug)]
pub struct CoinPlan {
    pub pivot: usize,
    /// Value of one coin, in original utility units.
    pub denomination: BigRational,
    pub transfers: Vec<BigInt>,
    pub total: BigInt,
    /// Factor the utilities were multiplied by to reach integers; 1 when the
    /// input was already integer-valued.
    pub scale: BigInt,
}

pub fn coin_compensation(s: &Scenario) -> Result<CoinPlan> {
    ensure_single_type_concave(s)?;
    let n = s.n();
    let m = s.total_items();
    for i in 0..n {
        if !s.single_weight(i).denom().is_one() {
            return Err(Error::NonIntegerData(format!(
                "weight of agent {} is not an integer",
                s.agent_name(i)
            )));
        }
    }
    // Least common denominator over every utility value in play.
    let mut scale = BigInt::one();
    for i in 0..n {
        match s.single_utility(i).value_lcd(m) {
            Some(lcd) => scale = scale.lcm(&lcd),
            None => {
                return Err(Error::NonIntegerData(format!(
                    "utility of agent {} does not take rational values",
                    s.agent_name(i)
                )))
            }
        }
    }

    let result = psi(s)?;
    let k = result.pivot;
    let w_k = s.single_weight(k).clone();
    let u_k = result.utilities[k]
        .as_rational()
        .expect("rational-valued scenario")
        .clone();

    let scale_rat = BigRational::from_integer(scale.clone());
    let mut transfers = Vec::with_capacity(n);
    let mut total = BigInt::zero();
    for i in 0..n {
        let u_i = result.utilities[i].as_rational().unwrap();
        let y = (&u_k * s.single_weight(i) - u_i * &w_k) * &scale_rat;
        debug_assert!(y.denom().is_one() && !y.is_negative());
        let y = y.to_integer();
        total += &y;
        transfers.push(y);
    }
    let denomination = BigRational::new(BigInt::one(), &scale * w_k.numer());
    Ok(CoinPlan {
        pivot: k,
        denomination,
        transfers,
        total,
        scale,
    })
}

/// Size caps for the fixed-type deficit search.
#[derive(Clone, Copy, Debug)]
pub struct MultitypeLimits {
    pub max_types: usize,
    /// Cap on max_i sum_j f_ij(m_j).
    pub max_omega: u64,
}

impl Default for MultitypeLimits {
    fn default() -> Self {
        MultitypeLimits {
            max_types: 3,
            max_omega: 10_000,
        }
    }
}

/// Deficit minimization for a small fixed number of types with per-agent
/// scalar weights and integer-valued utilities.
///
/// The pivot's per-type bundle (i_1..i_k) fixes its utility and with it the
/// budget u_i <= (w_i / w_p) u_p of every other agent; completing the
/// allocation is then an exact dynamic program over agents with the
/// remaining per-type counts as state and each agent choosing a budget-
/// feasible bundle.
pub fn psi_multitype(s: &Scenario, limits: &MultitypeLimits) -> Result<DeficitResult> {
    let n = s.n();
    let k = s.k();
    if k > limits.max_types {
        return Err(Error::LimitsExceeded(format!(
            "{k} item types exceeds the fixed-type cap of {}",
            limits.max_types
        )));
    }
    let weights = s.scalar_weights().ok_or(Error::ScalarWeightsRequired)?;
    for i in 0..n {
        for j in 0..k {
            if !s.utility(i, j).integer_valued(s.count(j)) {
                return Err(Error::NonIntegerData(format!(
                    "utility of agent {} for type {} is not integer-valued",
                    s.agent_name(i),
                    s.type_name(j)
                )));
            }
            if !s.utility(i, j).is_concave(s.count(j)) {
                return Err(Error::NonConcaveUtility {
                    agent: s.agent_name(i).to_string(),
                });
            }
        }
    }

    // Integer value tables and the growth cap.
    let mut tables: Vec<Vec<Vec<u64>>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(k);
        for j in 0..k {
            let table: Vec<u64> = (0..=s.count(j))
                .map(|x| {
                    s.utility(i, j).eval(x).map(|v| {
                        v.as_rational()
                            .unwrap()
                            .to_integer()
                            .to_u64()
                            .unwrap_or(u64::MAX)
                    })
                })
                .collect::<Result<_>>()?;
            row.push(table);
        }
        tables.push(row);
    }
    let omega = (0..n)
        .map(|i| {
            (0..k)
                .map(|j| tables[i][j][s.count(j) as usize])
                .sum::<u64>()
        })
        .max()
        .unwrap_or(0);
    if omega > limits.max_omega {
        return Err(Error::LimitsExceeded(format!(
            "utility growth {omega} exceeds the cap of {}",
            limits.max_omega
        )));
    }

    let m = s.total_items();
    if m == 0 {
        return Ok(DeficitResult {
            pivot: 0,
            allocation: Allocation::complete(s, vec![vec![0; k]; n])?,
            twd: ExactValue::zero(),
            pivot_items: 0,
            utilities: vec![ExactValue::zero(); n],
        });
    }

    let counts: Vec<u64> = s.counts().to_vec();
    let mut best: Option<(BigRational, usize, Vec<u64>, Vec<Vec<u64>>)> = None;

    for p in 0..n {
        let others: Vec<usize> = (0..n).filter(|&i| i != p).collect();
        let sum_w_others: BigRational = others
            .iter()
            .map(|&i| weights[i].clone())
            .fold(BigRational::zero(), |a, b| a + b);

        for pivot_tuple in MixedRadix::new(&counts) {
            if pivot_tuple.iter().all(|&x| x == 0) {
                continue;
            }
            let u_p: u64 = (0..k).map(|j| tables[p][j][pivot_tuple[j] as usize]).sum();
            let u_p_rat = BigRational::from_integer(BigInt::from(u_p));

            // Integer utility floor of the budget (w_i / w_p) u_p.
            let budgets: Vec<u64> = others
                .iter()
                .map(|&i| {
                    (&u_p_rat * &weights[i] / &weights[p])
                        .floor()
                        .to_integer()
                        .to_u64()
                        .unwrap_or(u64::MAX)
                })
                .collect();

            let remaining: Vec<u64> = (0..k).map(|j| counts[j] - pivot_tuple[j]).collect();
            let Some((sum_u, rows)) = complete_with_budgets(&tables, &others, &budgets, &remaining)
            else {
                continue;
            };

            let twd = &sum_w_others * &u_p_rat
                - &weights[p] * BigRational::from_integer(BigInt::from(sum_u));
            let better = match &best {
                None => true,
                Some((cur, _, _, _)) => &twd < cur,
            };
            if better {
                best = Some((twd, p, pivot_tuple.clone(), rows));
            }
        }
    }

    let (twd, p, pivot_tuple, rows) = best.expect("the pivot taking every item is always feasible");
    let mut matrix = vec![vec![0u64; k]; n];
    matrix[p] = pivot_tuple.clone();
    for (row, i) in rows.into_iter().zip((0..n).filter(|&i| i != p)) {
        matrix[i] = row;
    }
    let allocation = Allocation::complete(s, matrix)?;
    let utilities: Vec<ExactValue> = (0..n)
        .map(|i| {
            let mut u = ExactValue::zero();
            for j in 0..k {
                u = &u + &ExactValue::from_nat(tables[i][j][allocation.get(i, j) as usize]);
            }
            u
        })
        .collect();
    Ok(DeficitResult {
        pivot: p,
        allocation,
        twd: ExactValue::Rational(twd),
        pivot_items: pivot_tuple.iter().sum(),
        utilities,
    })
}

/// Maximize the utility sum of `agents` splitting exactly `remaining` items
/// per type, each agent capped by its integer budget. Exact DP; returns the
/// best sum and each agent's per-type bundle.
fn complete_with_budgets(
    tables: &[Vec<Vec<u64>>],
    agents: &[usize],
    budgets: &[u64],
    remaining: &[u64],
) -> Option<(u64, Vec<Vec<u64>>)> {
    let k = remaining.len();
    let strides = state_strides(remaining);
    let states = strides.total;

    let mut dp: Vec<Option<u64>> = vec![None; states];
    let full = strides.index(remaining);
    dp[full] = Some(0);
    // choice[layer][state] = bundle this layer's agent took to reach state.
    let mut choices: Vec<Vec<Option<Vec<u64>>>> = Vec::with_capacity(agents.len());

    for (layer, &agent) in agents.iter().enumerate() {
        let mut next: Vec<Option<u64>> = vec![None; states];
        let mut choice: Vec<Option<Vec<u64>>> = vec![None; states];
        for state in 0..states {
            let Some(value) = dp[state] else { continue };
            let avail = strides.tuple(state);
            for bundle in MixedRadix::new(&avail) {
                let gain: u64 = (0..k).map(|j| tables[agent][j][bundle[j] as usize]).sum();
                if gain > budgets[layer] {
                    continue;
                }
                let after: Vec<u64> = (0..k).map(|j| avail[j] - bundle[j]).collect();
                let idx = strides.index(&after);
                let candidate = value + gain;
                if next[idx].is_none_or(|cur| candidate > cur) {
                    next[idx] = Some(candidate);
                    choice[idx] = Some(bundle.clone());
                }
            }
        }
        dp = next;
        choices.push(choice);
    }

    let zero = strides.index(&vec![0; k]);
    let best = dp[zero]?;

    // Walk the layers backwards from the empty state.
    let mut rows = vec![Vec::new(); agents.len()];
    let mut state = zero;
    for layer in (0..agents.len()).rev() {
        let bundle = choices[layer][state].clone().expect("reachable state");
        let tuple = strides.tuple(state);
        let before: Vec<u64> = (0..k).map(|j| tuple[j] + bundle[j]).collect();
        state = strides.index(&before);
        rows[layer] = bundle;
    }
    Some((best, rows))
}

struct Strides {
    radices: Vec<u64>,
    total: usize,
}

fn state_strides(remaining: &[u64]) -> Strides {
    let radices: Vec<u64> = remaining.iter().map(|&r| r + 1).collect();
    let total = radices.iter().product::<u64>() as usize;
    Strides { radices, total }
}

impl Strides {
    fn index(&self, tuple: &[u64]) -> usize {
        let mut idx = 0u64;
        for (j, &t) in tuple.iter().enumerate() {
            idx = idx * self.radices[j] + t;
        }
        idx as usize
    }

    fn tuple(&self, mut idx: usize) -> Vec<u64> {
        let mut out = vec![0u64; self.radices.len()];
        for j in (0..self.radices.len()).rev() {
            out[j] = (idx as u64) % self.radices[j];
            idx /= self.radices[j] as usize;
        }
        out
    }
}

/// Counts tuples (0..=max_j per coordinate), last coordinate fastest.
struct MixedRadix {
    maxes: Vec<u64>,
    current: Option<Vec<u64>>,
}

impl MixedRadix {
    fn new(maxes: &[u64]) -> Self {
        MixedRadix {
            maxes: maxes.to_vec(),
            current: Some(vec![0; maxes.len()]),
        }
    }
}

impl Iterator for MixedRadix {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let mut j = next.len();
        loop {
            if j == 0 {
                self.current = None;
                break;
            }
            j -= 1;
            if next[j] < self.maxes[j] {
                next[j] += 1;
                self.current = Some(next);
                break;
            }
            next[j] = 0;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio};
    use crate::oracle::{oracle_best, Objective, OracleLimits, ScenarioSampler};
    use crate::utility::UtilityFunction;

    fn reference_scenario() -> Scenario {
        Scenario::single_type(
            vec![rat(1); 4],
            vec![
                UtilityFunction::linear(rat(2)),
                UtilityFunction::linear(rat(4)),
                UtilityFunction::linear(rat(7)),
                UtilityFunction::linear(rat(7)),
            ],
            7,
        )
        .unwrap()
    }

    #[test]
    fn reference_pivot_deficits() {
        let s = reference_scenario();
        let r0 = psi_p(&s, 0).unwrap();
        assert_eq!(r0.twd, ExactValue::from_int(6));
        assert_eq!(r0.allocation.single_counts(), vec![4, 1, 1, 1]);

        let r1 = psi_p(&s, 1).unwrap();
        assert_eq!(r1.twd, ExactValue::from_int(4));
        let want: Vec<ExactValue> = [6, 8, 7, 7]
            .iter()
            .map(|&v| ExactValue::from_int(v))
            .collect();
        assert_eq!(r1.utilities, want);

        // The minimum for pivot 3 ties the fourth agent at the top ratio:
        // utilities (0, 12, 14, 14) with deficit 16. Verified against the
        // exhaustive search below.
        let r2 = psi_p(&s, 2).unwrap();
        assert_eq!(r2.twd, ExactValue::from_int(16));
        let want: Vec<ExactValue> = [0, 12, 14, 14]
            .iter()
            .map(|&v| ExactValue::from_int(v))
            .collect();
        assert_eq!(r2.utilities, want);
    }

    #[test]
    fn pivot_deficit_matches_exhaustive_search() {
        // Brute-force the pivot-constrained minimum directly.
        let s = reference_scenario();
        let limits = OracleLimits::default();
        for p in 0..s.n() {
            let fast = psi_p(&s, p).unwrap();
            let mut best: Option<ExactValue> = None;
            for alloc in crate::oracle::enumerate_allocations(&s, &limits).unwrap() {
                let counts = alloc.single_counts();
                let utilities: Vec<ExactValue> = (0..s.n())
                    .map(|i| s.single_utility(i).eval(counts[i]).unwrap())
                    .collect();
                let ws: Vec<_> = (0..s.n()).map(|i| s.single_weight(i).clone()).collect();
                let ratios: Vec<ExactValue> = (0..s.n())
                    .map(|i| &utilities[i] / &ExactValue::Rational(ws[i].clone()))
                    .collect();
                if (0..s.n())
                    .any(|i| ratios[i].cmp_total(&ratios[p]) == std::cmp::Ordering::Greater)
                {
                    continue;
                }
                let twd = crate::report::deficit_for_pivot(&ws, &utilities, p);
                if best
                    .as_ref()
                    .is_none_or(|b| twd.cmp_total(b) == std::cmp::Ordering::Less)
                {
                    best = Some(twd);
                }
            }
            assert_eq!(fast.twd, best.unwrap(), "pivot {p}");
        }
    }

    #[test]
    fn global_deficit_and_pivot() {
        let s = reference_scenario();
        let r = psi(&s).unwrap();
        assert_eq!(r.twd, ExactValue::from_int(4));
        assert_eq!(r.pivot, 1);
        assert_eq!(r.pivot_items, 2);
    }

    #[test]
    fn equal_split_has_zero_deficit() {
        let s = Scenario::single_type(vec![rat(1); 3], vec![UtilityFunction::linear(rat(2)); 3], 6)
            .unwrap();
        let r = psi(&s).unwrap();
        assert_eq!(r.twd, ExactValue::zero());
    }

    #[test]
    fn compensating_middle_allocation() {
        let s = Scenario::single_type(
            vec![rat(1), rat(1)],
            vec![
                UtilityFunction::linear(rat(1)),
                UtilityFunction::linear(rat(2)),
            ],
            3,
        )
        .unwrap();
        let r = psi(&s).unwrap();
        assert_eq!(r.twd, ExactValue::zero());
        assert_eq!(r.allocation.single_counts(), vec![2, 1]);
    }

    #[test]
    fn psi_agrees_with_oracle_min_deficit() {
        let mut sampler = ScenarioSampler::seeded(59);
        let limits = OracleLimits::default();
        for _ in 0..40 {
            let s = sampler.concave_single_type(4, 9);
            let fast = psi(&s).unwrap();
            let oracle = oracle_best(&s, Objective::MinTwd, &limits).unwrap();
            assert_eq!(fast.twd, oracle.value);
        }
    }

    #[test]
    fn pivot_constraint_holds_on_outputs() {
        let mut sampler = ScenarioSampler::seeded(61);
        for _ in 0..30 {
            let s = sampler.concave_single_type(4, 9);
            for p in 0..s.n() {
                let r = psi_p(&s, p).unwrap();
                let ratios: Vec<ExactValue> = (0..s.n())
                    .map(|i| &r.utilities[i] / &ExactValue::Rational(s.single_weight(i).clone()))
                    .collect();
                for i in 0..s.n() {
                    assert_ne!(
                        ratios[i].cmp_total(&ratios[p]),
                        std::cmp::Ordering::Greater,
                        "pivot constraint violated"
                    );
                }
            }
        }
    }

    #[test]
    fn coin_plan_for_reference_scenario() {
        let s = reference_scenario();
        let plan = coin_compensation(&s).unwrap();
        assert_eq!(plan.pivot, 1);
        assert_eq!(plan.denomination, ratio(1, 1));
        assert_eq!(plan.total, BigInt::from(4));
        let transfers: Vec<i64> = plan.transfers.iter().map(|t| t.to_i64().unwrap()).collect();
        assert_eq!(transfers, vec![2, 0, 1, 1]);
        // Post-transfer ratios all match the pivot's.
        let r = psi(&s).unwrap();
        for i in 0..s.n() {
            let u = r.utilities[i].as_rational().unwrap()
                + BigRational::from_integer(plan.transfers[i].clone()) * &plan.denomination;
            let ratio_i = u / s.single_weight(i);
            assert_eq!(ratio_i, rat(8));
        }
    }

    #[test]
    fn coin_plan_trivial_and_small_cases() {
        let weq = Scenario::single_type(
            vec![rat(1), rat(1)],
            vec![UtilityFunction::linear(rat(2)); 2],
            4,
        )
        .unwrap();
        let plan = coin_compensation(&weq).unwrap();
        assert_eq!(plan.total, BigInt::zero());
        assert!(plan.transfers.iter().all(|t| t.is_zero()));

        let s = Scenario::single_type(
            vec![rat(1), rat(1)],
            vec![
                UtilityFunction::linear(rat(1)),
                UtilityFunction::linear(rat(3)),
            ],
            2,
        )
        .unwrap();
        let plan = coin_compensation(&s).unwrap();
        assert_eq!(plan.total, BigInt::from(2));
    }

    #[test]
    fn coin_plan_scales_rational_utilities() {
        let s = Scenario::single_type(
            vec![rat(1), rat(1)],
            vec![
                UtilityFunction::linear(ratio(1, 2)),
                UtilityFunction::linear(rat(1)),
            ],
            2,
        )
        .unwrap();
        let plan = coin_compensation(&s).unwrap();
        assert_eq!(plan.scale, BigInt::from(2));
        assert_eq!(plan.denomination, ratio(1, 2));
        assert_eq!(plan.total, BigInt::from(1));
        let r = psi(&s).unwrap();
        let target = r.utilities[plan.pivot].as_rational().unwrap() / s.single_weight(plan.pivot);
        for i in 0..s.n() {
            let u = r.utilities[i].as_rational().unwrap()
                + BigRational::from_integer(plan.transfers[i].clone()) * &plan.denomination;
            assert_eq!(u / s.single_weight(i), target);
        }
    }

    #[test]
    fn coin_plan_rejects_float_utilities() {
        let s = Scenario::single_type(
            vec![rat(1), rat(1)],
            vec![
                UtilityFunction::power(1.0, 0.5),
                UtilityFunction::power(1.0, 0.5),
            ],
            2,
        )
        .unwrap();
        assert!(matches!(
            coin_compensation(&s),
            Err(Error::NonIntegerData(_))
        ));
    }

    fn two_type(rates: &[[i64; 2]], weights: &[i64], counts: [u64; 2]) -> Scenario {
        Scenario::new(
            (1..=rates.len()).map(|i| format!("A{i}")).collect(),
            vec!["g1".into(), "g2".into()],
            weights.iter().map(|&w| vec![rat(w), rat(w)]).collect(),
            rates
                .iter()
                .map(|r| {
                    vec![
                        UtilityFunction::linear(rat(r[0])),
                        UtilityFunction::linear(rat(r[1])),
                    ]
                })
                .collect(),
            counts.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn multitype_symmetric_pair() {
        let s = two_type(&[[1, 1], [1, 1]], &[1, 1], [1, 1]);
        let r = psi_multitype(&s, &MultitypeLimits::default()).unwrap();
        assert_eq!(r.twd, ExactValue::zero());
    }

    #[test]
    fn multitype_with_empty_type_reduces_to_single() {
        let s = two_type(&[[1, 1], [2, 2]], &[1, 1], [2, 0]);
        let multi = psi_multitype(&s, &MultitypeLimits::default()).unwrap();
        let single = psi(&s.restrict_to_type(0).unwrap()).unwrap();
        assert_eq!(multi.twd, single.twd);
    }

    #[test]
    fn multitype_single_type_matches_psi() {
        let mut sampler = ScenarioSampler::seeded(67);
        for _ in 0..20 {
            let s = sampler.concave_single_type(3, 6);
            let multi = psi_multitype(&s, &MultitypeLimits::default()).unwrap();
            let single = psi(&s).unwrap();
            assert_eq!(multi.twd, single.twd);
        }
    }

    #[test]
    fn multitype_matches_exhaustive_search() {
        let mut sampler = ScenarioSampler::seeded(71);
        let limits = OracleLimits::default();
        for _ in 0..25 {
            let s = sampler.concave_two_type(3, 3);
            let fast = psi_multitype(&s, &MultitypeLimits::default()).unwrap();
            let oracle = oracle_best(&s, Objective::MinTwd, &limits).unwrap();
            assert_eq!(fast.twd, oracle.value);
        }
    }

    #[test]
    fn multitype_respects_limits() {
        let s = two_type(&[[1, 1], [1, 1]], &[1, 1], [1, 1]);
        let tight = MultitypeLimits {
            max_types: 1,
            max_omega: 10_000,
        };
        assert!(matches!(
            psi_multitype(&s, &tight),
            Err(Error::LimitsExceeded(_))
        ));
        let tiny_omega = MultitypeLimits {
            max_types: 3,
            max_omega: 1,
        };
        assert!(matches!(
            psi_multitype(&s, &tiny_omega),
            Err(Error::LimitsExceeded(_))
        ));
    }

    #[test]
    fn multitype_requires_scalar_weights() {
        let s = Scenario::new(
            vec!["A1".into(), "A2".into()],
            vec!["g1".into(), "g2".into()],
            vec![vec![rat(1), rat(2)], vec![rat(1), rat(1)]],
            vec![
                vec![
                    UtilityFunction::linear(rat(1)),
                    UtilityFunction::linear(rat(1)),
                ],
                vec![
                    UtilityFunction::linear(rat(1)),
                    UtilityFunction::linear(rat(1)),
                ],
            ],
            vec![1, 1],
        )
        .unwrap();
        assert!(matches!(
            psi_multitype(&s, &MultitypeLimits::default()),
            Err(Error::ScalarWeightsRequired)
        ));
    }
}
