//! Welfare evaluation of allocations.

use crate::error::{Error, Result};
use crate::exact::ExactValue;
use crate::scenario::{Allocation, Scenario};
use num::rational::BigRational;

/// Nash objective value attached to a report by the Nash solver.
#[derive(Clone, Debug, PartialEq)]
pub struct NashWelfare {
    /// sum_i w_i * ln(x_i)
    pub log: f64,
    /// prod_i x_i^{w_i}
    pub product: f64,
    /// Set when m < n forces a zero product for every allocation.
    pub degenerate: bool,
}

/// An allocation together with everything derivable from it: per-agent
/// utilities, utility-to-weight ratios, welfare aggregates and the total
/// weighted deficit. All fields are recomputable from `allocation` plus the
/// scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct WelfareReport {
    pub allocation: Allocation,
    /// u_i = sum_j f_ij(x_ij)
    pub utilities: Vec<ExactValue>,
    /// u_i / w_i, present when per-agent scalar weights exist.
    pub ratios: Option<Vec<ExactValue>>,
    /// sum_ij w_ij * f_ij(x_ij)
    pub utilitarian: ExactValue,
    /// min_i u_i / w_i, present when ratios are.
    pub rawlsian: Option<ExactValue>,
    /// Total weighted deficit, present when ratios are.
    pub twd: Option<ExactValue>,
    pub nash: Option<NashWelfare>,
}

/// Evaluates a complete allocation.
pub fn welfare_report(scenario: &Scenario, allocation: &Allocation) -> Result<WelfareReport> {
    if allocation.is_partial() {
        // Re-validate column sums so a stale partial flag cannot sneak through.
        return Err(Error::InvalidScenario(
            "welfare_report requires a complete allocation".into(),
        ));
    }
    build_report(scenario, allocation)
}

/// Shared evaluation path; also used by solvers that report partial
/// allocations (maximin with fewer items than the full supply).
pub(crate) fn build_report(scenario: &Scenario, allocation: &Allocation) -> Result<WelfareReport> {
    let n = scenario.n();
    let k = scenario.k();

    let mut utilities = Vec::with_capacity(n);
    let mut utilitarian = ExactValue::zero();
    for i in 0..n {
        let mut u = ExactValue::zero();
        for j in 0..k {
            let v = scenario.utility(i, j).eval(allocation.get(i, j))?;
            utilitarian =
                &utilitarian + &(&ExactValue::Rational(scenario.weight(i, j).clone()) * &v);
            u = &u + &v;
        }
        utilities.push(u);
    }

    let scalar = scenario.scalar_weights();
    let (ratios, rawlsian, twd) = match scalar {
        Some(ws) => {
            let ratios: Vec<ExactValue> = utilities
                .iter()
                .zip(&ws)
                .map(|(u, w)| u / &ExactValue::Rational(w.clone()))
                .collect();
            let rawlsian = ratios.iter().cloned().reduce(|a, b| {
                if b.cmp_total(&a) == std::cmp::Ordering::Less {
                    b
                } else {
                    a
                }
            });
            let twd = total_weighted_deficit(&ws, &utilities);
            (Some(ratios), rawlsian, Some(twd))
        }
        None => (None, None, None),
    };

    Ok(WelfareReport {
        allocation: allocation.clone(),
        utilities,
        ratios,
        utilitarian,
        rawlsian,
        twd,
        nash: None,
    })
}

/// Total weighted deficit sum_i (w_p * ... ) with p the maximum-ratio agent,
/// ties resolved to the lowest index. Zero exactly when all ratios are equal.
pub fn total_weighted_deficit(weights: &[BigRational], utilities: &[ExactValue]) -> ExactValue {
    let p = max_ratio_agent(weights, utilities);
    deficit_for_pivot(weights, utilities, p)
}

/// sum_i (w_i * u_p - w_p * u_i) for a fixed pivot p.
pub fn deficit_for_pivot(
    weights: &[BigRational],
    utilities: &[ExactValue],
    p: usize,
) -> ExactValue {
    let wp = ExactValue::Rational(weights[p].clone());
    let up = &utilities[p];
    let mut total = ExactValue::zero();
    for (w, u) in weights.iter().zip(utilities) {
        let wi = ExactValue::Rational(w.clone());
        total = &total + &(&(&wi * up) - &(&wp * u));
    }
    total
}

/// Index of the agent with the largest utility-to-weight ratio, lowest index
/// on ties.
pub fn max_ratio_agent(weights: &[BigRational], utilities: &[ExactValue]) -> usize {
    let mut best = 0usize;
    let mut best_ratio = &utilities[0] / &ExactValue::Rational(weights[0].clone());
    for i in 1..weights.len() {
        let r = &utilities[i] / &ExactValue::Rational(weights[i].clone());
        if r.cmp_total(&best_ratio) == std::cmp::Ordering::Greater {
            best = i;
            best_ratio = r;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::utility::UtilityFunction;

    fn reference_scenario() -> Scenario {
        Scenario::single_type(
            vec![rat(1), rat(1), rat(1), rat(1)],
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
    fn report_on_reference_allocations() {
        let s = reference_scenario();
        let x = Allocation::from_single(&s, vec![4, 1, 1, 1]).unwrap();
        let r = welfare_report(&s, &x).unwrap();
        let want: Vec<ExactValue> = [8, 4, 7, 7]
            .iter()
            .map(|&v| ExactValue::from_int(v))
            .collect();
        assert_eq!(r.utilities, want);
        assert_eq!(r.twd.unwrap(), ExactValue::from_int(6));

        let x = Allocation::from_single(&s, vec![3, 2, 1, 1]).unwrap();
        let r = welfare_report(&s, &x).unwrap();
        let want: Vec<ExactValue> = [6, 8, 7, 7]
            .iter()
            .map(|&v| ExactValue::from_int(v))
            .collect();
        assert_eq!(r.utilities, want);
        assert_eq!(r.twd.unwrap(), ExactValue::from_int(4));
        assert_eq!(r.rawlsian.unwrap(), ExactValue::from_int(6));
        assert_eq!(r.utilitarian, ExactValue::from_int(28));
    }

    #[test]
    fn single_agent_has_zero_deficit() {
        let s =
            Scenario::single_type(vec![rat(3)], vec![UtilityFunction::linear(rat(5))], 4).unwrap();
        let x = Allocation::from_single(&s, vec![4]).unwrap();
        let r = welfare_report(&s, &x).unwrap();
        assert_eq!(r.twd.unwrap(), ExactValue::zero());
    }

    #[test]
    fn partial_allocations_are_rejected() {
        let s = reference_scenario();
        let x = Allocation::partial(&s, vec![vec![1], vec![0], vec![0], vec![0]]).unwrap();
        assert!(welfare_report(&s, &x).is_err());
    }
}
