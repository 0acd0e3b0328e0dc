//! Fairness property checkers for single-type scenarios.
//!
//! With identical goods a bundle is characterized by its count, and removing
//! "any good" from a bundle of x items leaves utility f(x-1). The "item of
//! nonzero utility" guard in the up-to-any-good definitions reduces to
//! x >= 1, since utilities are strictly increasing from f(0) = 0.

use crate::error::{Error, Result};
use crate::exact::ExactValue;
use crate::scenario::{Allocation, Scenario};
use crate::shares;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FairnessProperty {
    /// Weighted envy-freeness: f_i(x_i)/w_i >= f_i(x_j)/w_j for all pairs.
    Wef,
    /// Weighted envy-freeness up to one good.
    Wef1,
    /// Weighted envy-freeness up to any good.
    Wefx,
    /// Weighted equitability: all u_i/w_i equal.
    Weq,
    /// Weighted equitability up to any good.
    Weqx,
    /// Weighted maximin-share fairness: u_i >= mu_i for all i.
    Wmms,
}

impl FairnessProperty {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wef" => Some(FairnessProperty::Wef),
            "wef1" => Some(FairnessProperty::Wef1),
            "wefx" => Some(FairnessProperty::Wefx),
            "weq" => Some(FairnessProperty::Weq),
            "weqx" => Some(FairnessProperty::Weqx),
            "wmms" => Some(FairnessProperty::Wmms),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FairnessProperty::Wef => "wef",
            FairnessProperty::Wef1 => "wef1",
            FairnessProperty::Wefx => "wefx",
            FairnessProperty::Weq => "weq",
            FairnessProperty::Weqx => "weqx",
            FairnessProperty::Wmms => "wmms",
        }
    }
}

/// Outcome of a fairness check. `witness` names the violating pair (i, j):
/// agent i's guarantee fails against agent j's bundle. For WMMS the witness
/// is (i, i).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FairnessCheck {
    pub holds: bool,
    pub witness: Option<(usize, usize)>,
}

impl FairnessCheck {
    fn ok() -> Self {
        FairnessCheck {
            holds: true,
            witness: None,
        }
    }

    fn violated(i: usize, j: usize) -> Self {
        FairnessCheck {
            holds: false,
            witness: Some((i, j)),
        }
    }
}

/// Checks `property` on a complete single-type allocation. Rational data is
/// compared exactly; comparisons that touch float-backed utilities use `eps`.
pub fn check_fairness(
    scenario: &Scenario,
    allocation: &Allocation,
    property: FairnessProperty,
    eps: f64,
) -> Result<FairnessCheck> {
    if scenario.k() != 1 {
        return Err(Error::InvalidScenario(
            "fairness checkers are defined for single-type scenarios".into(),
        ));
    }
    if allocation.is_partial() {
        return Err(Error::InvalidScenario(
            "fairness checkers need a complete allocation".into(),
        ));
    }
    let n = scenario.n();
    let counts = allocation.single_counts();
    let weights: Vec<ExactValue> = (0..n)
        .map(|i| ExactValue::Rational(scenario.single_weight(i).clone()))
        .collect();
    let utilities: Vec<ExactValue> = (0..n)
        .map(|i| scenario.single_utility(i).eval(counts[i]))
        .collect::<Result<_>>()?;
    let ratios: Vec<ExactValue> = (0..n).map(|i| &utilities[i] / &weights[i]).collect();

    match property {
        FairnessProperty::Wmms => {
            let mu = shares::compute_wmms_shares(scenario)?;
            for i in 0..n {
                if !utilities[i].ge_eps(&mu.mu[i], eps) {
                    return Ok(FairnessCheck::violated(i, i));
                }
            }
            Ok(FairnessCheck::ok())
        }
        _ => {
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let holds = match property {
                        FairnessProperty::Wef => {
                            // i values j's bundle with i's own utility.
                            let envy = &scenario.single_utility(i).eval(counts[j])? / &weights[j];
                            ratios[i].ge_eps(&envy, eps)
                        }
                        FairnessProperty::Wef1 | FairnessProperty::Wefx => {
                            // Identical goods: removing one good and removing
                            // any good coincide.
                            if counts[j] == 0 {
                                true
                            } else {
                                let reduced =
                                    &scenario.single_utility(i).eval(counts[j] - 1)? / &weights[j];
                                ratios[i].ge_eps(&reduced, eps)
                            }
                        }
                        FairnessProperty::Weq => ratios[i].ge_eps(&ratios[j], eps),
                        FairnessProperty::Weqx => {
                            if counts[j] == 0 {
                                true
                            } else {
                                let reduced =
                                    &scenario.single_utility(j).eval(counts[j] - 1)? / &weights[j];
                                ratios[i].ge_eps(&reduced, eps)
                            }
                        }
                        FairnessProperty::Wmms => unreachable!(),
                    };
                    if !holds {
                        return Ok(FairnessCheck::violated(i, j));
                    }
                }
            }
            Ok(FairnessCheck::ok())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, DEFAULT_EPSILON};
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
    fn weqx_holds_on_balanced_reference_allocation() {
        let s = reference_scenario();
        let x = Allocation::from_single(&s, vec![3, 2, 1, 1]).unwrap();
        let c = check_fairness(&s, &x, FairnessProperty::Weqx, DEFAULT_EPSILON).unwrap();
        assert!(c.holds);
    }

    #[test]
    fn weq_violation_names_the_losing_pair() {
        let s = reference_scenario();
        let x = Allocation::from_single(&s, vec![4, 1, 1, 1]).unwrap();
        let c = check_fairness(&s, &x, FairnessProperty::Weq, DEFAULT_EPSILON).unwrap();
        assert!(!c.holds);
        assert_eq!(c.witness, Some((1, 0)));
    }

    #[test]
    fn all_to_one_agent_is_envied() {
        let s = Scenario::single_type(
            vec![rat(1), rat(1)],
            vec![
                UtilityFunction::linear(rat(1)),
                UtilityFunction::linear(rat(1)),
            ],
            3,
        )
        .unwrap();
        let x = Allocation::from_single(&s, vec![3, 0]).unwrap();
        let c = check_fairness(&s, &x, FairnessProperty::Wef, DEFAULT_EPSILON).unwrap();
        assert!(!c.holds);
        assert_eq!(c.witness, Some((1, 0)));
    }

    #[test]
    fn empty_bundles_satisfy_up_to_any_good_checks() {
        let s = Scenario::single_type(
            vec![rat(1), rat(1)],
            vec![
                UtilityFunction::linear(rat(1)),
                UtilityFunction::linear(rat(5)),
            ],
            1,
        )
        .unwrap();
        let x = Allocation::from_single(&s, vec![1, 0]).unwrap();
        assert!(
            check_fairness(&s, &x, FairnessProperty::Wefx, DEFAULT_EPSILON)
                .unwrap()
                .holds
        );
        assert!(
            check_fairness(&s, &x, FairnessProperty::Weqx, DEFAULT_EPSILON)
                .unwrap()
                .holds
        );
    }
}
