//! Weighted maximin shares and envy-free-up-to-any-good constructions.

use crate::error::{Error, Result};
use crate::exact::ExactValue;
use crate::fairness::{check_fairness, FairnessProperty};
use crate::scenario::{Allocation, Scenario};
use crate::utility::UtilityFunction;

/// Per-agent weighted maximin shares mu_i.
#[derive(Clone, Debug, PartialEq)]
pub struct ShareVector {
    pub mu: Vec<ExactValue>,
}

/// mu_i = max over positions j of the best value agent i can guarantee with
/// position j as the weighted minimum of its own n-way split of the supply.
///
/// For a candidate count l at position j, every other position q must hold at
/// least enough items to reach (w_q / w_j) * f_i(l); the candidate is feasible
/// when those forced counts fit within m.
pub fn compute_wmms_shares(s: &Scenario) -> Result<ShareVector> {
    if s.k() != 1 {
        return Err(Error::InvalidScenario(
            "maximin shares are defined for single-type scenarios".into(),
        ));
    }
    let n = s.n();
    let m = s.total_items();
    let mut mu = Vec::with_capacity(n);
    for i in 0..n {
        let f = s.single_utility(i);
        let wi = ExactValue::Rational(s.single_weight(i).clone());
        let mut best: Option<ExactValue> = None;
        for j in 0..n {
            let wj = ExactValue::Rational(s.single_weight(j).clone());
            let mut best_l: Option<u64> = None;
            for l in 0..=m {
                let fl = f.eval(l)?;
                let mut needed: u64 = l;
                let mut feasible = true;
                for q in 0..n {
                    if q == j {
                        continue;
                    }
                    let target = &(&ExactValue::Rational(s.single_weight(q).clone()) * &fl) / &wj;
                    match f.ceil_inverse(&target) {
                        Ok(x) => {
                            needed = needed.saturating_add(x);
                            if needed > m {
                                feasible = false;
                                break;
                            }
                        }
                        Err(Error::UnreachableValue { .. }) => {
                            feasible = false;
                            break;
                        }
                        Err(e) => return Err(e),
                    }
                }
                if feasible {
                    best_l = Some(l);
                }
            }
            let l = best_l.unwrap_or(0);
            let mu_ij = &(&wi * &f.eval(l)?) / &wj;
            if best
                .as_ref()
                .is_none_or(|b| mu_ij.cmp_total(b) == std::cmp::Ordering::Greater)
            {
                best = Some(mu_ij);
            }
        }
        mu.push(best.unwrap());
    }
    Ok(ShareVector { mu })
}

/// Decides whether an allocation giving every agent its maximin share exists;
/// the witness assigns each agent the smallest count reaching its share and
/// hands surplus items out in ascending agent order.
pub fn decide_wmms(s: &Scenario) -> Result<(bool, Option<Allocation>)> {
    let shares = compute_wmms_shares(s)?;
    let n = s.n();
    let m = s.total_items();
    let mut counts = Vec::with_capacity(n);
    let mut used: u64 = 0;
    for i in 0..n {
        let x = s.single_utility(i).ceil_inverse(&shares.mu[i])?;
        used = used.saturating_add(x);
        counts.push(x);
    }
    if used > m {
        return Ok((false, None));
    }
    let mut surplus = m - used;
    let mut i = 0;
    while surplus > 0 {
        counts[i % n] += 1;
        surplus -= 1;
        i += 1;
    }
    let alloc = Allocation::from_single(s, counts)?;
    Ok((true, Some(alloc)))
}

/// Equal-weight construction: bundle sizes differing by at most one item.
pub fn construct_balanced_efx(s: &Scenario) -> Result<Allocation> {
    if s.k() != 1 {
        return Err(Error::InvalidScenario(
            "balanced construction is defined for single-type scenarios".into(),
        ));
    }
    let first = s.single_weight(0);
    if (1..s.n()).any(|i| s.single_weight(i) != first) {
        return Err(Error::UnequalWeights);
    }
    let n = s.n() as u64;
    let m = s.total_items();
    let base = m / n;
    let rem = (m % n) as usize;
    let counts = (0..s.n()).map(|i| base + u64::from(i < rem)).collect();
    Allocation::from_single(s, counts)
}

/// Envy-free-up-to-any-good construction for power utilities.
///
/// Scales each agent by t_i = f_i^{-1}(w_i) and looks for lambda with
/// sum_i ceil(lambda * t_i) = m by scanning the windows between consecutive
/// jump points j / t_i. When m is skipped, the largest attainable total m' is
/// topped up by one item each to agents whose lambda * t_i is integral at the
/// window boundary.
///
/// Every candidate is verified before being returned. Verification can fail
/// for heterogeneous coefficients or exponents: the coefficient c_i cancels
/// inside agent i's own envy inequality, so a second scan rescales by
/// w_i^{1/a_i} (exact whenever the exponents agree), and as a last resort a
/// bounded exhaustive search runs. The error therefore means no envy-free-up-
/// to-any-good allocation was found at all; with mixed exponents none need
/// exist.
pub fn construct_wefx(s: &Scenario, eps: f64) -> Result<Allocation> {
    if s.k() != 1 {
        return Err(Error::InvalidScenario(
            "the scaled construction is defined for single-type scenarios".into(),
        ));
    }
    let n = s.n();
    let m = s.total_items();
    let mut inverse_scale = Vec::with_capacity(n);
    let mut envy_scale = Vec::with_capacity(n);
    for i in 0..n {
        match s.single_utility(i) {
            UtilityFunction::Power { coeff, exponent } => {
                let w = ExactValue::Rational(s.single_weight(i).clone()).to_f64();
                inverse_scale.push((w / coeff).powf(1.0 / exponent));
                envy_scale.push(w.powf(1.0 / exponent));
            }
            _ => {
                return Err(Error::NonPowerUtility {
                    agent: s.agent_name(i).to_string(),
                })
            }
        }
    }

    let verified = |counts: Vec<u64>| -> Result<Option<Allocation>> {
        let alloc = Allocation::from_single(s, counts)?;
        let check = check_fairness(s, &alloc, FairnessProperty::Wefx, eps)?;
        Ok(check.holds.then_some(alloc))
    };

    if m == 0 {
        return Allocation::from_single(s, vec![0; n]);
    }
    if (m as usize) < n {
        // Too few items for the scan; any zero/one allocation is safe.
        // Favor the largest scale factors, lowest index on ties.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            inverse_scale[b]
                .total_cmp(&inverse_scale[a])
                .then(a.cmp(&b))
        });
        let mut counts = vec![0u64; n];
        for &i in order.iter().take(m as usize) {
            counts[i] = 1;
        }
        return Allocation::from_single(s, counts);
    }

    for scale in [&inverse_scale, &envy_scale] {
        if let Ok(counts) = scan_for_fit(scale, m) {
            if let Some(alloc) = verified(counts)? {
                return Ok(alloc);
            }
        }
    }

    // Bounded exhaustive fallback: first passing allocation in enumeration
    // order, if any exists.
    let limits = crate::oracle::OracleLimits {
        max_total_items: u64::MAX,
        max_agents: usize::MAX,
        max_types: 1,
        max_enumeration: 2_000_000,
    };
    if let Ok(all) = crate::oracle::enumerate_allocations(s, &limits) {
        for alloc in all {
            let check = check_fairness(s, &alloc, FairnessProperty::Wefx, eps)?;
            if check.holds {
                return Ok(alloc);
            }
        }
    }
    Err(Error::VerificationFailed(
        "no envy-free-up-to-any-good allocation found for this utility profile".into(),
    ))
}

fn scan_for_fit(t: &[f64], m: u64) -> Result<Vec<u64>> {
    let n = t.len();
    let mut candidates: Vec<f64> = Vec::with_capacity(n * m as usize);
    for ti in t {
        for j in 1..=m {
            candidates.push(j as f64 / ti);
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let counts_at =
        |lambda: f64| -> Vec<u64> { t.iter().map(|ti| (lambda * ti).ceil() as u64).collect() };

    let mut best_below: Option<(u64, f64, Vec<u64>)> = None;
    let mut prev = 0.0f64;
    for &cand in &candidates {
        let mid = (prev + cand) / 2.0;
        let counts = counts_at(mid);
        let total: u64 = counts.iter().sum();
        if total == m {
            return Ok(counts);
        }
        if total < m {
            best_below = Some((total, cand, counts));
        } else {
            break;
        }
        prev = cand;
    }

    let (total, lambda0, mut counts) = best_below.ok_or_else(|| {
        Error::VerificationFailed("no attainable item total below the target".into())
    })?;
    // Agents whose scaled count sits exactly on the boundary are the ones
    // whose ceiling jumps next; they can absorb one extra item each.
    let mut integral: Vec<usize> = (0..n)
        .filter(|&i| {
            let v = lambda0 * t[i];
            (v - v.round()).abs() < 1e-9
        })
        .collect();
    let missing = (m - total) as usize;
    if integral.len() < missing {
        return Err(Error::VerificationFailed(format!(
            "{} boundary agents cannot absorb {} remaining items",
            integral.len(),
            missing
        )));
    }
    integral.truncate(missing);
    for i in integral {
        counts[i] += 1;
    }
    Ok(counts)
}
