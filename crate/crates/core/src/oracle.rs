//! Exhaustive ground truth on small instances, plus seeded scenario samplers
//! for property tests.

use crate::error::{Error, Result};
use crate::exact::ExactValue;
use crate::report::{self, WelfareReport};
use crate::scenario::{Allocation, Scenario};
use crate::shares::ShareVector;
use crate::utility::UtilityFunction;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Guard rails for exhaustive enumeration.
#[derive(Clone, Copy, Debug)]
pub struct OracleLimits {
    pub max_total_items: u64,
    pub max_agents: usize,
    pub max_types: usize,
    pub max_enumeration: u128,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_total_items: 12,
            max_agents: 4,
            max_types: 2,
            max_enumeration: 1_000_000,
        }
    }
}

impl OracleLimits {
    pub fn check(&self, s: &Scenario) -> Result<()> {
        if s.n() > self.max_agents {
            return Err(Error::LimitsExceeded(format!(
                "{} agents exceeds the oracle cap of {}",
                s.n(),
                self.max_agents
            )));
        }
        if s.k() > self.max_types {
            return Err(Error::LimitsExceeded(format!(
                "{} item types exceeds the oracle cap of {}",
                s.k(),
                self.max_types
            )));
        }
        if s.total_items() > self.max_total_items {
            return Err(Error::LimitsExceeded(format!(
                "{} items exceeds the oracle cap of {}",
                s.total_items(),
                self.max_total_items
            )));
        }
        let size = enumeration_size(s);
        if size > self.max_enumeration {
            return Err(Error::LimitsExceeded(format!(
                "enumeration of {size} allocations exceeds the cap of {}",
                self.max_enumeration
            )));
        }
        Ok(())
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // Saturate instead of overflowing; callers only compare against caps.
        match acc.checked_mul((n - i) as u128) {
            Some(v) => acc = v / (i + 1) as u128,
            None => return u128::MAX,
        }
    }
    acc
}

/// Number of complete allocations: prod_j C(m_j + n - 1, n - 1).
pub fn enumeration_size(s: &Scenario) -> u128 {
    let n = s.n() as u64;
    s.counts()
        .iter()
        .map(|&m| binomial(m + n - 1, n - 1))
        .product()
}

/// Compositions of `total` into `parts` non-negative summands, starting from
/// (total, 0, ..., 0) in descending lexicographic order.
struct Compositions {
    current: Option<Vec<u64>>,
}

impl Compositions {
    fn new(total: u64, parts: usize) -> Self {
        let mut first = vec![0u64; parts];
        first[0] = total;
        Compositions {
            current: Some(first),
        }
    }
}

impl Iterator for Compositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let out = self.current.clone()?;
        let n = out.len();
        // Rightmost non-final position holding items moves one item right.
        let mut next = out.clone();
        let mut p = None;
        for idx in (0..n - 1).rev() {
            if next[idx] > 0 {
                p = Some(idx);
                break;
            }
        }
        self.current = match p {
            None => None,
            Some(p) => {
                let tail: u64 = next[p + 1..].iter().sum();
                next[p] -= 1;
                for v in &mut next[p + 1..] {
                    *v = 0;
                }
                next[p + 1] = tail + 1;
                Some(next)
            }
        };
        Some(out)
    }
}

/// Streams every complete allocation exactly once: the per-type composition
/// odometer ticks the last type fastest, each type running its composition
/// sequence from (m_j, 0, ..) downward.
pub struct AllocationEnumerator {
    n: usize,
    columns: Vec<Vec<Vec<u64>>>,
    index: Vec<usize>,
    done: bool,
}

impl AllocationEnumerator {
    fn new(s: &Scenario) -> Self {
        let columns: Vec<Vec<Vec<u64>>> = s
            .counts()
            .iter()
            .map(|&m| Compositions::new(m, s.n()).collect())
            .collect();
        AllocationEnumerator {
            n: s.n(),
            index: vec![0; columns.len()],
            columns,
            done: false,
        }
    }
}

impl Iterator for AllocationEnumerator {
    type Item = Allocation;

    fn next(&mut self) -> Option<Allocation> {
        if self.done {
            return None;
        }
        let k = self.columns.len();
        let mut matrix = vec![vec![0u64; k]; self.n];
        for j in 0..k {
            let col = &self.columns[j][self.index[j]];
            for i in 0..self.n {
                matrix[i][j] = col[i];
            }
        }
        // Advance the odometer, last type fastest.
        let mut j = k;
        loop {
            if j == 0 {
                self.done = true;
                break;
            }
            j -= 1;
            self.index[j] += 1;
            if self.index[j] < self.columns[j].len() {
                break;
            }
            self.index[j] = 0;
        }
        Some(Allocation::trusted_complete(matrix))
    }
}

/// Every complete allocation for `s`, within limits.
pub fn enumerate_allocations(
    s: &Scenario,
    limits: &OracleLimits,
) -> Result<impl Iterator<Item = Allocation>> {
    limits.check(s)?;
    Ok(AllocationEnumerator::new(s))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    Utilitarian,
    Rawlsian,
    Leximin,
    Nash,
    MinTwd,
}

impl Objective {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "utilitarian" => Some(Objective::Utilitarian),
            "rawlsian" | "maximin" => Some(Objective::Rawlsian),
            "leximin" => Some(Objective::Leximin),
            "nash" => Some(Objective::Nash),
            "min-twd" | "min_twd" => Some(Objective::MinTwd),
            _ => None,
        }
    }
}

/// Best allocation by exhaustive search, with the objective value that was
/// optimized. Ties keep the first allocation in enumeration order.
pub struct OracleOutcome {
    pub report: WelfareReport,
    pub value: ExactValue,
    /// Ascending utility-to-weight ratios; filled for the leximin objective.
    pub sorted_ratios: Option<Vec<ExactValue>>,
}

struct EvalTables {
    /// values[i][j][x] = f_ij(x)
    values: Vec<Vec<Vec<ExactValue>>>,
}

impl EvalTables {
    fn new(s: &Scenario) -> Result<Self> {
        let mut values = Vec::with_capacity(s.n());
        for i in 0..s.n() {
            let mut row = Vec::with_capacity(s.k());
            for j in 0..s.k() {
                let table = (0..=s.count(j))
                    .map(|x| s.utility(i, j).eval(x))
                    .collect::<Result<Vec<_>>>()?;
                row.push(table);
            }
            values.push(row);
        }
        Ok(EvalTables { values })
    }

    fn utilities(&self, x: &Allocation) -> Vec<ExactValue> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut u = ExactValue::zero();
                for (j, table) in row.iter().enumerate() {
                    u = &u + &table[x.get(i, j) as usize];
                }
                u
            })
            .collect()
    }
}

fn sorted_ratios(weights: &[BigRational], utilities: &[ExactValue]) -> Vec<ExactValue> {
    let mut ratios: Vec<ExactValue> = utilities
        .iter()
        .zip(weights)
        .map(|(u, w)| u / &ExactValue::Rational(w.clone()))
        .collect();
    ratios.sort_by(|a, b| a.cmp_total(b));
    ratios
}

fn cmp_ratio_vectors(a: &[ExactValue], b: &[ExactValue]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let ord = x.cmp_total(y);
        if ord != std::cmp::Ordering::Equal {
            return ord;
        }
    }
    std::cmp::Ordering::Equal
}

/// Nash objective value prod_i x_i^{w_i}; exact for integer weights.
pub fn nash_product(weights: &[BigRational], counts: &[u64]) -> ExactValue {
    if counts.contains(&0) {
        return ExactValue::zero();
    }
    // Exact only for modest integer weights; enormous exponents would blow
    // up the big-integer power, so they take the log path instead.
    let exponents: Option<Vec<u32>> = weights
        .iter()
        .map(|w| {
            if w.denom().is_one() {
                w.numer().to_u32().filter(|&e| e <= 1 << 16)
            } else {
                None
            }
        })
        .collect();
    match exponents {
        Some(es) => {
            let mut acc = BigInt::one();
            for (e, &x) in es.iter().zip(counts) {
                acc *= BigInt::from(x).pow(*e);
            }
            ExactValue::Rational(BigRational::from_integer(acc))
        }
        None => {
            let log: f64 = weights
                .iter()
                .zip(counts)
                .map(|(w, &x)| w.to_f64().unwrap_or(f64::NAN) * (x as f64).ln())
                .sum();
            ExactValue::Float(log.exp())
        }
    }
}

/// Total weighted deficit minimized over every agent that attains the
/// maximum ratio; this is the pivot-flexible reading used when comparing
/// against per-pivot deficit minimization.
pub fn best_pivot_deficit(
    weights: &[BigRational],
    utilities: &[ExactValue],
) -> (ExactValue, usize) {
    let ratios: Vec<ExactValue> = utilities
        .iter()
        .zip(weights)
        .map(|(u, w)| u / &ExactValue::Rational(w.clone()))
        .collect();
    let mut max = ratios[0].clone();
    for r in &ratios[1..] {
        if r.cmp_total(&max) == std::cmp::Ordering::Greater {
            max = r.clone();
        }
    }
    let mut best: Option<(ExactValue, usize)> = None;
    for p in 0..weights.len() {
        if ratios[p].cmp_total(&max) == std::cmp::Ordering::Equal {
            let twd = report::deficit_for_pivot(weights, utilities, p);
            let better = match &best {
                None => true,
                Some((cur, _)) => twd.cmp_total(cur) == std::cmp::Ordering::Less,
            };
            if better {
                best = Some((twd, p));
            }
        }
    }
    best.expect("at least one maximizing agent")
}

/// Exhaustive optimum for `objective`; the ground truth the solvers are
/// checked against.
pub fn oracle_best(
    s: &Scenario,
    objective: Objective,
    limits: &OracleLimits,
) -> Result<OracleOutcome> {
    limits.check(s)?;
    let tables = EvalTables::new(s)?;
    let scalar = s.scalar_weights();
    if matches!(
        objective,
        Objective::Rawlsian | Objective::Leximin | Objective::Nash | Objective::MinTwd
    ) && scalar.is_none()
    {
        return Err(Error::ScalarWeightsRequired);
    }

    let mut best_alloc: Option<Allocation> = None;
    let mut best_value: Option<ExactValue> = None;
    let mut best_vector: Option<Vec<ExactValue>> = None;

    for alloc in AllocationEnumerator::new(s) {
        let utilities = tables.utilities(&alloc);
        match objective {
            Objective::Utilitarian => {
                let mut wu = ExactValue::zero();
                for i in 0..s.n() {
                    for j in 0..s.k() {
                        let w = ExactValue::Rational(s.weight(i, j).clone());
                        wu = &wu + &(&w * &tables.values[i][j][alloc.get(i, j) as usize]);
                    }
                }
                if best_value
                    .as_ref()
                    .is_none_or(|b| wu.cmp_total(b) == std::cmp::Ordering::Greater)
                {
                    best_value = Some(wu);
                    best_alloc = Some(alloc);
                }
            }
            Objective::Rawlsian => {
                let ws = scalar.as_ref().unwrap();
                let value = sorted_ratios(ws, &utilities).remove(0);
                if best_value
                    .as_ref()
                    .is_none_or(|b| value.cmp_total(b) == std::cmp::Ordering::Greater)
                {
                    best_value = Some(value);
                    best_alloc = Some(alloc);
                }
            }
            Objective::Leximin => {
                let ws = scalar.as_ref().unwrap();
                let vec = sorted_ratios(ws, &utilities);
                if best_vector
                    .as_ref()
                    .is_none_or(|b| cmp_ratio_vectors(&vec, b) == std::cmp::Ordering::Greater)
                {
                    best_value = Some(vec[0].clone());
                    best_vector = Some(vec);
                    best_alloc = Some(alloc);
                }
            }
            Objective::Nash => {
                let ws = scalar.as_ref().unwrap();
                let counts = alloc.single_counts();
                let counts_all: Vec<u64> = if s.k() == 1 {
                    counts
                } else {
                    (0..s.n()).map(|i| alloc.items_of_agent(i)).collect()
                };
                let value = nash_product(ws, &counts_all);
                if best_value
                    .as_ref()
                    .is_none_or(|b| value.cmp_total(b) == std::cmp::Ordering::Greater)
                {
                    best_value = Some(value);
                    best_alloc = Some(alloc);
                }
            }
            Objective::MinTwd => {
                let ws = scalar.as_ref().unwrap();
                let (twd, _) = best_pivot_deficit(ws, &utilities);
                if best_value
                    .as_ref()
                    .is_none_or(|b| twd.cmp_total(b) == std::cmp::Ordering::Less)
                {
                    best_value = Some(twd);
                    best_alloc = Some(alloc);
                }
            }
        }
    }

    let alloc = best_alloc.ok_or_else(|| Error::InvalidScenario("no allocations".into()))?;
    let mut report = report::welfare_report(s, &alloc)?;
    if objective == Objective::Nash {
        let ws = scalar.as_ref().unwrap();
        let counts: Vec<u64> = (0..s.n()).map(|i| alloc.items_of_agent(i)).collect();
        let product = nash_product(ws, &counts).to_f64();
        let log: f64 = ws
            .iter()
            .zip(&counts)
            .map(|(w, &x)| w.to_f64().unwrap_or(f64::NAN) * (x as f64).ln())
            .sum();
        report.nash = Some(crate::report::NashWelfare {
            log,
            product,
            degenerate: counts.contains(&0),
        });
    }
    Ok(OracleOutcome {
        report,
        value: best_value.unwrap(),
        sorted_ratios: best_vector,
    })
}

/// Weighted maximin shares by exhaustive partition search, and whether an
/// allocation meeting all shares exists.
pub fn oracle_wmms(s: &Scenario, limits: &OracleLimits) -> Result<(ShareVector, bool)> {
    if s.k() != 1 {
        return Err(Error::InvalidScenario(
            "maximin shares are defined for single-type scenarios".into(),
        ));
    }
    limits.check(s)?;
    let n = s.n();
    let m = s.total_items();
    let mut mu = Vec::with_capacity(n);
    for i in 0..n {
        let f = s.single_utility(i);
        let wi = s.single_weight(i);
        let mut best: Option<ExactValue> = None;
        for parts in Compositions::new(m, n) {
            let mut worst: Option<ExactValue> = None;
            for (j, &d) in parts.iter().enumerate() {
                let scaled = &(&f.eval(d)? * &ExactValue::Rational(wi.clone()))
                    / &ExactValue::Rational(s.single_weight(j).clone());
                if worst
                    .as_ref()
                    .is_none_or(|w| scaled.cmp_total(w) == std::cmp::Ordering::Less)
                {
                    worst = Some(scaled);
                }
            }
            let worst = worst.unwrap();
            if best
                .as_ref()
                .is_none_or(|b| worst.cmp_total(b) == std::cmp::Ordering::Greater)
            {
                best = Some(worst);
            }
        }
        mu.push(best.unwrap());
    }

    let mut exists = false;
    for alloc in AllocationEnumerator::new(s) {
        let counts = alloc.single_counts();
        let mut ok = true;
        for i in 0..n {
            let u = s.single_utility(i).eval(counts[i])?;
            if u.cmp_total(&mu[i]) == std::cmp::Ordering::Less {
                ok = false;
                break;
            }
        }
        if ok {
            exists = true;
            break;
        }
    }
    Ok((ShareVector { mu }, exists))
}

/// Smallest number of compensation coins (of value 1/w_j for some pivot j)
/// that turns some complete allocation exactly equitable. Integer utilities
/// and weights required.
pub fn oracle_min_coins(s: &Scenario, limits: &OracleLimits) -> Result<u64> {
    if s.k() != 1 {
        return Err(Error::InvalidScenario(
            "coin compensation is defined for single-type scenarios".into(),
        ));
    }
    limits.check(s)?;
    let n = s.n();
    for i in 0..n {
        if !s.single_weight(i).denom().is_one() {
            return Err(Error::NonIntegerData(format!(
                "weight of agent {} is not an integer",
                s.agent_name(i)
            )));
        }
        if !s.single_utility(i).integer_valued(s.total_items()) {
            return Err(Error::NonIntegerData(format!(
                "utility of agent {} is not integer-valued",
                s.agent_name(i)
            )));
        }
    }

    let weights: Vec<BigRational> = (0..n).map(|i| s.single_weight(i).clone()).collect();

    // Cache exact utility vectors for every allocation.
    let mut cached: Vec<Vec<BigRational>> = Vec::new();
    let mut bound: Option<BigRational> = None;
    for alloc in AllocationEnumerator::new(s) {
        let counts = alloc.single_counts();
        let mut us = Vec::with_capacity(n);
        for i in 0..n {
            let u = s.single_utility(i).eval(counts[i])?;
            us.push(u.as_rational().expect("integer scenario").clone());
        }
        let u_exact: Vec<ExactValue> = us.iter().cloned().map(ExactValue::Rational).collect();
        let (twd, _) = best_pivot_deficit(&weights, &u_exact);
        let twd = twd.as_rational().unwrap().clone();
        if bound.as_ref().is_none_or(|b| &twd < b) {
            bound = Some(twd);
        }
        cached.push(us);
    }
    let bound = bound
        .ok_or_else(|| Error::InvalidScenario("no allocations".into()))?
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::LimitsExceeded("deficit bound does not fit in u64".into()))?;

    for t in 0..=bound {
        for j in 0..n {
            let wj = &weights[j];
            for us in &cached {
                // Coins never go to the denominating agent, so the common
                // post-transfer ratio is pinned to u_j / w_j and the
                // transfers are forced: y_i = u_j w_i - u_i w_j.
                let mut total_check = BigInt::zero();
                let mut ok = true;
                for (wi, ui) in weights.iter().zip(us) {
                    let y = &us[j] * wi - ui * wj;
                    if y.is_negative() || !y.denom().is_one() {
                        ok = false;
                        break;
                    }
                    total_check += y.numer();
                }
                if ok && total_check == BigInt::from(t) {
                    return Ok(t);
                }
            }
        }
    }
    Ok(bound)
}

/// Deterministic scenario source for randomized property tests.
pub struct ScenarioSampler {
    rng: ChaCha8Rng,
}

impl ScenarioSampler {
    pub fn seeded(seed: u64) -> Self {
        ScenarioSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn concave_table(&mut self, m: u64) -> UtilityFunction {
        let mut increments: Vec<u64> = (0..m).map(|_| self.rng.gen_range(1..=5)).collect();
        increments.sort_unstable_by(|a, b| b.cmp(a));
        let mut values = Vec::with_capacity(m as usize + 1);
        let mut acc = 0u64;
        values.push(0);
        for inc in increments {
            acc += inc;
            values.push(acc);
        }
        UtilityFunction::tabulated_integers(values)
    }

    /// Concave integer-table scenario: n in 1..=max_agents, m in 1..=max_items,
    /// weights uniform in 1..=5.
    pub fn concave_single_type(&mut self, max_agents: usize, max_items: u64) -> Scenario {
        let n = self.rng.gen_range(1..=max_agents);
        let m = self.rng.gen_range(1..=max_items);
        let weights = (0..n)
            .map(|_| BigRational::from_integer(BigInt::from(self.rng.gen_range(1..=5))))
            .collect();
        let utilities = (0..n).map(|_| self.concave_table(m)).collect();
        Scenario::single_type(weights, utilities, m).expect("sampled scenario is valid")
    }

    /// Power-utility scenario with a in {0.5, 1}, c in {1, 2, 3} and weights
    /// in 1..=4.
    pub fn power_single_type(&mut self, max_agents: usize, max_items: u64) -> Scenario {
        let n = self.rng.gen_range(2..=max_agents.max(2));
        let m = self.rng.gen_range(1..=max_items);
        let weights = (0..n)
            .map(|_| BigRational::from_integer(BigInt::from(self.rng.gen_range(1..=4))))
            .collect();
        let utilities = (0..n)
            .map(|_| {
                let a = if self.rng.gen_bool(0.5) { 0.5 } else { 1.0 };
                let c = self.rng.gen_range(1..=3) as f64;
                UtilityFunction::power(c, a)
            })
            .collect();
        Scenario::single_type(weights, utilities, m).expect("sampled scenario is valid")
    }

    /// Two-type scenario with per-agent scalar weights and concave integer
    /// tables, sized for exhaustive cross-checks.
    pub fn concave_two_type(&mut self, max_agents: usize, max_count: u64) -> Scenario {
        let n = self.rng.gen_range(2..=max_agents.max(2));
        let counts: Vec<u64> = (0..2).map(|_| self.rng.gen_range(1..=max_count)).collect();
        let agent_names = (1..=n).map(|i| format!("A{i}")).collect();
        let weights: Vec<Vec<BigRational>> = (0..n)
            .map(|_| {
                let w = BigRational::from_integer(BigInt::from(self.rng.gen_range(1..=5)));
                vec![w.clone(), w]
            })
            .collect();
        let utilities: Vec<Vec<UtilityFunction>> = (0..n)
            .map(|_| counts.iter().map(|&m| self.concave_table(m)).collect())
            .collect();
        Scenario::new(
            agent_names,
            vec!["g1".to_string(), "g2".to_string()],
            weights,
            utilities,
            counts,
        )
        .expect("sampled scenario is valid")
    }
}
