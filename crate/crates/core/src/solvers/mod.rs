//! Allocation strategies behind a common trait, registered by name and
//! selected at runtime (`solve --objective <name>` in the CLI).

mod maximin;
mod nash;
mod utilitarian;

pub use maximin::{solve_leximin, solve_maximin, MaximinSolution};
pub use nash::solve_nash;
pub use utilitarian::{
    solve_restricted_utilitarian, solve_utilitarian, RestrictedResult, RestrictionVector,
};

pub(crate) use utilitarian::capped_greedy;

use crate::error::{Error, Result};
use crate::exact::DEFAULT_EPSILON;
use crate::report::{self, WelfareReport};
use crate::scenario::Scenario;
use crate::shares;

/// Knobs shared by all strategies.
#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Item budget for strategies that support allocating fewer than the full
    /// supply (maximin). Defaults to the whole supply.
    pub items: Option<u64>,
    /// Comparison tolerance for float-backed utilities.
    pub epsilon: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            items: None,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

/// One allocation objective. Implementations are pure: no state, safe to
/// share across threads.
pub trait ObjectiveSolver: Sync {
    /// Registry key, as accepted on the command line.
    fn name(&self) -> &'static str;

    fn aliases(&self) -> &'static [&'static str] {
        &[]
    }

    fn solve(&self, scenario: &Scenario, opts: &SolveOptions) -> Result<WelfareReport>;
}

struct Utilitarian;

impl ObjectiveSolver for Utilitarian {
    fn name(&self) -> &'static str {
        "utilitarian"
    }

    fn solve(&self, scenario: &Scenario, _opts: &SolveOptions) -> Result<WelfareReport> {
        solve_utilitarian(scenario)
    }
}

struct Rawlsian;

impl ObjectiveSolver for Rawlsian {
    fn name(&self) -> &'static str {
        "rawlsian"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["maximin"]
    }

    fn solve(&self, scenario: &Scenario, opts: &SolveOptions) -> Result<WelfareReport> {
        let items = opts.items.unwrap_or_else(|| scenario.total_items());
        Ok(solve_maximin(scenario, items)?.report)
    }
}

struct Leximin;

impl ObjectiveSolver for Leximin {
    fn name(&self) -> &'static str {
        "leximin"
    }

    fn solve(&self, scenario: &Scenario, _opts: &SolveOptions) -> Result<WelfareReport> {
        solve_leximin(scenario)
    }
}

struct Nash;

impl ObjectiveSolver for Nash {
    fn name(&self) -> &'static str {
        "nash"
    }

    fn solve(&self, scenario: &Scenario, _opts: &SolveOptions) -> Result<WelfareReport> {
        solve_nash(scenario)
    }
}

struct Wefx;

impl ObjectiveSolver for Wefx {
    fn name(&self) -> &'static str {
        "wefx"
    }

    fn solve(&self, scenario: &Scenario, opts: &SolveOptions) -> Result<WelfareReport> {
        let allocation = shares::construct_wefx(scenario, opts.epsilon)?;
        report::welfare_report(scenario, &allocation)
    }
}

struct BalancedEfx;

impl ObjectiveSolver for BalancedEfx {
    fn name(&self) -> &'static str {
        "balanced-efx"
    }

    fn solve(&self, scenario: &Scenario, _opts: &SolveOptions) -> Result<WelfareReport> {
        let allocation = shares::construct_balanced_efx(scenario)?;
        report::welfare_report(scenario, &allocation)
    }
}

static REGISTRY: &[&dyn ObjectiveSolver] = &[
    &Utilitarian,
    &Rawlsian,
    &Leximin,
    &Nash,
    &Wefx,
    &BalancedEfx,
];

/// Every registered strategy, in a stable order.
pub fn registry() -> &'static [&'static dyn ObjectiveSolver] {
    REGISTRY
}

/// Looks a strategy up by name or alias, case-insensitively.
pub fn solver_for(name: &str) -> Result<&'static dyn ObjectiveSolver> {
    let wanted = name.to_ascii_lowercase();
    for solver in REGISTRY {
        if solver.name() == wanted || solver.aliases().contains(&wanted.as_str()) {
            return Ok(*solver);
        }
    }
    let known: Vec<&str> = REGISTRY.iter().map(|s| s.name()).collect();
    Err(Error::InvalidScenario(format!(
        "unknown objective '{name}'; known objectives: {}",
        known.join(", ")
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ExactValue};
    use crate::utility::UtilityFunction;

    #[test]
    fn lookup_by_name_and_alias() {
        assert_eq!(solver_for("utilitarian").unwrap().name(), "utilitarian");
        assert_eq!(solver_for("maximin").unwrap().name(), "rawlsian");
        assert_eq!(solver_for("RAWLSIAN").unwrap().name(), "rawlsian");
        assert!(solver_for("sharpley").is_err());
    }

    #[test]
    fn registry_dispatch_matches_direct_calls() {
        let s = Scenario::single_type(
            vec![rat(1); 4],
            vec![
                UtilityFunction::linear(rat(2)),
                UtilityFunction::linear(rat(4)),
                UtilityFunction::linear(rat(7)),
                UtilityFunction::linear(rat(7)),
            ],
            7,
        )
        .unwrap();
        let opts = SolveOptions::default();
        let via_registry = solver_for("rawlsian").unwrap().solve(&s, &opts).unwrap();
        assert_eq!(
            via_registry.rawlsian.clone().unwrap(),
            ExactValue::from_int(6)
        );
        assert_eq!(
            via_registry.allocation.single_counts(),
            solve_leximin(&s).unwrap().allocation.single_counts()
        );
    }
}
