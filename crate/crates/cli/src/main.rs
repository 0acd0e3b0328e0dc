//! Command-line front end: parse a scenario document, dispatch to the
//! solvers, checkers or oracles, and emit machine-readable results.
//!
//! Exit codes: 0 success, 2 invalid input (malformed JSON, violated scenario
//! invariants, bad flags), 3 solver-side failures (non-concave utilities,
//! instance limits, verification failures).

mod output;

use clap::{Args, Parser, Subcommand};
use eqalloc_core::deficit::{self, MultitypeLimits};
use eqalloc_core::oracle::{self, Objective, OracleLimits};
use eqalloc_core::solvers::{self, SolveOptions};
use eqalloc_core::{
    check_fairness, jsonio, shares, Allocation, Error as CoreError, FairnessProperty, Scenario,
    DEFAULT_EPSILON,
};
use output::Document;
use serde_json::json;
use std::io::Read;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "eqalloc",
    version,
    about = "Fair allocation of identical indivisible goods under weighted entitlements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario JSON file, or '-' to read standard input.
    scenario: String,

    /// Output format.
    #[arg(long, value_parser = ["json", "table"], default_value = "json")]
    output: String,

    /// Comparison tolerance for power/log utilities. Rejected when the
    /// scenario is exact-only.
    #[arg(long)]
    epsilon: Option<f64>,

    /// Echoed into the output; reserved for reproducibility bookkeeping.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a scenario and report its shape.
    Validate(CommonArgs),

    /// Compute an allocation for a named objective.
    Solve {
        /// One of: utilitarian, rawlsian (alias maximin), leximin, nash,
        /// wefx, balanced-efx.
        #[arg(long)]
        objective: String,

        /// Allocate only this many items (rawlsian objective only).
        #[arg(long)]
        items: Option<u64>,

        #[command(flatten)]
        common: CommonArgs,
    },

    /// Check a fairness property of a supplied allocation.
    Check {
        /// One of: wef, wef1, wefx, weq, weqx, wmms.
        #[arg(long)]
        property: String,

        /// Counts per agent: "3,2,1,1", or a JSON matrix for several types.
        #[arg(long)]
        allocation: String,

        #[command(flatten)]
        common: CommonArgs,
    },

    /// Minimize the total weighted deficit.
    Psi {
        /// Restrict to one pivot agent (name, or 1-based index).
        #[arg(long)]
        pivot: Option<String>,

        /// Treat types independently and concatenate per-type results.
        #[arg(long)]
        per_type: bool,

        #[command(flatten)]
        common: CommonArgs,
    },

    /// Coin compensation reaching exact equitability with minimum coins.
    Coins(CommonArgs),

    /// Weighted maximin shares and whether they are jointly attainable.
    Shares(CommonArgs),

    /// Exhaustive ground truth on small instances.
    Oracle {
        /// One of: utilitarian, rawlsian, leximin, nash, min-twd.
        #[arg(long)]
        objective: String,

        #[command(flatten)]
        common: CommonArgs,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn from_core(e: CoreError) -> Self {
        let code = match e {
            CoreError::InvalidScenario(_) | CoreError::IncompleteAllocation { .. } => 2,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(stdout) => {
            print!("{stdout}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_scenario(common: &CommonArgs) -> Result<Scenario, Failure> {
    let text = if common.scenario == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::input(format!("cannot read stdin: {e}")))?;
        buf
    } else {
        std::fs::read_to_string(&common.scenario)
            .map_err(|e| Failure::input(format!("cannot read {}: {e}", common.scenario)))?
    };
    let scenario = jsonio::parse_scenario(&text).map_err(Failure::from_core)?;
    if common.epsilon.is_some() && !scenario.has_float_utilities() {
        return Err(Failure::input(
            "--epsilon applies only to power/log utilities; this scenario is exact-only",
        ));
    }
    Ok(scenario)
}

fn epsilon_of(common: &CommonArgs) -> f64 {
    common.epsilon.unwrap_or(DEFAULT_EPSILON)
}

fn render(doc: &Document, s: &Scenario, common: &CommonArgs) -> String {
    if common.output == "table" {
        doc.to_table(s)
    } else {
        doc.to_json()
    }
}

fn parse_allocation_arg(s: &Scenario, text: &str) -> Result<Allocation, Failure> {
    let text = text.trim();
    let matrix: Vec<Vec<u64>> = if text.starts_with('[') {
        let v: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Failure::input(format!("bad --allocation value: {e}")))?;
        let rows = v
            .as_array()
            .ok_or_else(|| Failure::input("--allocation must be an array"))?;
        if rows.iter().all(|r| r.is_array()) {
            rows.iter()
                .map(|r| {
                    r.as_array()
                        .unwrap()
                        .iter()
                        .map(|c| {
                            c.as_u64().ok_or_else(|| {
                                Failure::input("allocation entries must be non-negative integers")
                            })
                        })
                        .collect()
                })
                .collect::<Result<_, _>>()?
        } else {
            rows.iter()
                .map(|c| {
                    c.as_u64().map(|x| vec![x]).ok_or_else(|| {
                        Failure::input("allocation entries must be non-negative integers")
                    })
                })
                .collect::<Result<_, _>>()?
        }
    } else {
        text.split(',')
            .map(|part| {
                part.trim()
                    .parse::<u64>()
                    .map(|x| vec![x])
                    .map_err(|_| Failure::input(format!("bad allocation entry '{part}'")))
            })
            .collect::<Result<_, _>>()?
    };
    Allocation::complete(s, matrix).map_err(Failure::from_core)
}

fn parse_pivot(s: &Scenario, text: &str) -> Result<usize, Failure> {
    if let Some(i) = s.agent_index(text) {
        return Ok(i);
    }
    if let Ok(idx) = text.parse::<usize>() {
        if idx >= 1 && idx <= s.n() {
            return Ok(idx - 1);
        }
    }
    Err(Failure::input(format!(
        "unknown pivot '{text}'; expected an agent name or a 1-based index"
    )))
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Validate(common) => {
            let s = read_scenario(&common)?;
            let mut doc = Document::new("validate", common.seed);
            doc.set("valid", json!(true));
            doc.set("agents", json!(s.n()));
            doc.set("types", json!(s.k()));
            doc.set("items", json!(s.total_items()));
            Ok(render(&doc, &s, &common))
        }

        Command::Solve {
            objective,
            items,
            common,
        } => {
            let s = read_scenario(&common)?;
            let solver = solvers::solver_for(&objective).map_err(Failure::from_core)?;
            if items.is_some() && solver.name() != "rawlsian" {
                return Err(Failure::input(
                    "--items applies only to the rawlsian objective",
                ));
            }
            let opts = SolveOptions {
                items,
                epsilon: epsilon_of(&common),
            };
            let report = solver.solve(&s, &opts).map_err(Failure::from_core)?;
            let mut doc = Document::new("solve", common.seed);
            doc.set("objective", json!(solver.name()));
            doc.report(&s, &report);
            match solver.name() {
                "utilitarian" => {
                    doc.set("value", output::value_json(&report.utilitarian));
                }
                "rawlsian" | "leximin" => {
                    if let Some(v) = &report.rawlsian {
                        doc.set("value", output::value_json(v));
                    }
                    if solver.name() == "leximin" {
                        if let Some(ratios) = &report.ratios {
                            let mut sorted = ratios.clone();
                            sorted.sort_by(|a, b| a.cmp_total(b));
                            doc.set("sorted_ratios", output::values_json(&sorted));
                        }
                    }
                    if let Some(t) = items {
                        doc.set("items", json!(t));
                    }
                }
                "nash" => {
                    if let Some(nash) = &report.nash {
                        doc.set("value", json!(nash.product));
                        doc.set("log_welfare", json!(nash.log));
                        doc.set("degenerate", json!(nash.degenerate));
                    }
                }
                _ => {
                    // Constructions are verified before they are returned.
                    doc.set("verified", json!(true));
                }
            }
            Ok(render(&doc, &s, &common))
        }

        Command::Check {
            property,
            allocation,
            common,
        } => {
            let s = read_scenario(&common)?;
            let prop = FairnessProperty::parse(&property).ok_or_else(|| {
                Failure::input(format!(
                    "unknown property '{property}'; expected wef, wef1, wefx, weq, weqx or wmms"
                ))
            })?;
            let alloc = parse_allocation_arg(&s, &allocation)?;
            let check = check_fairness(&s, &alloc, prop, epsilon_of(&common))
                .map_err(Failure::from_core)?;
            let mut doc = Document::new("check", common.seed);
            doc.set("property", json!(prop.name()));
            doc.set("holds", json!(check.holds));
            doc.set("allocation", output::allocation_json(&s, &alloc));
            match check.witness {
                Some((i, j)) => doc.set(
                    "witness",
                    json!({"agent": s.agent_name(i), "against": s.agent_name(j)}),
                ),
                None => doc.set("witness", serde_json::Value::Null),
            };
            Ok(render(&doc, &s, &common))
        }

        Command::Psi {
            pivot,
            per_type,
            common,
        } => {
            let s = read_scenario(&common)?;
            let mut doc = Document::new("psi", common.seed);
            if per_type {
                let results = deficit::psi_per_type(&s).map_err(Failure::from_core)?;
                let mut matrix = vec![vec![0u64; s.k()]; s.n()];
                let mut per = Vec::new();
                let mut total = eqalloc_core::ExactValue::zero();
                for (j, r) in results.iter().enumerate() {
                    for i in 0..s.n() {
                        matrix[i][j] = r.allocation.get(i, 0);
                    }
                    total = &total + &r.twd;
                    per.push(json!({
                        "type": s.type_name(j),
                        "psi": output::value_json(&r.twd),
                        "pivot": s.agent_name(r.pivot),
                        "pivot_items": r.pivot_items,
                    }));
                }
                doc.set("per_type", json!(per));
                doc.set("allocation", json!(matrix));
                doc.set("total_twd", output::value_json(&total));
                doc.set("agents", json!(s.agent_names()));
                return Ok(render(&doc, &s, &common));
            }
            let result = match (&pivot, s.k()) {
                (Some(p), 1) => {
                    let p = parse_pivot(&s, p)?;
                    deficit::psi_p(&s, p).map_err(Failure::from_core)?
                }
                (None, 1) => deficit::psi(&s).map_err(Failure::from_core)?,
                (_, _) => {
                    if pivot.is_some() {
                        return Err(Failure::input(
                            "--pivot applies to single-type scenarios; use --per-type or a k=1 scenario",
                        ));
                    }
                    deficit::psi_multitype(&s, &MultitypeLimits::default())
                        .map_err(Failure::from_core)?
                }
            };
            output::deficit_fields(&mut doc, &s, &result);
            Ok(render(&doc, &s, &common))
        }

        Command::Coins(common) => {
            let s = read_scenario(&common)?;
            let plan = deficit::coin_compensation(&s).map_err(Failure::from_core)?;
            let mut doc = Document::new("coins", common.seed);
            output::coin_fields(&mut doc, &s, &plan);
            Ok(render(&doc, &s, &common))
        }

        Command::Shares(common) => {
            let s = read_scenario(&common)?;
            let mu = shares::compute_wmms_shares(&s).map_err(Failure::from_core)?;
            let (exists, alloc) = shares::decide_wmms(&s).map_err(Failure::from_core)?;
            let mut doc = Document::new("shares", common.seed);
            output::share_fields(&mut doc, &s, &mu);
            doc.set("exists", json!(exists));
            match alloc {
                Some(a) => doc.set("allocation", output::allocation_json(&s, &a)),
                None => doc.set("allocation", serde_json::Value::Null),
            };
            Ok(render(&doc, &s, &common))
        }

        Command::Oracle { objective, common } => {
            let s = read_scenario(&common)?;
            let obj = Objective::parse(&objective).ok_or_else(|| {
                Failure::input(format!(
                    "unknown objective '{objective}'; expected utilitarian, rawlsian, leximin, nash or min-twd"
                ))
            })?;
            let out = oracle::oracle_best(&s, obj, &OracleLimits::default())
                .map_err(Failure::from_core)?;
            let mut doc = Document::new("oracle", common.seed);
            doc.set("objective", json!(objective.to_ascii_lowercase()));
            doc.report(&s, &out.report);
            doc.set("value", output::value_json(&out.value));
            if let Some(sorted) = &out.sorted_ratios {
                doc.set("sorted_ratios", output::values_json(sorted));
            }
            Ok(render(&doc, &s, &common))
        }
    }
}
