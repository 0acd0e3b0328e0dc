//! Scenario JSON: the on-disk format consumed by the CLI and offered as a
//! library entry point.
//!
//! ```json
//! { "types": [{"name":"seat","count":7}],
//!   "agents": [{"name":"A1","weight":"1","utility":{"kind":"linear","rate":"2"}},
//!              {"name":"A2","weight":"1","utility":{"kind":"table","values":["0","4","8"]}},
//!              {"name":"A3","weight":"1","utility":{"kind":"power","c":1.0,"a":0.5}}] }
//! ```
//!
//! Rationals travel as strings ("4", "1/2", "0.25"), never as JSON numbers.
//! For k > 1 types, `weight` and `utility` become length-k arrays.

use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational};
use crate::scenario::Scenario;
use crate::utility::{TabulatedValues, UtilityFunction};
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
struct ScenarioDoc {
    types: Vec<TypeDoc>,
    agents: Vec<AgentDoc>,
}

#[derive(Serialize, Deserialize)]
struct TypeDoc {
    name: String,
    count: u64,
}

#[derive(Serialize, Deserialize)]
struct AgentDoc {
    name: String,
    weight: OneOrMany<String>,
    utility: OneOrMany<UtilityDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum UtilityDoc {
    Table { values: Vec<String> },
    Linear { rate: String },
    Power { c: f64, a: f64 },
    Log,
}

fn utility_from_doc(doc: UtilityDoc) -> Result<UtilityFunction> {
    match doc {
        UtilityDoc::Table { values } => {
            let vals = values
                .iter()
                .map(|s| parse_rational(s).map_err(Error::InvalidScenario))
                .collect::<Result<Vec<_>>>()?;
            Ok(UtilityFunction::tabulated_rationals(vals))
        }
        UtilityDoc::Linear { rate } => Ok(UtilityFunction::linear(
            parse_rational(&rate).map_err(Error::InvalidScenario)?,
        )),
        UtilityDoc::Power { c, a } => Ok(UtilityFunction::power(c, a)),
        UtilityDoc::Log => Ok(UtilityFunction::log()),
    }
}

fn utility_to_doc(f: &UtilityFunction) -> UtilityDoc {
    match f {
        UtilityFunction::Tabulated(TabulatedValues::Integers(v)) => UtilityDoc::Table {
            values: v.iter().map(|x| x.to_string()).collect(),
        },
        UtilityFunction::Tabulated(TabulatedValues::Rationals(v)) => UtilityDoc::Table {
            values: v.iter().map(format_rational).collect(),
        },
        UtilityFunction::Linear { rate } => UtilityDoc::Linear {
            rate: format_rational(rate),
        },
        UtilityFunction::Power { coeff, exponent } => UtilityDoc::Power {
            c: *coeff,
            a: *exponent,
        },
        UtilityFunction::Log => UtilityDoc::Log,
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(json: &str) -> Result<Scenario> {
    let doc: ScenarioDoc = serde_json::from_str(json)
        .map_err(|e| Error::InvalidScenario(format!("malformed scenario JSON: {e}")))?;
    let k = doc.types.len();
    let mut type_names = Vec::with_capacity(k);
    let mut counts = Vec::with_capacity(k);
    for t in doc.types {
        type_names.push(t.name);
        counts.push(t.count);
    }

    let mut agent_names = Vec::new();
    let mut weights = Vec::new();
    let mut utilities = Vec::new();
    for agent in doc.agents {
        let name = agent.name;
        let ws = agent
            .weight
            .into_vec()
            .iter()
            .map(|s| parse_rational(s).map_err(Error::InvalidScenario))
            .collect::<Result<Vec<_>>>()?;
        let fs = agent
            .utility
            .into_vec()
            .into_iter()
            .map(utility_from_doc)
            .collect::<Result<Vec<_>>>()?;
        if ws.len() != k {
            return Err(Error::InvalidScenario(format!(
                "agent {name}: expected {k} weights, got {}",
                ws.len()
            )));
        }
        if fs.len() != k {
            return Err(Error::InvalidScenario(format!(
                "agent {name}: expected {k} utilities, got {}",
                fs.len()
            )));
        }
        agent_names.push(name);
        weights.push(ws);
        utilities.push(fs);
    }

    Scenario::new(agent_names, type_names, weights, utilities, counts)
}

/// Canonical serialization; parsing it back yields an identical scenario.
pub fn scenario_to_json(s: &Scenario) -> String {
    let k = s.k();
    let doc = ScenarioDoc {
        types: (0..k)
            .map(|j| TypeDoc {
                name: s.type_name(j).to_string(),
                count: s.count(j),
            })
            .collect(),
        agents: (0..s.n())
            .map(|i| {
                let ws: Vec<String> = (0..k).map(|j| format_rational(s.weight(i, j))).collect();
                let fs: Vec<UtilityDoc> = (0..k).map(|j| utility_to_doc(s.utility(i, j))).collect();
                AgentDoc {
                    name: s.agent_name(i).to_string(),
                    weight: if k == 1 {
                        OneOrMany::One(ws.into_iter().next().unwrap())
                    } else {
                        OneOrMany::Many(ws)
                    },
                    utility: if k == 1 {
                        OneOrMany::One(fs.into_iter().next().unwrap())
                    } else {
                        OneOrMany::Many(fs)
                    },
                }
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("scenario serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    const SEATS: &str = r#"
    { "types": [{"name":"seat","count":7}],
      "agents": [
        {"name":"A1","weight":"1","utility":{"kind":"linear","rate":"2"}},
        {"name":"A2","weight":"1","utility":{"kind":"table","values":["0","4","8","12","16","20","24","28"]}},
        {"name":"A3","weight":"1","utility":{"kind":"power","c":1.0,"a":0.5}},
        {"name":"A4","weight":"1/2","utility":{"kind":"log"}}
      ] }"#;

    #[test]
    fn parses_the_reference_document() {
        let s = parse_scenario(SEATS).unwrap();
        assert_eq!((s.n(), s.k(), s.total_items()), (4, 1, 7));
        assert_eq!(s.single_utility(1).kind_name(), "table");
        assert_eq!(s.single_utility(2).kind_name(), "power");
    }

    #[test]
    fn round_trip_is_identity() {
        let s = parse_scenario(SEATS).unwrap();
        let again = parse_scenario(&scenario_to_json(&s)).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn multi_type_arrays() {
        let json = r#"
        { "types": [{"name":"cpu","count":2},{"name":"ram","count":3}],
          "agents": [
            {"name":"p1","weight":["1","2"],
             "utility":[{"kind":"linear","rate":"1"},{"kind":"linear","rate":"2"}]},
            {"name":"p2","weight":["2","1"],
             "utility":[{"kind":"table","values":["0","5","6"]},{"kind":"linear","rate":"1"}]}
          ] }"#;
        let s = parse_scenario(json).unwrap();
        assert_eq!((s.n(), s.k()), (2, 2));
        let again = parse_scenario(&scenario_to_json(&s)).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn round_trip_on_sampled_scenarios() {
        let mut sampler = crate::oracle::ScenarioSampler::seeded(77);
        for _ in 0..20 {
            for s in [
                sampler.concave_single_type(4, 10),
                sampler.power_single_type(4, 20),
                sampler.concave_two_type(3, 4),
            ] {
                let again = parse_scenario(&scenario_to_json(&s)).unwrap();
                assert_eq!(s, again);
            }
        }
    }

    #[test]
    fn rejects_malformed_documents() {
        assert!(parse_scenario("not json").is_err());
        assert!(parse_scenario(r#"{"types":[],"agents":[]}"#).is_err());
        let bad_table = r#"
        { "types": [{"name":"g","count":2}],
          "agents": [{"name":"A1","weight":"1","utility":{"kind":"table","values":["0","2","1"]}}] }"#;
        let err = parse_scenario(bad_table).unwrap_err();
        assert!(err.to_string().contains("not strictly increasing"));
        let bad_weight = r#"
        { "types": [{"name":"g","count":1}],
          "agents": [{"name":"A1","weight":"0","utility":{"kind":"linear","rate":"1"}}] }"#;
        assert!(parse_scenario(bad_weight).is_err());
    }
}
