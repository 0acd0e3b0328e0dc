//! Result rendering: versioned JSON (rationals as strings) and a plain table
//! mode.

use eqalloc_core::deficit::{CoinPlan, DeficitResult};
use eqalloc_core::exact::format_rational;
use eqalloc_core::shares::ShareVector;
use eqalloc_core::{Allocation, ExactValue, Scenario, WelfareReport};
use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "eqalloc/1";

/// Exact rationals serialize as canonical strings, floats as JSON numbers.
pub fn value_json(v: &ExactValue) -> Value {
    match v {
        ExactValue::Rational(r) => Value::String(format_rational(r)),
        ExactValue::Float(f) => json!(f),
    }
}

/// Single-type allocations flatten to one count per agent.
pub fn allocation_json(s: &Scenario, a: &Allocation) -> Value {
    if s.k() == 1 {
        json!(a.single_counts())
    } else {
        json!(a.counts())
    }
}

pub fn values_json(vs: &[ExactValue]) -> Value {
    Value::Array(vs.iter().map(value_json).collect())
}

pub struct Document {
    fields: Map<String, Value>,
}

impl Document {
    pub fn new(command: &str, seed: Option<u64>) -> Self {
        let mut fields = Map::new();
        fields.insert("schema".into(), json!(SCHEMA));
        fields.insert("command".into(), json!(command));
        if let Some(seed) = seed {
            fields.insert("seed".into(), json!(seed));
        }
        Document { fields }
    }

    pub fn set(&mut self, key: &str, value: Value) -> &mut Self {
        self.fields.insert(key.into(), value);
        self
    }

    pub fn report(&mut self, s: &Scenario, r: &WelfareReport) -> &mut Self {
        self.set("agents", json!(s.agent_names()));
        self.set("allocation", allocation_json(s, &r.allocation));
        self.set("utilities", values_json(&r.utilities));
        if let Some(ratios) = &r.ratios {
            self.set("ratios", values_json(ratios));
        }
        self.set("welfare", value_json(&r.utilitarian));
        if let Some(twd) = &r.twd {
            self.set("twd", value_json(twd));
        }
        self
    }

    /// Keys render sorted, so identical inputs give identical bytes.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&Value::Object(self.fields.clone()))
            .expect("serializable");
        out.push('\n');
        out
    }

    pub fn to_table(&self, s: &Scenario) -> String {
        let mut out = String::new();
        if let Some(Value::Array(alloc)) = self.fields.get("allocation") {
            out.push_str(&format!(
                "{:<12} {:>10} {:>12} {:>14} {:>14}\n",
                "agent", "weight", "items", "utility", "ratio"
            ));
            let utilities = self.fields.get("utilities").and_then(Value::as_array);
            let ratios = self.fields.get("ratios").and_then(Value::as_array);
            for i in 0..s.n() {
                let items = match &alloc[i] {
                    Value::Array(row) => row
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join("+"),
                    v => v.to_string(),
                };
                let weight = if s.k() == 1 {
                    format_rational(s.single_weight(i))
                } else {
                    (0..s.k())
                        .map(|j| format_rational(s.weight(i, j)))
                        .collect::<Vec<_>>()
                        .join(",")
                };
                let show = |cell: Option<&Value>| match cell {
                    Some(Value::String(t)) => t.clone(),
                    Some(v) => v.to_string(),
                    None => String::new(),
                };
                out.push_str(&format!(
                    "{:<12} {:>10} {:>12} {:>14} {:>14}\n",
                    s.agent_name(i),
                    weight,
                    items,
                    show(utilities.map(|u| &u[i])),
                    show(ratios.map(|r| &r[i])),
                ));
            }
        }
        let mut scalar_keys: Vec<&String> = self
            .fields
            .keys()
            .filter(|k| {
                !matches!(
                    k.as_str(),
                    "schema" | "command" | "agents" | "allocation" | "utilities" | "ratios"
                )
            })
            .collect();
        scalar_keys.sort();
        for key in scalar_keys {
            let v = &self.fields[key.as_str()];
            let shown = match v {
                Value::String(t) => t.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{key}: {shown}\n"));
        }
        out
    }
}

pub fn deficit_fields(doc: &mut Document, s: &Scenario, r: &DeficitResult) {
    doc.set("psi", value_json(&r.twd));
    doc.set("twd", value_json(&r.twd));
    doc.set("pivot", json!(s.agent_name(r.pivot)));
    doc.set("pivot_items", json!(r.pivot_items));
    doc.set("allocation", allocation_json(s, &r.allocation));
    doc.set("utilities", values_json(&r.utilities));
    if let Some(weights) = s.scalar_weights() {
        let ratios: Vec<ExactValue> = r
            .utilities
            .iter()
            .zip(&weights)
            .map(|(u, w)| u / &ExactValue::Rational(w.clone()))
            .collect();
        doc.set("ratios", values_json(&ratios));
    }
    doc.set("agents", json!(s.agent_names()));
}

pub fn coin_fields(doc: &mut Document, s: &Scenario, plan: &CoinPlan) {
    doc.set("pivot", json!(s.agent_name(plan.pivot)));
    doc.set(
        "denomination",
        Value::String(format_rational(&plan.denomination)),
    );
    doc.set("scale", json!(plan.scale.to_string()));
    doc.set(
        "transfers",
        Value::Array(
            plan.transfers
                .iter()
                .map(|t| Value::String(t.to_string()))
                .collect(),
        ),
    );
    doc.set("total", json!(plan.total.to_string()));
    doc.set("agents", json!(s.agent_names()));
}

pub fn share_fields(doc: &mut Document, s: &Scenario, mu: &ShareVector) {
    doc.set("mu", values_json(&mu.mu));
    doc.set("agents", json!(s.agent_names()));
}
