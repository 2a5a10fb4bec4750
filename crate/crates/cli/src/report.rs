//! JSON and text renderings of command results.
//!
//! Rationals are always emitted as strings so no precision is lost.

use std::collections::BTreeMap;

use normid_core::algebra::{Certificate, ReducedForm, Verdict, Witness};
use normid_core::eval::{Counterexample, FloatAssignment, ProbeReport};
use normid_core::{Rational, Subset};
use serde_json::{json, Map, Value};

/// Top-level report. Keys serialize in sorted order.
pub struct RunReport {
    fields: Map<String, Value>,
}

impl RunReport {
    pub fn new(command: &str, input: Value) -> Self {
        let mut fields = Map::new();
        fields.insert("command".into(), json!(command));
        fields.insert("input".into(), input);
        RunReport { fields }
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.fields.insert(key.into(), value);
    }

    pub fn finish(mut self, elapsed_ms: f64) -> Value {
        self.fields.insert("elapsed_ms".into(), json!(elapsed_ms));
        Value::Object(self.fields)
    }
}

pub fn subset_json(s: Subset) -> Value {
    json!(s.indices().collect::<Vec<_>>())
}

pub fn certificate_json(c: &Certificate) -> Value {
    match c {
        Certificate::PairCoefficient { pair, coeff } => json!({
            "kind": "pair_coefficient",
            "subset": subset_json(*pair),
            "value": coeff.to_string(),
        }),
        Certificate::SingletonSum { index, sum } => json!({
            "kind": "singleton_sum",
            "index": index,
            "value": sum.to_string(),
        }),
    }
}

pub fn witness_json(w: &Witness) -> Value {
    let vectors: Vec<Vec<String>> = w
        .assignment
        .vectors()
        .iter()
        .map(|v| v.iter().map(Rational::to_string).collect())
        .collect();
    json!({ "vectors": vectors, "residual": w.residual.to_string() })
}

fn sums_json(sums: &BTreeMap<usize, Rational>) -> Value {
    Value::Array(
        sums.iter()
            .map(|(i, s)| json!({ "index": i, "value": s.to_string() }))
            .collect(),
    )
}

/// Reduced pair and singleton coefficients plus all singleton sums.
pub fn table_json(reduced: &ReducedForm, sums: &BTreeMap<usize, Rational>) -> Value {
    let pairs: Vec<Value> = reduced
        .pair_coeffs()
        .iter()
        .map(|(s, c)| json!({ "subset": subset_json(*s), "coeff": c.to_string() }))
        .collect();
    json!({
        "pairs": pairs,
        "singletons": sums_json(reduced.singleton_coeffs()),
        "singleton_sums": sums_json(sums),
    })
}

pub fn verdict_word(v: &Verdict) -> &'static str {
    if v.is_valid() {
        "valid"
    } else {
        "invalid"
    }
}

pub fn float_vectors_json(va: &FloatAssignment) -> Value {
    json!(va.vectors())
}

pub fn counterexample_json(hit: &Counterexample) -> Value {
    json!({
        "found": true,
        "trial": hit.trial,
        "from_grid": hit.from_grid,
        "vectors": float_vectors_json(&hit.assignment),
        "residual": hit.residual.value,
        "scale": hit.residual.scale,
    })
}

pub fn probe_json(r: &ProbeReport) -> Value {
    json!({
        "max_abs_third_difference": r.max_abs_third_difference,
        "worst_point": [r.worst_point.0, r.worst_point.1],
        "is_quadratic_on_grid": r.is_quadratic_on_grid,
    })
}

pub fn describe_certificate(c: &Certificate) -> String {
    match c {
        Certificate::PairCoefficient { pair, coeff } => {
            format!("pair coefficient a{pair} = {coeff}")
        }
        Certificate::SingletonSum { index, sum } => format!("singleton sum s{index} = {sum}"),
    }
}

pub fn describe_vectors<T: std::fmt::Display>(vectors: &[Vec<T>]) -> String {
    vectors
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let parts: Vec<String> = v.iter().map(T::to_string).collect();
            format!("x{} = ({})", i + 1, parts.join(", "))
        })
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn describe_table(reduced: &ReducedForm, sums: &BTreeMap<usize, Rational>) -> String {
    let mut out = String::from("pair coefficients:\n");
    if reduced.pair_coeffs().is_empty() {
        out.push_str("  (all zero)\n");
    }
    for (s, c) in reduced.pair_coeffs() {
        out.push_str(&format!("  a{s} = {c}\n"));
    }
    out.push_str("singleton coefficients:\n");
    if reduced.singleton_coeffs().is_empty() {
        out.push_str("  (all zero)\n");
    }
    for (i, c) in reduced.singleton_coeffs() {
        out.push_str(&format!("  a{{{i}}} = {c}\n"));
    }
    out.push_str("singleton sums:\n");
    for (i, s) in sums {
        out.push_str(&format!("  s{i} = {s}\n"));
    }
    out
}
