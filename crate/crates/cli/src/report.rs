//! Report envelope and canonical JSON output.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

/// Significant digits kept for every real number in a report.
pub const REAL_DIGITS: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    CounterexampleCandidate,
    BudgetExhausted,
}

impl Status {
    pub fn exit_code(&self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::CounterexampleCandidate => 3,
            Status::BudgetExhausted => 4,
            Status::Fail => 5,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub check: String,
    pub witness: Value,
    pub details: String,
}

impl Violation {
    pub fn new(
        check: impl Into<String>,
        witness: impl Serialize,
        details: impl Into<String>,
    ) -> Self {
        Violation {
            check: check.into(),
            witness: to_value(witness),
            details: details.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub input_digest: String,
    pub params: Map<String, Value>,
    pub results: Value,
    pub violations: Vec<Violation>,
    pub seed: Option<u64>,
    pub runtime_ms: u64,
    pub status: Status,
}

impl Report {
    pub fn new(command: &str, inputs: &[&[u8]]) -> Report {
        Report {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            input_digest: digest(inputs),
            params: Map::new(),
            results: Value::Null,
            violations: Vec::new(),
            seed: None,
            runtime_ms: 0,
            status: Status::Pass,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        self.params.insert(key.to_string(), to_value(value));
    }

    pub fn violate(&mut self, v: Violation) {
        self.violations.push(v);
        if self.status == Status::Pass {
            self.status = Status::Fail;
        }
    }

    pub fn to_canonical_json(&self) -> String {
        let mut out = String::new();
        write_canonical(&to_value(self), &mut out);
        out.push('\n');
        out
    }

    /// Flattened `path: value` lines for terminal reading.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let mut v = to_value(self);
        if let Value::Object(map) = &mut v {
            map.remove("version");
        }
        flatten("", &v, &mut out);
        out
    }
}

/// SHA-256 over the inputs, each prefixed by its length so that
/// concatenation boundaries matter.
pub fn digest(inputs: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for input in inputs {
        h.update((input.len() as u64).to_le_bytes());
        h.update(input);
    }
    hex::encode(h.finalize())
}

pub fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

/// Rounds to [`REAL_DIGITS`] significant digits and prints the shortest
/// decimal that reads back to the rounded value. Non-finite values become
/// `null`.
pub fn format_real(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return "0.0".into();
    }
    let rounded: f64 = format!("{:.*e}", REAL_DIGITS - 1, x)
        .parse()
        .expect("valid float");
    format!("{rounded:?}")
}

pub fn write_canonical(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_real(n.as_f64().unwrap()));
            } else {
                write!(out, "{n}").unwrap();
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, key) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(key).unwrap());
                out.push(':');
                write_canonical(&map[key], out);
            }
            out.push('}');
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => format_real(n.as_f64().unwrap()),
        Value::String(s) => s.clone(),
        other => {
            let mut s = String::new();
            write_canonical(other, &mut s);
            s
        }
    }
}

fn is_leaf(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|i| !i.is_object()),
        Value::Object(_) => false,
        _ => true,
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    if is_leaf(v) {
        writeln!(out, "{:<40} {}", prefix, scalar(v)).unwrap();
        return;
    }
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            for key in keys {
                flatten(&join(key), &map[key], out);
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), item, out);
            }
        }
        _ => unreachable!(),
    }
}
