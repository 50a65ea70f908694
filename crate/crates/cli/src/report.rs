// SPDX-License-Identifier: Apache-2.0

use num_rational::BigRational;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use stochsep::geom::position::PositionReport;
use stochsep::scalar::{format_decimal, format_rational};
use stochsep::Error;

/// Machine-readable output of one subcommand.
pub struct Report {
    command: &'static str,
    digest: Option<String>,
    pub results: Map<String, Value>,
    pub diagnostics: Map<String, Value>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            command,
            digest: None,
            results: Map::new(),
            diagnostics: Map::new(),
            warnings: Vec::new(),
        }
    }

    pub fn digest_input(&mut self, bytes: &[u8]) {
        self.digest = Some(format!("sha256:{}", hex::encode(Sha256::digest(bytes))));
    }

    pub fn result(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.into(), value.into());
    }

    pub fn diag(&mut self, key: &str, value: impl Into<Value>) {
        self.diagnostics.insert(key.into(), value.into());
    }

    pub fn to_json(&self) -> Value {
        let mut doc = Map::new();
        doc.insert("command".into(), self.command.into());
        if let Some(d) = &self.digest {
            doc.insert("input_digest".into(), d.clone().into());
        }
        doc.insert("results".into(), Value::Object(self.results.clone()));
        doc.insert("diagnostics".into(), Value::Object(self.diagnostics.clone()));
        doc.insert("warnings".into(), json!(self.warnings));
        Value::Object(doc)
    }

    /// `key: value` lines of the results, then warnings.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.results {
            let shown = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{k}: {shown}\n"));
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }
}

pub fn rational(r: &BigRational) -> Value {
    Value::String(format_rational(r))
}

pub fn decimal(r: &BigRational) -> Value {
    Value::String(format_decimal(r, 17))
}

pub fn float(x: f64) -> Value {
    Value::String(format!("{x:.17e}"))
}

pub fn violations(report: &PositionReport) -> Value {
    serde_json::to_value(report).expect("serializable report")
}

/// Process exit code for an engine error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Degenerate(_) | Error::DegenerateConfig(_) | Error::AffinelyDependent => 2,
        Error::GuardRail { .. } => 3,
        _ => 1,
    }
}

pub fn error_document(command: &str, e: &Error) -> Value {
    let mut doc = json!({ "command": command, "error": e.to_string() });
    if let Error::Degenerate(r) = e {
        let v = violations(r);
        doc["violations"] = v["violations"].clone();
        doc["truncated"] = v["truncated"].clone();
    }
    doc
}
