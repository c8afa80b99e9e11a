//! Command reports: an ordered list of named values rendered either as
//! plain text or as compact JSON. Both renderings contain only exact
//! rationals and are byte-identical for identical inputs.

use serde_json::{json, Map, Value};

use crate::exactmath::{format_rational, Rational, RationalMatrix, RationalVector};
use crate::gpt::{ChannelMatrix, Measurement};

pub fn rational(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

pub fn vector(v: &RationalVector) -> Value {
    Value::Array(v.iter().map(rational).collect())
}

pub fn vectors(vs: &[RationalVector]) -> Value {
    Value::Array(vs.iter().map(vector).collect())
}

pub fn matrix(m: &RationalMatrix) -> Value {
    vectors(&m.row_vectors())
}

pub fn channel(c: &ChannelMatrix) -> Value {
    matrix(c.matrix())
}

pub fn measurement(m: &Measurement) -> Value {
    vectors(m.effects())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub theory: String,
    pub affirmative: bool,
    /// Short verdict word shown in text output, e.g. `distinguishable`.
    pub verdict: String,
    pub entries: Vec<(String, Value)>,
}

impl Report {
    pub fn new(command: &str, theory: &str) -> Self {
        Self {
            command: command.to_string(),
            theory: theory.to_string(),
            affirmative: false,
            verdict: String::new(),
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, key: &str, value: Value) -> &mut Self {
        self.entries.push((key.to_string(), value));
        self
    }

    pub fn conclude(&mut self, affirmative: bool, verdict: &str) {
        self.affirmative = affirmative;
        self.verdict = verdict.to_string();
    }

    pub fn exit_code(&self) -> i32 {
        if self.affirmative {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut details = Map::new();
        for (k, v) in &self.entries {
            details.insert(k.clone(), v.clone());
        }
        let doc = json!({
            "command": self.command,
            "theory": self.theory,
            "affirmative": self.affirmative,
            "verdict": self.verdict,
            "details": Value::Object(details),
        });
        let mut s = serde_json::to_string(&doc).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("command: {}\ntheory: {}\n", self.command, self.theory);
        for (k, v) in &self.entries {
            render(&mut out, k, v, 0);
        }
        out.push_str(&format!("verdict: {}\n", self.verdict));
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(if *b { "yes" } else { "no" }.into()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn flat_list(v: &Value) -> Option<String> {
    let Value::Array(items) = v else {
        return None;
    };
    let parts: Option<Vec<String>> = items.iter().map(scalar).collect();
    parts.map(|p| format!("[{}]", p.join(", ")))
}

fn render(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    if let Some(s) = scalar(v).or_else(|| flat_list(v)) {
        out.push_str(&format!("{pad}{key}: {s}\n"));
        return;
    }
    out.push_str(&format!("{pad}{key}:\n"));
    match v {
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                render(out, &i.to_string(), item, depth + 1);
            }
        }
        Value::Object(map) => {
            for (k, item) in map {
                render(out, k, item, depth + 1);
            }
        }
        _ => unreachable!("scalars handled above"),
    }
}
