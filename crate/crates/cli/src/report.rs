//! Reports: a list of text lines plus structured data, rendered as text or JSON.
//!
//! JSON reports have the shape
//! `{"schema_version": 1, "command": ..., "outcome": "pass" | "violation", "data": {...}}`
//! with object keys sorted, so the bytes depend only on the input.

use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Emit {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Violation,
}

impl Outcome {
    fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Violation => "violation",
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Pass => 0,
            Outcome::Violation => 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    command: &'static str,
    pub outcome: Outcome,
    lines: Vec<String>,
    data: Map<String, Value>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report { command, outcome: Outcome::Pass, lines: Vec::new(), data: Map::new() }
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.data.insert(key.to_string(), value.into());
    }

    pub fn violation(&mut self) {
        self.outcome = Outcome::Violation;
    }

    pub fn render(&self, emit: Emit) -> String {
        match emit {
            Emit::Text => {
                let mut out = format!("{}\n", self.command);
                for l in &self.lines {
                    out.push_str("  ");
                    out.push_str(l);
                    out.push('\n');
                }
                out.push_str(&format!("result: {}\n", self.outcome.as_str()));
                out
            }
            Emit::Json => {
                let mut top = Map::new();
                top.insert("schema_version".into(), SCHEMA_VERSION.into());
                top.insert("command".into(), self.command.into());
                top.insert("outcome".into(), self.outcome.as_str().into());
                top.insert("data".into(), Value::Object(self.data.clone()));
                let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("JSON values serialize");
                s.push('\n');
                s
            }
        }
    }
}
