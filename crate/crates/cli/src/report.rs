//! Run reports: the record every command emits.
//!
//! The structured form is pretty-printed JSON whose field order is fixed by
//! the struct definitions and by insertion order inside payload maps. The
//! text form renders the same tree as indented `key: value` lines. Neither
//! contains timestamps or paths, so equal inputs give byte-equal output.

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedSource {
    Flag,
    Environment,
    ConfigFile,
    Default,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeedEcho {
    pub value: u64,
    pub source: SeedSource,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommandEcho {
    pub name: &'static str,
    pub arguments: Map<String, Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    VerdictFailures,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::VerdictFailures => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub command: CommandEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<SeedEcho>,
    /// SHA-256 over the command echo followed by the bytes of every input file.
    pub inputs_sha256: String,
    pub status: Status,
    pub warnings: Vec<String>,
    pub payload: Value,
}

impl RunReport {
    pub fn new(command: CommandEcho, inputs: &[&[u8]], payload: Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION"),
            inputs_sha256: inputs_hash(&command, inputs),
            command,
            seed: None,
            status: Status::Ok,
            warnings: Vec::new(),
            payload,
        }
    }

    pub fn render(&self, format: Format) -> String {
        let value = serde_json::to_value(self).expect("report serialises");
        match format {
            Format::Structured => {
                let mut s = serde_json::to_string_pretty(&value).expect("report serialises");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut out = String::new();
                render_text(&value, 0, &mut out);
                out
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn inputs_hash(command: &CommandEcho, inputs: &[&[u8]]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(serde_json::to_vec(command).expect("echo serialises"));
    for bytes in inputs {
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(bytes);
    }
    hex::encode(hasher.finalize())
}

fn scalar(value: &Value) -> String {
    match value {
        Value::Null => "null".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn is_leaf(value: &Value) -> bool {
    match value {
        Value::Array(items) => items.is_empty(),
        Value::Object(map) => map.is_empty(),
        _ => true,
    }
}

fn render_text(value: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match value {
        Value::Object(map) => {
            for (key, child) in map {
                if is_leaf(child) {
                    let shown = match child {
                        Value::Array(_) => "[]".into(),
                        Value::Object(_) => "{}".into(),
                        _ => scalar(child),
                    };
                    out.push_str(&format!("{pad}{key}: {shown}\n"));
                } else {
                    out.push_str(&format!("{pad}{key}:\n"));
                    render_text(child, depth + 1, out);
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                if is_leaf(item) {
                    out.push_str(&format!("{pad}- {}\n", scalar(item)));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    render_text(item, depth + 1, out);
                }
            }
        }
        leaf => out.push_str(&format!("{pad}{}\n", scalar(leaf))),
    }
}
