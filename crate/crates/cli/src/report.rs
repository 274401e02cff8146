//! The JSON envelope printed by every subcommand, plus its CSV projection.

use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub outputs: Map<String, Value>,
    pub warnings: Vec<String>,
    pub schema_version: u32,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            inputs: Map::new(),
            outputs: Map::new(),
            warnings: Vec::new(),
            schema_version: SCHEMA_VERSION,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.inputs.insert(key.to_string(), to_value(value));
        self
    }

    pub fn output(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.outputs.insert(key.to_string(), to_value(value));
        self
    }

    /// Inserts every field of a struct-like value into the outputs.
    pub fn outputs_from(&mut self, value: impl Serialize) -> &mut Self {
        if let Value::Object(map) = to_value(value) {
            self.outputs.extend(map);
        }
        self
    }

    pub fn warn(&mut self, note: impl Into<String>) -> &mut Self {
        self.warnings.push(note.into());
        self
    }

    pub fn to_json(&self) -> String {
        tdom_core::json::to_string(self)
    }

    /// `section,key,value` rows; nested keys are joined with dots.
    pub fn to_csv(&self) -> String {
        let mut rows: Vec<(&str, String, String)> = vec![
            ("section", "key".into(), "value".into()),
            ("meta", "command".into(), self.command.clone()),
            ("meta", "schema_version".into(), self.schema_version.to_string()),
        ];
        for (k, v) in &self.inputs {
            flatten("inputs", k, v, &mut rows);
        }
        for (k, v) in &self.outputs {
            flatten("outputs", k, v, &mut rows);
        }
        for (i, note) in self.warnings.iter().enumerate() {
            rows.push(("warnings", i.to_string(), note.clone()));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for (section, key, value) in &rows {
            w.write_record([*section, key.as_str(), value.as_str()]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}

fn to_value(value: impl Serialize) -> Value {
    serde_json::to_value(value).unwrap_or(Value::Null)
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "null".into(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => tdom_core::json::format_f64(x),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => tdom_core::json::to_string(other),
    }
}

fn flatten(section: &'static str, prefix: &str, v: &Value, out: &mut Vec<(&'static str, String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, inner) in map {
                flatten(section, &format!("{prefix}.{k}"), inner, out);
            }
        }
        Value::Array(items) => {
            for (i, inner) in items.iter().enumerate() {
                flatten(section, &format!("{prefix}.{i}"), inner, out);
            }
        }
        _ => out.push((section, prefix.to_string(), scalar(v))),
    }
}
