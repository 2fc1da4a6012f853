//! Tables and their CSV / JSON serialization.

use std::io::{self, Write};

use serde_json::{Map, Value};

use super::config::{fmt_float, Format, MetaValue};

pub const TOOL: &str = concat!("omband ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq)]
pub struct OutputTable {
    pub command: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    /// Resolved configuration, echoed in order.
    pub metadata: Vec<(String, MetaValue)>,
}

impl OutputTable {
    pub fn new(command: &str, columns: &[&'static str], metadata: Vec<(String, MetaValue)>) -> Self {
        Self {
            command: command.to_owned(),
            columns: columns.to_vec(),
            rows: Vec::new(),
            metadata,
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

fn write_csv(t: &OutputTable, w: &mut dyn Write) -> io::Result<()> {
    writeln!(w, "# tool = {}", MetaValue::Text(TOOL.to_owned()))?;
    writeln!(w, "# command = {}", MetaValue::Text(t.command.clone()))?;
    for (k, v) in &t.metadata {
        writeln!(w, "# {k} = {v}")?;
    }
    writeln!(w, "{}", t.columns.join(","))?;
    for row in &t.rows {
        let cells: Vec<String> = row.iter().map(|x| fmt_float(*x)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// JSON numbers go through the same 17-digit text as CSV; NaN becomes null.
fn json_number(x: f64) -> Value {
    if x.is_finite() {
        serde_json::from_str(&fmt_float(x)).expect("formatted float is valid JSON")
    } else {
        Value::Null
    }
}

fn json_meta(v: &MetaValue) -> Value {
    match v {
        MetaValue::Float(x) => json_number(*x),
        MetaValue::Int(n) => Value::from(*n),
        MetaValue::Text(s) => Value::from(s.as_str()),
        MetaValue::FloatList(xs) => Value::Array(xs.iter().map(|x| json_number(*x)).collect()),
    }
}

fn write_json(t: &OutputTable, w: &mut dyn Write) -> io::Result<()> {
    let mut config = Map::new();
    for (k, v) in &t.metadata {
        config.insert(k.clone(), json_meta(v));
    }
    let mut metadata = Map::new();
    metadata.insert("tool".into(), Value::from(TOOL));
    metadata.insert("command".into(), Value::from(t.command.as_str()));
    metadata.insert("config".into(), Value::Object(config));
    let mut root = Map::new();
    root.insert("metadata".into(), Value::Object(metadata));
    root.insert(
        "columns".into(),
        Value::Array(t.columns.iter().map(|c| Value::from(*c)).collect()),
    );
    root.insert(
        "rows".into(),
        Value::Array(
            t.rows
                .iter()
                .map(|r| Value::Array(r.iter().map(|x| json_number(*x)).collect()))
                .collect(),
        ),
    );
    serde_json::to_writer(&mut *w, &Value::Object(root))?;
    writeln!(w)
}

/// Serializes `table` to `w`.
pub fn emit(table: &OutputTable, format: Format, w: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(table, w),
        Format::Json => write_json(table, w),
    }
}

pub fn emit_to_string(table: &OutputTable, format: Format) -> String {
    let mut buf = Vec::new();
    emit(table, format, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("output is UTF-8")
}
