//! Rendering of tables and documents as JSON or CSV.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::Format;

pub const SCHEMA: &str = "1";

/// A dimension table; every value cell names how it was obtained.
pub struct Table {
    pub subject: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Row>,
}

pub struct Row {
    pub params: Vec<u64>,
    pub value: u64,
    pub provenance: &'static str,
}

impl Table {
    pub fn new(subject: &'static str, columns: &[&'static str]) -> Self {
        Table { subject, columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, params: &[usize], value: impl TryInto<u64>, provenance: &'static str) {
        let value = value.try_into().unwrap_or(u64::MAX);
        self.rows.push(Row { params: params.iter().map(|&p| p as u64).collect(), value, provenance });
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (c, p) in self.columns.iter().zip(&r.params) {
                    m.insert(c.to_string(), json!(p));
                }
                m.insert("value".into(), json!(r.value));
                m.insert("provenance".into(), json!(r.provenance));
                Value::Object(m)
            })
            .collect();
        json!({ "schema": SCHEMA, "subject": self.subject, "rows": rows })
    }

    pub fn to_records(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let mut header: Vec<String> = self.columns.iter().map(|c| c.to_string()).collect();
        header.push("value".into());
        header.push("provenance".into());
        let records = self
            .rows
            .iter()
            .map(|r| {
                let mut rec: Vec<String> = r.params.iter().map(u64::to_string).collect();
                rec.push(r.value.to_string());
                rec.push(r.provenance.to_string());
                rec
            })
            .collect();
        (header, records)
    }
}

/// A command result: JSON document plus a flat record view for CSV.
pub struct Document {
    pub json: Value,
    pub header: Vec<String>,
    pub records: Vec<Vec<String>>,
}

impl From<Table> for Document {
    fn from(t: Table) -> Self {
        let (header, records) = t.to_records();
        Document { json: t.to_json(), header, records }
    }
}

fn render(doc: &Document, format: Format) -> Result<Vec<u8>, String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&doc.json).map_err(|e| e.to_string())?;
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&doc.header).map_err(|e| e.to_string())?;
            for r in &doc.records {
                w.write_record(r).map_err(|e| e.to_string())?;
            }
            w.into_inner().map_err(|e| e.to_string())
        }
    }
}

pub fn emit(doc: &Document, format: Format, out: Option<&Path>) -> Result<(), String> {
    let bytes = render(doc, format)?;
    match out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => std::io::stdout().write_all(&bytes).map_err(|e| e.to_string()),
    }
}
