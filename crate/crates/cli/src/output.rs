//! Report emission: JSON documents, or CSV with "%.17g" doubles,
//! comma separators, and LF line endings.

use serde_json::Value;
use shellspec_core::gfmt::g17;
use std::io::Write;
use std::path::PathBuf;

pub struct OutputOpts {
    pub out: Option<PathBuf>,
    pub format: String,
}

impl From<&crate::CommonOut> for OutputOpts {
    fn from(c: &crate::CommonOut) -> Self {
        OutputOpts {
            out: c.out.clone(),
            format: c.format.clone().unwrap_or_else(|| "json".to_string()),
        }
    }
}

/// Flatten a JSON document into dot-path columns; arrays are rendered
/// as semicolon-joined cells so a report row stays one CSV line.
fn flatten(prefix: &str, value: &Value, cols: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&path, v, cols);
            }
        }
        Value::Array(items) => {
            let cell = items.iter().map(scalar_cell).collect::<Vec<_>>().join(";");
            cols.push((prefix.to_string(), cell));
        }
        other => cols.push((prefix.to_string(), scalar_cell(other))),
    }
}

fn scalar_cell(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => g17(x),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Null => String::new(),
        nested => {
            let mut cols = Vec::new();
            flatten("", nested, &mut cols);
            cols.into_iter().map(|(_, c)| c).collect::<Vec<_>>().join(";")
        }
    }
}

pub fn document_to_csv(doc: &Value) -> String {
    let mut cols = Vec::new();
    flatten("", doc, &mut cols);
    let header: Vec<&str> = cols.iter().map(|(k, _)| k.as_str()).collect();
    let row: Vec<&str> = cols.iter().map(|(_, v)| v.as_str()).collect();
    format!("{}\n{}\n", header.join(","), row.join(","))
}

/// Rows-to-CSV for sweep-style outputs with a shared header.
pub fn rows_to_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = String::new();
    s.push_str(&header.join(","));
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

pub fn write_report(text: &str, out: &Option<PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| e.to_string())
        }
    }
}

pub fn emit(doc: &Value, opts: &OutputOpts) -> Result<(), String> {
    let text = match opts.format.as_str() {
        "csv" => document_to_csv(doc),
        _ => format!("{}\n", serde_json::to_string_pretty(doc).map_err(|e| e.to_string())?),
    };
    write_report(&text, &opts.out)
}

/// Machine-readable failure record on stderr; the caller sets the exit
/// status.
pub fn fail(reason: &str, doc: &Value) {
    let failure = serde_json::json!({ "failure": reason, "report": doc });
    eprintln!("{failure}");
}
