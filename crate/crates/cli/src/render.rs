use serde_json::{Map, Value};

use crate::args::Format;

/// A scalar cell; nested values are written as compact JSON.
fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Bool(_) | Value::Number(_) => v.to_string(),
        Value::Array(_) | Value::Object(_) => serde_json::to_string(v).expect("json value"),
    }
}

/// Column headers in first-seen order, and one row of cells per record.
fn tabulate(rows: &[Value]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut headers: Vec<String> = Vec::new();
    for r in rows {
        match r {
            Value::Object(m) => {
                for k in m.keys() {
                    if !headers.contains(k) {
                        headers.push(k.clone());
                    }
                }
            }
            _ if headers.is_empty() => headers.push("value".into()),
            _ => {}
        }
    }
    let body = rows
        .iter()
        .map(|r| match r {
            Value::Object(m) => headers.iter().map(|h| m.get(h).map(cell).unwrap_or_default()).collect(),
            other => vec![cell(other)],
        })
        .collect();
    (headers, body)
}

fn to_csv(headers: &[String], body: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(headers).expect("in-memory write");
    for row in body {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
}

fn to_table(headers: &[String], body: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in body {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(headers);
    out += &line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>());
    for row in body {
        out += &line(row);
    }
    out
}

/// Record rows for csv/table: explicit rows, or the result as one record.
fn records(result: &Value, rows: Option<&[Value]>) -> Vec<Value> {
    match rows {
        Some(r) => r.to_vec(),
        None => match result {
            Value::Array(a) => a.clone(),
            other => vec![other.clone()],
        },
    }
}

pub fn envelope(command: &str, inputs: Value, result: Value, warnings: &[String], error: Option<Value>) -> Value {
    let mut m = Map::new();
    m.insert("command".into(), Value::String(command.into()));
    m.insert("inputs".into(), inputs);
    m.insert("result".into(), result);
    if let Some(e) = error {
        m.insert("error".into(), e);
    }
    m.insert("warnings".into(), warnings.iter().cloned().map(Value::String).collect());
    m.insert("version".into(), Value::String(env!("CARGO_PKG_VERSION").into()));
    Value::Object(m)
}

pub fn render(format: Format, envelope: &Value, rows: Option<&[Value]>) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(envelope).expect("json value") + "\n",
        Format::Csv | Format::Table => {
            let recs = records(&envelope["result"], rows);
            let (headers, body) = if rows.is_none() && recs.len() == 1 && recs[0].is_object() && format == Format::Table {
                // A single record reads better as key/value pairs.
                let m = recs[0].as_object().expect("object");
                (
                    vec!["field".to_string(), "value".to_string()],
                    m.iter().map(|(k, v)| vec![k.clone(), cell(v)]).collect(),
                )
            } else {
                tabulate(&recs)
            };
            let mut out = match format {
                Format::Csv => to_csv(&headers, &body),
                _ => to_table(&headers, &body),
            };
            if format == Format::Table {
                if let Some(ws) = envelope["warnings"].as_array() {
                    for w in ws {
                        out += &format!("warning: {}\n", w.as_str().unwrap_or_default());
                    }
                }
            }
            out
        }
    }
}
