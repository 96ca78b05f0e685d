//! Rendering of command results as JSON, CSV or an aligned table.

use clap::ValueEnum;
use comfy_table::{presets::ASCII_BORDERS_ONLY_CONDENSED, Table};
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// A command result. `rows` is the tabular view used by CSV and table output;
/// when absent the whole value is a single row.
pub struct Output {
    pub value: Value,
    pub rows: Option<Vec<Value>>,
}

impl Output {
    pub fn single(value: Value) -> Self {
        Output { value, rows: None }
    }

    pub fn with_rows(value: Value, rows: Vec<Value>) -> Self {
        Output { value, rows: Some(rows) }
    }

    pub fn render(&self, format: Format) -> Result<String, String> {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.value).map(|s| s + "\n").map_err(|e| e.to_string()),
            Format::Csv => {
                let (header, cells) = self.grid();
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&header).map_err(|e| e.to_string())?;
                for row in cells {
                    w.write_record(&row).map_err(|e| e.to_string())?;
                }
                let bytes = w.into_inner().map_err(|e| e.to_string())?;
                String::from_utf8(bytes).map_err(|e| e.to_string())
            }
            Format::Table => {
                let (header, cells) = self.grid();
                let mut t = Table::new();
                t.load_preset(ASCII_BORDERS_ONLY_CONDENSED).set_header(header);
                for row in cells {
                    t.add_row(row);
                }
                Ok(t.to_string() + "\n")
            }
        }
    }

    fn grid(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let rows: Vec<Map<String, Value>> = match &self.rows {
            Some(rows) => rows.iter().map(flatten).collect(),
            None => vec![flatten(&self.value)],
        };
        let mut header: Vec<String> = Vec::new();
        for r in &rows {
            for k in r.keys() {
                if !header.contains(k) {
                    header.push(k.clone());
                }
            }
        }
        let cells = rows
            .iter()
            .map(|r| header.iter().map(|k| r.get(k).map(cell).unwrap_or_default()).collect())
            .collect();
        (header, cells)
    }
}

/// Nested objects become dotted columns; arrays stay whole in one cell,
/// written `[a b c]` so exact rationals need no quoting.
fn flatten(v: &Value) -> Map<String, Value> {
    let mut out = Map::new();
    match v {
        Value::Object(m) => flatten_into("", m, &mut out),
        other => {
            out.insert("value".into(), other.clone());
        }
    }
    out
}

fn flatten_into(prefix: &str, m: &Map<String, Value>, out: &mut Map<String, Value>) {
    for (k, v) in m {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(inner) => flatten_into(&key, inner, out),
            other => {
                out.insert(key, other.clone());
            }
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) if items.iter().all(|i| !i.is_object()) => {
            let parts: Vec<String> = items.iter().map(cell).collect();
            format!("[{}]", parts.join(" "))
        }
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_flattens_nested_fields() {
        let out = Output::single(json!({"a": "1/2", "b": {"c": [1, "2/3"]}, "d": null}));
        assert_eq!(out.render(Format::Csv).unwrap(), "a,b.c,d\n1/2,[1 2/3],\n");
    }

    #[test]
    fn rows_take_the_union_of_columns() {
        let out = Output::with_rows(json!(null), vec![json!({"x": 1}), json!({"x": 2, "y": "e"})]);
        assert_eq!(out.render(Format::Csv).unwrap(), "x,y\n1,\n2,e\n");
        assert!(out.render(Format::Table).unwrap().contains('e'));
    }

    #[test]
    fn nested_arrays_stay_in_one_cell() {
        let out = Output::single(json!({"w": [["1", "0"], ["2", "1/3"]]}));
        assert_eq!(out.render(Format::Csv).unwrap(), "w\n[[1 0] [2 1/3]]\n");
    }
}
