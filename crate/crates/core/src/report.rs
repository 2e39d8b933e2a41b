//! Tabular reports with a metadata preamble, rendered as CSV or JSON.
//!
//! CSV output starts with `# key: value` comment lines, then a header row,
//! then one line per row. JSON output is `{"meta": {...}, "columns": [...],
//! "rows": [{column: value, ...}, ...]}` with keys in column order. Floats
//! use the shortest representation that round-trips, so equal inputs give
//! byte-identical files.

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

pub const TOOL_VERSION: &str = concat!("pslab ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

/// A finite float as a JSON number; non-finite values become strings.
pub fn num(x: f64) -> Value {
    match Number::from_f64(x) {
        Some(n) => Value::Number(n),
        None => Value::String(format!("{x}")),
    }
}

/// Arbitrary integers (e.g. `BigInt`) kept exact as decimal strings when
/// they exceed 64 bits.
pub fn int(x: impl ToString) -> Value {
    let s = x.to_string();
    match s.parse::<i64>() {
        Ok(v) => Value::from(v),
        Err(_) => match s.parse::<u64>() {
            Ok(v) => Value::from(v),
            Err(_) => Value::String(s),
        },
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    meta: Vec<(String, String)>,
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

impl Report {
    /// A report for `command`, with the tool version already recorded.
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Self {
            meta: vec![
                ("tool".into(), TOOL_VERSION.into()),
                ("command".into(), command.into()),
            ],
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        let value = value.to_string();
        assert!(!key.contains(['\n', ':']) && !value.contains('\n'), "metadata must be single-line");
        self.meta.push((key.into(), value));
        self
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width differs from header");
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            writeln!(out, "# {k}: {v}").unwrap();
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let meta: Map<String, Value> = self
            .meta
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .cloned()
                        .zip(row.iter().cloned())
                        .collect(),
                )
            })
            .collect();
        let doc = serde_json::json!({
            "meta": meta,
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize");
        s.push('\n');
        s
    }
}

fn csv_cell(v: &Value) -> String {
    let raw = match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo", &["p", "n", "x"]);
        r.meta("gamma", "19/20");
        r.push(vec![int(2), int(2), num(0.1)]);
        r.push(vec![int("123456789012345678901234567890"), Value::Null, num(f64::NAN)]);
        r
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], format!("# tool: {TOOL_VERSION}"));
        assert_eq!(lines[2], "# gamma: 19/20");
        assert_eq!(lines[3], "p,n,x");
        assert_eq!(lines[4], "2,2,0.1");
        assert_eq!(lines[5], "123456789012345678901234567890,,NaN");
        assert!(csv.ends_with('\n') && !csv.contains('\r'));
    }

    #[test]
    fn json_mirrors_columns() {
        let v: Value = serde_json::from_str(&sample().to_json()).unwrap();
        assert_eq!(v["meta"]["gamma"], "19/20");
        assert_eq!(v["rows"][0]["x"], 0.1);
        let keys: Vec<&String> = v["rows"][0].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["p", "n", "x"]);
    }

    #[test]
    fn quoting() {
        assert_eq!(csv_cell(&Value::String("a,b".into())), "\"a,b\"");
    }
}
