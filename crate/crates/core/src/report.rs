//! Minimal table model rendered to CSV or JSON.

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Num(f64),
    /// A p-value, kept distinct so consumers can format it as such.
    P(f64),
    Int(i64),
    Bool(bool),
    Missing,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn opt_num(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }

    pub fn opt_p(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::P)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Num(v) | Cell::P(v) => Some(v),
            Cell::Int(v) => Some(v as f64),
            _ => None,
        }
    }

    fn to_text(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(v) | Cell::P(v) => format_number(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => "NA".to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Text(s) => json!(s),
            Cell::Num(v) | Cell::P(v) if v.is_finite() => json!(v),
            Cell::Num(_) | Cell::P(_) => Value::Null,
            Cell::Int(v) => json!(v),
            Cell::Bool(b) => json!(b),
            Cell::Missing => Value::Null,
        }
    }
}

fn format_number(v: f64) -> String {
    if v.is_nan() {
        "NA".into()
    } else {
        // Same shortest round-trip text as the JSON writer.
        serde_json::Number::from_f64(v).map_or_else(|| v.to_string(), |n| n.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, Cell)>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), ..Table::default() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: Cell) {
        self.summary.push((key.to_string(), value));
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn summary_value(&self, key: &str) -> Option<&Cell> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// Header plus rows; the summary follows as `# key = value` comment lines.
    pub fn to_csv(&self) -> String {
        let mut wtr = csv::WriterBuilder::new().from_writer(Vec::new());
        wtr.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            wtr.write_record(row.iter().map(Cell::to_text)).expect("in-memory write");
        }
        let mut out = String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("utf-8");
        for (k, v) in &self.summary {
            out.push_str(&format!("# {k} = {}\n", v.to_text()));
        }
        out
    }

    pub fn to_json_value(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self.columns.iter().cloned().zip(row.iter().map(Cell::to_json)).collect();
                Value::Object(obj)
            })
            .collect();
        let summary: Map<String, Value> = self.summary.iter().map(|(k, v)| (k.clone(), v.to_json())).collect();
        json!({ "table": self.name, "columns": self.columns, "rows": rows, "summary": summary })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("serialisable");
        s.push('\n');
        s
    }
}
