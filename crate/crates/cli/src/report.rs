//! Tabular reports and their CSV / JSON renderings.

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use tradebloc_core::{format_sigfigs, Exact, Scalar};

/// One table cell or summary value.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    /// A number already rounded for presentation.
    Num(String),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn num<T: Scalar>(value: &T, sigfigs: usize) -> Cell {
        match value.as_exact() {
            Some(v) => Cell::Num(format_sigfigs(&v, sigfigs)),
            None => Cell::Text(format!("{:?}", value.as_f64())),
        }
    }

    pub fn opt_num<T: Scalar>(value: Option<&T>, sigfigs: usize) -> Cell {
        value.map_or(Cell::Empty, |v| Cell::num(v, sigfigs))
    }

    pub fn exact_num(value: &Exact, sigfigs: usize) -> Cell {
        Cell::Num(format_sigfigs(value, sigfigs))
    }

    pub fn count(value: usize) -> Cell {
        Cell::Int(value as i64)
    }

    pub fn text(value: impl Into<String>) -> Cell {
        Cell::Text(value.into())
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(s) => s.clone(),
            Cell::Text(s) => csv_escape(s),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn plain(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            other => other.csv(),
        }
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Int(v) => serializer.serialize_i64(*v),
            Cell::Num(s) => match s.parse::<serde_json::Number>() {
                Ok(n) => n.serialize(serializer),
                Err(_) => serializer.serialize_str(s),
            },
            Cell::Text(s) => serializer.serialize_str(s),
            Cell::Bool(b) => serializer.serialize_bool(*b),
            Cell::Empty => serializer.serialize_none(),
        }
    }
}

/// Ordered key/value pairs, serialized as a JSON object in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary(Vec<(String, Cell)>);

impl Summary {
    pub fn push(&mut self, key: impl Into<String>, value: Cell) {
        self.0.push((key.into(), value));
    }

    pub fn get(&self, key: &str) -> Option<&Cell> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

impl Serialize for Summary {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub summary: Summary,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Invariant violations detected while building the report.
    pub violations: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        Report {
            command,
            summary: Summary::default(),
            columns,
            rows: Vec::new(),
            violations: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// `# key=value` summary lines, then the header and one line per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# command={}\n", self.command));
        for (k, v) in &self.summary.0 {
            out.push_str(&format!("# {k}={}\n", v.plain()));
        }
        for v in &self.violations {
            out.push_str(&format!("# violation={v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
