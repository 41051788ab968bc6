//! Tabular data ingestion and typed column access.
//!
//! A [`DataTable`] is immutable once built. Row order is the file order and
//! is what `dataPoint` index targets refer to.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnType {
    Number,
    String,
    Temporal,
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColumnType::Number => "number",
            ColumnType::String => "string",
            ColumnType::Temporal => "temporal",
        })
    }
}

/// A single cell. Temporal values are milliseconds since the Unix epoch, UTC.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    String(String),
    Temporal(i64),
    Null,
}

impl Value {
    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Number(n) => Some(*n),
            Value::Temporal(t) => Some(*t as f64),
            _ => None,
        }
    }

    pub fn column_type(&self) -> Option<ColumnType> {
        match self {
            Value::Number(_) => Some(ColumnType::Number),
            Value::String(_) => Some(ColumnType::String),
            Value::Temporal(_) => Some(ColumnType::Temporal),
            Value::Null => None,
        }
    }

    /// Total order within one type; values of different types order by
    /// type tag. Nulls sort last.
    pub fn total_cmp(&self, other: &Value) -> Ordering {
        fn rank(v: &Value) -> u8 {
            match v {
                Value::Number(_) => 0,
                Value::Temporal(_) => 1,
                Value::String(_) => 2,
                Value::Null => 3,
            }
        }
        match (self, other) {
            (Value::Number(a), Value::Number(b)) => a.total_cmp(b),
            (Value::Temporal(a), Value::Temporal(b)) => a.cmp(b),
            (Value::String(a), Value::String(b)) => a.cmp(b),
            _ => rank(self).cmp(&rank(other)),
        }
    }

    /// Text form used in CSV output and as category labels.
    pub fn display(&self) -> String {
        match self {
            Value::Number(n) => format_number(*n),
            Value::String(s) => s.clone(),
            Value::Temporal(t) => format_temporal(*t),
            Value::Null => String::new(),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Number(n) => s.serialize_f64(*n),
            Value::String(v) => s.serialize_str(v),
            Value::Temporal(t) => s.serialize_str(&format_temporal(*t)),
            Value::Null => s.serialize_unit(),
        }
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_number(n: f64) -> String {
    let n = if n == 0.0 { 0.0 } else { n };
    format!("{n}")
}

pub fn parse_number(s: &str) -> Option<f64> {
    let t = s.trim();
    if t.is_empty() {
        return None;
    }
    // Rust accepts "inf"/"nan" spellings; reject anything non-finite.
    t.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses the ISO-8601 subset accepted for temporal cells: `YYYY-MM-DD`,
/// `YYYY-MM-DDTHH:MM[:SS[.fff]]` (UTC) and RFC 3339 with an offset.
pub fn parse_temporal(s: &str) -> Option<i64> {
    let b = s.as_bytes();
    if b.len() < 10 || !b[..4].iter().all(u8::is_ascii_digit) || b[4] != b'-' || b[7] != b'-' {
        return None;
    }
    if b.len() == 10 {
        let d = NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()?;
        return Some(d.and_hms_opt(0, 0, 0)?.and_utc().timestamp_millis());
    }
    if b[10] != b'T' {
        return None;
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp_millis());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%dT%H:%M"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(dt.and_utc().timestamp_millis());
        }
    }
    None
}

/// Canonical ISO-8601 form, always UTC with millisecond precision.
pub fn format_temporal(ms: i64) -> String {
    match DateTime::<Utc>::from_timestamp_millis(ms) {
        Some(dt) => dt.format("%Y-%m-%dT%H:%M:%S%.3fZ").to_string(),
        None => ms.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Column {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: ColumnType,
}

#[derive(Debug, Error, PartialEq)]
pub enum DataError {
    #[error("malformed CSV: {0}")]
    MalformedCsv(String),
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("row {row}: nested value in column `{column}`")]
    NestedObject { row: usize, column: String },
    #[error("column `{column}`: value {value:?} at row {row} conflicts with type {expected}")]
    TypeConflict {
        column: String,
        row: usize,
        value: String,
        expected: ColumnType,
    },
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

impl DataError {
    pub fn code(&self) -> &'static str {
        match self {
            DataError::MalformedCsv(_) => "MalformedCsv",
            DataError::MalformedJson(_) => "MalformedJson",
            DataError::NestedObject { .. } => "NestedObject",
            DataError::TypeConflict { .. } => "TypeConflict",
            DataError::InvalidTable(_) => "InvalidTable",
            DataError::Io { .. } => "IoError",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    columns: Vec<Column>,
    rows: Vec<Vec<Value>>,
}

impl DataTable {
    /// Builds a table, checking arity, name uniqueness, cell types and
    /// finiteness.
    pub fn new(columns: Vec<Column>, rows: Vec<Vec<Value>>) -> Result<Self, DataError> {
        let mut seen = HashSet::new();
        for c in &columns {
            if c.name.is_empty() {
                return Err(DataError::InvalidTable("empty column name".into()));
            }
            if !seen.insert(c.name.as_str()) {
                return Err(DataError::InvalidTable(format!("duplicate column `{}`", c.name)));
            }
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(DataError::InvalidTable(format!(
                    "row {i} has {} values, expected {}",
                    row.len(),
                    columns.len()
                )));
            }
            for (v, c) in row.iter().zip(&columns) {
                match (v, c.ty) {
                    (Value::Null, _) => {}
                    (Value::Number(n), ColumnType::Number) if n.is_finite() => {}
                    (Value::String(_), ColumnType::String) | (Value::Temporal(_), ColumnType::Temporal) => {}
                    _ => {
                        return Err(DataError::TypeConflict {
                            column: c.name.clone(),
                            row: i,
                            value: format!("{v:?}"),
                            expected: c.ty,
                        })
                    }
                }
            }
        }
        Ok(Self { columns, rows })
    }

    pub fn empty() -> Self {
        Self { columns: Vec::new(), rows: Vec::new() }
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column_type(&self, name: &str) -> Option<ColumnType> {
        self.column_index(name).map(|i| self.columns[i].ty)
    }

    pub fn value(&self, row: usize, column: usize) -> &Value {
        &self.rows[row][column]
    }

    /// All cells of one column in row order.
    pub fn column_values(&self, column: usize) -> impl Iterator<Item = &Value> + '_ {
        self.rows.iter().map(move |r| &r[column])
    }

    pub fn schema(&self) -> Schema {
        Schema::new(self.columns.iter().map(|c| (c.name.clone(), c.ty)))
    }

    /// RFC 4180 serialization with a header row; nulls become empty cells.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        if !self.columns.is_empty() {
            w.write_record(self.columns.iter().map(|c| c.name.as_str()))
                .expect("in-memory write");
        }
        for row in &self.rows {
            w.write_record(row.iter().map(Value::display)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    pub fn from_csv_str(text: &str, hints: &HashMap<String, ColumnType>) -> Result<Self, DataError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .from_reader(text.as_bytes());
        let header: Vec<String> = rdr
            .headers()
            .map_err(|e| DataError::MalformedCsv(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        if header.len() == 1 && header[0].is_empty() {
            return Ok(Self::empty());
        }
        let mut raw: Vec<Vec<String>> = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| DataError::MalformedCsv(e.to_string()))?;
            raw.push(rec.iter().map(str::to_string).collect());
        }

        let mut columns = Vec::with_capacity(header.len());
        for (ci, name) in header.iter().enumerate() {
            let cells = raw.iter().map(|r| r[ci].as_str());
            let ty = match hints.get(name) {
                Some(&hint) => {
                    for (ri, cell) in cells.enumerate() {
                        if !cell.is_empty() && !cell_matches(cell, hint) {
                            return Err(DataError::TypeConflict {
                                column: name.clone(),
                                row: ri,
                                value: cell.to_string(),
                                expected: hint,
                            });
                        }
                    }
                    hint
                }
                None => infer_type(cells),
            };
            columns.push(Column { name: name.clone(), ty });
        }

        let rows = raw
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .zip(&columns)
                    .map(|(cell, c)| convert_cell(&cell, c.ty))
                    .collect()
            })
            .collect();
        Self::new(columns, rows)
    }

    /// Builds a table from a JSON array of flat objects. The union of keys,
    /// in first-seen order, becomes the column list.
    pub fn from_json_rows(rows: &[serde_json::Value]) -> Result<Self, DataError> {
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        for (ri, row) in rows.iter().enumerate() {
            let obj = row
                .as_object()
                .ok_or_else(|| DataError::MalformedJson(format!("row {ri} is not an object")))?;
            for (k, v) in obj {
                if v.is_object() || v.is_array() {
                    return Err(DataError::NestedObject { row: ri, column: k.clone() });
                }
                if !index.contains_key(k) {
                    index.insert(k.clone(), names.len());
                    names.push(k.clone());
                }
            }
        }

        let mut columns = Vec::with_capacity(names.len());
        for name in &names {
            let mut saw_number = false;
            let mut saw_string = false;
            let mut all_temporal = true;
            for (ri, row) in rows.iter().enumerate() {
                match row.get(name) {
                    Some(serde_json::Value::Number(_)) => saw_number = true,
                    Some(serde_json::Value::String(s)) => {
                        saw_string = true;
                        all_temporal &= parse_temporal(s).is_some();
                    }
                    Some(serde_json::Value::Bool(_)) => {
                        saw_string = true;
                        all_temporal = false;
                    }
                    _ => {}
                }
                if saw_number && saw_string {
                    return Err(DataError::TypeConflict {
                        column: name.clone(),
                        row: ri,
                        value: row[name].to_string(),
                        expected: ColumnType::Number,
                    });
                }
            }
            let ty = if saw_number {
                ColumnType::Number
            } else if saw_string && all_temporal {
                ColumnType::Temporal
            } else {
                ColumnType::String
            };
            columns.push(Column { name: name.clone(), ty });
        }

        let mut out = Vec::with_capacity(rows.len());
        for (ri, row) in rows.iter().enumerate() {
            let mut vals = Vec::with_capacity(columns.len());
            for c in &columns {
                let v = match row.get(&c.name) {
                    None | Some(serde_json::Value::Null) => Value::Null,
                    Some(serde_json::Value::Number(n)) => match n.as_f64().filter(|f| f.is_finite()) {
                        Some(f) => Value::Number(f),
                        None => {
                            return Err(DataError::TypeConflict {
                                column: c.name.clone(),
                                row: ri,
                                value: n.to_string(),
                                expected: ColumnType::Number,
                            })
                        }
                    },
                    Some(serde_json::Value::String(s)) => match c.ty {
                        ColumnType::Temporal => Value::Temporal(parse_temporal(s).expect("checked above")),
                        _ => Value::String(s.clone()),
                    },
                    Some(serde_json::Value::Bool(b)) => Value::String(b.to_string()),
                    Some(_) => unreachable!("nested values rejected above"),
                };
                vals.push(v);
            }
            out.push(vals);
        }
        Self::new(columns, out)
    }
}

fn cell_matches(cell: &str, ty: ColumnType) -> bool {
    match ty {
        ColumnType::Number => parse_number(cell).is_some(),
        ColumnType::Temporal => parse_temporal(cell).is_some(),
        ColumnType::String => true,
    }
}

/// Number if every non-empty cell is numeric, temporal if every non-empty
/// cell is ISO-8601, string otherwise (including all-empty columns).
fn infer_type<'a>(cells: impl Iterator<Item = &'a str> + Clone) -> ColumnType {
    let mut non_empty = cells.filter(|c| !c.is_empty()).peekable();
    if non_empty.peek().is_none() {
        return ColumnType::String;
    }
    if non_empty.clone().all(|c| cell_matches(c, ColumnType::Number)) {
        ColumnType::Number
    } else if non_empty.all(|c| cell_matches(c, ColumnType::Temporal)) {
        ColumnType::Temporal
    } else {
        ColumnType::String
    }
}

fn convert_cell(cell: &str, ty: ColumnType) -> Value {
    if cell.is_empty() {
        return Value::Null;
    }
    match ty {
        ColumnType::Number => Value::Number(parse_number(cell).expect("validated")),
        ColumnType::Temporal => Value::Temporal(parse_temporal(cell).expect("validated")),
        ColumnType::String => Value::String(cell.to_string()),
    }
}

fn read_file(path: &Path) -> Result<String, DataError> {
    std::fs::read_to_string(path).map_err(|e| DataError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn load_csv(path: &Path, type_hints: &HashMap<String, ColumnType>) -> Result<DataTable, DataError> {
    DataTable::from_csv_str(&read_file(path)?, type_hints)
}

pub fn load_json_rows(path: &Path) -> Result<DataTable, DataError> {
    let text = read_file(path)?;
    let doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| DataError::MalformedJson(e.to_string()))?;
    match doc {
        serde_json::Value::Array(rows) => DataTable::from_json_rows(&rows),
        _ => Err(DataError::MalformedJson("top level must be an array of objects".into())),
    }
}

/// Loads CSV or JSON based on the file extension (`.json` → rows, else CSV).
pub fn load_path(path: &Path) -> Result<DataTable, DataError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => load_json_rows(path),
        _ => load_csv(path, &HashMap::new()),
    }
}

/// Column name → type mapping used for expression type checking.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Schema {
    fields: Vec<(String, ColumnType)>,
}

impl Schema {
    pub fn new(fields: impl IntoIterator<Item = (String, ColumnType)>) -> Self {
        Self { fields: fields.into_iter().collect() }
    }

    pub fn get(&self, name: &str) -> Option<ColumnType> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, t)| *t)
    }

    pub fn fields(&self) -> &[(String, ColumnType)] {
        &self.fields
    }
}
