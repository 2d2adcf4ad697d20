use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Output serialization of a [`ResultTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Json,
}

impl TableFormat {
    pub fn extension(self) -> &'static str {
        match self {
            TableFormat::Csv => "csv",
            TableFormat::Json => "json",
        }
    }

    pub fn from_path(path: &Path) -> Option<TableFormat> {
        match path.extension()?.to_str()? {
            "csv" => Some(TableFormat::Csv),
            "json" => Some(TableFormat::Json),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Number(f64),
    Text(String),
    Missing,
}

impl Cell {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Cell::Number(x) => Some(*x),
            _ => None,
        }
    }

    fn to_csv_field(&self) -> String {
        match self {
            Cell::Number(x) => format_number(*x),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn from_csv_field(field: &str) -> Cell {
        if field.is_empty() {
            Cell::Missing
        } else if let Ok(x) = field.parse::<f64>() {
            Cell::Number(x)
        } else {
            Cell::Text(field.to_string())
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::Number(x) if x.is_finite() => serde_json::Value::from(*x),
            Cell::Number(x) => serde_json::Value::from(format_number(*x)),
            Cell::Text(s) => serde_json::Value::from(s.as_str()),
            Cell::Missing => serde_json::Value::Null,
        }
    }

    fn from_json(value: &serde_json::Value) -> Option<Cell> {
        match value {
            serde_json::Value::Null => Some(Cell::Missing),
            serde_json::Value::Number(n) => n.as_f64().map(Cell::Number),
            serde_json::Value::String(s) => Some(match s.as_str() {
                "NaN" | "inf" | "-inf" => Cell::Number(s.parse().expect("special float")),
                _ => Cell::Text(s.clone()),
            }),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Number(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Number)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// 17 significant digits; parses back to the identical double.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header plus rows of cells, with free-form metadata.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub metadata: BTreeMap<String, String>,
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        ResultTable {
            metadata: BTreeMap::new(),
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Appends a row; panics if its width differs from the header.
    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.header.len(),
            "row width {} does not match {} columns",
            row.len(),
            self.header.len()
        );
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Numeric values of a column; `None` if the column is missing.
    pub fn numeric_column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i].as_number()).collect())
    }

    /// CSV with `# key: value` metadata lines first (if any), then the
    /// header and one `\n`-terminated line per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.metadata {
            out.push_str("# ");
            out.push_str(key);
            out.push_str(": ");
            out.push_str(&value.replace('\n', " "));
            out.push('\n');
        }
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            writer
                .write_record(row.iter().map(Cell::to_csv_field))
                .expect("in-memory write");
        }
        let bytes = writer.into_inner().expect("in-memory flush");
        out.push_str(std::str::from_utf8(&bytes).expect("fields are UTF-8"));
        out
    }

    pub fn from_csv(text: &str) -> std::result::Result<ResultTable, String> {
        let mut metadata = BTreeMap::new();
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            let Some(comment) = line.strip_prefix('#') else {
                break;
            };
            let comment = comment.trim_end_matches(['\n', '\r']);
            let comment = comment.strip_prefix(' ').unwrap_or(comment);
            let (key, value) = comment
                .split_once(": ")
                .ok_or_else(|| format!("metadata line without `key: value`: {comment}"))?;
            metadata.insert(key.to_string(), value.to_string());
            body_start += line.len();
        }
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text[body_start..].as_bytes());
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| e.to_string())?
            .iter()
            .map(String::from)
            .collect();
        let mut table = ResultTable {
            metadata,
            header,
            rows: Vec::new(),
        };
        for record in reader.records() {
            let record = record.map_err(|e| e.to_string())?;
            table
                .rows
                .push(record.iter().map(Cell::from_csv_field).collect());
        }
        Ok(table)
    }

    pub fn to_json(&self) -> String {
        let value = serde_json::json!({
            "metadata": self.metadata,
            "columns": self.header,
            "rows": self.rows.iter()
                .map(|r| r.iter().map(Cell::to_json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        });
        let mut text = serde_json::to_string_pretty(&value).expect("table serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> std::result::Result<ResultTable, String> {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(default)]
            metadata: BTreeMap<String, String>,
            columns: Vec<String>,
            rows: Vec<Vec<serde_json::Value>>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let rows = raw
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                if r.len() != raw.columns.len() {
                    return Err(format!("row {i} has {} cells, expected {}", r.len(), raw.columns.len()));
                }
                r.iter()
                    .map(|v| Cell::from_json(v).ok_or_else(|| format!("row {i}: unsupported cell {v}")))
                    .collect()
            })
            .collect::<std::result::Result<_, _>>()?;
        Ok(ResultTable {
            metadata: raw.metadata,
            header: raw.columns,
            rows,
        })
    }

    pub fn render(&self, format: TableFormat) -> String {
        match format {
            TableFormat::Csv => self.to_csv(),
            TableFormat::Json => self.to_json(),
        }
    }

    pub fn parse(text: &str, format: TableFormat) -> std::result::Result<ResultTable, String> {
        match format {
            TableFormat::Csv => ResultTable::from_csv(text),
            TableFormat::Json => ResultTable::from_json(text),
        }
    }
}

/// Writes `table` to `path`, replacing any existing file.
pub fn write_results(table: &ResultTable, format: TableFormat, path: &Path) -> Result<()> {
    std::fs::write(path, table.render(format)).map_err(|e| Error::io(path, e))
}

/// Reads a table, choosing the format by extension (CSV by default).
pub fn read_results(path: &Path) -> Result<ResultTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let format = TableFormat::from_path(path).unwrap_or(TableFormat::Csv);
    ResultTable::parse(&text, format).map_err(|message| Error::Table {
        path: path.to_path_buf(),
        message,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultTable {
        let mut t = ResultTable::new(["t", "h", "note"])
            .with_metadata("version", "test 0.0")
            .with_metadata("config", "{\"a\":0.9}");
        t.push_row(vec![(-1250.0).into(), (-5.0).into(), "start".into()]);
        t.push_row(vec![0.1.into(), (1.0 / 3.0).into(), Cell::Missing]);
        t.push_row(vec![f64::MIN_POSITIVE.into(), 1e300.into(), "a, \"quoted\" note".into()]);
        t
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let t = sample();
        assert_eq!(ResultTable::from_csv(&t.to_csv()).unwrap(), t);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let t = sample();
        assert_eq!(ResultTable::from_json(&t.to_json()).unwrap(), t);
        let mut odd = ResultTable::new(["x"]);
        odd.push_row(vec![f64::INFINITY.into()]);
        assert_eq!(ResultTable::from_json(&odd.to_json()).unwrap(), odd);
    }

    #[test]
    fn numbers_keep_seventeen_digits() {
        assert_eq!(format_number(0.1), "1.0000000000000001e-1");
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789] {
            assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = ResultTable::new(["r", "tau", "a"]);
        assert_eq!(t.to_csv(), "r,tau,a\n");
    }

    #[test]
    fn line_count_is_rows_plus_header() {
        let mut t = ResultTable::new(["t", "h", "D_abs", "C", "QD"]);
        for j in 0..2000 {
            t.push_row(vec![Cell::Number(j as f64); 5]);
        }
        let csv = t.to_csv();
        assert_eq!(csv.lines().count(), 2001);
        assert!(csv.ends_with('\n'));
        assert!(csv.starts_with("t,h,D_abs,C,QD\n"));
    }

    #[test]
    #[should_panic(expected = "row width")]
    fn ragged_rows_are_rejected() {
        ResultTable::new(["a", "b"]).push_row(vec![1.0.into()]);
    }

    #[test]
    fn file_round_trip_and_io_errors() {
        let dir = tempfile::tempdir().unwrap();
        let t = sample();
        for format in [TableFormat::Csv, TableFormat::Json] {
            let path = dir.path().join(format!("t.{}", format.extension()));
            write_results(&t, format, &path).unwrap();
            assert_eq!(read_results(&path).unwrap(), t);
        }
        let missing = dir.path().join("nope").join("t.csv");
        let err = write_results(&t, TableFormat::Csv, &missing).unwrap_err();
        assert!(err.to_string().contains("nope"), "{err}");
    }
}
