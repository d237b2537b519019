//! Named-column feature tables with an optional trailing label column.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Name used for the label column when a table is written as CSV.
pub const LABEL_COLUMN: &str = "label";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Column {
    Numeric(Vec<Option<f64>>),
    Categorical(Vec<Option<String>>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, Column::Numeric(_))
    }

    fn select(&self, rows: &[usize]) -> Column {
        match self {
            Column::Numeric(v) => Column::Numeric(rows.iter().map(|&i| v[i]).collect()),
            Column::Categorical(v) => Column::Categorical(rows.iter().map(|&i| v[i].clone()).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureTable {
    names: Vec<String>,
    columns: Vec<Column>,
    labels: Option<Vec<String>>,
    nrows: usize,
}

impl FeatureTable {
    pub fn new(names: Vec<String>, columns: Vec<Column>, labels: Option<Vec<String>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::LengthMismatch {
                left: names.len(),
                right: columns.len(),
            });
        }
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::Schema(format!("duplicate column name {n:?}")));
            }
            if n == LABEL_COLUMN && labels.is_some() {
                return Err(Error::Schema(format!(
                    "feature column may not be named {LABEL_COLUMN:?}"
                )));
            }
        }
        let nrows = columns
            .first()
            .map(Column::len)
            .or_else(|| labels.as_ref().map(Vec::len))
            .unwrap_or(0);
        for c in &columns {
            if c.len() != nrows {
                return Err(Error::LengthMismatch {
                    left: nrows,
                    right: c.len(),
                });
            }
        }
        if let Some(l) = &labels {
            if l.len() != nrows {
                return Err(Error::LengthMismatch {
                    left: nrows,
                    right: l.len(),
                });
            }
        }
        Ok(FeatureTable {
            names,
            columns,
            labels,
            nrows,
        })
    }

    /// All-numeric table from row-major values.
    pub fn from_rows(names: Vec<String>, rows: &[Vec<f64>], labels: Option<Vec<String>>) -> Result<Self> {
        let mut columns = vec![Vec::with_capacity(rows.len()); names.len()];
        for row in rows {
            if row.len() != names.len() {
                return Err(Error::LengthMismatch {
                    left: names.len(),
                    right: row.len(),
                });
            }
            for (c, v) in columns.iter_mut().zip(row) {
                c.push(if v.is_nan() { None } else { Some(*v) });
            }
        }
        let mut table = Self::new(names, columns.into_iter().map(Column::Numeric).collect(), labels)?;
        table.nrows = rows.len();
        Ok(table)
    }

    /// A table with no feature columns and `nrows` rows.
    pub fn empty_rows(nrows: usize) -> Self {
        FeatureTable {
            names: Vec::new(),
            columns: Vec::new(),
            labels: None,
            nrows,
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.names.iter().position(|n| n == name).map(|i| &self.columns[i])
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn with_labels(mut self, labels: Option<Vec<String>>) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != self.nrows {
                return Err(Error::LengthMismatch {
                    left: self.nrows,
                    right: l.len(),
                });
            }
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn without_labels(&self) -> Self {
        FeatureTable {
            labels: None,
            ..self.clone()
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        FeatureTable {
            names: self.names.clone(),
            columns: self.columns.iter().map(|c| c.select(rows)).collect(),
            labels: self
                .labels
                .as_ref()
                .map(|l| rows.iter().map(|&i| l[i].clone()).collect()),
            nrows: rows.len(),
        }
    }

    /// Appends the columns of `other` (same row count) after this table's.
    pub fn hconcat(&self, other: &FeatureTable) -> Result<Self> {
        if self.nrows != other.nrows {
            return Err(Error::LengthMismatch {
                left: self.nrows,
                right: other.nrows,
            });
        }
        let mut names = self.names.clone();
        names.extend(other.names.iter().cloned());
        let mut columns = self.columns.clone();
        columns.extend(other.columns.iter().cloned());
        let labels = self.labels.clone().or_else(|| other.labels.clone());
        let mut t = Self::new(names, columns, labels)?;
        t.nrows = self.nrows;
        Ok(t)
    }

    /// Row-major numeric matrix; missing entries become NaN. Fails on
    /// categorical columns.
    pub fn numeric_rows(&self) -> Result<Vec<Vec<f64>>> {
        let mut rows = vec![Vec::with_capacity(self.ncols()); self.nrows];
        for (name, col) in self.names.iter().zip(&self.columns) {
            match col {
                Column::Numeric(v) => {
                    for (row, x) in rows.iter_mut().zip(v) {
                        row.push(x.unwrap_or(f64::NAN));
                    }
                }
                Column::Categorical(_) => {
                    return Err(Error::Schema(format!(
                        "column {name:?} is categorical; encode it before training"
                    )))
                }
            }
        }
        Ok(rows)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        let mut header: Vec<&str> = self.names.iter().map(String::as_str).collect();
        if self.labels.is_some() {
            header.push(LABEL_COLUMN);
        }
        w.write_record(&header).map_err(csv_err)?;
        for i in 0..self.nrows {
            let mut rec: Vec<String> = self
                .columns
                .iter()
                .map(|c| match c {
                    Column::Numeric(v) => v[i].map(|x| x.to_string()).unwrap_or_default(),
                    Column::Categorical(v) => v[i].clone().unwrap_or_default(),
                })
                .collect();
            if let Some(l) = &self.labels {
                rec.push(l[i].clone());
            }
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io("<table>", e))?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    /// Reads a CSV table. A final column named `label` becomes the label
    /// vector; a column is numeric when every non-empty cell parses as a
    /// number (`NaN` counts as missing).
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        let mut raw: Vec<Vec<String>> = vec![Vec::new(); header.len()];
        for rec in r.records() {
            let rec = rec.map_err(csv_err)?;
            for (col, cell) in raw.iter_mut().zip(rec.iter()) {
                col.push(cell.trim().to_string());
            }
        }
        let has_labels = header.last().map(|h| h == LABEL_COLUMN).unwrap_or(false);
        let feature_count = if has_labels { header.len() - 1 } else { header.len() };
        let nrows = raw.first().map(Vec::len).unwrap_or(0);
        let mut columns = Vec::with_capacity(feature_count);
        for cells in raw.iter().take(feature_count) {
            let parsed: Option<Vec<Option<f64>>> = cells
                .iter()
                .map(|c| {
                    if c.is_empty() || c.eq_ignore_ascii_case("nan") || c.eq_ignore_ascii_case("na") {
                        Some(None)
                    } else {
                        c.parse::<f64>().ok().map(Some)
                    }
                })
                .collect();
            columns.push(match parsed {
                Some(v) => Column::Numeric(v),
                None => Column::Categorical(
                    cells
                        .iter()
                        .map(|c| if c.is_empty() { None } else { Some(c.clone()) })
                        .collect(),
                ),
            });
        }
        let labels = if has_labels { raw.pop() } else { None };
        let mut t = Self::new(header[..feature_count].to_vec(), columns, labels)?;
        t.nrows = nrows;
        Ok(t)
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(std::io::BufReader::new(file))
    }
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io("<csv>", io),
        other => Error::Parse {
            line,
            message: format!("{other:?}"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_and_ragged_columns() {
        let dup = FeatureTable::new(
            vec!["a".into(), "a".into()],
            vec![Column::Numeric(vec![Some(1.0)]), Column::Numeric(vec![Some(2.0)])],
            None,
        );
        assert!(matches!(dup, Err(Error::Schema(_))));
        let ragged = FeatureTable::new(
            vec!["a".into(), "b".into()],
            vec![Column::Numeric(vec![Some(1.0)]), Column::Numeric(vec![])],
            None,
        );
        assert!(matches!(ragged, Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn csv_round_trip_keeps_labels_last() {
        let t = FeatureTable::new(
            vec!["x".into(), "color".into()],
            vec![
                Column::Numeric(vec![Some(1.5), None]),
                Column::Categorical(vec![Some("red".into()), None]),
            ],
            Some(vec!["a".into(), "b".into()]),
        )
        .unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "x,color,label\n1.5,red,a\n,,b\n");
        let back = FeatureTable::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn numeric_rows_reject_categorical() {
        let t = FeatureTable::new(
            vec!["c".into()],
            vec![Column::Categorical(vec![Some("a".into())])],
            None,
        )
        .unwrap();
        assert!(matches!(t.numeric_rows(), Err(Error::Schema(_))));
    }
}
