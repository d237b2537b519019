//! Two-column `date,value` CSV reading and writing.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::series::{Observation, TSFrame};
use crate::time::DateFormat;
use crate::transformer::{Data, Filter};

pub const HEADER: [&str; 2] = ["Date", "Value"];

/// Reads a series from any reader. A first row whose date field does not
/// parse and contains no digits is taken as a header and skipped.
pub fn read_datetime<R: Read>(reader: R, fmt: &DateFormat) -> Result<TSFrame> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::io("<csv>", io),
                other => Error::Parse {
                    line,
                    message: format!("{other:?}"),
                },
            }
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(i as u64 + 1);
        let date_field = rec.get(0).unwrap_or("");
        let ts = match fmt.parse(date_field) {
            Some(ts) => ts,
            None if i == 0 && !date_field.chars().any(|c| c.is_ascii_digit()) => continue,
            None => {
                return Err(Error::Parse {
                    line,
                    message: format!("date {date_field:?} does not match format {:?}", fmt.pattern()),
                })
            }
        };
        let value = rec.get(1).and_then(|v| v.parse::<f64>().ok()).filter(|v| v.is_finite());
        rows.push(Observation::new(ts, value));
    }
    Ok(TSFrame::new(rows))
}

pub fn read_csv_datetime(path: &Path, fmt: &DateFormat) -> Result<TSFrame> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_datetime(std::io::BufReader::new(file), fmt).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Writes `Date,Value` header plus one row per observation; missing values
/// leave the value field empty.
pub fn write_datetime<W: Write>(frame: &TSFrame, mut writer: W, fmt: &DateFormat) -> std::io::Result<()> {
    writeln!(writer, "{},{}", HEADER[0], HEADER[1])?;
    for row in frame.rows() {
        match row.value {
            Some(v) => writeln!(writer, "{},{}", fmt.format(&row.ts), v)?,
            None => writeln!(writer, "{},", fmt.format(&row.ts))?,
        }
    }
    writer.flush()
}

pub fn write_csv_datetime(frame: &TSFrame, path: &Path, fmt: &DateFormat) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_datetime(frame, std::io::BufWriter::new(file), fmt).map_err(|e| Error::io(path, e))
}

/// Source filter: ignores its input and yields the series stored in a file.
#[derive(Debug, Clone)]
pub struct CsvDateValReader {
    path: PathBuf,
    format: DateFormat,
}

impl CsvDateValReader {
    pub fn new(path: impl Into<PathBuf>, format: DateFormat) -> Self {
        CsvDateValReader {
            path: path.into(),
            format,
        }
    }
}

impl Filter for CsvDateValReader {
    fn name(&self) -> &str {
        "csvdatevalreader"
    }
    fn is_stateless(&self) -> bool {
        true
    }
    fn is_fitted(&self) -> bool {
        true
    }
    fn fit(&self, _input: &Data) -> Result<Box<dyn Filter>> {
        Ok(Box::new(self.clone()))
    }
    fn transform(&self, _input: &Data) -> Result<Data> {
        read_csv_datetime(&self.path, &self.format).map(Data::Series)
    }
    fn clone_box(&self) -> Box<dyn Filter> {
        Box::new(self.clone())
    }
}
