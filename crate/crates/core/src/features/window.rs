use chrono::Datelike;

use crate::error::{Error, Result};
use crate::series::TSFrame;
use crate::table::{Column, FeatureTable};
use crate::transformer::{Data, Filter};

/// Name of the prediction target column produced by [`matrify`].
pub const TARGET_COLUMN: &str = "target";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowConfig {
    pub size: usize,
    pub stride: usize,
    /// Steps between the window's last element and the target.
    pub ahead: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            size: 24,
            stride: 1,
            ahead: 1,
        }
    }
}

impl WindowConfig {
    pub fn new(size: usize, stride: usize, ahead: usize) -> Result<Self> {
        if size == 0 || stride == 0 || ahead == 0 {
            return Err(Error::Config("window size, stride and ahead must be at least 1".into()));
        }
        Ok(WindowConfig { size, stride, ahead })
    }

    /// Number of windows over a series of length `n`.
    pub fn row_count(&self, n: usize) -> usize {
        if n < self.size + self.ahead {
            0
        } else {
            (n - self.size - self.ahead) / self.stride + 1
        }
    }

    /// Zero-based source indices of window `row` and its target.
    fn offsets(&self, row: usize) -> (usize, usize) {
        let o = row * self.stride;
        (o, o + self.size - 1 + self.ahead)
    }
}

fn complete_values(ts: &TSFrame) -> Result<Vec<f64>> {
    ts.values()
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::Schema(format!("value at row {} is missing; impute first", i + 1))))
        .collect()
}

/// Sliding windows over the value column: row `j` holds
/// `v[j*stride .. j*stride+size]` in columns `v1..vsize` and the value
/// `ahead` steps past the window in the last column.
pub fn matrify(ts: &TSFrame, cfg: &WindowConfig) -> Result<FeatureTable> {
    let values = complete_values(ts)?;
    let rows = cfg.row_count(values.len());
    if rows == 0 {
        return Err(Error::InsufficientData(format!(
            "series of length {} is shorter than size + ahead = {}",
            values.len(),
            cfg.size + cfg.ahead
        )));
    }
    let mut columns: Vec<Vec<Option<f64>>> = vec![Vec::with_capacity(rows); cfg.size + 1];
    for j in 0..rows {
        let (o, target) = cfg.offsets(j);
        for (c, col) in columns.iter_mut().take(cfg.size).enumerate() {
            col.push(Some(values[o + c]));
        }
        columns[cfg.size].push(Some(values[target]));
    }
    let mut names: Vec<String> = (1..=cfg.size).map(|i| format!("v{i}")).collect();
    names.push(TARGET_COLUMN.to_string());
    FeatureTable::new(names, columns.into_iter().map(Column::Numeric).collect(), None)
}

pub const DATE_FEATURES: [&str; 8] = [
    "year",
    "month",
    "day",
    "hour",
    "minute",
    "dayofweek",
    "dayofyear",
    "weekofyear",
];

/// Calendar components per row; `dayofweek` runs Monday = 1 to Sunday = 7
/// and `weekofyear` is the ISO week.
pub fn dateify(ts: &TSFrame) -> FeatureTable {
    let mut columns: Vec<Vec<Option<f64>>> = vec![Vec::with_capacity(ts.len()); DATE_FEATURES.len()];
    for row in ts.rows() {
        let d = row.ts.naive();
        let parts = [
            d.year() as f64,
            d.month() as f64,
            d.day() as f64,
            row.ts.hour() as f64,
            row.ts.minute() as f64,
            d.weekday().number_from_monday() as f64,
            d.ordinal() as f64,
            d.iso_week().week() as f64,
        ];
        for (c, p) in columns.iter_mut().zip(parts) {
            c.push(Some(p));
        }
    }
    FeatureTable::new(
        DATE_FEATURES.iter().map(|s| s.to_string()).collect(),
        columns.into_iter().map(Column::Numeric).collect(),
        None,
    )
    .expect("fixed schema")
}

/// Date features of each window's target timestamp joined with the value
/// windows, target column last.
pub fn date_value_matrix(ts: &TSFrame, cfg: &WindowConfig) -> Result<FeatureTable> {
    let windows = matrify(ts, cfg)?;
    let targets: Vec<usize> = (0..windows.nrows()).map(|j| cfg.offsets(j).1).collect();
    let target_rows = TSFrame::new(targets.iter().map(|&i| ts.rows()[i]).collect());
    dateify(&target_rows).hconcat(&windows)
}

/// Stateless filter form of [`matrify`].
#[derive(Debug, Clone, Default)]
pub struct Matrifier {
    config: WindowConfig,
}

impl Matrifier {
    pub fn new(config: WindowConfig) -> Self {
        Matrifier { config }
    }
}

impl Filter for Matrifier {
    fn name(&self) -> &str {
        "matrifier"
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
    fn transform(&self, input: &Data) -> Result<Data> {
        matrify(input.as_series()?, &self.config).map(Data::Table)
    }
    fn clone_box(&self) -> Box<dyn Filter> {
        Box::new(self.clone())
    }
}

/// Stateless filter: windows plus date features of each target.
#[derive(Debug, Clone, Default)]
pub struct Dateifier {
    config: WindowConfig,
}

impl Dateifier {
    pub fn new(config: WindowConfig) -> Self {
        Dateifier { config }
    }
}

impl Filter for Dateifier {
    fn name(&self) -> &str {
        "dateifier"
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
    fn transform(&self, input: &Data) -> Result<Data> {
        date_value_matrix(input.as_series()?, &self.config).map(Data::Table)
    }
    fn clone_box(&self) -> Box<dyn Filter> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::{DateInterval, TimeStamp};

    fn series(n: usize) -> TSFrame {
        let v: Vec<Option<f64>> = (1..=n).map(|i| Some(i as f64)).collect();
        TSFrame::regular(TimeStamp::new(2014, 1, 1, 0, 0, 0).unwrap(), DateInterval::hour(), &v)
    }

    fn rows(t: &FeatureTable) -> Vec<Vec<f64>> {
        t.numeric_rows().unwrap()
    }

    #[test]
    fn stride_one() {
        let t = matrify(&series(6), &WindowConfig::new(3, 1, 1).unwrap()).unwrap();
        assert_eq!(
            rows(&t),
            vec![
                vec![1.0, 2.0, 3.0, 4.0],
                vec![2.0, 3.0, 4.0, 5.0],
                vec![3.0, 4.0, 5.0, 6.0]
            ]
        );
        assert_eq!(t.names(), &["v1", "v2", "v3", "target"]);
    }

    #[test]
    fn stride_two() {
        let t = matrify(&series(7), &WindowConfig::new(2, 2, 1).unwrap()).unwrap();
        assert_eq!(
            rows(&t),
            vec![vec![1.0, 2.0, 3.0], vec![3.0, 4.0, 5.0], vec![5.0, 6.0, 7.0]]
        );
    }

    #[test]
    fn boundary_single_row_and_too_short() {
        let t = matrify(&series(5), &WindowConfig::new(4, 1, 1).unwrap()).unwrap();
        assert_eq!(t.nrows(), 1);
        assert!(matches!(
            matrify(&series(4), &WindowConfig::new(4, 1, 1).unwrap()),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn calendar_fields() {
        let ts = TimeStamp::new(2014, 1, 1, 0, 6, 0).unwrap();
        let t = dateify(&TSFrame::new(vec![crate::series::Observation::new(ts, Some(1.0))]));
        assert_eq!(rows(&t)[0], vec![2014.0, 1.0, 1.0, 0.0, 6.0, 3.0, 1.0, 1.0]);
        let eoy = TimeStamp::new(2015, 12, 31, 0, 0, 0).unwrap();
        let t = dateify(&TSFrame::new(vec![crate::series::Observation::new(eoy, None)]));
        assert_eq!(rows(&t)[0][6], 365.0);
        assert_eq!((rows(&t)[0][3], rows(&t)[0][4]), (0.0, 0.0));
    }

    #[test]
    fn date_matrix_aligns_with_targets() {
        let t = date_value_matrix(&series(6), &WindowConfig::new(3, 1, 1).unwrap()).unwrap();
        assert_eq!(t.ncols(), 8 + 4);
        let r = rows(&t);
        // first target is v=4 at 03:00
        assert_eq!(r[0][3], 3.0);
        assert_eq!(r[0][11], 4.0);
    }
}
