use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::series::TSFrame;
use crate::stats;
use crate::table::{Column, FeatureTable};
use crate::transformer::{Data, Filter};

/// Names of the value statistics, in output order.
pub const VALUE_STATS: [&str; 11] = [
    "count", "mean", "std", "min", "q25", "median", "q75", "max", "skewness", "kurtosis", "ac1",
];

/// Names of the missing-block statistics, in output order.
pub const BLOCK_STATS: [&str; 7] = ["bcount", "bmean", "bmin", "bq25", "bmedian", "bq75", "bmax"];

/// Version tag of the statistic set; stored with trained models.
pub const STAT_SCHEMA_VERSION: &str = "stats-v1";

/// Full feature schema with block statistics.
pub fn stat_names(processmissing: bool) -> Vec<String> {
    let mut names: Vec<String> = VALUE_STATS.iter().map(|s| s.to_string()).collect();
    if processmissing {
        names.extend(BLOCK_STATS.iter().map(|s| s.to_string()));
    }
    names
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueStats {
    pub count: f64,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub ac1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockStats {
    pub bcount: f64,
    pub bmean: f64,
    pub bmin: f64,
    pub bq25: f64,
    pub bmedian: f64,
    pub bq75: f64,
    pub bmax: f64,
}

impl BlockStats {
    pub fn is_empty_set(&self) -> bool {
        self.bcount == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatVector {
    pub values: ValueStats,
    /// `None` when missing blocks were not processed.
    pub blocks: Option<BlockStats>,
}

impl StatVector {
    /// `(name, value)` pairs in schema order.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        let v = &self.values;
        let mut out = vec![
            ("count", v.count),
            ("mean", v.mean),
            ("std", v.std),
            ("min", v.min),
            ("q25", v.q25),
            ("median", v.median),
            ("q75", v.q75),
            ("max", v.max),
            ("skewness", v.skewness),
            ("kurtosis", v.kurtosis),
            ("ac1", v.ac1),
        ];
        if let Some(b) = &self.blocks {
            out.extend([
                ("bcount", b.bcount),
                ("bmean", b.bmean),
                ("bmin", b.bmin),
                ("bq25", b.bq25),
                ("bmedian", b.bmedian),
                ("bq75", b.bq75),
                ("bmax", b.bmax),
            ]);
        }
        out
    }

    pub fn names(&self) -> Vec<String> {
        self.entries().iter().map(|(n, _)| n.to_string()).collect()
    }

    pub fn to_row(&self) -> Vec<f64> {
        self.entries().iter().map(|(_, v)| *v).collect()
    }

    /// Single-row table; NaN statistics become missing cells.
    pub fn to_table(&self) -> FeatureTable {
        FeatureTable::from_rows(self.names(), &[self.to_row()], None).expect("consistent schema")
    }

    /// JSON record in schema order. NaN renders as `null`; when block
    /// statistics are present an `empty_block_set` flag follows them.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (name, v) in self.entries() {
            let value = if v.is_finite() {
                if v.fract() == 0.0 && v.abs() < 1e15 && (name == "count" || name == "bcount") {
                    Value::from(v as i64)
                } else {
                    serde_json::Number::from_f64(v)
                        .map(Value::Number)
                        .unwrap_or(Value::Null)
                }
            } else {
                Value::Null
            };
            map.insert(name.to_string(), value);
        }
        if let Some(b) = &self.blocks {
            map.insert("empty_block_set".into(), Value::Bool(b.is_empty_set()));
        }
        Value::Object(map)
    }
}

/// Lengths of maximal runs of missing values, in order of occurrence.
pub fn missing_blocks(ts: &TSFrame) -> Vec<usize> {
    let mut blocks = Vec::new();
    let mut run = 0usize;
    for row in ts.rows() {
        if row.value.is_none() {
            run += 1;
        } else if run > 0 {
            blocks.push(run);
            run = 0;
        }
    }
    if run > 0 {
        blocks.push(run);
    }
    blocks
}

/// Value statistics over a sequence of present values (at least two).
pub fn value_stats(values: &[f64]) -> Result<ValueStats> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "statistics need at least 2 present values, got {n}"
        )));
    }
    let sorted = stats::sorted(values);
    let mean = stats::mean(values);
    let nf = n as f64;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for x in values {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    let (skewness, kurtosis) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(ValueStats {
        count: nf,
        mean,
        std: stats::sample_std(values),
        min: sorted[0],
        q25: stats::quantile_sorted(&sorted, 0.25),
        median: stats::median_sorted(&sorted),
        q75: stats::quantile_sorted(&sorted, 0.75),
        max: sorted[n - 1],
        skewness,
        kurtosis,
        ac1: lag1_autocorrelation(values),
    })
}

/// Pearson correlation between `v[..n-1]` and `v[1..]`.
pub fn lag1_autocorrelation(values: &[f64]) -> f64 {
    if values.len() < 3 {
        return f64::NAN;
    }
    let a = &values[..values.len() - 1];
    let b = &values[1..];
    let (ma, mb) = (stats::mean(a), stats::mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return f64::NAN;
    }
    sab / (saa.sqrt() * sbb.sqrt())
}

pub fn block_stats(blocks: &[usize]) -> BlockStats {
    if blocks.is_empty() {
        return BlockStats {
            bcount: 0.0,
            bmean: f64::NAN,
            bmin: f64::NAN,
            bq25: f64::NAN,
            bmedian: f64::NAN,
            bq75: f64::NAN,
            bmax: f64::NAN,
        };
    }
    let lens: Vec<f64> = blocks.iter().map(|&b| b as f64).collect();
    let sorted = stats::sorted(&lens);
    BlockStats {
        bcount: lens.len() as f64,
        bmean: stats::mean(&lens),
        bmin: sorted[0],
        bq25: stats::quantile_sorted(&sorted, 0.25),
        bmedian: stats::median_sorted(&sorted),
        bq75: stats::quantile_sorted(&sorted, 0.75),
        bmax: sorted[sorted.len() - 1],
    }
}

pub fn statify(ts: &TSFrame, processmissing: bool) -> Result<StatVector> {
    Ok(StatVector {
        values: value_stats(&ts.present())?,
        blocks: processmissing.then(|| block_stats(&missing_blocks(ts))),
    })
}

/// Maps a series to a one-row table of statistics.
#[derive(Debug, Clone)]
pub struct Statifier {
    processmissing: bool,
    fitted: bool,
}

impl Statifier {
    pub fn new(processmissing: bool) -> Self {
        Statifier {
            processmissing,
            fitted: false,
        }
    }
}

impl Default for Statifier {
    fn default() -> Self {
        Self::new(true)
    }
}

impl Filter for Statifier {
    fn name(&self) -> &str {
        "statifier"
    }
    fn is_fitted(&self) -> bool {
        self.fitted
    }
    fn fit(&self, input: &Data) -> Result<Box<dyn Filter>> {
        if input.as_series()?.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(Box::new(Statifier {
            processmissing: self.processmissing,
            fitted: true,
        }))
    }
    fn transform(&self, input: &Data) -> Result<Data> {
        Ok(Data::Table(
            statify(input.as_series()?, self.processmissing)?.to_table(),
        ))
    }
    fn clone_box(&self) -> Box<dyn Filter> {
        Box::new(self.clone())
    }
}

/// Stacks several stat vectors into one table, one row each.
pub fn stats_table(rows: &[StatVector], labels: Option<Vec<String>>) -> Result<FeatureTable> {
    let processmissing = rows.first().map(|r| r.blocks.is_some()).unwrap_or(true);
    let names = stat_names(processmissing);
    let mut columns = vec![Vec::with_capacity(rows.len()); names.len()];
    for r in rows {
        let row = r.to_row();
        if row.len() != names.len() {
            return Err(Error::Schema("stat vectors disagree on block statistics".into()));
        }
        for (c, v) in columns.iter_mut().zip(row) {
            c.push(if v.is_nan() { None } else { Some(v) });
        }
    }
    let mut t = FeatureTable::new(names, columns.into_iter().map(Column::Numeric).collect(), labels)?;
    if t.ncols() == 0 {
        t = FeatureTable::empty_rows(rows.len());
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::{DateInterval, TimeStamp};

    fn series(values: &[Option<f64>]) -> TSFrame {
        TSFrame::regular(
            TimeStamp::new(2014, 1, 1, 0, 0, 0).unwrap(),
            DateInterval::hour(),
            values,
        )
    }

    #[test]
    fn blocks_by_inspection() {
        let (v, m) = (Some(1.0), None);
        assert_eq!(missing_blocks(&series(&[v, m, m, v, m])), vec![2, 1]);
        assert_eq!(missing_blocks(&series(&[v, v])), Vec::<usize>::new());
        assert_eq!(missing_blocks(&series(&[m, m, m])), vec![3]);
    }

    #[test]
    fn simple_values() {
        let s = statify(&series(&[Some(1.0), Some(2.0), Some(3.0)]), true).unwrap();
        assert_eq!((s.values.mean, s.values.std, s.values.median), (2.0, 1.0, 2.0));
        assert_eq!((s.values.min, s.values.max), (1.0, 3.0));
        assert_eq!(s.values.skewness, 0.0);
        assert!((s.values.kurtosis + 1.5).abs() < 1e-12);
        let b = s.blocks.unwrap();
        assert_eq!(b.bcount, 0.0);
        assert!(b.bmean.is_nan() && b.bmax.is_nan());
    }

    #[test]
    fn constant_series_degenerate_moments() {
        let s = statify(&series(&[Some(5.0); 4]), false).unwrap();
        assert_eq!(s.values.std, 0.0);
        assert!(s.values.skewness.is_nan() && s.values.kurtosis.is_nan() && s.values.ac1.is_nan());
        assert!(s.blocks.is_none());
        assert_eq!(s.names().len(), 11);
    }

    #[test]
    fn needs_two_values() {
        assert!(matches!(
            statify(&series(&[Some(1.0), None]), true),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn json_nulls_and_flag() {
        let s = statify(&series(&[Some(1.0), None, None, Some(3.0)]), true).unwrap();
        let j = s.to_json();
        assert_eq!(j["bcount"], 1);
        assert_eq!(j["bmean"], 2.0);
        assert_eq!(j["empty_block_set"], false);
        let keys: Vec<&String> = j.as_object().unwrap().keys().collect();
        assert_eq!(keys[0], "count");
        assert_eq!(keys[11], "bcount");
        let full = statify(&series(&[Some(1.0), Some(3.0)]), true).unwrap().to_json();
        assert!(full["bmean"].is_null());
        assert_eq!(full["empty_block_set"], true);
    }

    #[test]
    fn ac1_of_alternating_series() {
        assert!((lag1_autocorrelation(&[1.0, -1.0, 1.0, -1.0, 1.0]) + 1.0).abs() < 1e-12);
        assert!((lag1_autocorrelation(&[1.0, 2.0, 3.0, 4.0]) - 1.0).abs() < 1e-12);
    }
}
