use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::series::TSFrame;
use crate::stats;
use crate::transformer::{Data, Filter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    Plain,
    /// Cumulative over the whole series (energy or water meters).
    StrictlyMonotonic,
    /// Cumulative within each day, reset around midnight (footfall).
    DailyMonotonic,
}

/// Detection thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicConfig {
    /// Minimum share of non-negative first differences.
    pub nonneg_fraction: f64,
    /// Share of negative day-boundary differences at and above which the
    /// series is considered to reset daily.
    pub reset_fraction: f64,
}

impl Default for MonotonicConfig {
    fn default() -> Self {
        MonotonicConfig {
            nonneg_fraction: 0.90,
            reset_fraction: 0.5,
        }
    }
}

struct Diffs {
    within_day_nonneg: usize,
    within_day: usize,
    boundary_drops: usize,
    boundaries: usize,
}

fn day_groups(ts: &TSFrame) -> Vec<(NaiveDate, Vec<f64>)> {
    let mut groups: Vec<(NaiveDate, Vec<f64>)> = Vec::new();
    for row in ts.rows() {
        let Some(v) = row.value else { continue };
        let day = row.ts.date();
        match groups.last_mut() {
            Some((d, vals)) if *d == day => vals.push(v),
            _ => groups.push((day, vec![v])),
        }
    }
    groups
}

fn classify_diffs(groups: &[(NaiveDate, Vec<f64>)]) -> Diffs {
    let mut d = Diffs {
        within_day_nonneg: 0,
        within_day: 0,
        boundary_drops: 0,
        boundaries: 0,
    };
    for (i, (_, vals)) in groups.iter().enumerate() {
        for w in vals.windows(2) {
            d.within_day += 1;
            if w[1] - w[0] >= 0.0 {
                d.within_day_nonneg += 1;
            }
        }
        if i > 0 {
            let prev_last = *groups[i - 1].1.last().expect("groups are non-empty");
            d.boundaries += 1;
            if vals[0] - prev_last < 0.0 {
                d.boundary_drops += 1;
            }
        }
    }
    d
}

/// Classifies a gap-free series as plain, strictly monotonic or daily
/// monotonic from the signs of its first differences.
pub fn detect_series_kind(ts: &TSFrame, cfg: &MonotonicConfig) -> Result<SeriesKind> {
    let present = ts.present();
    if present.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "monotonic detection needs at least 3 values, got {}",
            present.len()
        )));
    }
    let groups = day_groups(ts);
    let d = classify_diffs(&groups);
    let total = d.within_day + d.boundaries;
    let nonneg_total = d.within_day_nonneg + (d.boundaries - d.boundary_drops);
    let resets = d.boundaries > 0 && d.boundary_drops as f64 / d.boundaries as f64 >= cfg.reset_fraction;

    let first = present[0];
    let last = present[present.len() - 1];
    if nonneg_total as f64 / total as f64 >= cfg.nonneg_fraction && last > first && !resets {
        return Ok(SeriesKind::StrictlyMonotonic);
    }
    if resets && d.within_day > 0 && d.within_day_nonneg as f64 / d.within_day as f64 >= cfg.nonneg_fraction {
        let day_rises: Vec<f64> = groups.iter().map(|(_, v)| v[v.len() - 1] - v[0]).collect();
        if stats::median(&day_rises) > 0.0 {
            return Ok(SeriesKind::DailyMonotonic);
        }
    }
    Ok(SeriesKind::Plain)
}

/// Applies the normalisation for a known kind: first differences over the
/// whole series or within each calendar day. The first slot (of the series
/// or of each day) becomes missing; negative differences are kept.
pub fn normalize_as(ts: &TSFrame, kind: SeriesKind) -> TSFrame {
    let rows = ts.rows();
    let values = match kind {
        SeriesKind::Plain => return ts.clone(),
        SeriesKind::StrictlyMonotonic => (0..rows.len())
            .map(|i| {
                if i == 0 {
                    None
                } else {
                    Some(rows[i].value? - rows[i - 1].value?)
                }
            })
            .collect(),
        SeriesKind::DailyMonotonic => (0..rows.len())
            .map(|i| {
                if i == 0 || rows[i].ts.date() != rows[i - 1].ts.date() {
                    None
                } else {
                    Some(rows[i].value? - rows[i - 1].value?)
                }
            })
            .collect(),
    };
    ts.with_values(values)
}

pub fn normalize_monotonic(ts: &TSFrame, cfg: &MonotonicConfig) -> Result<TSFrame> {
    let kind = detect_series_kind(ts, cfg)?;
    Ok(normalize_as(ts, kind))
}

/// Detects the series kind at fit time and applies the matching
/// normalisation at transform time.
#[derive(Debug, Clone, Default)]
pub struct Monotonicer {
    config: MonotonicConfig,
    kind: Option<SeriesKind>,
}

impl Monotonicer {
    pub fn new(config: MonotonicConfig) -> Self {
        Monotonicer { config, kind: None }
    }

    pub fn kind(&self) -> Option<SeriesKind> {
        self.kind
    }
}

impl Filter for Monotonicer {
    fn name(&self) -> &str {
        "monotonicer"
    }
    fn is_fitted(&self) -> bool {
        self.kind.is_some()
    }
    fn fit(&self, input: &Data) -> Result<Box<dyn Filter>> {
        let kind = detect_series_kind(input.as_series()?, &self.config)?;
        Ok(Box::new(Monotonicer {
            config: self.config,
            kind: Some(kind),
        }))
    }
    fn transform(&self, input: &Data) -> Result<Data> {
        let kind = self.kind.ok_or_else(|| Error::NotFitted(self.name().into()))?;
        Ok(Data::Series(normalize_as(input.as_series()?, kind)))
    }
    fn clone_box(&self) -> Box<dyn Filter> {
        Box::new(self.clone())
    }
}
