use crate::error::{Error, Result};
use crate::series::TSFrame;
use crate::stats::Reducer;
use crate::time::DateInterval;
use crate::transformer::{Data, Filter};

use super::aggregate::{aggregate, AggregatorConfig};

#[derive(Debug, Clone)]
pub struct ImputerConfig {
    pub interval: DateInterval,
    /// Neighbours gathered on each side of a gap.
    pub k: usize,
    pub max_passes: usize,
    pub aggfn: Reducer,
}

impl Default for ImputerConfig {
    fn default() -> Self {
        ImputerConfig {
            interval: DateInterval::hour(),
            k: 1,
            max_passes: 10,
            aggfn: Reducer::Median,
        }
    }
}

impl ImputerConfig {
    pub fn new(interval: DateInterval) -> Self {
        ImputerConfig {
            interval,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if self.max_passes == 0 {
            return Err(Error::Config("max_passes must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImputeOutcome {
    pub frame: TSFrame,
    pub passes: usize,
    /// Missing values left when `max_passes` ran out.
    pub remaining: usize,
}

impl ImputeOutcome {
    pub fn converged(&self) -> bool {
        self.remaining == 0
    }
}

/// One imputation pass. Every missing slot is filled from the present
/// values at most `k` positions away on either side, all read from the
/// pass-start snapshot. Slots with no present neighbour stay missing.
pub fn impute_pass(values: &[Option<f64>], k: usize, aggfn: &Reducer) -> Vec<Option<f64>> {
    let n = values.len();
    let mut out = values.to_vec();
    let mut neighbours = Vec::with_capacity(2 * k);
    for i in 0..n {
        if values[i].is_some() {
            continue;
        }
        neighbours.clear();
        let lo = i.saturating_sub(k);
        let hi = (i + k).min(n - 1);
        neighbours.extend(values[lo..i].iter().flatten());
        neighbours.extend(values[i + 1..=hi].iter().flatten());
        if !neighbours.is_empty() {
            out[i] = Some(aggfn.reduce(&neighbours));
        }
    }
    out
}

/// Repeats [`impute_pass`] until nothing is missing or `max_passes` is hit.
/// Input that is not already on the configured grid is aggregated first.
pub fn impute_knn(ts: &TSFrame, cfg: &ImputerConfig) -> Result<ImputeOutcome> {
    cfg.validate()?;
    if ts.is_empty() {
        return Err(Error::EmptyInput);
    }
    let grid;
    let ts = if is_on_grid(ts, cfg.interval) {
        ts
    } else {
        grid = aggregate(
            ts,
            &AggregatorConfig {
                interval: cfg.interval,
                aggfn: cfg.aggfn.clone(),
            },
        )?;
        &grid
    };
    let mut values = ts.values();
    if values.iter().all(Option::is_none) {
        return Err(Error::NoData("series has no present values to impute from".into()));
    }
    let mut passes = 0;
    while passes < cfg.max_passes && values.iter().any(Option::is_none) {
        values = impute_pass(&values, cfg.k, &cfg.aggfn);
        passes += 1;
    }
    let remaining = values.iter().filter(|v| v.is_none()).count();
    if remaining > 0 {
        log::warn!("imputation left {remaining} missing values after {passes} passes");
    }
    Ok(ImputeOutcome {
        frame: ts.with_values(values),
        passes,
        remaining,
    })
}

fn is_on_grid(ts: &TSFrame, interval: DateInterval) -> bool {
    ts.rows().iter().all(|r| r.ts.floor(interval) == r.ts) && ts.is_regular(interval)
}

/// Filter form of [`impute_knn`].
#[derive(Debug, Clone, Default)]
pub struct DateValNNer {
    config: ImputerConfig,
    fitted: bool,
}

impl DateValNNer {
    pub fn new(config: ImputerConfig) -> Self {
        DateValNNer { config, fitted: false }
    }
}

impl Filter for DateValNNer {
    fn name(&self) -> &str {
        "datevalnner"
    }
    fn is_fitted(&self) -> bool {
        self.fitted
    }
    fn fit(&self, input: &Data) -> Result<Box<dyn Filter>> {
        self.config.validate()?;
        if input.as_series()?.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(Box::new(DateValNNer {
            config: self.config.clone(),
            fitted: true,
        }))
    }
    fn transform(&self, input: &Data) -> Result<Data> {
        impute_knn(input.as_series()?, &self.config).map(|o| Data::Series(o.frame))
    }
    fn clone_box(&self) -> Box<dyn Filter> {
        Box::new(self.clone())
    }
}
