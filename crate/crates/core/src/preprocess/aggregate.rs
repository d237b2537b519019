use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::series::{Observation, TSFrame};
use crate::stats::Reducer;
use crate::time::{DateInterval, TimeStamp};
use crate::transformer::{Data, Filter};

#[derive(Debug, Clone, Default)]
pub struct AggregatorConfig {
    pub interval: DateInterval,
    pub aggfn: Reducer,
}

impl AggregatorConfig {
    pub fn new(interval: DateInterval) -> Self {
        AggregatorConfig {
            interval,
            aggfn: Reducer::Median,
        }
    }
}

/// Floors every timestamp to its interval boundary, reduces each bucket's
/// present values, and fills the full boundary range from the first to the
/// last bucket. Buckets without present values are missing.
pub fn aggregate(ts: &TSFrame, cfg: &AggregatorConfig) -> Result<TSFrame> {
    if ts.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut buckets: BTreeMap<TimeStamp, Vec<f64>> = BTreeMap::new();
    for row in ts.rows() {
        let slot = buckets.entry(row.ts.floor(cfg.interval)).or_default();
        if let Some(v) = row.value {
            slot.push(v);
        }
    }
    let first = *buckets.keys().next().expect("non-empty");
    let last = *buckets.keys().next_back().expect("non-empty");
    let mut out = Vec::with_capacity(((last.seconds() - first.seconds()) / cfg.interval.seconds()) as usize + 1);
    let mut cursor = first;
    while cursor <= last {
        let value = buckets
            .get(&cursor)
            .filter(|vals| !vals.is_empty())
            .map(|vals| cfg.aggfn.reduce(vals));
        out.push(Observation::new(cursor, value));
        cursor = cursor + cfg.interval;
    }
    Ok(TSFrame::new(out))
}

/// Filter form of [`aggregate`].
#[derive(Debug, Clone, Default)]
pub struct DateValgator {
    config: AggregatorConfig,
    fitted: bool,
}

impl DateValgator {
    pub fn new(config: AggregatorConfig) -> Self {
        DateValgator { config, fitted: false }
    }
}

impl Filter for DateValgator {
    fn name(&self) -> &str {
        "datevalgator"
    }
    fn is_fitted(&self) -> bool {
        self.fitted
    }
    fn fit(&self, input: &Data) -> Result<Box<dyn Filter>> {
        if input.as_series()?.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(Box::new(DateValgator {
            config: self.config.clone(),
            fitted: true,
        }))
    }
    fn transform(&self, input: &Data) -> Result<Data> {
        aggregate(input.as_series()?, &self.config).map(Data::Series)
    }
    fn clone_box(&self) -> Box<dyn Filter> {
        Box::new(self.clone())
    }
}
