use serde::{Deserialize, Serialize};

use crate::time::{DateInterval, TimeStamp};

/// One observation; `value` is `None` when the reading is missing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub ts: TimeStamp,
    pub value: Option<f64>,
}

impl Observation {
    pub fn new(ts: TimeStamp, value: Option<f64>) -> Self {
        Observation { ts, value }
    }
}

/// Ordered date/value series.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TSFrame {
    rows: Vec<Observation>,
}

impl TSFrame {
    pub fn new(rows: Vec<Observation>) -> Self {
        TSFrame { rows }
    }

    /// Builds a series on a regular grid starting at `start`.
    pub fn regular(start: TimeStamp, step: DateInterval, values: &[Option<f64>]) -> Self {
        let mut ts = start;
        let mut rows = Vec::with_capacity(values.len());
        for v in values {
            rows.push(Observation::new(ts, *v));
            ts = ts + step;
        }
        TSFrame { rows }
    }

    pub fn rows(&self) -> &[Observation] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Observation> {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn values(&self) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.value).collect()
    }

    pub fn timestamps(&self) -> Vec<TimeStamp> {
        self.rows.iter().map(|r| r.ts).collect()
    }

    /// Non-missing values in order.
    pub fn present(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.value).collect()
    }

    pub fn missing_count(&self) -> usize {
        self.rows.iter().filter(|r| r.value.is_none()).count()
    }

    /// Same timestamps, new values.
    pub fn with_values(&self, values: Vec<Option<f64>>) -> Self {
        debug_assert_eq!(values.len(), self.rows.len());
        TSFrame {
            rows: self
                .rows
                .iter()
                .zip(values)
                .map(|(r, value)| Observation::new(r.ts, value))
                .collect(),
        }
    }

    /// True when timestamps advance by exactly `step` at every row.
    pub fn is_regular(&self, step: DateInterval) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].ts.seconds() - w[0].ts.seconds() == step.seconds())
    }
}

impl FromIterator<Observation> for TSFrame {
    fn from_iter<I: IntoIterator<Item = Observation>>(iter: I) -> Self {
        TSFrame {
            rows: iter.into_iter().collect(),
        }
    }
}
