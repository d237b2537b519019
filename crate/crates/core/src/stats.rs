//! Small numeric helpers shared by the filters and feature extractors.

use std::fmt;
use std::sync::Arc;

/// Interpolated order statistic (the common "type 7" rule):
/// `h = (n - 1) p`, result `x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h])`.
/// `sorted` must be ascending and NaN-free. Empty input yields NaN.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let h = (n - 1) as f64 * p;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            let frac = h - lo as f64;
            sorted[lo] + frac * (sorted[hi] - sorted[lo])
        }
    }
}

pub fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn quantile(values: &[f64], p: f64) -> f64 {
    quantile_sorted(&sorted(values), p)
}

/// Middle order statistic, or the mean of the two middle ones. Equal to the
/// type-7 quantile at 0.5 up to rounding.
pub fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => sorted[n / 2],
        _ => (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0,
    }
}

pub fn median(values: &[f64]) -> f64 {
    median_sorted(&sorted(values))
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n - 1 denominator); NaN below two values.
pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return f64::NAN;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

pub type ReduceFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Reduces a non-empty set of values to one; used for bucket aggregation
/// and neighbour imputation.
#[derive(Clone, Default)]
pub enum Reducer {
    #[default]
    Median,
    Mean,
    Custom(ReduceFn),
}

impl Reducer {
    pub fn custom<F: Fn(&[f64]) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Reducer::Custom(Arc::new(f))
    }

    pub fn reduce(&self, values: &[f64]) -> f64 {
        match self {
            Reducer::Median => median(values),
            Reducer::Mean => mean(values),
            Reducer::Custom(f) => f(values),
        }
    }
}

impl fmt::Debug for Reducer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reducer::Median => f.write_str("Median"),
            Reducer::Mean => f.write_str("Mean"),
            Reducer::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}
