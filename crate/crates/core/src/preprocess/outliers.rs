use crate::error::{Error, Result};
use crate::series::TSFrame;
use crate::stats;
use crate::time::DateInterval;
use crate::transformer::{Data, Filter};

use super::impute::{impute_knn, ImputerConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutlierConfig {
    pub interval: DateInterval,
    pub fence_multiplier: f64,
}

impl Default for OutlierConfig {
    fn default() -> Self {
        OutlierConfig {
            interval: DateInterval::hour(),
            fence_multiplier: 1.5,
        }
    }
}

impl OutlierConfig {
    pub fn new(interval: DateInterval) -> Self {
        OutlierConfig {
            interval,
            ..Default::default()
        }
    }
}

/// Tukey fences `[q1 - m*iqr, q3 + m*iqr]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fences {
    pub lower: f64,
    pub upper: f64,
}

impl Fences {
    pub fn contains(&self, v: f64) -> bool {
        v >= self.lower && v <= self.upper
    }
}

pub fn outlier_fences(ts: &TSFrame, cfg: &OutlierConfig) -> Result<Fences> {
    if cfg.fence_multiplier.is_nan() || cfg.fence_multiplier <= 0.0 {
        return Err(Error::Config("fence multiplier must be positive".into()));
    }
    let sorted = stats::sorted(&ts.present());
    if sorted.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "outlier fences need at least 4 present values, got {}",
            sorted.len()
        )));
    }
    let q1 = stats::quantile_sorted(&sorted, 0.25);
    let q3 = stats::quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    Ok(Fences {
        lower: q1 - cfg.fence_multiplier * iqr,
        upper: q3 + cfg.fence_multiplier * iqr,
    })
}

fn repair(ts: &TSFrame, fences: Fences, interval: DateInterval) -> Result<TSFrame> {
    let original = ts.values();
    let flagged: Vec<bool> = original
        .iter()
        .map(|v| matches!(v, Some(x) if !fences.contains(*x)))
        .collect();
    if !flagged.contains(&true) {
        return Ok(ts.clone());
    }
    let masked: Vec<Option<f64>> = original
        .iter()
        .zip(&flagged)
        .map(|(v, f)| if *f { None } else { *v })
        .collect();
    let imputed = impute_knn(&ts.with_values(masked), &ImputerConfig::new(interval))?;
    if imputed.frame.len() != ts.len() {
        return Err(Error::Schema("outlier repair expects an aggregated series".into()));
    }
    let filled = imputed.frame.values();
    let values = original
        .iter()
        .zip(&flagged)
        .zip(filled)
        .map(|((v, f), fill)| if *f { fill } else { *v })
        .collect();
    Ok(ts.with_values(values))
}

/// Flags values outside the Tukey fences and refills them by symmetric
/// k-NN imputation (k = 1). Unflagged positions are left untouched.
pub fn remove_outliers(ts: &TSFrame, cfg: &OutlierConfig) -> Result<TSFrame> {
    let fences = outlier_fences(ts, cfg)?;
    repair(ts, fences, cfg.interval)
}

/// Learns fences at fit time and repairs values outside them at transform
/// time.
#[derive(Debug, Clone, Default)]
pub struct Outliernicer {
    config: OutlierConfig,
    fences: Option<Fences>,
}

impl Outliernicer {
    pub fn new(config: OutlierConfig) -> Self {
        Outliernicer { config, fences: None }
    }

    pub fn fences(&self) -> Option<Fences> {
        self.fences
    }
}

impl Filter for Outliernicer {
    fn name(&self) -> &str {
        "outliernicer"
    }
    fn is_fitted(&self) -> bool {
        self.fences.is_some()
    }
    fn fit(&self, input: &Data) -> Result<Box<dyn Filter>> {
        let fences = outlier_fences(input.as_series()?, &self.config)?;
        Ok(Box::new(Outliernicer {
            config: self.config,
            fences: Some(fences),
        }))
    }
    fn transform(&self, input: &Data) -> Result<Data> {
        let fences = self.fences.ok_or_else(|| Error::NotFitted(self.name().into()))?;
        repair(input.as_series()?, fences, self.config.interval).map(Data::Series)
    }
    fn clone_box(&self) -> Box<dyn Filter> {
        Box::new(self.clone())
    }
}
