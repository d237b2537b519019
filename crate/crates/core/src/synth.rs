//! Seeded synthetic data: sensor archetypes for the classifier, gappy and
//! monotonic series for the repair filters, and Gaussian class clusters for
//! the learners.

use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng as _;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::ingest::write_csv_datetime;
use crate::rng::{self, Rng};
use crate::series::{Observation, TSFrame};
use crate::table::FeatureTable;
use crate::time::{DateFormat, DateInterval, TimeStamp};

/// The four sensor types of the classifier demo.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Archetype {
    /// Noisy daily cycle.
    AirOffTemp,
    /// Cumulative meter reading.
    Energy,
    /// Flat baseline with sparse large spikes.
    Pressure,
    /// Level that shifts every day or two.
    RetTemp,
}

impl Archetype {
    pub const ALL: [Archetype; 4] = [
        Archetype::AirOffTemp,
        Archetype::Energy,
        Archetype::Pressure,
        Archetype::RetTemp,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Archetype::AirOffTemp => "AirOffTemp",
            Archetype::Energy => "Energy",
            Archetype::Pressure => "Pressure",
            Archetype::RetTemp => "RetTemp",
        }
    }
}

fn normal(sd: f64) -> Normal<f64> {
    Normal::new(0.0, sd).expect("finite sd")
}

fn start() -> TimeStamp {
    TimeStamp::new(2014, 1, 1, 0, 0, 0).expect("valid date")
}

/// A week of quarter-hourly readings with one to three dropped stretches of
/// up to twelve hours.
pub fn archetype_series(kind: Archetype, r: &mut Rng) -> TSFrame {
    const STEPS: usize = 7 * 24 * 4;
    let step = DateInterval::minutes(15).expect("positive");
    let noise = normal(1.0);
    let mut values = Vec::with_capacity(STEPS);
    match kind {
        Archetype::AirOffTemp => {
            let (base, amp, phase) = (
                r.random_range(15.0..25.0),
                r.random_range(3.0..8.0),
                r.random_range(0.0..24.0),
            );
            for i in 0..STEPS {
                let h = i as f64 / 4.0;
                let v = base + amp * (std::f64::consts::TAU * (h + phase) / 24.0).sin() + 0.8 * noise.sample(r);
                values.push(v);
            }
        }
        Archetype::Energy => {
            let mut v = r.random_range(1_000.0..50_000.0);
            let rate = r.random_range(0.5..5.0);
            for _ in 0..STEPS {
                v += rate * r.random_range(0.2..1.8);
                values.push(v);
            }
        }
        Archetype::Pressure => {
            let base = r.random_range(40.0..60.0);
            let spike_p = r.random_range(0.03..0.08);
            for _ in 0..STEPS {
                let spike = if r.random_bool(spike_p) {
                    r.random_range(15.0..40.0)
                } else {
                    0.0
                };
                values.push(base + 0.3 * noise.sample(r) + spike);
            }
        }
        Archetype::RetTemp => {
            let mut level = r.random_range(15.0..30.0);
            let mut next_shift = r.random_range(96..192);
            for i in 0..STEPS {
                if i == next_shift {
                    let jump = r.random_range(4.0..10.0);
                    level += if r.random_bool(0.5) { jump } else { -jump };
                    next_shift += r.random_range(96..192);
                }
                values.push(level + 0.2 * noise.sample(r));
            }
        }
    }
    let mut keep = vec![true; STEPS];
    for _ in 0..r.random_range(1..=3) {
        let len = r.random_range(4..=48);
        let at = r.random_range(0..STEPS - len);
        keep[at..at + len].iter_mut().for_each(|k| *k = false);
    }
    let mut ts = start();
    let mut rows = Vec::new();
    for (v, k) in values.into_iter().zip(keep) {
        if k {
            rows.push(Observation::new(ts, Some(v)));
        }
        ts = ts + step;
    }
    TSFrame::new(rows)
}

/// Writes `train/` and `test/` under `root`, with `Kind<i>.csv` files for
/// every archetype. Returns the two directories.
pub fn write_classifier_dirs(
    root: &Path,
    seed: u64,
    train_per_class: usize,
    test_per_class: usize,
) -> Result<(PathBuf, PathBuf)> {
    let fmt = DateFormat::default();
    let train = root.join("train");
    let test = root.join("test");
    for dir in [&train, &test] {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut r = rng::rng(seed);
    for kind in Archetype::ALL {
        for i in 1..=train_per_class + test_per_class {
            let (dir, n) = if i <= train_per_class {
                (&train, i)
            } else {
                (&test, i - train_per_class)
            };
            let series = archetype_series(kind, &mut r);
            write_csv_datetime(&series, &dir.join(format!("{}{n}.csv", kind.name())), &fmt)?;
        }
    }
    Ok((train, test))
}

/// Hourly random walk of length `len` with roughly `missing` of its values
/// removed; at least one value stays present.
pub fn gappy_series(r: &mut Rng, len: usize, missing: f64) -> TSFrame {
    let noise = normal(1.0);
    let mut v = r.random_range(-10.0..10.0);
    let mut values: Vec<Option<f64>> = (0..len)
        .map(|_| {
            v += noise.sample(r);
            (!r.random_bool(missing.clamp(0.0, 1.0))).then_some(v)
        })
        .collect();
    if len > 0 && values.iter().all(Option::is_none) {
        let i = r.random_range(0..len);
        values[i] = Some(v);
    }
    TSFrame::regular(start(), DateInterval::hour(), &values)
}

/// Hourly strictly increasing counter.
pub fn monotonic_series(r: &mut Rng, len: usize) -> TSFrame {
    let mut v = r.random_range(0.0..1_000.0);
    let values: Vec<Option<f64>> = (0..len)
        .map(|_| {
            v += r.random_range(0.01..10.0);
            Some(v)
        })
        .collect();
    TSFrame::regular(start(), DateInterval::hour(), &values)
}

/// Hourly counter that restarts from near zero every midnight, like a
/// daily people counter.
pub fn daily_monotonic_series(r: &mut Rng, days: usize) -> TSFrame {
    let mut values = Vec::with_capacity(days * 24);
    for _ in 0..days {
        let mut v = r.random_range(0.0..5.0);
        for _ in 0..24 {
            v += r.random_range(0.0..20.0);
            values.push(Some(v));
        }
    }
    TSFrame::regular(start(), DateInterval::hour(), &values)
}

/// Nine hourly readings of 1.0 with a single spike in the middle.
pub fn spike_series() -> TSFrame {
    let mut values = vec![Some(1.0); 9];
    values[4] = Some(100.0);
    TSFrame::regular(start(), DateInterval::hour(), &values)
}

/// `per_class` points around each of `classes` centres drawn on a sphere of
/// radius `separation` in `dim` dimensions, with unit-variance noise.
/// Labels are `c0`, `c1`, ...; feature columns `x0`, `x1`, ...
pub fn gaussian_clusters(seed: u64, classes: usize, per_class: usize, dim: usize, separation: f64) -> FeatureTable {
    let mut r = rng::rng(seed);
    let unit = normal(1.0);
    let centres: Vec<Vec<f64>> = (0..classes)
        .map(|_| {
            let d: Vec<f64> = (0..dim).map(|_| unit.sample(&mut r)).collect();
            let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
            d.into_iter().map(|x| separation * x / norm).collect()
        })
        .collect();
    let mut rows = Vec::with_capacity(classes * per_class);
    let mut labels = Vec::with_capacity(classes * per_class);
    for _ in 0..per_class {
        for (c, centre) in centres.iter().enumerate() {
            rows.push(centre.iter().map(|m| m + unit.sample(&mut r)).collect());
            labels.push(format!("c{c}"));
        }
    }
    let names = (0..dim).map(|j| format!("x{j}")).collect();
    FeatureTable::from_rows(names, &rows, Some(labels)).expect("consistent shape")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn archetypes_are_seeded() {
        for kind in Archetype::ALL {
            let a = archetype_series(kind, &mut rng::rng(1));
            let b = archetype_series(kind, &mut rng::rng(1));
            assert_eq!(a, b);
            assert!(a.len() > 400);
        }
        let e = archetype_series(Archetype::Energy, &mut rng::rng(2)).present();
        assert!(e.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn clusters_shape() {
        let t = gaussian_clusters(3, 4, 10, 5, 6.0);
        assert_eq!((t.nrows(), t.ncols()), (40, 5));
        assert_eq!(t.labels().unwrap()[..4], ["c0", "c1", "c2", "c3"]);
    }
}
