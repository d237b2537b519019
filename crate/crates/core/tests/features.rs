use proptest::prelude::*;
use rand::seq::SliceRandom;

use tspipe::features::*;
use tspipe::{Column, DateInterval, FeatureTable, TSFrame, TimeStamp};

fn hourly(values: &[Option<f64>]) -> TSFrame {
    TSFrame::regular(
        TimeStamp::new(2014, 1, 1, 0, 0, 0).unwrap(),
        DateInterval::hour(),
        values,
    )
}

#[test]
fn statify_examples() {
    let s = statify(&hourly(&[Some(1.0), Some(2.0), Some(3.0)]), true).unwrap();
    let v = s.values;
    assert_eq!((v.mean, v.std, v.median, v.min, v.max), (2.0, 1.0, 2.0, 1.0, 3.0));
    let b = s.blocks.unwrap();
    assert_eq!(b.bcount, 0.0);
    assert!([b.bmean, b.bmin, b.bq25, b.bmedian, b.bq75, b.bmax]
        .iter()
        .all(|x| x.is_nan()));

    let c = statify(&hourly(&[Some(5.0); 4]), false).unwrap();
    assert_eq!(c.values.std, 0.0);
    assert!(c.values.skewness.is_nan() && c.values.kurtosis.is_nan() && c.values.ac1.is_nan());
    assert!(c.blocks.is_none());
    assert_eq!(c.names().len(), VALUE_STATS.len());

    assert!(statify(&hourly(&[Some(1.0), None]), true).is_err());
    assert_eq!(
        missing_blocks(&hourly(&[Some(1.0), None, None, Some(1.0), None])),
        vec![2, 1]
    );
    assert_eq!(missing_blocks(&hourly(&[None; 3])), vec![3]);
}

#[test]
fn stats_json_is_ordered_with_nulls() {
    let s = statify(&hourly(&[Some(1.0), Some(2.0), Some(4.0)]), true).unwrap();
    let json = serde_json::to_string(&s.to_json()).unwrap();
    assert!(json.starts_with(r#"{"count":3,"mean":"#));
    assert!(json.ends_with(r#""bcount":0,"bmean":null,"bmin":null,"bq25":null,"bmedian":null,"bq75":null,"bmax":null,"empty_block_set":true}"#));
}

fn gappy() -> impl Strategy<Value = Vec<Option<f64>>> {
    prop::collection::vec(prop::option::weighted(0.7, -100f64..100.0), 2..120)
        .prop_filter("two present", |v| v.iter().flatten().count() >= 2)
}

proptest! {
    #[test]
    fn counts_cover_the_series(v in gappy()) {
        let s = statify(&hourly(&v), true).unwrap();
        let blocks: usize = missing_blocks(&hourly(&v)).iter().sum();
        prop_assert_eq!(s.values.count as usize + blocks, v.len());
        prop_assert!(s.values.q25 <= s.values.median && s.values.median <= s.values.q75);
        prop_assert!(s.values.min <= s.values.median && s.values.median <= s.values.max);
    }

    #[test]
    fn order_free_stats_ignore_shuffling(v in prop::collection::vec(-1000i32..1000, 3..80), seed in any::<u64>()) {
        let a: Vec<f64> = v.iter().map(|x| f64::from(*x)).collect();
        let mut b = a.clone();
        b.shuffle(&mut tspipe::rng::rng(seed));
        let sa = value_stats(&a).unwrap();
        let sb = value_stats(&b).unwrap();
        prop_assert_eq!((sa.count, sa.min, sa.q25, sa.median, sa.q75, sa.max), (sb.count, sb.min, sb.q25, sb.median, sb.q75, sb.max));
        // integer-valued sums are exact regardless of order
        prop_assert_eq!(sa.mean, sb.mean);
        for (x, y) in [(sa.std, sb.std), (sa.skewness, sb.skewness), (sa.kurtosis, sb.kurtosis)] {
            prop_assert!((x.is_nan() && y.is_nan()) || (x - y).abs() <= 1e-9 * (1.0 + x.abs()));
        }
    }
}

#[test]
fn matrify_examples() {
    let v: Vec<Option<f64>> = (1..=6).map(|x| Some(f64::from(x))).collect();
    let t = matrify(&hourly(&v), &WindowConfig::new(3, 1, 1).unwrap()).unwrap();
    assert_eq!(t.names(), &["v1", "v2", "v3", TARGET_COLUMN]);
    assert_eq!(
        t.numeric_rows().unwrap(),
        vec![
            vec![1.0, 2.0, 3.0, 4.0],
            vec![2.0, 3.0, 4.0, 5.0],
            vec![3.0, 4.0, 5.0, 6.0]
        ]
    );
    let v: Vec<Option<f64>> = (1..=7).map(|x| Some(f64::from(x))).collect();
    let t = matrify(&hourly(&v), &WindowConfig::new(2, 2, 1).unwrap()).unwrap();
    assert_eq!(
        t.numeric_rows().unwrap(),
        vec![vec![1.0, 2.0, 3.0], vec![3.0, 4.0, 5.0], vec![5.0, 6.0, 7.0]]
    );
    assert!(matrify(&hourly(&v[..3]), &WindowConfig::new(3, 1, 1).unwrap()).is_err());
}

#[test]
fn dateify_calendar() {
    let ts = TimeStamp::new(2014, 1, 1, 0, 6, 0).unwrap();
    let t = dateify(&TSFrame::regular(ts, DateInterval::hour(), &[Some(1.0)]));
    let row = &t.numeric_rows().unwrap()[0];
    assert_eq!(t.names(), &DATE_FEATURES);
    assert_eq!(row[..6], [2014.0, 1.0, 1.0, 0.0, 6.0, 3.0]);
    let dec = TimeStamp::new(2015, 12, 31, 0, 0, 0).unwrap();
    let t = dateify(&TSFrame::regular(dec, DateInterval::hour(), &[None]));
    assert_eq!(t.numeric_rows().unwrap()[0][6], 365.0);
}

fn table(cols: &[Vec<f64>]) -> FeatureTable {
    FeatureTable::new(
        (0..cols.len()).map(|i| format!("c{i}")).collect(),
        cols.iter()
            .map(|c| Column::Numeric(c.iter().copied().map(Some).collect()))
            .collect(),
        None,
    )
    .unwrap()
}

proptest! {
    #[test]
    fn scaler_standardizes_fit_data(cols in prop::collection::vec(prop::collection::vec(-1e4f64..1e4, 5), 1..5)) {
        let t = table(&cols);
        let p = fit_scale(&t);
        let out = standard_scale(&p, &t).unwrap();
        for (i, col) in out.columns().iter().enumerate() {
            let Column::Numeric(v) = col else { unreachable!() };
            let v: Vec<f64> = v.iter().flatten().copied().collect();
            let (_, sd) = p.moments()[i].unwrap();
            if sd > 1e-6 {
                prop_assert!(tspipe::stats::mean(&v).abs() < 1e-9);
                prop_assert!((tspipe::stats::sample_std(&v) - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn one_hot_rows_sum_to_one(fit in prop::collection::vec(0u8..4, 1..30), apply in prop::collection::vec(0u8..6, 1..30)) {
        let cat = |v: &[u8]| FeatureTable::new(
            vec!["k".into()],
            vec![Column::Categorical(v.iter().map(|x| Some(format!("v{x}"))).collect())],
            None,
        ).unwrap();
        let p = fit_encode(&cat(&fit));
        let out = one_hot_encode(&p, &cat(&apply)).unwrap();
        for (row, x) in out.numeric_rows().unwrap().iter().zip(&apply) {
            let seen = fit.contains(x);
            prop_assert_eq!(row.iter().sum::<f64>(), if seen { 1.0 } else { 0.0 });
        }
    }
}

#[test]
fn scaler_reuses_fit_params() {
    let t = table(&[vec![2.0, 4.0, 6.0]]);
    let p = fit_scale(&t);
    assert_eq!(standard_scale(&p, &t).unwrap(), table(&[vec![-1.0, 0.0, 1.0]]));
    assert_eq!(standard_scale(&p, &table(&[vec![4.0]])).unwrap(), table(&[vec![0.0]]));
}
