use proptest::prelude::*;

use tspipe::ingest::*;
use tspipe::{DateFormat, Error, Observation, TSFrame, TimeStamp};

fn frame(fmt_has_seconds: bool) -> impl Strategy<Value = TSFrame> {
    prop::collection::vec(
        (
            0i64..2_000_000_000,
            prop::option::weighted(
                0.85,
                prop_oneof![any::<f64>().prop_filter("finite", |v| v.is_finite()), -1e6f64..1e6],
            ),
        ),
        0..40,
    )
    .prop_map(move |rows| {
        let mut rows: Vec<Observation> = rows
            .into_iter()
            .map(|(s, v)| {
                let s = if fmt_has_seconds { s } else { s - s.rem_euclid(60) };
                Observation::new(TimeStamp::from_seconds(s), v)
            })
            .collect();
        rows.sort_by_key(|o| o.ts);
        TSFrame::new(rows)
    })
}

fn round_trip(f: &TSFrame, fmt: &DateFormat) -> TSFrame {
    let mut buf = Vec::new();
    write_datetime(f, &mut buf, fmt).unwrap();
    read_datetime(buf.as_slice(), fmt).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn default_format_round_trips(f in frame(false)) {
        prop_assert_eq!(round_trip(&f, &DateFormat::default()), f);
    }

    #[test]
    fn second_format_round_trips(f in frame(true)) {
        let fmt: DateFormat = "yyyy-mm-dd HH:MM:SS".parse().unwrap();
        prop_assert_eq!(round_trip(&f, &fmt), f);
    }

    #[test]
    fn reader_preserves_row_count(f in frame(false), header in any::<bool>()) {
        let fmt = DateFormat::default();
        let mut text = String::new();
        if header {
            text.push_str("Date,Value\n");
        }
        for r in f.rows() {
            text.push_str(&format!("{},{}\n", fmt.format(&r.ts), r.value.map(|v| v.to_string()).unwrap_or_default()));
        }
        prop_assert_eq!(read_datetime(text.as_bytes(), &fmt).unwrap().len(), f.len());
    }
}

#[test]
fn missing_and_bad_lines() {
    let fmt = DateFormat::default();
    let f = read_datetime("01/01/2014 00:06,\r\n01/01/2014 00:07,x\r\n".as_bytes(), &fmt).unwrap();
    assert_eq!(f.values(), vec![None, None]);
    match read_datetime("01/01/2014 00:06,1\n2014-01-01,5\n".as_bytes(), &fmt) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn empty_frame_writes_header_only() {
    let mut buf = Vec::new();
    write_datetime(&TSFrame::default(), &mut buf, &DateFormat::default()).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), "Date,Value\n");
}

#[test]
fn file_round_trip_and_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let fmt = DateFormat::default();
    let ts = TimeStamp::new(2014, 1, 1, 0, 6, 0).unwrap();
    let f = TSFrame::new(vec![Observation::new(ts, Some(10.0)), Observation::new(ts, None)]);
    write_csv_datetime(&f, &path, &fmt).unwrap();
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        "Date,Value\n01/01/2014 00:06,10\n01/01/2014 00:06,\n"
    );
    assert_eq!(read_csv_datetime(&path, &fmt).unwrap(), f);
    let err = read_csv_datetime(&dir.path().join("nope.csv"), &fmt).unwrap_err();
    assert!(matches!(err, Error::Io { .. }) && err.is_usage());
}
