//! Naive timestamps, bucketing intervals and the `dd/mm/yyyy HH:MM` style
//! date patterns used by the CSV reader and writer.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate, NaiveDateTime, TimeDelta, Timelike};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Calendar date-time without time-zone semantics, second precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TimeStamp(NaiveDateTime);

impl TimeStamp {
    pub fn new(year: i32, month: u32, day: u32, hour: u32, minute: u32, second: u32) -> Result<Self> {
        NaiveDate::from_ymd_opt(year, month, day)
            .and_then(|d| d.and_hms_opt(hour, minute, second))
            .map(TimeStamp)
            .ok_or_else(|| {
                Error::Config(format!(
                    "invalid date-time {year:04}-{month:02}-{day:02} {hour:02}:{minute:02}:{second:02}"
                ))
            })
    }

    pub fn from_naive(dt: NaiveDateTime) -> Self {
        TimeStamp(dt.with_nanosecond(0).unwrap_or(dt))
    }

    pub fn naive(&self) -> NaiveDateTime {
        self.0
    }

    /// Seconds since 1970-01-01T00:00:00 (naive).
    pub fn seconds(&self) -> i64 {
        self.0.and_utc().timestamp()
    }

    pub fn from_seconds(secs: i64) -> Self {
        TimeStamp(
            chrono::DateTime::from_timestamp(secs, 0)
                .expect("timestamp in chrono range")
                .naive_utc(),
        )
    }

    pub fn date(&self) -> NaiveDate {
        self.0.date()
    }

    /// Floors to the enclosing interval boundary. Boundaries are multiples
    /// of the interval length counted from 1970-01-01T00:00.
    pub fn floor(&self, interval: DateInterval) -> Self {
        let step = interval.seconds();
        Self::from_seconds(self.seconds().div_euclid(step) * step)
    }

    pub fn year(&self) -> i32 {
        self.0.year()
    }
    pub fn month(&self) -> u32 {
        self.0.month()
    }
    pub fn day(&self) -> u32 {
        self.0.day()
    }
    pub fn hour(&self) -> u32 {
        self.0.hour()
    }
    pub fn minute(&self) -> u32 {
        self.0.minute()
    }
    pub fn second(&self) -> u32 {
        self.0.second()
    }
}

impl fmt::Display for TimeStamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format("%Y-%m-%dT%H:%M:%S"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntervalUnit {
    Minute,
    Hour,
    Day,
}

impl IntervalUnit {
    fn seconds(self) -> i64 {
        match self {
            IntervalUnit::Minute => 60,
            IntervalUnit::Hour => 3_600,
            IntervalUnit::Day => 86_400,
        }
    }
}

/// A positive multiple of minutes, hours or days.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DateInterval {
    unit: IntervalUnit,
    count: u32,
}

impl DateInterval {
    pub fn new(unit: IntervalUnit, count: u32) -> Result<Self> {
        if count == 0 {
            return Err(Error::Config("interval count must be at least 1".into()));
        }
        Ok(DateInterval { unit, count })
    }

    pub fn minutes(count: u32) -> Result<Self> {
        Self::new(IntervalUnit::Minute, count)
    }

    pub fn hours(count: u32) -> Result<Self> {
        Self::new(IntervalUnit::Hour, count)
    }

    pub fn days(count: u32) -> Result<Self> {
        Self::new(IntervalUnit::Day, count)
    }

    pub fn hour() -> Self {
        DateInterval {
            unit: IntervalUnit::Hour,
            count: 1,
        }
    }

    pub fn unit(&self) -> IntervalUnit {
        self.unit
    }

    pub fn count(&self) -> u32 {
        self.count
    }

    pub fn seconds(&self) -> i64 {
        self.unit.seconds() * i64::from(self.count)
    }
}

impl Default for DateInterval {
    fn default() -> Self {
        Self::hour()
    }
}

impl Add<DateInterval> for TimeStamp {
    type Output = TimeStamp;

    fn add(self, rhs: DateInterval) -> TimeStamp {
        TimeStamp(self.0 + TimeDelta::seconds(rhs.seconds()))
    }
}

impl fmt::Display for DateInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let suffix = match self.unit {
            IntervalUnit::Minute => "m",
            IntervalUnit::Hour => "h",
            IntervalUnit::Day => "d",
        };
        write!(f, "{}{}", self.count, suffix)
    }
}

impl FromStr for DateInterval {
    type Err = Error;

    /// Parses specs like `30m`, `1h`, `2d`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let split = s
            .find(|c: char| !c.is_ascii_digit())
            .ok_or_else(|| Error::Config(format!("interval {s:?} has no unit (use m, h or d)")))?;
        let (digits, unit) = s.split_at(split);
        let count: u32 = digits
            .parse()
            .map_err(|_| Error::Config(format!("interval {s:?} has no valid count")))?;
        let unit = match unit {
            "m" | "min" | "minute" | "minutes" => IntervalUnit::Minute,
            "h" | "hour" | "hours" => IntervalUnit::Hour,
            "d" | "day" | "days" => IntervalUnit::Day,
            other => return Err(Error::Config(format!("unknown interval unit {other:?}"))),
        };
        DateInterval::new(unit, count)
    }
}

impl TryFrom<String> for DateInterval {
    type Error = Error;
    fn try_from(value: String) -> Result<Self> {
        value.parse()
    }
}

impl From<DateInterval> for String {
    fn from(value: DateInterval) -> Self {
        value.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Token {
    Year,
    Month,
    Day,
    Hour,
    Minute,
    Second,
    Literal(char),
}

impl Token {
    fn width(self) -> usize {
        match self {
            Token::Year => 4,
            Token::Literal(_) => 1,
            _ => 2,
        }
    }
}

/// Date pattern over the tokens `yyyy`, `mm`, `dd`, `HH`, `MM`, `SS`; any
/// other character is a literal separator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DateFormat {
    pattern: String,
    tokens: Vec<Token>,
}

impl DateFormat {
    pub fn new(pattern: &str) -> Result<Self> {
        let mut tokens = Vec::new();
        let mut rest = pattern;
        while !rest.is_empty() {
            let tok = [
                ("yyyy", Token::Year),
                ("mm", Token::Month),
                ("dd", Token::Day),
                ("HH", Token::Hour),
                ("MM", Token::Minute),
                ("SS", Token::Second),
            ]
            .iter()
            .find(|(text, _)| rest.starts_with(text));
            match tok {
                Some((text, t)) => {
                    tokens.push(*t);
                    rest = &rest[text.len()..];
                }
                None => {
                    let c = rest.chars().next().expect("non-empty");
                    tokens.push(Token::Literal(c));
                    rest = &rest[c.len_utf8()..];
                }
            }
        }
        for (required, name) in [(Token::Year, "yyyy"), (Token::Month, "mm"), (Token::Day, "dd")] {
            match tokens.iter().filter(|t| **t == required).count() {
                1 => {}
                0 => return Err(Error::Config(format!("date format {pattern:?} lacks {name}"))),
                _ => return Err(Error::Config(format!("date format {pattern:?} repeats {name}"))),
            }
        }
        Ok(DateFormat {
            pattern: pattern.to_string(),
            tokens,
        })
    }

    pub fn pattern(&self) -> &str {
        &self.pattern
    }

    /// True when every timestamp component is rendered, so formatting loses
    /// nothing. Seconds may be absent when they are zero.
    pub fn represents(&self, ts: &TimeStamp) -> bool {
        let has = |t: Token| self.tokens.contains(&t);
        (has(Token::Hour) || ts.hour() == 0)
            && (has(Token::Minute) || ts.minute() == 0)
            && (has(Token::Second) || ts.second() == 0)
            && (0..=9999).contains(&ts.year())
    }

    pub fn parse(&self, text: &str) -> Option<TimeStamp> {
        let text = text.trim();
        let bytes = text.as_bytes();
        let mut pos = 0usize;
        let (mut y, mut mo, mut d, mut h, mut mi, mut s) = (None, None, None, 0u32, 0u32, 0u32);
        for (i, tok) in self.tokens.iter().enumerate() {
            if let Token::Literal(c) = tok {
                let mut buf = [0u8; 4];
                let lit = c.encode_utf8(&mut buf).as_bytes();
                if !bytes[pos..].starts_with(lit) {
                    return None;
                }
                pos += lit.len();
                continue;
            }
            // Numeric fields accept up to their width; the field is fixed
            // width when immediately followed by another numeric field.
            let next_is_numeric = matches!(self.tokens.get(i + 1), Some(t) if !matches!(t, Token::Literal(_)));
            let max = tok.width();
            let mut end = pos;
            while end < bytes.len() && end - pos < max && bytes[end].is_ascii_digit() {
                end += 1;
            }
            if end == pos || (next_is_numeric && end - pos != max) {
                return None;
            }
            let value: u32 = text[pos..end].parse().ok()?;
            pos = end;
            match tok {
                Token::Year => y = Some(value as i32),
                Token::Month => mo = Some(value),
                Token::Day => d = Some(value),
                Token::Hour => h = value,
                Token::Minute => mi = value,
                Token::Second => s = value,
                Token::Literal(_) => unreachable!(),
            }
        }
        if pos != bytes.len() {
            return None;
        }
        TimeStamp::new(y?, mo?, d?, h, mi, s).ok()
    }

    pub fn format(&self, ts: &TimeStamp) -> String {
        let mut out = String::with_capacity(self.pattern.len());
        for tok in &self.tokens {
            match tok {
                Token::Year => out.push_str(&format!("{:04}", ts.year())),
                Token::Month => out.push_str(&format!("{:02}", ts.month())),
                Token::Day => out.push_str(&format!("{:02}", ts.day())),
                Token::Hour => out.push_str(&format!("{:02}", ts.hour())),
                Token::Minute => out.push_str(&format!("{:02}", ts.minute())),
                Token::Second => out.push_str(&format!("{:02}", ts.second())),
                Token::Literal(c) => out.push(*c),
            }
        }
        out
    }
}

impl Default for DateFormat {
    fn default() -> Self {
        DateFormat::new("dd/mm/yyyy HH:MM").expect("valid default pattern")
    }
}

impl FromStr for DateFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        DateFormat::new(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_default_pattern() {
        let fmt = DateFormat::default();
        let ts = fmt.parse("01/01/2014 00:06").unwrap();
        assert_eq!(ts, TimeStamp::new(2014, 1, 1, 0, 6, 0).unwrap());
        assert_eq!(fmt.format(&ts), "01/01/2014 00:06");
    }

    #[test]
    fn rejects_mismatched_text() {
        let fmt = DateFormat::default();
        assert!(fmt.parse("2014-01-01").is_none());
        assert!(fmt.parse("01/01/2014 00:06 extra").is_none());
        assert!(fmt.parse("32/01/2014 00:06").is_none());
    }

    #[test]
    fn date_only_pattern_is_midnight() {
        let fmt = DateFormat::new("yyyy-mm-dd").unwrap();
        let ts = fmt.parse("2014-03-09").unwrap();
        assert_eq!((ts.hour(), ts.minute()), (0, 0));
    }

    #[test]
    fn compact_pattern_needs_fixed_width() {
        let fmt = DateFormat::new("yyyymmddHHMMSS").unwrap();
        let ts = fmt.parse("20140309123005").unwrap();
        assert_eq!(ts, TimeStamp::new(2014, 3, 9, 12, 30, 5).unwrap());
    }

    #[test]
    fn pattern_requires_date_tokens() {
        assert!(DateFormat::new("HH:MM").is_err());
        assert!(DateFormat::new("dd/mm HH:MM").is_err());
    }

    #[test]
    fn interval_specs() {
        assert_eq!("1h".parse::<DateInterval>().unwrap(), DateInterval::hour());
        assert_eq!("30m".parse::<DateInterval>().unwrap().seconds(), 1800);
        assert_eq!("2d".parse::<DateInterval>().unwrap().seconds(), 172_800);
        assert!("0h".parse::<DateInterval>().is_err());
        assert!("h".parse::<DateInterval>().is_err());
        assert!("5".parse::<DateInterval>().is_err());
    }

    #[test]
    fn floor_and_add() {
        let ts = TimeStamp::new(2014, 1, 1, 1, 50, 13).unwrap();
        let h = DateInterval::hour();
        assert_eq!(ts.floor(h), TimeStamp::new(2014, 1, 1, 1, 0, 0).unwrap());
        assert_eq!(ts.floor(h) + h, TimeStamp::new(2014, 1, 1, 2, 0, 0).unwrap());
        let d = DateInterval::days(1).unwrap();
        assert_eq!(ts.floor(d), TimeStamp::new(2014, 1, 1, 0, 0, 0).unwrap());
    }
}
