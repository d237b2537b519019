//! Static SVG line charts. Missing values break the line, so every run of
//! present values becomes its own polyline.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::series::TSFrame;
use crate::transformer::{Data, Filter};

pub const DEFAULT_WIDTH: u32 = 800;
pub const DEFAULT_HEIGHT: u32 = 300;
const MARGIN: f64 = 40.0;

/// Runs of consecutive present values as `(seconds, value)` points.
pub fn segments(ts: &TSFrame) -> Vec<Vec<(i64, f64)>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    for r in ts.rows() {
        match r.value {
            Some(v) => current.push((r.ts.seconds(), v)),
            None if !current.is_empty() => out.push(std::mem::take(&mut current)),
            None => {}
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

pub fn render_svg(ts: &TSFrame, width: u32, height: u32) -> Result<String> {
    if ts.is_empty() {
        return Err(Error::EmptyInput);
    }
    if width == 0 || height == 0 {
        return Err(Error::Config("plot size must be positive".into()));
    }
    let segs = segments(ts);
    if segs.is_empty() {
        return Err(Error::NoData("series has no present values to plot".into()));
    }
    let rows = ts.rows();
    let (t0, t1) = (rows[0].ts.seconds(), rows[rows.len() - 1].ts.seconds());
    let present = ts.present();
    let (mut lo, mut hi) = present
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if hi - lo <= 0.0 {
        lo -= 1.0;
        hi += 1.0;
    }
    let (w, h) = (f64::from(width), f64::from(height));
    let plot_w = (w - 2.0 * MARGIN).max(1.0);
    let plot_h = (h - 2.0 * MARGIN).max(1.0);
    let x = |t: i64| {
        if t1 == t0 {
            MARGIN + plot_w / 2.0
        } else {
            MARGIN + plot_w * (t - t0) as f64 / (t1 - t0) as f64
        }
    };
    let y = |v: f64| MARGIN + plot_h * (hi - v) / (hi - lo);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>"#
    );
    let (left, right, top, bottom) = (MARGIN, MARGIN + plot_w, MARGIN, MARGIN + plot_h);
    let _ = writeln!(
        svg,
        r#"<path d="M{left:.2} {top:.2} L{left:.2} {bottom:.2} L{right:.2} {bottom:.2}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"#,
        left - 4.0,
        top + 4.0,
        fmt_value(hi)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"#,
        left - 4.0,
        bottom,
        fmt_value(lo)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{left:.2}" y="{:.2}" font-size="10">{}</text>"#,
        bottom + 14.0,
        rows[0].ts
    );
    let _ = writeln!(
        svg,
        r#"<text x="{right:.2}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"#,
        bottom + 14.0,
        rows[rows.len() - 1].ts
    );
    for seg in &segs {
        let points: Vec<String> = seg.iter().map(|&(t, v)| format!("{:.2},{:.2}", x(t), y(v))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#,
            points.join(" ")
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn fmt_value(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Writes the chart of its input and passes the series through unchanged.
#[derive(Debug, Clone)]
pub struct Plotter {
    pub path: Option<PathBuf>,
    pub width: u32,
    pub height: u32,
}

impl Plotter {
    pub fn new(path: Option<PathBuf>) -> Self {
        Plotter {
            path,
            width: DEFAULT_WIDTH,
            height: DEFAULT_HEIGHT,
        }
    }
}

impl Filter for Plotter {
    fn name(&self) -> &str {
        "plotter"
    }
    fn is_stateless(&self) -> bool {
        true
    }
    fn is_fitted(&self) -> bool {
        true
    }
    fn fit(&self, _input: &Data) -> Result<Box<dyn Filter>> {
        Ok(Box::new(self.clone()))
    }
    fn transform(&self, input: &Data) -> Result<Data> {
        let ts = input.as_series()?;
        let svg = render_svg(ts, self.width, self.height)?;
        if let Some(path) = &self.path {
            fs::write(path, svg).map_err(|e| Error::io(path, e))?;
        }
        Ok(Data::Series(ts.clone()))
    }
    fn clone_box(&self) -> Box<dyn Filter> {
        Box::new(self.clone())
    }
}
