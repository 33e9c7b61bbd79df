//! CSV and SVG output.
//!
//! CSV floats use Rust's shortest round-trip formatting (`{:?}`), so parsing
//! them back yields the exact in-memory values. SVG plots are presentation
//! only and are rounded to 0.01 user units.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::seqfeat::{AutocorrCurve, AutocorrMatrix};
use crate::slant::EntropyCurve;

const COLORS: [&str; 6] = ["#1f4fd8", "#d81f1f", "#1f9d3a", "#b36b00", "#7a1fd8", "#00838f"];

pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// `angle_deg,entropy_nats_h{H}...`, one column per curve. All curves must
/// share the same angles.
pub fn entropy_csv(curves: &[EntropyCurve]) -> Result<String> {
    let first = curves.first().ok_or_else(|| Error::InvalidConfig("no entropy curves".into()))?;
    if curves.iter().any(|c| c.angles != first.angles) {
        return Err(Error::InvalidConfig("entropy curves use different angle grids".into()));
    }
    let mut out = String::from("angle_deg");
    for c in curves {
        write!(out, ",entropy_nats_h{}", c.sub_strip_height).unwrap();
    }
    out.push('\n');
    for (i, a) in first.angles.iter().enumerate() {
        out.push_str(&fmt_f64(*a));
        for c in curves {
            out.push(',');
            out.push_str(&fmt_f64(c.values[i]));
        }
        out.push('\n');
    }
    Ok(out)
}

/// `lag,auto` rows for one curve.
pub fn autocorr_csv(curve: &AutocorrCurve) -> String {
    let mut out = String::from("lag,auto\n");
    for (lag, v) in curve.lags.iter().zip(&curve.values) {
        writeln!(out, "{lag},{}", fmt_f64(*v)).unwrap();
    }
    out
}

/// One row per step: `step,c0,...,c{n-1}`.
pub fn matrix_csv(m: &AutocorrMatrix) -> String {
    let width = m.curves.first().map_or(0, Vec::len);
    let mut out = String::from("step");
    for j in 0..width {
        write!(out, ",c{j}").unwrap();
    }
    out.push('\n');
    for (step, row) in m.steps.iter().zip(&m.curves) {
        out.push_str(&step.to_string());
        for v in row {
            out.push(',');
            out.push_str(&fmt_f64(*v));
        }
        out.push('\n');
    }
    out
}

/// Parse a numeric CSV with one header line.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidConfig("empty CSV".into()))?
        .split(',')
        .map(str::to_string)
        .collect::<Vec<_>>();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|f| f.parse::<f64>().map_err(|_| Error::InvalidConfig(format!("bad CSV field {f:?}"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((header, rows))
}

pub struct Series<'a> {
    pub label: String,
    pub xs: &'a [f64],
    pub ys: &'a [f64],
}

struct Frame {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
}

impl Frame {
    fn px(&self, v: f64) -> f64 {
        let (lo, hi) = self.x_range;
        self.x + if hi > lo { (v - lo) / (hi - lo) * self.w } else { 0.0 }
    }

    fn py(&self, v: f64) -> f64 {
        let (lo, hi) = self.y_range;
        self.y + self.h - if hi > lo { (v - lo) / (hi - lo) * self.h } else { 0.0 }
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo.is_finite() {
        (lo, hi)
    } else {
        (0.0, 1.0)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn draw_panel(out: &mut String, frame: &Frame, series: &[Series<'_>], title: &str) {
    writeln!(
        out,
        r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#888"/>"##,
        frame.x, frame.y, frame.w, frame.h
    )
    .unwrap();
    writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#, frame.x, frame.y - 6.0, escape(title))
        .unwrap();
    for (axis_v, anchor_x, anchor_y, text) in [
        (frame.x_range.0, frame.x, frame.y + frame.h + 14.0, "start"),
        (frame.x_range.1, frame.x + frame.w, frame.y + frame.h + 14.0, "end"),
    ] {
        writeln!(
            out,
            r#"<text x="{anchor_x:.2}" y="{anchor_y:.2}" font-size="10" text-anchor="{text}">{axis_v:.2}</text>"#
        )
        .unwrap();
    }
    for (v, y) in [(frame.y_range.1, frame.y + 10.0), (frame.y_range.0, frame.y + frame.h)] {
        writeln!(out, r#"<text x="{:.2}" y="{y:.2}" font-size="10" text-anchor="end">{v:.3}</text>"#, frame.x - 4.0)
            .unwrap();
    }
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut pts = String::new();
        for (x, y) in s.xs.iter().zip(s.ys) {
            if !pts.is_empty() {
                pts.push(' ');
            }
            write!(pts, "{:.2},{:.2}", frame.px(*x), frame.py(*y)).unwrap();
        }
        writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>"#).unwrap();
        if series.len() > 1 {
            writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-size="11" fill="{color}" text-anchor="end">{}</text>"#,
                frame.x + frame.w - 6.0,
                frame.y + 16.0 + 14.0 * i as f64,
                escape(&s.label)
            )
            .unwrap();
        }
    }
}

fn svg_document(width: f64, height: f64, body: &str) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}

/// Overlaid polylines in one frame.
pub fn line_plot_svg(title: &str, series: &[Series<'_>]) -> String {
    let frame = Frame {
        x: 60.0,
        y: 30.0,
        w: 640.0,
        h: 320.0,
        x_range: range(series.iter().flat_map(|s| s.xs.iter().copied())),
        y_range: range(series.iter().flat_map(|s| s.ys.iter().copied())),
    };
    let mut body = String::new();
    draw_panel(&mut body, &frame, series, title);
    svg_document(740.0, 380.0, &body)
}

pub fn entropy_svg(curves: &[EntropyCurve]) -> String {
    let series: Vec<Series<'_>> = curves
        .iter()
        .map(|c| Series { label: format!("h={}", c.sub_strip_height), xs: &c.angles, ys: &c.values })
        .collect();
    line_plot_svg("entropy (nats) vs angle (deg)", &series)
}

pub fn autocorr_svg(curve: &AutocorrCurve) -> String {
    let xs: Vec<f64> = curve.lags.iter().map(|&l| l as f64).collect();
    line_plot_svg(
        &format!("autocorrelation, step={}", curve.step),
        &[Series { label: format!("step={}", curve.step), xs: &xs, ys: &curve.values }],
    )
}

/// Small multiples, one panel per step, stacked vertically with a shared
/// y range of [-1, 1].
pub fn matrix_svg(m: &AutocorrMatrix) -> String {
    let (w, h, gap) = (640.0, 90.0, 34.0);
    let mut body = String::new();
    for (i, (step, row)) in m.steps.iter().zip(&m.curves).enumerate() {
        let xs: Vec<f64> = (0..row.len()).map(|j| j as f64).collect();
        let frame = Frame {
            x: 60.0,
            y: 30.0 + i as f64 * (h + gap),
            w,
            h,
            x_range: (0.0, (row.len().max(2) - 1) as f64),
            y_range: (-1.0, 1.0),
        };
        let series = [Series { label: format!("step={step}"), xs: &xs, ys: row }];
        draw_panel(&mut body, &frame, &series, &format!("step={step} (resampled lag)"));
    }
    let height = 30.0 + m.steps.len() as f64 * (h + gap);
    svg_document(740.0, height, &body)
}
