// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! Minimal SVG charts for report series: density profiles, ratio maps,
//! histograms.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::experiments::{ExperimentReport, Series, SeriesKind};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let finite = v.iter().copied().filter(|x| x.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// Renders one series as a standalone SVG document.
pub fn series_svg(series: &Series, title: &str) -> Result<String> {
    if series.x.len() != series.y.len() {
        return Err(Error::Parameter(format!(
            "series {} has {} x values and {} y values",
            series.name,
            series.x.len(),
            series.y.len()
        )));
    }
    let (x0, x1) = bounds(&series.x);
    let (mut y0, y1) = bounds(&series.y);
    if matches!(series.kind, SeriesKind::Bar | SeriesKind::Histogram) {
        y0 = y0.min(0.0);
    }
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    // Axes and labels.
    let _ = writeln!(
        s,
        r#"<path d="M{m} {t} V{b} H{r}" stroke="black" fill="none"/>"#,
        m = MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    for (v, anchor, x, y) in [
        (x0, "start", MARGIN, HEIGHT - MARGIN + 16.0),
        (x1, "end", WIDTH - MARGIN, HEIGHT - MARGIN + 16.0),
    ] {
        let _ = writeln!(s, r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{v:.4}</text>"#);
    }
    for (v, y) in [(y0, HEIGHT - MARGIN), (y1, MARGIN)] {
        let _ = writeln!(s, r#"<text x="{}" y="{y}" text-anchor="end">{v:.3e}</text>"#, MARGIN - 4.0);
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(&series.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(&series.y_label)
    );

    match series.kind {
        SeriesKind::Line => {
            let mut d = String::new();
            let mut pen_down = false;
            for (&x, &y) in series.x.iter().zip(&series.y) {
                if !(x.is_finite() && y.is_finite()) {
                    pen_down = false;
                    continue;
                }
                let _ = write!(d, "{}{:.2} {:.2} ", if pen_down { "L" } else { "M" }, px(x), py(y));
                pen_down = true;
            }
            let _ = writeln!(s, r##"<path d="{}" stroke="#1f77b4" stroke-width="1.5" fill="none"/>"##, d.trim_end());
        }
        SeriesKind::Bar | SeriesKind::Histogram => {
            let n = series.x.len().max(1) as f64;
            let slot = (WIDTH - 2.0 * MARGIN) / n;
            let base = py(y0.max(0.0).min(y1));
            for (&x, &y) in series.x.iter().zip(&series.y) {
                if !(x.is_finite() && y.is_finite()) {
                    continue;
                }
                let cx = if series.x.len() == 1 { WIDTH / 2.0 } else { px(x) };
                let top = py(y).min(base);
                let h = (py(y) - base).abs();
                let _ = writeln!(
                    s,
                    r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#1f77b4"/>"##,
                    cx - 0.4 * slot,
                    top,
                    0.8 * slot,
                    h
                );
            }
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// One `(series name, svg)` pair per series of the report.
pub fn report_svgs(report: &ExperimentReport) -> Result<Vec<(String, String)>> {
    report
        .series
        .iter()
        .map(|series| {
            let title = format!("{}: {}", report.name, series.name);
            Ok((series.name.clone(), series_svg(series, &title)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(kind: SeriesKind) -> Series {
        Series {
            name: "s".into(),
            kind,
            x_label: "x".into(),
            y_label: "y <1>".into(),
            x: vec![0.0, 1.0, 2.0],
            y: vec![1.0, f64::NAN, 3.0],
        }
    }

    #[test]
    fn renders_all_kinds() {
        for kind in [SeriesKind::Line, SeriesKind::Bar, SeriesKind::Histogram] {
            let svg = series_svg(&series(kind), "t").unwrap();
            assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
            assert!(svg.contains("y &lt;1&gt;"));
        }
    }

    #[test]
    fn mismatched_lengths_fail() {
        let mut s = series(SeriesKind::Line);
        s.y.pop();
        assert!(series_svg(&s, "t").is_err());
    }
}
