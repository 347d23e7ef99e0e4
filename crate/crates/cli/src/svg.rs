//! Dependency-free SVG scatter and line plots.

use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Scatter,
    Line,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotStyle {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Free text placed under the title, e.g. the axis scaling used.
    pub annotation: Option<String>,
    pub width: f64,
    pub height: f64,
    /// Plot `log10 y`; non-positive values are dropped.
    pub log_y: bool,
}

impl Default for PlotStyle {
    fn default() -> Self {
        Self {
            title: String::new(),
            x_label: "x".into(),
            y_label: "y".into(),
            annotation: None,
            width: 640.0,
            height: 480.0,
            log_y: false,
        }
    }
}

const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 50.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    if hi - lo <= 1e-300_f64.max(1e-12 * lo.abs().max(hi.abs())) {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-2..1e4).contains(&a) {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

/// Renders the series; output depends only on the input.
pub fn emit_svg(kind: PlotKind, series: &[Series], style: &PlotStyle) -> String {
    let transform = |y: f64| if style.log_y { y.log10() } else { y };
    let data: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter(|p| !style.log_y || p.1 > 0.0)
                .map(|&(x, y)| (x, transform(y)))
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .collect()
        })
        .collect();
    let (x0, x1) = range(data.iter().flatten().map(|p| p.0));
    let (y0, y1) = range(data.iter().flatten().map(|p| p.1));
    let (w, h) = (style.width, style.height);
    let pw = w - MARGIN_LEFT - MARGIN_RIGHT;
    let ph = h - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| MARGIN_TOP + (y1 - y) / (y1 - y0) * ph;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    out.push_str("<style>\n");
    out.push_str("text { font-family: sans-serif; font-size: 12px; }\n.axis { stroke: #000; fill: none; }\n.grid { stroke: #ddd; }\n");
    for (i, _) in series.iter().enumerate() {
        let c = COLOURS[i % COLOURS.len()];
        let _ = writeln!(out, ".marker.s{i} {{ fill: {c}; stroke: none; }}");
        let _ = writeln!(out, ".line.s{i} {{ stroke: {c}; fill: none; stroke-width: 1.5; }}");
        let _ = writeln!(out, ".swatch.s{i} {{ fill: {c}; }}");
    }
    out.push_str("</style>\n");
    let _ = writeln!(out, r##"<rect x="0" y="0" width="{w}" height="{h}" fill="#fff"/>"##);
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#, w / 2.0, escape(&style.title));
    if let Some(a) = &style.annotation {
        let _ = writeln!(out, r#"<text class="annotation" x="{}" y="38" text-anchor="middle">{}</text>"#, w / 2.0, escape(a));
    }

    // axes and ticks
    let _ = writeln!(out, r#"<rect class="axis" x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}"/>"#);
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let (gx, gy) = (px(xv), py(yv));
        let _ = writeln!(out, r#"<line class="grid" x1="{gx:.2}" y1="{MARGIN_TOP}" x2="{gx:.2}" y2="{:.2}"/>"#, MARGIN_TOP + ph);
        let _ = writeln!(out, r#"<line class="grid" x1="{MARGIN_LEFT}" y1="{gy:.2}" x2="{:.2}" y2="{gy:.2}"/>"#, MARGIN_LEFT + pw);
        let _ = writeln!(out, r#"<text x="{gx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, MARGIN_TOP + ph + 16.0, tick(xv));
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, MARGIN_LEFT - 6.0, gy + 4.0, tick(yv));
    }
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, MARGIN_LEFT + pw / 2.0, h - 10.0, escape(&style.x_label));
    let y_label = if style.log_y { format!("log10 {}", style.y_label) } else { style.y_label.clone() };
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        MARGIN_TOP + ph / 2.0,
        MARGIN_TOP + ph / 2.0,
        escape(&y_label)
    );

    for (i, pts) in data.iter().enumerate() {
        match kind {
            PlotKind::Scatter => {
                for &(x, y) in pts {
                    let _ = writeln!(out, r#"<circle class="marker s{i}" cx="{:.2}" cy="{:.2}" r="2.5"/>"#, px(x), py(y));
                }
            }
            PlotKind::Line => {
                let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
                let _ = writeln!(out, r#"<polyline class="line s{i}" points="{}"/>"#, path.join(" "));
            }
        }
    }

    // legend
    for (i, s) in series.iter().enumerate() {
        let ly = MARGIN_TOP + 10.0 + 18.0 * i as f64;
        let lx = MARGIN_LEFT + pw + 12.0;
        let _ = writeln!(out, r#"<rect class="swatch s{i}" x="{lx:.2}" y="{:.2}" width="10" height="10"/>"#, ly - 9.0);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{ly:.2}">{}</text>"#, lx + 16.0, escape(&s.label));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(label: &str, pts: &[(f64, f64)]) -> Series {
        Series {
            label: label.into(),
            points: pts.to_vec(),
        }
    }

    #[test]
    fn single_point_gives_single_marker() {
        let svg = emit_svg(PlotKind::Scatter, &[series("origin", &[(0.0, 0.0)])], &PlotStyle::default());
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn three_series_use_three_marker_classes() {
        let s: Vec<Series> = (0..3)
            .map(|i| series(&format!("α={i}"), &[(i as f64, 1.0), (i as f64, -1.0)]))
            .collect();
        let svg = emit_svg(PlotKind::Scatter, &s, &PlotStyle::default());
        for i in 0..3 {
            assert_eq!(svg.matches(&format!("class=\"marker s{i}\"")).count(), 2);
            assert!(svg.contains(&format!(".marker.s{i} {{ fill: {};", COLOURS[i])));
        }
    }

    #[test]
    fn deterministic_and_annotated() {
        let style = PlotStyle {
            annotation: Some("Im scaled by 0.01".into()),
            log_y: true,
            ..PlotStyle::default()
        };
        let s = [series("E", &[(0.0, 1.0), (1.0, 10.0), (2.0, 0.0)])];
        let a = emit_svg(PlotKind::Line, &s, &style);
        assert_eq!(a, emit_svg(PlotKind::Line, &s, &style));
        assert!(a.contains("Im scaled by 0.01"));
        assert_eq!(a.matches("<polyline").count(), 1);
    }

    #[test]
    fn labels_are_escaped() {
        let style = PlotStyle {
            title: "a<b & c".into(),
            ..PlotStyle::default()
        };
        let svg = emit_svg(PlotKind::Scatter, &[series("x", &[(1.0, 2.0)])], &style);
        assert!(svg.contains("a&lt;b &amp; c"));
    }
}
