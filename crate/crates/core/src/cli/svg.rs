//! Minimal SVG output: line plots with axes and curves in the plane.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points }
    }
}

/// A line plot. With `log_y` the values are plotted as `log10 y` and
/// nonpositive values are dropped.
#[derive(Debug, Clone, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub series: Vec<Series>,
}

fn bounds(pts: impl Iterator<Item = (f64, f64)>) -> Option<(f64, f64, f64, f64)> {
    let mut b: Option<(f64, f64, f64, f64)> = None;
    for (x, y) in pts {
        if !x.is_finite() || !y.is_finite() {
            continue;
        }
        b = Some(match b {
            None => (x, x, y, y),
            Some((x0, x1, y0, y1)) => (x0.min(x), x1.max(x), y0.min(y), y1.max(y)),
        });
    }
    b.map(|(x0, x1, y0, y1)| {
        let pad = |a: f64, b: f64| if b - a > 0.0 { (a, b) } else { (a - 0.5 - a.abs() * 0.1, b + 0.5 + b.abs() * 0.1) };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        (x0, x1, y0, y1)
    })
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn polyline(out: &mut String, pts: &[(f64, f64)], color: &str, class: &str) {
    let mut p = String::new();
    for (x, y) in pts {
        let _ = write!(p, "{x:.3},{y:.3} ");
    }
    let _ = writeln!(
        out,
        r#"<polyline class="{class}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
        p.trim_end()
    );
}

impl Plot {
    pub fn render(&self) -> String {
        let data: Vec<Vec<(f64, f64)>> = self
            .series
            .iter()
            .map(|s| {
                s.points
                    .iter()
                    .filter(|(x, y)| x.is_finite() && y.is_finite() && (!self.log_y || *y > 0.0))
                    .map(|&(x, y)| (x, if self.log_y { y.log10() } else { y }))
                    .collect()
            })
            .collect();
        let mut out = String::new();
        header(&mut out, &self.title);
        let Some((x0, x1, y0, y1)) = bounds(data.iter().flatten().copied()) else {
            out.push_str("</svg>\n");
            return out;
        };
        let (w, h) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
        let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * w;
        let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * h;
        let _ = writeln!(
            out,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{w}" height="{h}" fill="none" stroke="black"/>"#
        );
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
            let ylabel = if self.log_y { format!("1e{yv:.1}") } else { format!("{yv:.4}") };
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{xv:.3}</text>"#,
                sx(xv),
                HEIGHT - MARGIN + 16.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{ylabel}</text>"#,
                MARGIN - 4.0,
                sy(yv) + 4.0
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 16.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        for (i, (s, pts)) in self.series.iter().zip(&data).enumerate() {
            let color = COLORS[i % COLORS.len()];
            let mapped: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (sx(x), sy(y))).collect();
            polyline(&mut out, &mapped, color, "series");
            if !s.label.is_empty() {
                let _ = writeln!(
                    out,
                    r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" fill="{color}">{}</text>"#,
                    MARGIN + 8.0,
                    MARGIN + 16.0 + 15.0 * i as f64,
                    escape(&s.label)
                );
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Curves in the plane drawn with equal axis scales (y up). A marker with
/// class `center` is drawn at `center` when given.
pub fn plane_curves(title: &str, curves: &[Series], center: Option<(f64, f64)>) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let all = curves.iter().flat_map(|c| c.points.iter().copied()).chain(center);
    let Some((x0, x1, y0, y1)) = bounds(all) else {
        out.push_str("</svg>\n");
        return out;
    };
    let (w, h) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let scale = (w / (x1 - x0)).min(h / (y1 - y0));
    let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
    let map = |(x, y): (f64, f64)| (WIDTH / 2.0 + (x - cx) * scale, HEIGHT / 2.0 - (y - cy) * scale);
    for (i, c) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<(f64, f64)> = c.points.iter().map(|&p| map(p)).collect();
        polyline(&mut out, &pts, color, "curve");
        if !c.label.is_empty() {
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" fill="{color}">{}</text>"#,
                12.0,
                48.0 + 15.0 * i as f64,
                escape(&c.label)
            );
        }
    }
    if let Some(c) = center {
        let (x, y) = map(c);
        let _ = writeln!(out, r#"<circle class="center" cx="{x:.3}" cy="{y:.3}" r="2.5" fill="black"/>"#);
    }
    out.push_str("</svg>\n");
    out
}

/// Reads back the polylines of an SVG written by this module, in drawing
/// coordinates.
pub fn parse_polylines(svg: &str) -> Vec<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for part in svg.split("<polyline").skip(1) {
        let Some(start) = part.find("points=\"") else { continue };
        let rest = &part[start + 8..];
        let Some(end) = rest.find('"') else { continue };
        let pts = rest[..end]
            .split_whitespace()
            .filter_map(|p| {
                let (x, y) = p.split_once(',')?;
                Some((x.parse().ok()?, y.parse().ok()?))
            })
            .collect();
        out.push(pts);
    }
    out
}

/// Center marker of an SVG written by [`plane_curves`].
pub fn parse_center(svg: &str) -> Option<(f64, f64)> {
    let part = svg.split("<circle class=\"center\"").nth(1)?;
    let attr = |name: &str| -> Option<f64> {
        let key = format!("{name}=\"");
        let s = &part[part.find(&key)? + key.len()..];
        s[..s.find('"')?].parse().ok()
    };
    Some((attr("cx")?, attr("cy")?))
}
