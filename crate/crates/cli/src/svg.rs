//! Hand-written SVG line, scatter and forest plots.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

impl Scale {
    fn apply(self, v: f64) -> f64 {
        match self {
            Scale::Linear => v,
            Scale::Log => v.log10(),
        }
    }
}

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

/// A horizontal interval drawn at a given height, with an optional marker.
pub struct Interval {
    pub label: String,
    pub lo: f64,
    pub hi: f64,
    pub mark: Option<f64>,
}

/// Error bars `(x_lo, x_hi, y_lo, y_hi)`.
type Bars = (f64, f64, f64, f64);

pub struct Plot {
    title: String,
    x_label: String,
    y_label: String,
    x_scale: Scale,
    lines: Vec<Series>,
    scatter: Vec<(f64, f64, Option<Bars>)>,
    diagonal: bool,
    ref_x: Vec<f64>,
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
    x_scale: Scale,
}

impl Frame {
    fn px(&self, v: f64) -> f64 {
        let t = (self.x_scale.apply(v) - self.x.0) / (self.x.1 - self.x.0);
        LEFT + t * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, v: f64) -> f64 {
        let t = (v - self.y.0) / (self.y.1 - self.y.0);
        HEIGHT - BOTTOM - t * (HEIGHT - TOP - BOTTOM)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if (hi - lo).abs() < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.04 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn tick_text(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        escape(title)
    );
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Plot {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            x_scale: Scale::Linear,
            lines: Vec::new(),
            scatter: Vec::new(),
            diagonal: false,
            ref_x: Vec::new(),
        }
    }

    pub fn x_scale(mut self, scale: Scale) -> Self {
        self.x_scale = scale;
        self
    }

    pub fn line(&mut self, name: &str, points: Vec<(f64, f64)>, dashed: bool) {
        self.lines.push(Series { name: name.into(), points, dashed });
    }

    pub fn point(&mut self, x: f64, y: f64, bars: Option<Bars>) {
        self.scatter.push((x, y, bars));
    }

    pub fn diagonal(&mut self) {
        self.diagonal = true;
    }

    pub fn vertical(&mut self, x: f64) {
        self.ref_x.push(x);
    }

    fn frame(&self) -> Frame {
        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for s in &self.lines {
            for &(x, y) in &s.points {
                xs.push(x);
                ys.push(y);
            }
        }
        for &(x, y, bars) in &self.scatter {
            xs.push(x);
            ys.push(y);
            if let Some((a, b, c, d)) = bars {
                xs.extend([a, b]);
                ys.extend([c, d]);
            }
        }
        xs.extend(&self.ref_x);
        let xs: Vec<f64> = xs.into_iter().filter(|v| v.is_finite()).map(|v| self.x_scale.apply(v)).collect();
        let ys: Vec<f64> = ys.into_iter().filter(|v| v.is_finite()).collect();
        let range =
            |v: &[f64]| v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        let (mut x, mut y) = (range(&xs), range(&ys));
        if !x.0.is_finite() {
            x = (0.0, 1.0);
        }
        if !y.0.is_finite() {
            y = (0.0, 1.0);
        }
        if self.diagonal {
            let lo = x.0.min(y.0);
            let hi = x.1.max(y.1);
            x = (lo, hi);
            y = (lo, hi);
        }
        Frame { x: padded(x.0, x.1), y: padded(y.0, y.1), x_scale: self.x_scale }
    }

    pub fn render(&self) -> String {
        let f = self.frame();
        let mut out = String::new();
        header(&mut out, &self.title);
        let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);

        for t in ticks(f.y.0, f.y.1) {
            let y = f.py(t);
            let _ = writeln!(out, r##"<line x1="{x0}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#eee"/>"##);
            let _ =
                writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 6.0, y + 4.0, tick_text(t));
        }
        for t in ticks(f.x.0, f.x.1) {
            let v = match self.x_scale {
                Scale::Linear => t,
                Scale::Log => 10f64.powf(t),
            };
            let x = f.px(v);
            let _ = writeln!(out, r##"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{y1}" stroke="#eee"/>"##);
            let _ = writeln!(out, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, y1 + 16.0, tick_text(v));
        }
        let _ = writeln!(
            out,
            r#"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            x1 - x0,
            y1 - y0
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            HEIGHT - 18.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text transform="translate(18 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
            (y0 + y1) / 2.0,
            escape(&self.y_label)
        );

        if self.diagonal {
            let lo = f.x.0.max(f.y.0);
            let hi = f.x.1.min(f.y.1);
            let _ = writeln!(
                out,
                r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888" stroke-dasharray="4 3"/>"##,
                f.px(lo),
                f.py(lo),
                f.px(hi),
                f.py(hi)
            );
        }
        for &v in &self.ref_x {
            let x = f.px(v);
            let _ = writeln!(
                out,
                r##"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{y1}" stroke="#888" stroke-dasharray="4 3"/>"##
            );
        }

        for (i, s) in self.lines.iter().enumerate() {
            let colour = PALETTE[i % PALETTE.len()];
            let pts: Vec<String> = s
                .points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y)))
                .collect();
            let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{colour}" stroke-width="2"{dash} points="{}"/>"#,
                pts.join(" ")
            );
            let ly = TOP + 16.0 + 20.0 * i as f64;
            let _ = writeln!(
                out,
                r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"{dash}/>"#,
                x1 + 12.0,
                x1 + 36.0
            );
            let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, x1 + 42.0, ly + 4.0, escape(&s.name));
        }

        for &(x, y, bars) in &self.scatter {
            if let Some((a, b, c, d)) = bars {
                let _ = writeln!(
                    out,
                    r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#aaa"/>"##,
                    f.px(a),
                    f.py(y),
                    f.px(b),
                    f.py(y)
                );
                let _ = writeln!(
                    out,
                    r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#aaa"/>"##,
                    f.px(x),
                    f.py(c),
                    f.px(x),
                    f.py(d)
                );
            }
            let _ =
                writeln!(out, r##"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{}"/>"##, f.px(x), f.py(y), PALETTE[0]);
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Forest plot on the log hazard-ratio axis: one row per study with up to
/// two intervals (the first drawn solid, the second dashed and offset).
pub fn forest(title: &str, rows: &[(Interval, Option<Interval>)], reference: f64) -> String {
    let height = (TOP + BOTTOM + 22.0 * rows.len() as f64).max(HEIGHT);
    let mut lo = reference.ln();
    let mut hi = reference.ln();
    for (a, b) in rows {
        for i in std::iter::once(a).chain(b.iter()) {
            for v in [i.lo, i.hi] {
                if v.is_finite() && v > 0.0 {
                    lo = lo.min(v.ln());
                    hi = hi.max(v.ln());
                }
            }
        }
    }
    let (lo, hi) = padded(lo, hi);
    let left = 150.0;
    let right = WIDTH - 40.0;
    let px = |v: f64| left + (v.ln() - lo) / (hi - lo) * (right - left);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let bottom = height - BOTTOM + 10.0;
    let rx = px(reference);
    let _ = writeln!(
        out,
        r##"<line x1="{rx:.2}" y1="{TOP}" x2="{rx:.2}" y2="{bottom}" stroke="#888" stroke-dasharray="4 3"/>"##
    );
    let round: [f64; 11] = [0.1, 0.2, 0.3, 0.5, 0.7, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0];
    for v in round.into_iter().filter(|v| (lo..=hi).contains(&v.ln())) {
        let x = px(v);
        let _ =
            writeln!(out, r##"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{}" stroke="black"/>"##, bottom + 5.0);
        let _ = writeln!(out, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, bottom + 18.0, tick_text(v));
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">hazard ratio (log scale)</text>"#,
        (left + right) / 2.0,
        bottom + 38.0
    );
    for (k, (a, b)) in rows.iter().enumerate() {
        let y = TOP + 14.0 + 22.0 * k as f64;
        let _ =
            writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, left - 10.0, y + 4.0, escape(&a.label));
        for (i, dash, dy) in
            std::iter::once((a, "", -3.0)).chain(b.iter().map(|b| (b, r#" stroke-dasharray="4 2""#, 4.0)))
        {
            let colour = if dash.is_empty() { PALETTE[0] } else { PALETTE[1] };
            let x0 = if i.lo > 0.0 { px(i.lo) } else { left };
            let x1 = px(i.hi);
            let _ = writeln!(
                out,
                r#"<line x1="{x0:.2}" y1="{:.2}" x2="{x1:.2}" y2="{:.2}" stroke="{colour}" stroke-width="2"{dash}/>"#,
                y + dy,
                y + dy
            );
            if let Some(m) = i.mark {
                let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{colour}"/>"#, px(m), y + dy);
            }
        }
    }
    out.push_str("</svg>\n");
    out
}
