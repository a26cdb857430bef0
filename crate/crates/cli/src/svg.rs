//! Minimal SVG line plots: fixed 800x600 view box, one `<path>` per curve.

use std::fmt::Write;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;

const LEFT: f64 = 70.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub struct Plot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub series: &'a [Series],
    /// Written into `<metadata>` when present.
    pub timestamp: Option<&'a str>,
}

/// Smallest 1, 2 or 5 times a power of ten that is at least `x`.
pub fn nice_ceiling(x: f64) -> f64 {
    if !x.is_finite() || x <= 0.0 {
        return 1.0;
    }
    let p = 10f64.powf(x.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * p)
        .find(|&v| v >= x * (1.0 - 1e-12))
        .unwrap_or(10.0 * p)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

impl Plot<'_> {
    fn sx(&self, x: f64) -> f64 {
        let (a, b) = self.x_range;
        LEFT + (x - a) / (b - a) * (WIDTH - LEFT - RIGHT)
    }

    fn sy(&self, y: f64) -> f64 {
        let (a, b) = self.y_range;
        HEIGHT - BOTTOM - (y - a) / (b - a) * (HEIGHT - TOP - BOTTOM)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let (x0, x1) = (LEFT, WIDTH - RIGHT);
        let (y0, y1) = (TOP, HEIGHT - BOTTOM);
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="13">"#
        );
        if let Some(t) = self.timestamp {
            let _ = writeln!(s, "  <metadata>generated {}</metadata>", escape(t));
        }
        let _ = writeln!(s, "  <title>{}</title>", escape(self.title));
        let _ = writeln!(
            s,
            r#"  <defs><clipPath id="plot-area"><rect x="{x0}" y="{y0}" width="{}" height="{}"/></clipPath></defs>"#,
            x1 - x0,
            y1 - y0
        );
        let _ = writeln!(
            s,
            r#"  <rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        let _ = writeln!(
            s,
            r#"  <text x="{}" y="30" text-anchor="middle" font-size="16">{}</text>"#,
            WIDTH / 2.0,
            escape(self.title)
        );
        self.axes(&mut s);
        for (i, series) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let mut d = String::new();
            for (k, &(x, y)) in series
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .enumerate()
            {
                let cmd = if k == 0 { 'M' } else { 'L' };
                // Keep far-off points finite; the clip path hides them.
                let py = self.sy(y).clamp(-10.0 * HEIGHT, 10.0 * HEIGHT);
                let _ = write!(d, "{cmd}{:.2} {:.2} ", self.sx(x), py);
            }
            let _ = writeln!(
                s,
                r#"  <path d="{}" fill="none" stroke="{color}" stroke-width="2" clip-path="url(#plot-area)" data-label="{}"/>"#,
                d.trim_end(),
                escape(&series.label)
            );
        }
        self.legend(&mut s);
        s.push_str("</svg>\n");
        s
    }

    fn axes(&self, s: &mut String) {
        let (x0, x1) = (LEFT, WIDTH - RIGHT);
        let (y0, y1) = (TOP, HEIGHT - BOTTOM);
        let _ = writeln!(s, r#"  <g stroke="black" stroke-width="1">"#);
        let _ = writeln!(s, r#"    <line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}"/>"#);
        let _ = writeln!(s, r#"    <line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/>"#);
        let _ = writeln!(s, "  </g>");
        let _ = writeln!(s, r#"  <g text-anchor="middle">"#);
        for k in 0..=5 {
            let v = self.x_range.0 + (self.x_range.1 - self.x_range.0) * k as f64 / 5.0;
            let px = self.sx(v);
            let _ = writeln!(
                s,
                r#"    <line x1="{px:.2}" y1="{y1}" x2="{px:.2}" y2="{}" stroke="black"/>"#,
                y1 + 5.0
            );
            let _ = writeln!(
                s,
                r#"    <text x="{px:.2}" y="{}">{}</text>"#,
                y1 + 20.0,
                tick_label(v)
            );
        }
        let _ = writeln!(s, "  </g>");
        let _ = writeln!(s, r#"  <g text-anchor="end">"#);
        for k in 0..=5 {
            let v = self.y_range.0 + (self.y_range.1 - self.y_range.0) * k as f64 / 5.0;
            let py = self.sy(v);
            let _ = writeln!(
                s,
                r#"    <line x1="{}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/>"#,
                x0 - 5.0
            );
            let _ = writeln!(
                s,
                r#"    <text x="{}" y="{:.2}">{}</text>"#,
                x0 - 8.0,
                py + 4.0,
                tick_label(v)
            );
        }
        let _ = writeln!(s, "  </g>");
        let _ = writeln!(
            s,
            r#"  <text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            HEIGHT - 15.0,
            escape(self.x_label)
        );
        let _ = writeln!(
            s,
            r#"  <text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0,
            escape(self.y_label)
        );
    }

    fn legend(&self, s: &mut String) {
        let x = WIDTH - RIGHT - 200.0;
        let _ = writeln!(s, r#"  <g class="legend">"#);
        for (i, series) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let y = TOP + 15.0 + 20.0 * i as f64;
            let _ = writeln!(
                s,
                r#"    <line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="3"/>"#,
                x + 25.0
            );
            let _ = writeln!(
                s,
                r#"    <text x="{}" y="{}">{}</text>"#,
                x + 32.0,
                y + 4.0,
                escape(&series.label)
            );
        }
        let _ = writeln!(s, "  </g>");
    }
}
