//! Minimal static SVG histograms.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

/// Named samples drawn as one overlaid histogram each.
pub type Series = (String, Vec<f64>);

/// Bin edges covering `values`: `bins` equal bins, or one unit-wide bin
/// when all values coincide.
pub fn edges(values: &[f64], bins: usize) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi - lo > 1e-9) {
        return vec![lo - 0.5, lo + 0.5];
    }
    (0..=bins).map(|i| lo + (hi - lo) * i as f64 / bins as f64).collect()
}

/// Unit-aligned edges for integer counts, widened so there are at most `max_bins` bins.
pub fn integer_edges(values: &[f64], max_bins: usize) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min).floor();
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max).ceil();
    let span = (hi - lo + 1.0).max(1.0);
    let width = (span / max_bins as f64).ceil().max(1.0);
    let n = (span / width).ceil() as usize;
    (0..=n).map(|i| lo - 0.5 + width * i as f64).collect()
}

/// Counts per bin; the last bin is closed on the right.
pub fn counts(values: &[f64], edges: &[f64]) -> Vec<usize> {
    let n = edges.len() - 1;
    let mut out = vec![0; n];
    for &v in values {
        if v < edges[0] || v > edges[n] {
            continue;
        }
        let i = edges[1..].iter().position(|&e| v < e).unwrap_or(n - 1);
        out[i] += 1;
    }
    out
}

pub fn histogram_csv(series: &[Series], edges: &[f64]) -> String {
    let mut out = String::from("bin_low,bin_high");
    for (name, _) in series {
        let _ = write!(out, ",{name}");
    }
    out.push('\n');
    let all: Vec<Vec<usize>> = series.iter().map(|(_, v)| counts(v, edges)).collect();
    for i in 0..edges.len() - 1 {
        let _ = write!(out, "{},{}", edges[i], edges[i + 1]);
        for c in &all {
            let _ = write!(out, ",{}", c[i]);
        }
        out.push('\n');
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn histogram_svg(title: &str, x_label: &str, series: &[Series], edges: &[f64], note: Option<&str>) -> String {
    let all: Vec<Vec<usize>> = series.iter().map(|(_, v)| counts(v, edges)).collect();
    let ymax = all.iter().flatten().copied().max().unwrap_or(0).max(1) as f64;
    let (x0, x1) = (edges[0], edges[edges.len() - 1]);
    let pw = WIDTH - MARGIN_L - MARGIN_R;
    let ph = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| MARGIN_T + ph - y / ymax * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(title));
    for (k, counts) in all.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        for (i, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let (xa, xb) = (sx(edges[i]), sx(edges[i + 1]));
            let _ = writeln!(
                s,
                r#"<rect x="{xa:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{color}" fill-opacity="0.5" stroke="{color}"/>"#,
                sy(c as f64),
                (xb - xa).max(0.5),
                sy(0.0) - sy(c as f64)
            );
        }
    }
    let base = sy(0.0);
    let _ = writeln!(s, r#"<line x1="{MARGIN_L}" y1="{base}" x2="{}" y2="{base}" stroke="black"/>"#, MARGIN_L + pw);
    let _ = writeln!(s, r#"<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" y2="{base}" stroke="black"/>"#);
    for i in 0..=4 {
        let x = x0 + (x1 - x0) * i as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="middle">{x:.1}</text>"#, sx(x), base + 16.0);
        let y = ymax * i as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{y:.1}</text>"#, MARGIN_L - 6.0, sy(y) + 4.0);
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        MARGIN_L + pw / 2.0,
        HEIGHT - 24.0,
        escape(x_label)
    );
    for (k, (name, values)) in series.iter().enumerate() {
        let y = MARGIN_T + 14.0 + 16.0 * k as f64;
        let x = WIDTH - MARGIN_R - 150.0;
        let _ = writeln!(s, r#"<rect x="{x}" y="{}" width="10" height="10" fill="{}"/>"#, y - 9.0, COLORS[k % COLORS.len()]);
        let _ = writeln!(s, r#"<text x="{}" y="{y}">{} (n={})</text>"#, x + 14.0, escape(name), values.len());
    }
    if let Some(note) = note {
        let _ = writeln!(s, r#"<text x="{MARGIN_L}" y="{}" font-size="11">{}</text>"#, HEIGHT - 6.0, escape(note));
    }
    s.push_str("</svg>\n");
    s
}
