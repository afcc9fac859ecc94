//! Minimal SVG renderings of the CSV outputs, for a quick look.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

pub struct Series<'a> {
    pub name: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 * (1.0 + lo.abs()) {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn frame(out: &mut String, title: &str, x_label: &str, y_label: &str, xr: (f64, f64), yr: (f64, f64)) {
    let _ = write!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
<rect x="{MARGIN}" y="{MARGIN}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>
<text x="{cx}" y="24" text-anchor="middle" font-size="14">{title}</text>
<text x="{cx}" y="{xl}" text-anchor="middle">{x_label}</text>
<text x="16" y="{cy}" text-anchor="middle" transform="rotate(-90 16 {cy})">{y_label}</text>
<text x="{MARGIN}" y="{tick}" text-anchor="start">{x0:.3}</text>
<text x="{xr_px}" y="{tick}" text-anchor="end">{x1:.3}</text>
<text x="{ylab}" y="{yb}" text-anchor="end">{y0:.3}</text>
<text x="{ylab}" y="{yt}" text-anchor="end">{y1:.3}</text>
"##,
        pw = W - 2.0 * MARGIN,
        ph = H - 2.0 * MARGIN,
        cx = W / 2.0,
        cy = H / 2.0,
        xl = H - 12.0,
        tick = H - MARGIN + 16.0,
        xr_px = W - MARGIN,
        ylab = MARGIN - 4.0,
        yb = H - MARGIN,
        yt = MARGIN + 10.0,
        title = escape(title),
        x_label = escape(x_label),
        y_label = escape(y_label),
        x0 = xr.0,
        x1 = xr.1,
        y0 = yr.0,
        y1 = yr.1,
    );
}

pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let xr = bounds(series.iter().flat_map(|s| s.x.iter().copied()));
    let yr = bounds(series.iter().flat_map(|s| s.y.iter().copied()));
    let px = |x: f64| MARGIN + (x - xr.0) / (xr.1 - xr.0) * (W - 2.0 * MARGIN);
    let py = |y: f64| H - MARGIN - (y - yr.0) / (yr.1 - yr.0) * (H - 2.0 * MARGIN);
    let mut out = String::new();
    frame(&mut out, title, x_label, y_label, xr, yr);
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        out.push_str(&format!(
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points=""#
        ));
        for (x, y) in s.x.iter().zip(s.y) {
            if x.is_finite() && y.is_finite() {
                let _ = write!(out, "{:.2},{:.2} ", px(*x), py(*y));
            }
        }
        out.push_str("\"/>\n");
        let ly = MARGIN + 16.0 + 16.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<text x="{x}" y="{ly}" fill="{color}" text-anchor="end">{name}</text>"#,
            x = W - MARGIN - 6.0,
            name = escape(s.name)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// `values` is row-major, `ys.len()` rows by `xs.len()` columns; colour runs
/// from white (0) to dark blue (max).
pub fn heatmap(title: &str, x_label: &str, y_label: &str, xs: &[f64], ys: &[f64], values: &[f64]) -> String {
    assert_eq!(values.len(), xs.len() * ys.len());
    let xr = bounds(xs.iter().copied());
    let yr = bounds(ys.iter().copied());
    let max = values.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
    let cw = (W - 2.0 * MARGIN) / xs.len() as f64;
    let ch = (H - 2.0 * MARGIN) / ys.len() as f64;
    let mut out = String::new();
    frame(&mut out, title, x_label, y_label, xr, yr);
    for (r, row) in values.chunks(xs.len()).enumerate() {
        for (c, v) in row.iter().enumerate() {
            let s = if max > 0.0 { (v / max).clamp(0.0, 1.0) } else { 0.0 };
            if s < 1e-3 {
                continue;
            }
            let shade = |full: f64, dark: f64| (full + (dark - full) * s).round() as u8;
            let _ = writeln!(
                out,
                r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#{:02x}{:02x}{:02x}"/>"##,
                MARGIN + c as f64 * cw,
                H - MARGIN - (r + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05,
                shade(255.0, 8.0),
                shade(255.0, 48.0),
                shade(255.0, 107.0),
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_chart_is_well_formed() {
        let x = [0.0, 1.0, 2.0];
        let y = [1.0, 0.5, f64::NAN];
        let svg = line_chart(
            "a < b",
            "t",
            "P",
            &[Series {
                name: "P_e1",
                x: &x,
                y: &y,
            }],
        );
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("a &lt; b"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn heatmap_skips_blank_cells() {
        let svg = heatmap("h", "k1", "k2", &[0.0, 1.0], &[0.0, 1.0], &[0.0, 1.0, 0.5, 0.0]);
        assert_eq!(svg.matches("<rect x=").count(), 1 + 2);
    }

    #[test]
    fn flat_data_still_gets_a_range() {
        let x = [0.0, 1.0];
        let y = [2.0, 2.0];
        let svg = line_chart(
            "flat",
            "t",
            "y",
            &[Series {
                name: "y",
                x: &x,
                y: &y,
            }],
        );
        assert!(!svg.contains("inf") && !svg.contains("NaN"));
    }
}
