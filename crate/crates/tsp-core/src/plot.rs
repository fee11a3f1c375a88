//! Static SVG plots for pipeline reports: bar charts with error whiskers
//! and a square diverging-scale heatmap. Output is plain text with fixed
//! float formatting, so identical inputs give identical bytes.

fn fmt(v: f64) -> String {
    format!("{v:.4}")
}

fn color_diverging(v: f64, max_abs: f64) -> String {
    // Blue (negative) to white to red (positive).
    let t = if max_abs > 0.0 { (v / max_abs).clamp(-1.0, 1.0) } else { 0.0 };
    let (r, g, b) = if t >= 0.0 {
        (255.0, 255.0 * (1.0 - t), 255.0 * (1.0 - t))
    } else {
        (255.0 * (1.0 + t), 255.0 * (1.0 + t), 255.0)
    };
    format!("rgb({},{},{})", r.round() as u8, g.round() as u8, b.round() as u8)
}

/// Vertical bar chart. `whisker[i]`, when given, draws ±whisker error bars.
pub fn bar_chart_svg(title: &str, labels: &[String], values: &[f64], whisker: Option<&[f64]>) -> String {
    assert_eq!(labels.len(), values.len());
    if let Some(w) = whisker {
        assert_eq!(w.len(), values.len());
    }
    let n = values.len().max(1);
    let width = 120.0 + 60.0 * n as f64;
    let height = 360.0;
    let (top, bottom, left) = (40.0, 60.0, 70.0);
    let plot_h = height - top - bottom;

    let mut lo = 0.0f64;
    let mut hi = 0.0f64;
    for (i, &v) in values.iter().enumerate() {
        let w = whisker.map(|w| w[i]).unwrap_or(0.0);
        lo = lo.min(v - w);
        hi = hi.max(v + w);
    }
    if hi - lo < 1e-12 {
        hi = lo + 1.0;
    }
    let span = hi - lo;
    let y_of = |v: f64| top + plot_h * (hi - v) / span;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\">\n",
        width as u64, height as u64
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        fmt(width / 2.0),
        title
    ));
    // Zero axis.
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#444\"/>\n",
        fmt(left),
        fmt(y_of(0.0)),
        fmt(width - 20.0),
        fmt(y_of(0.0))
    ));
    for (i, &v) in values.iter().enumerate() {
        let x = left + 10.0 + 60.0 * i as f64;
        let bar_w = 40.0;
        let (y0, y1) = if v >= 0.0 { (y_of(v), y_of(0.0)) } else { (y_of(0.0), y_of(v)) };
        let fill = if v >= 0.0 { "#c0504d" } else { "#4f81bd" };
        svg.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
            fmt(x),
            fmt(y0),
            fmt(bar_w),
            fmt((y1 - y0).max(0.5)),
            fill
        ));
        if let Some(w) = whisker {
            let cx = x + bar_w / 2.0;
            svg.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#222\"/>\n",
                fmt(cx),
                fmt(y_of(v + w[i])),
                fmt(cx),
                fmt(y_of(v - w[i]))
            ));
            for tip in [v + w[i], v - w[i]] {
                svg.push_str(&format!(
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#222\"/>\n",
                    fmt(cx - 6.0),
                    fmt(y_of(tip)),
                    fmt(cx + 6.0),
                    fmt(y_of(tip))
                ));
            }
        }
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            fmt(x + bar_w / 2.0),
            fmt(height - bottom + 16.0),
            labels[i]
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
            fmt(x + bar_w / 2.0),
            fmt(height - bottom + 30.0),
            fmt(v)
        ));
    }
    // Scale ticks.
    for &v in &[lo, 0.0, hi] {
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
            fmt(left - 6.0),
            fmt(y_of(v) + 4.0),
            fmt(v)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Square heatmap over group pairs; `cell` returns the value for (row, col)
/// when present.
pub fn heatmap_svg(
    title: &str,
    labels: &[String],
    cell: impl Fn(usize, usize) -> Option<f64>,
) -> String {
    let n = labels.len();
    let cell_px = 46.0;
    let left = 90.0;
    let top = 60.0;
    let width = left + cell_px * n as f64 + 30.0;
    let height = top + cell_px * n as f64 + 40.0;

    let mut max_abs = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if let Some(v) = cell(i, j) {
                max_abs = max_abs.max(v.abs());
            }
        }
    }

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\">\n",
        width as u64, height as u64
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        fmt(width / 2.0),
        title
    ));
    for (j, label) in labels.iter().enumerate() {
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            fmt(left + cell_px * (j as f64 + 0.5)),
            fmt(top - 8.0),
            label
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
            fmt(left - 8.0),
            fmt(top + cell_px * (j as f64 + 0.6)),
            label
        ));
    }
    for i in 0..n {
        for j in 0..n {
            let x = left + cell_px * j as f64;
            let y = top + cell_px * i as f64;
            match cell(i, j) {
                Some(v) => {
                    svg.push_str(&format!(
                        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"#999\"/>\n",
                        fmt(x),
                        fmt(y),
                        fmt(cell_px),
                        fmt(cell_px),
                        color_diverging(v, max_abs)
                    ));
                    svg.push_str(&format!(
                        "<text x=\"{}\" y=\"{}\" font-size=\"9\" text-anchor=\"middle\">{}</text>\n",
                        fmt(x + cell_px / 2.0),
                        fmt(y + cell_px / 2.0 + 3.0),
                        fmt(v)
                    ));
                }
                None => {
                    svg.push_str(&format!(
                        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#f2f2f2\" stroke=\"#ccc\"/>\n",
                        fmt(x),
                        fmt(y),
                        fmt(cell_px),
                        fmt(cell_px)
                    ));
                }
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}
