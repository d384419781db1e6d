//! Minimal static SVG plotting: scatter/line panels and space-time
//! heatmaps, rendered directly from the experiment tables.

/// One named series of `(x, y)` points.
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
    pub draw_line: bool,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

pub fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn finite_bounds(series: &[Series]) -> (f64, f64, f64, f64) {
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            if x.is_finite() && y.is_finite() {
                xmin = xmin.min(x);
                xmax = xmax.max(x);
                ymin = ymin.min(y);
                ymax = ymax.max(y);
            }
        }
    }
    if !xmin.is_finite() {
        return (0.0, 1.0, 0.0, 1.0);
    }
    if (xmax - xmin).abs() < 1e-300 {
        xmax = xmin + 1.0;
    }
    if (ymax - ymin).abs() < 1e-300 {
        ymax = ymin + 1.0;
    }
    (xmin, xmax, ymin, ymax)
}

/// Line/scatter plot with axes, tick labels and a legend.
pub fn xy_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let (w, h) = (720.0, 480.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 40.0, 50.0);
    let (xmin, xmax, ymin, ymax) = finite_bounds(series);
    let px = |x: f64| ml + (x - xmin) / (xmax - xmin) * (w - ml - mr);
    let py = |y: f64| h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\" font-family=\"sans-serif\">{}</text>\n",
        w / 2.0,
        escape(title)
    ));
    // axes
    svg.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>\n",
        h - mb,
        w - mr
    ));
    svg.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>\n",
        h - mb
    ));
    // ticks
    for k in 0..=4 {
        let xv = xmin + (xmax - xmin) * k as f64 / 4.0;
        let yv = ymin + (ymax - ymin) * k as f64 / 4.0;
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">{:.3}</text>\n",
            px(xv),
            h - mb + 18.0,
            xv
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">{:.3}</text>\n",
            ml - 6.0,
            py(yv) + 4.0,
            yv
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\">{}</text>\n",
        (ml + w - mr) / 2.0,
        h - 12.0,
        escape(xlabel)
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\" transform=\"rotate(-90 16 {})\">{}</text>\n",
        (mt + h - mb) / 2.0,
        (mt + h - mb) / 2.0,
        escape(ylabel)
    ));
    // series
    for s in series {
        if s.draw_line && s.points.len() > 1 {
            let pts: Vec<String> = s
                .points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            svg.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                s.color,
                pts.join(" ")
            ));
        }
        for &(x, y) in s.points.iter().filter(|(x, y)| x.is_finite() && y.is_finite()) {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.4\" fill=\"{}\"/>\n",
                px(x),
                py(y),
                s.color
            ));
        }
    }
    // legend
    for (k, s) in series.iter().enumerate() {
        let y0 = mt + 16.0 * k as f64;
        svg.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n",
            w - mr - 150.0,
            y0,
            s.color
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" font-family=\"sans-serif\">{}</text>\n",
            w - mr - 136.0,
            y0 + 9.0,
            escape(&s.label)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Space-time heatmap of a piecewise-constant field (rows = time slices).
pub fn heatmap(title: &str, times: &[f64], values: &[Vec<f64>]) -> String {
    let (w, h) = (720.0, 480.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 40.0, 50.0);
    let rows = values.len();
    let cols = if rows > 0 { values[0].len() } else { 0 };
    let mut vmin = f64::INFINITY;
    let mut vmax = f64::NEG_INFINITY;
    for row in values {
        for &v in row {
            vmin = vmin.min(v);
            vmax = vmax.max(v);
        }
    }
    if vmax <= vmin {
        vmax = vmin + 1.0;
    }
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\" font-family=\"sans-serif\">{}</text>\n",
        w / 2.0,
        escape(title)
    ));
    let cw = (w - ml - mr) / rows.max(1) as f64;
    let ch = (h - mt - mb) / cols.max(1) as f64;
    // subsample long time axes to keep files small
    let stride = (rows / 240).max(1);
    for (ti, row) in values.iter().enumerate().step_by(stride) {
        for (si, &v) in row.iter().enumerate() {
            let frac = (v - vmin) / (vmax - vmin);
            let rch = (255.0 * frac) as u8;
            let bch = (255.0 * (1.0 - frac)) as u8;
            svg.push_str(&format!(
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"rgb({},60,{})\"/>\n",
                ml + ti as f64 * cw,
                h - mb - (si as f64 + 1.0) * ch,
                cw * stride as f64 + 0.5,
                ch + 0.5,
                rch,
                bch
            ));
        }
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\">t in [0, {:.4}]</text>\n",
        (ml + w - mr) / 2.0,
        h - 12.0,
        times.last().copied().unwrap_or(0.0)
    ));
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
