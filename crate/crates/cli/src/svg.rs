//! Minimal hand-rolled SVG line/point plots (log₁₀ probability axis); CSV is
//! the canonical output and this rendering is a convenience overlay.

pub enum Style {
    Line,
    Points,
}

pub struct Series {
    pub label: String,
    pub color: String,
    pub style: Style,
    /// (r, probability) pairs; non-positive probabilities are skipped.
    pub points: Vec<(f64, f64)>,
}

const W: f64 = 860.0;
const H: f64 = 520.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 180.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;
const P_FLOOR: f64 = 1e-16;

pub fn render(title: &str, series: &[Series]) -> String {
    let xs: Vec<f64> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|(x, _)| *x))
        .collect();
    let (x_min, x_max) = bounds(&xs, (0.0, 1.0));
    let ys: Vec<f64> = series
        .iter()
        .flat_map(|s| {
            s.points
                .iter()
                .filter(|(_, p)| *p > 0.0)
                .map(|(_, p)| p.max(P_FLOOR).log10())
        })
        .collect();
    let (y_min, y_max) = bounds(&ys, (-4.0, 0.0));
    let y_max = y_max.max(0.0);

    let px =
        |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min).max(1e-300) * (W - MARGIN_L - MARGIN_R);
    let py = |logp: f64| {
        H - MARGIN_B - (logp - y_min) / (y_max - y_min).max(1e-300) * (H - MARGIN_T - MARGIN_B)
    };

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">{}</text>\n",
        MARGIN_L,
        escape(title)
    ));
    // Axes.
    out.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        MARGIN_L,
        H - MARGIN_B,
        W - MARGIN_R,
        H - MARGIN_B
    ));
    out.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        MARGIN_L,
        MARGIN_T,
        MARGIN_L,
        H - MARGIN_B
    ));
    // Ticks: 5 on x, integer decades on y.
    for i in 0..=4 {
        let x = x_min + (x_max - x_min) * i as f64 / 4.0;
        out.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n",
            px(x),
            H - MARGIN_B,
            H - MARGIN_B + 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{:.3}</text>\n",
            px(x),
            H - MARGIN_B + 18.0,
            x
        ));
    }
    let mut dec = y_min.floor() as i64;
    while dec <= y_max.ceil() as i64 {
        let y = dec as f64;
        if y >= y_min - 1e-9 && y <= y_max + 1e-9 {
            out.push_str(&format!(
                "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#dddddd\"/>\n",
                MARGIN_L,
                py(y),
                W - MARGIN_R
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e{}</text>\n",
                MARGIN_L - 6.0,
                py(y) + 4.0,
                dec
            ));
        }
        dec += 1;
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">deviation r</text>\n",
        (MARGIN_L + W - MARGIN_R) / 2.0,
        H - 12.0
    ));
    // Series.
    for (idx, s) in series.iter().enumerate() {
        match s.style {
            Style::Line => {
                let pts: Vec<String> = s
                    .points
                    .iter()
                    .filter(|(_, p)| *p > 0.0)
                    .map(|(x, p)| format!("{:.2},{:.2}", px(*x), py(p.max(P_FLOOR).log10())))
                    .collect();
                if pts.len() >= 2 {
                    out.push_str(&format!(
                        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                        s.color,
                        pts.join(" ")
                    ));
                }
            }
            Style::Points => {
                for (x, p) in s.points.iter().filter(|(_, p)| *p > 0.0) {
                    out.push_str(&format!(
                        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{}\"/>\n",
                        px(*x),
                        py(p.max(P_FLOOR).log10()),
                        s.color
                    ));
                }
            }
        }
        // Legend.
        let ly = MARGIN_T + 16.0 * idx as f64;
        out.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n",
            W - MARGIN_R + 12.0,
            ly,
            s.color
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            W - MARGIN_R + 28.0,
            ly + 9.0,
            escape(&s.label)
        ));
    }
    out.push_str("</svg>\n");
    out
}

fn bounds(vals: &[f64], fallback: (f64, f64)) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in vals {
        if v.is_finite() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !lo.is_finite() || !hi.is_finite() || lo == hi {
        fallback
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
