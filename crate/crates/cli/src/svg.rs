//! Minimal SVG line charts; enough for trajectory plots without a plotting
//! dependency.

const COLORS: [&str; 6] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

impl LineChart {
    pub fn render(&self) -> String {
        const W: f64 = 720.0;
        const H: f64 = 420.0;
        const ML: f64 = 64.0;
        const MR: f64 = 140.0;
        const MT: f64 = 40.0;
        const MB: f64 = 48.0;
        let (pw, ph) = (W - ML - MR, H - MT - MB);

        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for s in &self.series {
            for &(x, y) in &s.points {
                if x.is_finite() && y.is_finite() {
                    xs.push(x);
                    ys.push(y);
                }
            }
        }
        let (x0, x1) = bounds(&xs);
        let (y0, y1) = bounds(&ys);
        let sx = move |x: f64| ML + (x - x0) / (x1 - x0) * pw;
        let sy = move |y: f64| MT + ph - (y - y0) / (y1 - y0) * ph;

        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
             viewBox=\"0 0 {W} {H}\">\n<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
            ML + pw / 2.0,
            escape(&self.title)
        ));
        // Axes.
        out.push_str(&format!(
            "<line x1=\"{ML}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>\n",
            MT + ph,
            ML + pw
        ));
        out.push_str(&format!(
            "<line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{}\" stroke=\"black\"/>\n",
            MT + ph
        ));
        for frac in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let xv = x0 + frac * (x1 - x0);
            let yv = y0 + frac * (y1 - y0);
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
                sx(xv),
                MT + ph + 16.0,
                fmt_tick(xv)
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
                ML - 6.0,
                sy(yv) + 3.0,
                fmt_tick(yv)
            ));
            if frac > 0.0 {
                out.push_str(&format!(
                    "<line x1=\"{ML}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"#dddddd\"/>\n",
                    sy(yv),
                    ML + pw
                ));
            }
        }
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            ML + pw / 2.0,
            H - 10.0,
            escape(&self.x_label)
        ));
        out.push_str(&format!(
            "<text x=\"16\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" \
             transform=\"rotate(-90 16 {0})\">{1}</text>\n",
            MT + ph / 2.0,
            escape(&self.y_label)
        ));
        // Series.
        for (k, s) in self.series.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            let path: Vec<String> = s
                .points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            if path.len() >= 2 {
                out.push_str(&format!(
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" \
                     stroke-width=\"1.2\"/>\n",
                    path.join(" ")
                ));
            }
            let ly = MT + 14.0 + 16.0 * k as f64;
            out.push_str(&format!(
                "<line x1=\"{0}\" y1=\"{ly}\" x2=\"{1}\" y2=\"{ly}\" stroke=\"{color}\" \
                 stroke-width=\"2\"/>\n",
                ML + pw + 8.0,
                ML + pw + 28.0
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\">{}</text>\n",
                ML + pw + 32.0,
                ly + 4.0,
                escape(&s.label)
            ));
        }
        out.push_str("</svg>\n");
        out
    }
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in v {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 10_000.0 || v.abs() < 0.01 {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
