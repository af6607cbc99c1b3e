//! Minimal SVG line charts for the per-epoch traces. Data CSVs are the
//! primary artifact; these are optional quick-look plots.

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 40.0;
const COLORS: [&str; 4] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"];

/// Renders one or more equally-indexed series as polylines.
pub fn line_chart(title: &str, series: &[(&str, &[f64])]) -> String {
    let n = series.iter().map(|(_, s)| s.len()).max().unwrap_or(0);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, s) in series {
        for &v in *s {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        lo = 0.0;
        hi = 1.0;
    }
    if hi - lo < 1e-12 {
        hi = lo + 1.0;
    }
    let x_of = |i: usize| MARGIN + (WIDTH - 2.0 * MARGIN) * i as f64 / (n.max(2) - 1) as f64;
    let y_of = |v: f64| HEIGHT - MARGIN - (HEIGHT - 2.0 * MARGIN) * (v - lo) / (hi - lo);

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">{title}</text>\n",
        WIDTH / 2.0
    );
    svg.push_str(&format!(
        "<line x1=\"{MARGIN}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"#888\"/>\n\
         <line x1=\"{MARGIN}\" y1=\"{MARGIN}\" x2=\"{MARGIN}\" y2=\"{0}\" stroke=\"#888\"/>\n\
         <text x=\"{MARGIN}\" y=\"{2}\" font-family=\"sans-serif\" font-size=\"10\">{lo:.3}</text>\n\
         <text x=\"{MARGIN}\" y=\"{3}\" font-family=\"sans-serif\" font-size=\"10\">{hi:.3}</text>\n",
        HEIGHT - MARGIN,
        WIDTH - MARGIN,
        HEIGHT - MARGIN + 12.0,
        MARGIN - 4.0,
    ));
    for (k, (name, values)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let points: Vec<String> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| format!("{:.2},{:.2}", x_of(i), y_of(v)))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n\
             <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\">{name}</text>\n",
            points.join(" "),
            WIDTH - MARGIN + 4.0 - 80.0,
            MARGIN + 14.0 * k as f64,
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
