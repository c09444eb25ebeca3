//! SVG heatmaps of binary matrices: red presences, blue absences, and the
//! perfect-nestedness isocline in green.

use std::fmt::Write as _;

use crate::mutualistic::BinaryMatrix;

const PRESENT: &str = "#d62728";
const ABSENT: &str = "#1f3f9c";
const ISOCLINE: &str = "#2ca02c";
const MARGIN: f64 = 24.0;
const MAX_EXTENT: f64 = 800.0;

/// Renders `q` cell by cell. When `isocline_p` is given, the curve
/// `y = 1 - x^p` is drawn over the matrix area.
pub fn heatmap_svg(q: &BinaryMatrix, isocline_p: Option<f64>, title: &str) -> String {
    let (rows, cols) = (q.rows().max(1), q.cols().max(1));
    let cell = (MAX_EXTENT / rows.max(cols) as f64).clamp(1.0, 16.0);
    let (w, h) = (cols as f64 * cell, rows as f64 * cell);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        w + 2.0 * MARGIN,
        h + 2.0 * MARGIN,
        w + 2.0 * MARGIN,
        h + 2.0 * MARGIN
    );
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#,
        MARGIN - 8.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<g transform="translate({MARGIN},{MARGIN})" shape-rendering="crispEdges">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{w}" height="{h}" fill="{ABSENT}"/>"#
    );
    for r in 0..q.rows() {
        for c in 0..q.cols() {
            if q.get(r, c) {
                let _ = writeln!(
                    s,
                    r#"<rect x="{}" y="{}" width="{cell}" height="{cell}" fill="{PRESENT}"/>"#,
                    c as f64 * cell,
                    r as f64 * cell
                );
            }
        }
    }
    let _ = writeln!(s, "</g>");

    if let Some(p) = isocline_p {
        let points: Vec<String> = (0..=200)
            .map(|k| {
                let x = k as f64 / 200.0;
                let y = 1.0 - x.powf(p);
                format!("{:.2},{:.2}", MARGIN + x * w, MARGIN + y * h)
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{ISOCLINE}" stroke-width="2"/>"#,
            points.join(" ")
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
