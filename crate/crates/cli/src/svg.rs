//! Two-panel ROC plot as standalone SVG.

use std::fmt::Write;

use facetrait::eval::{RocCurve, RocPair};

const PANEL: f64 = 320.0;
const MARGIN: f64 = 48.0;

fn panel(out: &mut String, curve: &RocCurve, x0: f64) {
    let (left, top) = (x0 + MARGIN, MARGIN);
    let px = |fpr: f64| left + fpr * PANEL;
    let py = |tpr: f64| top + (1.0 - tpr) * PANEL;

    let _ = writeln!(
        out,
        r##"<rect x="{left}" y="{top}" width="{PANEL}" height="{PANEL}" fill="none" stroke="#333"/>"##
    );
    let _ = writeln!(
        out,
        r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#bbb" stroke-dasharray="4 4"/>"##,
        px(0.0),
        py(0.0),
        px(1.0),
        py(1.0)
    );
    for tick in [0.0, 0.5, 1.0] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="middle">{tick}</text>"#,
            px(tick),
            top + PANEL + 16.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{tick}</text>"#,
            left - 6.0,
            py(tick) + 4.0
        );
    }
    let points: Vec<String> = curve
        .points
        .iter()
        .map(|[f, t]| format!("{:.2},{:.2}", px(*f), py(*t)))
        .collect();
    let _ = writeln!(
        out,
        r##"<polyline points="{}" fill="none" stroke="#1f5fbf" stroke-width="2"/>"##,
        points.join(" ")
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">ROC, positive class {} (AUC = {:.4})</text>"#,
        left + PANEL / 2.0,
        top - 14.0,
        curve.positive,
        curve.auc
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">False positive rate</text>"#,
        left + PANEL / 2.0,
        top + PANEL + 34.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 {} {})">True positive rate</text>"#,
        left - 30.0,
        top + PANEL / 2.0,
        left - 30.0,
        top + PANEL / 2.0
    );
}

pub fn roc_svg(roc: &RocPair) -> String {
    let width = 2.0 * (PANEL + 2.0 * MARGIN);
    let height = PANEL + 2.0 * MARGIN;
    let mut out = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    out.push('\n');
    out.push_str(r#"<rect width="100%" height="100%" fill="white"/>"#);
    out.push('\n');
    panel(&mut out, &roc.female, 0.0);
    panel(&mut out, &roc.male, PANEL + 2.0 * MARGIN);
    out.push_str("</svg>\n");
    out
}
