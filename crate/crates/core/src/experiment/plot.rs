use std::fmt::Write;

use thiserror::Error;

use super::sweep::SweepTable;
use crate::bounds::BoundQuery;
use crate::code::CodeKind;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlotError {
    #[error("nothing to plot: the table is empty")]
    EmptyTable,
}

/// A vertical reference line at capacity `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundMarker {
    pub label: String,
    pub l: u32,
    pub n: f64,
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
const PANEL_W: f64 = 560.0;
const PANEL_H: f64 = 380.0;
const MARGIN_L: f64 = 56.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 48.0;

/// Analytic bounds at `ε` for each distinct code family of each line length
/// in the table.
pub fn bound_markers(table: &SweepTable, eps: f64) -> Vec<BoundMarker> {
    let mut out: Vec<BoundMarker> = Vec::new();
    for r in &table.rows {
        let s = r.spec;
        let q = BoundQuery::new(s.k(), r.l as usize, s.q(), eps).tau(s.tau());
        let (name, n) = match s.kind() {
            CodeKind::Dense => ("DC bound".to_string(), q.dense().n_min),
            CodeKind::Chunked => (format!("CC q={} bound", s.q()), q.chunked().n_min),
            CodeKind::Overlapped => (format!("OCC q={} bound", s.q()), q.overlapped().n_min),
        };
        if !out.iter().any(|m| m.label == name && m.l == r.l) {
            out.push(BoundMarker { label: name, l: r.l, n });
        }
    }
    out
}

/// Success probability against capacity, one panel per line length, with 95%
/// whiskers. Markers outside a panel's x range are left out.
pub fn emit_plot(table: &SweepTable, markers: &[BoundMarker]) -> Result<String, PlotError> {
    if table.rows.is_empty() {
        return Err(PlotError::EmptyTable);
    }
    let labels = table.labels();
    let lengths = table.line_lengths();
    let width = PANEL_W * lengths.len() as f64;
    let height = PANEL_H + 22.0 * labels.len().div_ceil(4) as f64;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (pi, &l) in lengths.iter().enumerate() {
        let x0 = PANEL_W * pi as f64;
        let rows: Vec<_> = table.rows.iter().filter(|r| r.l == l).collect();
        let nmin = rows.iter().map(|r| r.n).min().unwrap_or(0) as f64;
        let nmax = rows.iter().map(|r| r.n).max().unwrap_or(0) as f64;
        let span = if nmax > nmin { nmax - nmin } else { 1.0 };
        let (pl, pr) = (x0 + MARGIN_L, x0 + PANEL_W - MARGIN_R);
        let (pt, pb) = (MARGIN_T, PANEL_H - MARGIN_B);
        let xs = |n: f64| {
            if nmax > nmin {
                pl + (n - nmin) / span * (pr - pl)
            } else {
                (pl + pr) / 2.0
            }
        };
        let ys = |p: f64| pb - p * (pb - pt);
        let _ = writeln!(svg, r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="13">l = {l}</text>"#, (pl + pr) / 2.0);
        let _ = writeln!(
            svg,
            r##"<rect x="{pl:.1}" y="{pt:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#444"/>"##,
            pr - pl,
            pb - pt
        );
        for i in 0..=4 {
            let p = i as f64 / 4.0;
            let y = ys(p);
            let _ = writeln!(svg, r##"<line x1="{pl:.1}" y1="{y:.1}" x2="{pr:.1}" y2="{y:.1}" stroke="#ddd"/>"##);
            let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{p:.2}</text>"#, pl - 4.0, y + 4.0);
        }
        for i in 0..=4 {
            let n = nmin + span * i as f64 / 4.0;
            if nmax <= nmin && i > 0 {
                break;
            }
            let x = xs(n);
            let _ = writeln!(svg, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{n:.0}</text>"#, pb + 16.0);
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">capacity n</text>"#,
            (pl + pr) / 2.0,
            pb + 34.0
        );
        for m in markers.iter().filter(|m| m.l == l && m.n >= nmin && m.n <= nmax) {
            let x = xs(m.n);
            let _ = writeln!(
                svg,
                r##"<line x1="{x:.1}" y1="{pt:.1}" x2="{x:.1}" y2="{pb:.1}" stroke="#666" stroke-dasharray="4 3"/>"##
            );
            let _ = writeln!(
                svg,
                r##"<text x="{:.1}" y="{:.1}" fill="#666" transform="rotate(-90 {:.1} {:.1})">{}</text>"##,
                x - 3.0,
                pt + 6.0,
                x - 3.0,
                pt + 6.0,
                xml_escape(&m.label)
            );
        }
        for (ci, label) in labels.iter().enumerate() {
            let colour = PALETTE[ci % PALETTE.len()];
            let series = table.series(label, l);
            if series.is_empty() {
                continue;
            }
            let points: Vec<String> = series
                .iter()
                .map(|r| format!("{:.1},{:.1}", xs(r.n as f64), ys(r.p_hat)))
                .collect();
            if points.len() > 1 {
                let _ = writeln!(
                    svg,
                    r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
                    points.join(" ")
                );
            }
            for r in &series {
                let x = xs(r.n as f64);
                let _ = writeln!(
                    svg,
                    r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="{colour}"/>"#,
                    ys(r.ci_low),
                    ys(r.ci_high)
                );
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{x:.1}" cy="{:.1}" r="2.5" fill="{colour}"/>"#,
                    ys(r.p_hat)
                );
            }
        }
    }
    for (ci, label) in labels.iter().enumerate() {
        let colour = PALETTE[ci % PALETTE.len()];
        let x = MARGIN_L + 130.0 * (ci % 4) as f64;
        let y = PANEL_H + 22.0 * (ci / 4) as f64;
        let _ = writeln!(svg, r#"<rect x="{x:.1}" y="{:.1}" width="12" height="12" fill="{colour}"/>"#, y - 10.0);
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{y:.1}">{}</text>"#, x + 16.0, xml_escape(label));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
