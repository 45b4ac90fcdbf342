//! Polyline SVG plots of a trace.

use std::fmt::Write as _;

use crate::config::RunSpec;
use crate::output::{theta_label, Table};

const WIDTH: f64 = 800.0;
const PANEL_HEIGHT: f64 = 180.0;
const MARGIN: f64 = 50.0;
const MAX_POINTS: usize = 2000;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

struct Panel {
    title: String,
    series: Vec<(String, usize)>,
    /// Dashed horizontal guides.
    guides: Vec<f64>,
}

/// `(file name, svg)` for desired vs actual states, errors and estimates.
pub fn render(table: &Table, spec: &RunSpec) -> Vec<(String, String)> {
    let n = spec.model.n;
    let col = |name: String| table.column(&name).map(|i| (name, i));
    let tracking = (1..=n)
        .map(|k| Panel {
            title: format!("x{k} and x{k}d"),
            series: [col(format!("x{k}d")), col(format!("x{k}"))].into_iter().flatten().collect(),
            guides: vec![],
        })
        .collect::<Vec<_>>();
    let errors = (1..=n)
        .map(|k| Panel { title: format!("e{k}"), series: col(format!("e{k}")).into_iter().collect(), guides: vec![0.0] })
        .collect::<Vec<_>>();
    let estimates = spec
        .controller
        .adapt
        .iter()
        .filter_map(|a| {
            let label = theta_label(a.subsystem, a.param);
            col(label.clone()).map(|s| Panel {
                title: label,
                series: vec![s],
                guides: vec![a.lower - a.activation_c, a.lower, a.upper, a.upper + a.activation_c],
            })
        })
        .collect::<Vec<_>>();
    let mut out = vec![("tracking.svg".to_string(), document(table, &tracking)), ("errors.svg".to_string(), document(table, &errors))];
    if !estimates.is_empty() {
        out.push(("estimates.svg".to_string(), document(table, &estimates)));
    }
    out
}

fn document(table: &Table, panels: &[Panel]) -> String {
    let height = PANEL_HEIGHT * panels.len() as f64;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    let t: Vec<f64> = table.rows.iter().map(|r| r[0]).collect();
    let step = (table.rows.len() / MAX_POINTS).max(1);
    for (p, panel) in panels.iter().enumerate() {
        let top = p as f64 * PANEL_HEIGHT;
        let (x0, x1) = (MARGIN, WIDTH - 10.0);
        let (y0, y1) = (top + 20.0, top + PANEL_HEIGHT - 20.0);
        let (tmin, tmax) = bounds(t.iter().copied());
        let values = panel.series.iter().flat_map(|(_, c)| table.rows.iter().map(move |r| r[*c]));
        let (vmin, vmax) = bounds(values.chain(panel.guides.iter().copied()));
        let sx = |v: f64| x0 + (v - tmin) / (tmax - tmin) * (x1 - x0);
        let sy = |v: f64| y1 - (v - vmin) / (vmax - vmin) * (y1 - y0);
        writeln!(s, r##"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="#999"/>"##, x1 - x0, y1 - y0).unwrap();
        writeln!(s, r#"<text x="{x0}" y="{}">{}</text>"#, y0 - 5.0, panel.title).unwrap();
        writeln!(s, r#"<text x="2" y="{}">{}</text>"#, y0 + 10.0, short(vmax)).unwrap();
        writeln!(s, r#"<text x="2" y="{y1}">{}</text>"#, short(vmin)).unwrap();
        for g in &panel.guides {
            writeln!(s, r##"<line x1="{x0}" x2="{x1}" y1="{y}" y2="{y}" stroke="#777" stroke-dasharray="4 3"/>"##, y = sy(*g)).unwrap();
        }
        for (i, (name, c)) in panel.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let mut pts = String::new();
            for r in table.rows.iter().step_by(step).chain(table.rows.last()) {
                write!(pts, "{:.2},{:.2} ", sx(r[0]), sy(r[*c])).unwrap();
            }
            writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1" points="{}"/>"#, pts.trim_end()).unwrap();
            writeln!(s, r#"<text x="{}" y="{}" fill="{color}">{name}</text>"#, x1 - 80.0, y0 + 12.0 * (i + 1) as f64).unwrap();
        }
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * lo.abs().max(1.0) {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn short(v: f64) -> String {
    format!("{v:.3e}")
}
