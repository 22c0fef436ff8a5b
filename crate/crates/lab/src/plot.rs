//! Log-log SVG plots of per-slope distance to the final normalized value.

use std::fmt::Write;

use crate::csv_io::TraceTable;
use crate::error::{LabError, LabResult};

const W: f64 = 720.0;
const H: f64 = 480.0;
const MARGIN: f64 = 60.0;
/// Distances below this are drawn on the floor of the plot.
const FLOOR: f64 = 1e-16;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

/// Curves `log10 t ↦ log10 |N_s(t) − N_s(t_final)|`, one per slope.
pub fn curves(table: &TraceTable) -> LabResult<Vec<Vec<(f64, f64)>>> {
    let n = table.t.len();
    if n < 2 {
        return Err(LabError::MalformedTrace("need at least two samples to plot".into()));
    }
    if table.t[0] <= 0.0 {
        return Err(LabError::MalformedTrace("log-log plot needs positive t".into()));
    }
    let last = &table.normalized[n - 1];
    Ok((0..table.slopes.len())
        .map(|j| {
            (0..n - 1)
                .map(|k| {
                    let d = (table.normalized[k][j] - last[j]).abs().max(FLOOR);
                    (table.t[k].log10(), d.log10())
                })
                .collect()
        })
        .collect())
}

pub fn render_svg(table: &TraceTable) -> LabResult<String> {
    let curves = curves(table)?;
    let pts = curves.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let (x0, x1) = (x0.floor(), x1.ceil().max(x0.floor() + 1.0));
    let (y0, y1) = (y0.floor(), y1.ceil().max(y0.floor() + 1.0));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN
    );
    for e in x0 as i64..=x1 as i64 {
        let x = sx(e as f64);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" font-size="11" text-anchor="middle">1e{e}</text>"#, H - MARGIN + 16.0);
    }
    for e in y0 as i64..=y1 as i64 {
        let y = sy(e as f64);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{y:.2}" font-size="11" text-anchor="end">1e{e}</text>"#, MARGIN - 6.0);
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">t</text>"#, W / 2.0, H - 16.0);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.2})">|N(t) - N(final)|</text>"#,
        H / 2.0,
        H / 2.0
    );
    for (j, (curve, slope)) in curves.iter().zip(&table.slopes).enumerate() {
        let mut d = String::new();
        for (k, &(x, y)) in curve.iter().enumerate() {
            let _ = write!(d, "{}{:.2},{:.2}", if k == 0 { "M" } else { " L" }, sx(x), sy(y));
        }
        let _ = writeln!(
            s,
            r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1.2"><title>{slope}</title></path>"#,
            PALETTE[j % PALETTE.len()]
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
