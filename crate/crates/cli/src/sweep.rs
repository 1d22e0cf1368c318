//! Sweeps the bending parameter and tabulates the cusp coefficients.

use std::fmt::Write as _;

use cuspbend::cusp_classify::{conjugate_and_match, RectangularCuspData};
use cuspbend::scalar::Scalar;
use rayon::prelude::*;

use crate::{fmt_f64, CliError, RunConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub s: f64,
    /// `a_i` per slot; infinite for an unbent slot.
    pub a: Vec<f64>,
    pub a_inv: Vec<f64>,
    pub cusp_type: usize,
}

#[derive(Clone, Debug)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub csv: String,
    pub svg: Option<String>,
}

/// Every slot gets the same `s` and shape constant `b`. The default
/// dimension is 2, a single slot.
pub fn run_sweep(config: &RunConfig) -> Result<SweepOutput, CliError> {
    let n = config.n.unwrap_or(2);
    if n < 2 {
        return Err(CliError::Usage(format!("sweep needs --n >= 2, got {n}")));
    }
    if config.b.is_nan() || config.b <= 0.0 {
        return Err(CliError::Usage(format!("shape constant must be positive, got {}", config.b)));
    }
    let rows = config.grid.points().par_iter().map(|&s| sweep_row(n, config.b, s)).collect::<Result<Vec<_>, _>>()?;
    let csv = render_csv(n, &rows);
    let svg = config.svg.is_some().then(|| render_svg(&rows));
    Ok(SweepOutput { rows, csv, svg })
}

fn sweep_row(n: usize, b: f64, s: f64) -> Result<SweepRow, CliError> {
    let data = RectangularCuspData::new(n, vec![Scalar::float(b); n - 1], vec![Scalar::float(s); n - 1])?;
    let classified = conjugate_and_match(&data)?;
    let a = classified.coefficients.iter().map(|c| c.as_ref().map_or(f64::INFINITY, Scalar::to_f64)).collect();
    let a_inv = (0..n - 1).map(|k| data.inverse_coefficient(k)).collect();
    Ok(SweepRow { s, a, a_inv, cusp_type: classified.cusp_type })
}

fn render_csv(n: usize, rows: &[SweepRow]) -> String {
    let mut header: Vec<String> = Vec::new();
    for prefix in ["s", "a", "ainv"] {
        header.extend((2..=n).map(|i| format!("{prefix}_{i}")));
    }
    header.push("type".into());
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let mut cells: Vec<String> = vec![fmt_f64(row.s); n - 1];
        cells.extend(row.a.iter().map(|&x| fmt_f64(x)));
        cells.extend(row.a_inv.iter().map(|&x| fmt_f64(x)));
        cells.push(row.cusp_type.to_string());
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Line chart of `1/a_2` against `s`.
fn render_svg(rows: &[SweepRow]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 48.0;
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.s, r.a_inv[0])).collect();
    let (x0, x1) = bounds(pts.iter().map(|p| p.0));
    let (y0, y1) = bounds(pts.iter().map(|p| p.1));
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<path d="M{PAD} {top} V{bottom} H{right}" fill="none" stroke="black"/>"#,
        top = PAD,
        bottom = H - PAD,
        right = W - PAD
    );
    let line: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
    let _ = writeln!(svg, r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#, line.join(" "));
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">s</text>"#, W / 2.0, H - 12.0);
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{}" font-size="14" transform="rotate(-90 14 {})">1/a</text>"#,
        H / 2.0,
        H / 2.0
    );
    let _ = writeln!(svg, r#"<text x="{PAD}" y="{}" font-size="11">{x0:.3}</text>"#, H - PAD + 16.0);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{x1:.3}</text>"#,
        W - PAD,
        H - PAD + 16.0
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{PAD}" font-size="11" text-anchor="end">{y1:.3e}</text>"#, PAD - 4.0);
    svg.push_str("</svg>\n");
    svg
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    }
}
