//! Self-contained SVG output: line plots of `V_N(x)` or `K(x, y₀)`, heatmaps of `|K|`.

use std::fmt::Write;

use crate::table::ResultTable;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PlotKind {
    Line,
    Heatmap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub svg: String,
    /// Interior local minima of the plotted line (0 for heatmaps).
    pub minima: usize,
    /// `(nx, ny)` of the heatmap grid, `(n, 1)` for lines.
    pub dims: (usize, usize),
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 50.0;

/// Indices of strict interior local minima; plateaus count once.
pub fn local_minima(v: &[f64]) -> Vec<usize> {
    let pts: Vec<(usize, f64)> = v.iter().copied().enumerate().filter(|(_, y)| y.is_finite()).collect();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < pts.len() {
        if pts[i].1 < pts[i - 1].1 {
            let mut j = i;
            while j + 1 < pts.len() && pts[j + 1].1 == pts[i].1 {
                j += 1;
            }
            if j + 1 < pts.len() && pts[j + 1].1 > pts[i].1 {
                out.push(pts[i].0);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

fn unique_sorted(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(f64::total_cmp);
    u.dedup();
    u
}

fn range(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v.filter(|x| x.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn open(title: &str, timestamp: Option<u64>) -> String {
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    if let Some(ts) = timestamp {
        let _ = writeln!(s, "<!-- generated at unix time {ts} -->");
    }
    let _ = writeln!(s, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">");
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    let _ = writeln!(s, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(s: &mut String, xr: (f64, f64), yr: (f64, f64), xl: &str, yl: &str) {
    let (x0, y0, x1, y1) = (MARGIN, H - MARGIN, W - MARGIN, MARGIN);
    let _ = writeln!(s, "<path d=\"M{x0} {y1} L{x0} {y0} L{x1} {y0}\" stroke=\"black\" fill=\"none\"/>");
    let _ = writeln!(s, "<text x=\"{x0}\" y=\"{}\" font-size=\"11\">{:.4}</text>", y0 + 15.0, xr.0);
    let _ = writeln!(s, "<text x=\"{x1}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{:.4}</text>", y0 + 15.0, xr.1);
    let _ = writeln!(s, "<text x=\"{}\" y=\"{y0}\" font-size=\"11\" text-anchor=\"end\">{:.4e}</text>", x0 - 3.0, yr.0);
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{:.4e}</text>", x0 - 3.0, y1 + 10.0, yr.1);
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>", W / 2.0, H - 10.0, escape(xl));
    let _ = writeln!(s, "<text x=\"12\" y=\"{}\" font-size=\"12\" transform=\"rotate(-90 12 {})\" text-anchor=\"middle\">{}</text>", H / 2.0, H / 2.0, escape(yl));
}

fn to_px(v: f64, r: (f64, f64), lo: f64, hi: f64) -> f64 {
    lo + (v - r.0) / (r.1 - r.0) * (hi - lo)
}

/// Line plot of `v` against `x`, or of `re_k` against `x` at the `y` closest to `y0`.
pub fn line_plot(table: &ResultTable, y0: Option<f64>, timestamp: Option<u64>) -> Result<Plot, CliError> {
    if table.rows.is_empty() {
        return Err(CliError::Config("empty table".into()));
    }
    let x = table.column("x").ok_or_else(|| CliError::Config("table has no x column".into()))?;
    let (xs, ys, label) = if let Some(v) = table.column("v") {
        (x, v, "V_N(x)".to_string())
    } else {
        let y = table.column("y").ok_or_else(|| CliError::Config("table has neither v nor y".into()))?;
        let value = table
            .column("re_k")
            .or_else(|| table.column("re_g"))
            .ok_or_else(|| CliError::Config("table has no kernel column".into()))?;
        let target = y0.unwrap_or(y[0]);
        let pick = unique_sorted(&y)
            .into_iter()
            .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
            .unwrap_or(target);
        let (xs, vs): (Vec<f64>, Vec<f64>) =
            x.iter().zip(&y).zip(&value).filter(|((_, yy), _)| **yy == pick).map(|((xx, _), v)| (*xx, *v)).unzip();
        (xs, vs, format!("Re K(x, {pick})"))
    };
    let minima = local_minima(&ys).len();
    let xr = range(xs.iter().copied());
    let yr = range(ys.iter().copied());
    let mut s = open(&label, timestamp);
    let _ = writeln!(s, "<desc>points={} minima={minima}</desc>", xs.len());
    axes(&mut s, xr, yr, "x", &label);
    let mut d = String::new();
    let mut pen_up = true;
    for (a, b) in xs.iter().zip(&ys) {
        if !b.is_finite() {
            pen_up = true;
            continue;
        }
        let px = to_px(*a, xr, MARGIN, W - MARGIN);
        let py = to_px(*b, yr, H - MARGIN, MARGIN);
        let _ = write!(d, "{}{px:.2} {py:.2} ", if pen_up { "M" } else { "L" });
        pen_up = false;
    }
    let _ = writeln!(s, "<path d=\"{}\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" fill=\"none\"/>", d.trim_end());
    s.push_str("</svg>\n");
    Ok(Plot { svg: s, minima, dims: (xs.len(), 1) })
}

fn ramp(u: f64) -> (u8, u8, u8) {
    // dark blue → teal → yellow
    const STOPS: [(f64, f64, f64); 3] = [(68.0, 1.0, 84.0), (33.0, 145.0, 140.0), (253.0, 231.0, 37.0)];
    let u = u.clamp(0.0, 1.0) * 2.0;
    let i = (u.floor() as usize).min(1);
    let f = u - i as f64;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let mix = |p: f64, q: f64| (p + (q - p) * f).round() as u8;
    (mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Heatmap of `|K(x, y)|` (or `|G|`), one cell per grid point.
pub fn heatmap(table: &ResultTable, timestamp: Option<u64>) -> Result<Plot, CliError> {
    if table.rows.is_empty() {
        return Err(CliError::Config("empty table".into()));
    }
    let x = table.column("x").ok_or_else(|| CliError::Config("table has no x column".into()))?;
    let y = table.column("y").ok_or_else(|| CliError::Config("heatmap needs a y column".into()))?;
    let z = table
        .column("abs_k")
        .or_else(|| table.column("abs_g"))
        .ok_or_else(|| CliError::Config("table has no magnitude column".into()))?;
    let ux = unique_sorted(&x);
    let uy = unique_sorted(&y);
    if ux.len() * uy.len() != table.rows.len() {
        return Err(CliError::Config("heatmap needs a full rectangular grid".into()));
    }
    let zr = range(z.iter().copied());
    let mut s = open("|K(x, y)|", timestamp);
    let _ = writeln!(s, "<desc>nx={} ny={} min={:e} max={:e}</desc>", ux.len(), uy.len(), zr.0, zr.1);
    let cw = (W - 2.0 * MARGIN) / ux.len() as f64;
    let ch = (H - 2.0 * MARGIN) / uy.len() as f64;
    for ((xx, yy), zz) in x.iter().zip(&y).zip(&z) {
        let i = ux.partition_point(|v| v < xx);
        let j = uy.partition_point(|v| v < yy);
        let fill = if zz.is_finite() {
            let (r, g, b) = ramp((zz - zr.0) / (zr.1 - zr.0));
            format!("#{r:02x}{g:02x}{b:02x}")
        } else {
            "#ff00ff".into()
        };
        let _ = writeln!(
            s,
            "<rect class=\"cell\" x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{fill}\"/>",
            MARGIN + i as f64 * cw,
            H - MARGIN - (j + 1) as f64 * ch,
            cw,
            ch
        );
    }
    axes(&mut s, (ux[0], *ux.last().unwrap()), (uy[0], *uy.last().unwrap()), "x", "y");
    s.push_str("</svg>\n");
    Ok(Plot { svg: s, minima: 0, dims: (ux.len(), uy.len()) })
}

pub fn cmd_plot(table: &ResultTable, kind: PlotKind, y0: Option<f64>, timestamp: Option<u64>) -> Result<Plot, CliError> {
    match kind {
        PlotKind::Line => line_plot(table, y0, timestamp),
        PlotKind::Heatmap => heatmap(table, timestamp),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minima_on_plateaus_and_edges() {
        assert_eq!(local_minima(&[3.0, 1.0, 2.0, 0.5, 0.5, 4.0]), vec![1, 3]);
        assert!(local_minima(&[1.0, 2.0, 3.0]).is_empty());
        assert_eq!(local_minima(&[2.0, f64::NAN, 1.0, 2.0]), vec![2]);
    }

    #[test]
    fn empty_table_is_rejected() {
        let t = ResultTable::new(&["x", "v"]);
        assert!(matches!(cmd_plot(&t, PlotKind::Line, None, None), Err(CliError::Config(_))));
    }

    #[test]
    fn heatmap_has_one_cell_per_point() {
        let mut t = ResultTable::new(&["x", "y", "re_k", "im_k", "abs_k"]);
        for i in 0..4 {
            for j in 0..3 {
                let v = (i * j) as f64;
                t.push(vec![i as f64, j as f64, v, 0.0, v], String::new());
            }
        }
        let p = heatmap(&t, None).unwrap();
        assert_eq!(p.dims, (4, 3));
        assert_eq!(p.svg.matches("class=\"cell\"").count(), 12);
        assert!(!p.svg.contains("unix time"));
    }
}
