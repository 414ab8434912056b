//! Static SVG charts.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::Value;

use crate::{CliError, CliResult, PlotKind};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
const TICKS: usize = 5;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

/// Reads named numeric columns from a CSV; rows with an empty cell in any
/// requested column are skipped.
fn csv_columns(text: &str, names: &[&str]) -> CliResult<Vec<Vec<f64>>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| invalid(format!("CSV header: {e}")))?
        .clone();
    let idx = names
        .iter()
        .map(|n| {
            headers
                .iter()
                .position(|h| h == *n)
                .ok_or_else(|| invalid(format!("CSV has no `{n}` column")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut cols = vec![Vec::new(); names.len()];
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| invalid(format!("CSV row {}: {e}", row + 2)))?;
        let cells: Vec<&str> = idx.iter().map(|&i| rec.get(i).unwrap_or("")).collect();
        if cells.iter().any(|c| c.is_empty()) {
            continue;
        }
        for (col, cell) in cols.iter_mut().zip(cells) {
            let v = cell
                .parse()
                .map_err(|_| invalid(format!("CSV row {}: `{cell}` is not a number", row + 2)))?;
            col.push(v);
        }
    }
    Ok(cols)
}

fn json_numbers(v: &Value, path: &str) -> CliResult<Vec<f64>> {
    v.pointer(path)
        .and_then(Value::as_array)
        .and_then(|a| a.iter().map(Value::as_f64).collect())
        .ok_or_else(|| invalid(format!("report has no numeric array at {path}")))
}

struct Series {
    x: Vec<f64>,
    y: Vec<f64>,
}

fn load(kind: PlotKind, path: &Path, text: &str) -> CliResult<Series> {
    let json = !path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if json {
        let v: Value =
            serde_json::from_str(text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        return match kind {
            PlotKind::Staircase => Err(invalid("staircase plots need a trace CSV")),
            PlotKind::Dnl => {
                let y = json_numbers(&v, "/linearity/dnl")?;
                Ok(Series {
                    x: (0..y.len()).map(|i| i as f64).collect(),
                    y,
                })
            }
            PlotKind::Drift => {
                let entries = v
                    .pointer("/drift/entries")
                    .and_then(Value::as_array)
                    .ok_or_else(|| invalid("report has no drift section"))?;
                let field = |e: &Value, k: &str| {
                    e.get(k)
                        .and_then(Value::as_f64)
                        .ok_or_else(|| invalid(format!("drift entry lacks {k}")))
                };
                let x = entries
                    .iter()
                    .map(|e| field(e, "t_c"))
                    .collect::<CliResult<_>>()?;
                let y = entries
                    .iter()
                    .map(|e| field(e, "max_ref_shift"))
                    .collect::<CliResult<_>>()?;
                Ok(Series { x, y })
            }
        };
    }
    let mut cols = match kind {
        PlotKind::Staircase => csv_columns(text, &["v_in_V", "code"])?,
        PlotKind::Dnl => csv_columns(text, &["index", "dnl_lsb"])?,
        PlotKind::Drift => csv_columns(text, &["t_c", "max_ref_shift_V"])?,
    };
    let y = cols.pop().unwrap();
    let x = cols.pop().unwrap();
    Ok(Series { x, y })
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(x: &[f64], y: &[f64], y_zero: bool) -> Frame {
        let span = |v: &[f64]| {
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if lo < hi {
                (lo, hi)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        };
        let (x0, x1) = span(x);
        let (mut y0, mut y1) = span(y);
        if y_zero {
            y0 = y0.min(0.0);
            y1 = y1.max(0.0);
        }
        let pad = 0.05 * (y1 - y0);
        Frame {
            x0,
            x1,
            y0: y0 - pad,
            y1: y1 + pad,
        }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

/// Enough decimals to tell adjacent ticks apart.
fn tick_label(v: f64, step: f64) -> String {
    let decimals = (-step.abs().log10().floor() + 1.0).clamp(0.0, 9.0) as usize;
    format!("{v:.decimals$}")
}

fn axes(out: &mut String, f: &Frame, title: &str, x_label: &str, y_label: &str) {
    let (l, r, t, b) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    writeln!(
        out,
        r##"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
        r - l,
        b - t
    )
    .unwrap();
    for i in 0..=TICKS {
        let frac = i as f64 / TICKS as f64;
        let xv = f.x0 + frac * (f.x1 - f.x0);
        let yv = f.y0 + frac * (f.y1 - f.y0);
        let (x, y) = (f.px(xv), f.py(yv));
        writeln!(
            out,
            r##"<line x1="{x:.2}" y1="{b}" x2="{x:.2}" y2="{:.2}" stroke="#444"/>"##,
            b + 5.0
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            b + 20.0,
            tick_label(xv, (f.x1 - f.x0) / TICKS as f64)
        )
        .unwrap();
        writeln!(
            out,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{l}" y2="{y:.2}" stroke="#444"/>"##,
            l - 5.0
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            l - 8.0,
            y + 4.0,
            tick_label(yv, (f.y1 - f.y0) / TICKS as f64)
        )
        .unwrap();
    }
    writeln!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{title}</text>"#,
        WIDTH / 2.0
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{x_label}</text>"#,
        (l + r) / 2.0,
        HEIGHT - 12.0
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="18" y="{0:.2}" text-anchor="middle" transform="rotate(-90 18 {0:.2})">{y_label}</text>"#,
        (t + b) / 2.0
    )
    .unwrap();
}

fn polyline(out: &mut String, pts: &[(f64, f64)]) {
    let mut d = String::new();
    for (i, (x, y)) in pts.iter().enumerate() {
        if i > 0 {
            d.push(' ');
        }
        write!(d, "{x:.2},{y:.2}").unwrap();
    }
    writeln!(
        out,
        r##"<polyline points="{d}" fill="none" stroke="#1f5fa8" stroke-width="1.5"/>"##
    )
    .unwrap();
}

fn staircase(out: &mut String, s: &Series) {
    let mut pts: Vec<(f64, f64)> = s.x.iter().copied().zip(s.y.iter().copied()).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let f = Frame::new(&s.x, &s.y, false);
    axes(out, &f, "Transfer staircase", "input (V)", "output code");
    // Corners only: a vertical edge wherever the code changes.
    let mut path = vec![(f.px(pts[0].0), f.py(pts[0].1))];
    for w in pts.windows(2) {
        if w[1].1 != w[0].1 {
            path.push((f.px(w[1].0), f.py(w[0].1)));
            path.push((f.px(w[1].0), f.py(w[1].1)));
        }
    }
    let &(x, y) = pts.last().unwrap();
    path.push((f.px(x), f.py(y)));
    path.dedup();
    polyline(out, &path);
}

fn dnl_bars(out: &mut String, s: &Series) {
    let xs: Vec<f64> =
        s.x.iter()
            .map(|&x| x - 0.5)
            .chain(s.x.iter().map(|&x| x + 0.5))
            .collect();
    let f = Frame::new(&xs, &s.y, true);
    axes(
        out,
        &f,
        "Differential nonlinearity",
        "code transition",
        "DNL (LSB)",
    );
    let zero = f.py(0.0);
    let w = (f.px(1.0) - f.px(0.0)) * 0.8;
    for (&x, &y) in s.x.iter().zip(&s.y) {
        let top = f.py(y).min(zero);
        let h = (f.py(y) - zero).abs();
        writeln!(
            out,
            r##"<rect x="{:.2}" y="{top:.2}" width="{w:.2}" height="{h:.2}" fill="#1f5fa8"/>"##,
            f.px(x) - w / 2.0
        )
        .unwrap();
    }
    writeln!(
        out,
        r##"<line x1="{LEFT}" y1="{zero:.2}" x2="{}" y2="{zero:.2}" stroke="#444"/>"##,
        WIDTH - RIGHT
    )
    .unwrap();
}

fn drift_line(out: &mut String, s: &Series) {
    let mv: Vec<f64> = s.y.iter().map(|v| v * 1e3).collect();
    let f = Frame::new(&s.x, &mv, true);
    axes(
        out,
        &f,
        "Threshold drift",
        "temperature (C)",
        "max threshold shift (mV)",
    );
    let pts: Vec<(f64, f64)> =
        s.x.iter()
            .zip(&mv)
            .map(|(&x, &y)| (f.px(x), f.py(y)))
            .collect();
    polyline(out, &pts);
    for (x, y) in pts {
        writeln!(
            out,
            r##"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="#1f5fa8"/>"##
        )
        .unwrap();
    }
}

/// Renders `text` (the contents of `path`) as an SVG document.
pub(crate) fn render(kind: PlotKind, path: &Path, text: &str) -> CliResult<String> {
    let series = load(kind, path, text)?;
    if series.x.is_empty() {
        return Err(invalid(format!("{}: no data to plot", path.display())));
    }
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    match kind {
        PlotKind::Staircase => staircase(&mut out, &series),
        PlotKind::Dnl => dnl_bars(&mut out, &series),
        PlotKind::Drift => drift_line(&mut out, &series),
    }
    out.push_str("</svg>\n");
    Ok(out)
}
