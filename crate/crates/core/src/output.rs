//! JSON, CSV and SVG writers.
//!
//! JSON floats are always written with 17 significant digits so identical
//! runs give byte-identical files.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::jm_metric::CurvatureGrid;
use crate::shape_geometry::{Letter, ShapePoint};
use crate::vec3::Vec3;

pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, n: usize| out.extend(std::iter::repeat_n(' ', n));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // Short numeric arrays stay on one line.
            if items.len() <= 8 && items.iter().all(|x| x.is_number()) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, indent);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                pad(out, indent + 2);
                write_value(out, x, indent + 2);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                pad(out, indent + 2);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, x, indent + 2);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Invalid(e.to_string()))?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json(value)?)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::Invalid(format!("{}: {e}", dir.display())))?;
        }
    }
    fs::write(path, text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

/// CSV with a header row; non-finite values are left empty.
pub fn csv<I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| if x.is_finite() { format!("{x:.16e}") } else { String::new() }).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 360.0;

fn plot_xy(p: ShapePoint) -> (f64, f64) {
    (p.theta.rem_euclid(TAU) / TAU * WIDTH, (FRAC_PI_2 - p.phi) / PI * HEIGHT)
}

fn svg_open(out: &mut String) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = WIDTH,
        h = HEIGHT
    );
}

fn svg_markers(out: &mut String) {
    let y = HEIGHT / 2.0;
    let _ = writeln!(out, r##"<line x1="0" y1="{y}" x2="{WIDTH}" y2="{y}" stroke="#888" stroke-dasharray="4 3"/>"##);
    for k in Letter::ALL {
        let (x, y) = plot_xy(ShapePoint::collision(k));
        let _ = writeln!(out, r##"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="#000"/>"##);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="12">C{}</text>"#, x + 6.0, y - 6.0, k.digit());
    }
}

/// Equirectangular `(theta, phi)` picture of one or more curves, split where
/// they wrap around in `theta`.
pub fn trace_svg(curves: &[(&[Vec3], &str)], closed: bool) -> String {
    let mut out = String::new();
    svg_open(&mut out);
    let _ = writeln!(out, r##"<rect width="{WIDTH}" height="{HEIGHT}" fill="#fff"/>"##);
    svg_markers(&mut out);
    for (pts, colour) in curves {
        let mut pieces: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
        let count = pts.len() + usize::from(closed && !pts.is_empty());
        for i in 0..count {
            let (x, y) = plot_xy(ShapePoint::from_unit(pts[i % pts.len()]));
            if let Some(&(px, _)) = pieces.last().and_then(|p| p.last()) {
                if (x - px).abs() > WIDTH / 2.0 {
                    pieces.push(Vec::new());
                }
            }
            pieces.last_mut().expect("nonempty").push((x, y));
        }
        for piece in pieces.iter().filter(|p| p.len() > 1) {
            let coords: Vec<String> = piece.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(out, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.2" points="{}"/>"#, coords.join(" "));
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Diverging colour for a value scaled to `[-1, 1]`: blue negative, red
/// positive, white at zero.
fn colour(t: f64) -> String {
    let t = t.clamp(-1.0, 1.0);
    let (r, g, b) = if t < 0.0 {
        let a = -t;
        (1.0 - a, 1.0 - 0.6 * a, 1.0)
    } else {
        (1.0, 1.0 - 0.8 * t, 1.0 - 0.8 * t)
    };
    format!("#{:02x}{:02x}{:02x}", (r * 255.0) as u8, (g * 255.0) as u8, (b * 255.0) as u8)
}

/// Heatmap of a sphere curvature grid, downsampled to at most `max_cells`
/// per side. Colours use a signed cube-root scale so the flat Lagrange
/// points show up.
pub fn heatmap_svg(grid: &CurvatureGrid, max_cells: usize) -> String {
    let step_r = grid.rows.div_ceil(max_cells.max(1));
    let step_c = grid.cols.div_ceil(max_cells.max(1));
    let scale = grid.values.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs())).cbrt().max(1e-300);
    let mut out = String::new();
    svg_open(&mut out);
    let cw = WIDTH / grid.cols as f64 * step_c as f64;
    let ch = HEIGHT / grid.rows as f64 * step_r as f64;
    for r in (0..grid.rows).step_by(step_r) {
        for c in (0..grid.cols).step_by(step_c) {
            let idx = r * grid.cols + c;
            let (x, y) = plot_xy(grid.points[idx]);
            let fill = match grid.values[idx] {
                Some(v) => colour(v.cbrt() / scale),
                None => "#444".to_string(),
            };
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                x,
                y - ch / 2.0,
                cw + 0.5,
                ch + 0.5
            );
        }
    }
    svg_markers(&mut out);
    out.push_str("</svg>\n");
    out
}
