//! Standalone SVG rendering: `M3` against γ1 along a table, and level sets
//! of `M3` over the lattice with the domain boundary overlaid.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::tables::{parse_grid_csv, parse_table_csv, GridCell, TableRow, GRID_HEADER, TABLE_HEADER};

pub const CONTOUR_LEVELS: usize = 12;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 110.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

/// Parsed input of `plot`, told apart by the CSV header.
#[derive(Debug, Clone, PartialEq)]
pub enum PlotInput {
    Table(Vec<TableRow>),
    Grid(Vec<GridCell>),
}

pub fn parse_plot_input(text: &str) -> Result<PlotInput> {
    match text.lines().next().map(str::trim) {
        Some(TABLE_HEADER) => Ok(PlotInput::Table(parse_table_csv(text)?)),
        Some(GRID_HEADER) => Ok(PlotInput::Grid(parse_grid_csv(text)?)),
        _ => Err(Error::Parse {
            line: 1,
            message: format!("expected header {TABLE_HEADER:?} or {GRID_HEADER:?}"),
        }),
    }
}

/// Affine map from data coordinates to the plot frame.
#[derive(Debug, Clone, Copy)]
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn open_svg(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
        (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
        escape(title)
    );
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(s: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let (l, r) = (f.px(f.x0), f.px(f.x1));
    let (b, t) = (f.py(f.y0), f.py(f.y1));
    let _ = writeln!(
        s,
        r#"<g class="axes" stroke="black" stroke-width="1" fill="none"><rect x="{l:.2}" y="{t:.2}" width="{:.2}" height="{:.2}"/></g>"#,
        r - l,
        b - t
    );
    let _ = writeln!(s, r#"<g class="ticks" font-family="sans-serif" font-size="11">"#);
    for k in 0..=TICKS {
        let u = k as f64 / TICKS as f64;
        let x = f.x0 + u * (f.x1 - f.x0);
        let y = f.y0 + u * (f.y1 - f.y0);
        let (px, py) = (f.px(x), f.py(y));
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{b:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{x:.3}</text>"#,
            b + 5.0,
            b + 18.0
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{l:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{y:.3}</text>"#,
            l - 5.0,
            l - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        (l + r) / 2.0,
        HEIGHT - 18.0,
        escape(xlabel)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        (t + b) / 2.0,
        (t + b) / 2.0,
        escape(ylabel)
    );
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// `M3` against γ1, one marker per row.
pub fn line_svg(rows: &[TableRow]) -> String {
    let title = match rows.first() {
        Some(r) => format!("M3(γ1, α−γ1), α = {:.3}", r.gamma1 + r.gamma2),
        None => "M3(γ1, α−γ1)".to_string(),
    };
    let mut s = open_svg(&title);
    let min_max = |v: &mut dyn Iterator<Item = f64>| {
        v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)))
    };
    let (x0, x1) = min_max(&mut rows.iter().map(|r| r.gamma1));
    let (y0, y1) = min_max(&mut rows.iter().map(|r| r.m3));
    let (x0, x1) = if rows.is_empty() { (-1.0, -0.5) } else { padded(x0, x1) };
    let (y0, y1) = if rows.is_empty() { (0.0, 1.0) } else { padded(y0, y1) };
    let f = Frame { x0, x1, y0, y1 };
    axes(&mut s, &f, "γ1", "M3");
    if !rows.is_empty() {
        let pts: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.2},{:.2}", f.px(r.gamma1), f.py(r.m3)))
            .collect();
        let _ = writeln!(
            s,
            r##"<polyline class="series" fill="none" stroke="#1f4e9c" stroke-width="2" points="{}"/>"##,
            pts.join(" ")
        );
        let _ = writeln!(s, r##"<g class="markers" fill="#1f4e9c">"##);
        for r in rows {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3"/>"#, f.px(r.gamma1), f.py(r.m3));
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}

/// `CONTOUR_LEVELS` values equally spaced strictly between `lo` and `hi`.
pub fn contour_levels(lo: f64, hi: f64) -> Vec<f64> {
    let n = CONTOUR_LEVELS;
    (1..=n).map(|k| lo + (hi - lo) * k as f64 / (n + 1) as f64).collect()
}

/// Values on a rectangular lattice, `None` where undefined.
struct Lattice {
    xs: Vec<f64>,
    ys: Vec<f64>,
    z: Vec<Option<f64>>,
}

impl Lattice {
    fn from_cells(cells: &[GridCell]) -> Result<Self> {
        let mut xs: Vec<f64> = cells.iter().map(|c| c.gamma1).collect();
        let mut ys: Vec<f64> = cells.iter().map(|c| c.gamma2).collect();
        for v in [&mut xs, &mut ys] {
            v.sort_by(f64::total_cmp);
            v.dedup();
        }
        if xs.len() * ys.len() != cells.len() {
            return Err(Error::Parse {
                line: 1,
                message: format!(
                    "grid is not rectangular: {} cells for {} × {} coordinates",
                    cells.len(),
                    xs.len(),
                    ys.len()
                ),
            });
        }
        let mut z = vec![None; cells.len()];
        for c in cells {
            let i = xs.binary_search_by(|v| v.total_cmp(&c.gamma1)).expect("present");
            let j = ys.binary_search_by(|v| v.total_cmp(&c.gamma2)).expect("present");
            z[i * ys.len() + j] = c.m3;
        }
        Ok(Self { xs, ys, z })
    }

    fn at(&self, i: usize, j: usize) -> Option<f64> {
        self.z[i * self.ys.len() + j]
    }
}

type Point = (f64, f64);

/// Marching squares for one level: line segments in data coordinates. Only
/// squares with all four corners defined are traced.
fn march(lat: &Lattice, level: f64) -> Vec<(Point, Point)> {
    let mut segs = Vec::new();
    for i in 0..lat.xs.len().saturating_sub(1) {
        for j in 0..lat.ys.len().saturating_sub(1) {
            let (Some(z00), Some(z10), Some(z11), Some(z01)) =
                (lat.at(i, j), lat.at(i + 1, j), lat.at(i + 1, j + 1), lat.at(i, j + 1))
            else {
                continue;
            };
            let (x0, x1, y0, y1) = (lat.xs[i], lat.xs[i + 1], lat.ys[j], lat.ys[j + 1]);
            let lerp = |a: f64, b: f64, za: f64, zb: f64| a + (level - za) / (zb - za) * (b - a);
            // edges: bottom (00-10), right (10-11), top (01-11), left (00-01)
            let bottom = || (lerp(x0, x1, z00, z10), y0);
            let right = || (x1, lerp(y0, y1, z10, z11));
            let top = || (lerp(x0, x1, z01, z11), y1);
            let left = || (x0, lerp(y0, y1, z00, z01));
            let case = (z00 > level) as u8
                | ((z10 > level) as u8) << 1
                | ((z11 > level) as u8) << 2
                | ((z01 > level) as u8) << 3;
            match case {
                0 | 15 => {}
                1 | 14 => segs.push((left(), bottom())),
                2 | 13 => segs.push((bottom(), right())),
                3 | 12 => segs.push((left(), right())),
                4 | 11 => segs.push((right(), top())),
                6 | 9 => segs.push((bottom(), top())),
                7 | 8 => segs.push((left(), top())),
                5 | 10 => {
                    // saddle: resolve with the centre value
                    let centre_above = (z00 + z10 + z11 + z01) / 4.0 > level;
                    if (case == 5) == centre_above {
                        segs.push((left(), top()));
                        segs.push((bottom(), right()));
                    } else {
                        segs.push((left(), bottom()));
                        segs.push((right(), top()));
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    segs
}

fn level_colour(k: usize, n: usize) -> String {
    let t = if n > 1 { k as f64 / (n - 1) as f64 } else { 0.0 };
    let r = (40.0 + 200.0 * t).round() as u8;
    let b = (200.0 - 170.0 * t).round() as u8;
    format!("#{r:02x}50{b:02x}")
}

/// Level sets of `M3` over `(−1, −1/2)²` with the lines `γ1 = −1/2`,
/// `γ2 = −1/2` and `γ1 + γ2 = −3/2`. A grid with no defined cell yields the
/// axes alone.
pub fn contour_svg(cells: &[GridCell]) -> Result<String> {
    let mut s = open_svg("M3(γ1, γ2)");
    let f = Frame {
        x0: -1.0,
        x1: -0.5,
        y0: -1.0,
        y1: -0.5,
    };
    axes(&mut s, &f, "γ1", "γ2");
    let values: Vec<f64> = cells.iter().filter_map(|c| c.m3).collect();
    if values.is_empty() {
        s.push_str("</svg>\n");
        return Ok(s);
    }
    let lat = Lattice::from_cells(cells)?;
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let levels = contour_levels(lo, hi);
    let _ = writeln!(s, r#"<g class="contours" fill="none" stroke-width="1.2">"#);
    for (k, &level) in levels.iter().enumerate() {
        let segs = march(&lat, level);
        if segs.is_empty() {
            continue;
        }
        let mut d = String::new();
        for (a, b) in segs {
            let _ = write!(d, "M{:.2} {:.2}L{:.2} {:.2}", f.px(a.0), f.py(a.1), f.px(b.0), f.py(b.1));
        }
        let _ = writeln!(
            s,
            r#"<path class="level" data-level="{level:.6}" stroke="{}" d="{d}"/>"#,
            level_colour(k, levels.len())
        );
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g class="boundary" stroke="black" stroke-width="1.5" stroke-dasharray="6 3">"#);
    for ((ax, ay), (bx, by)) in [((-0.5, -1.0), (-0.5, -0.5)), ((-1.0, -0.5), (-0.5, -0.5)), ((-1.0, -0.5), (-0.5, -1.0))] {
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            f.px(ax),
            f.py(ay),
            f.px(bx),
            f.py(by)
        );
    }
    let _ = writeln!(s, "</g>");

    let lx = WIDTH - MARGIN_RIGHT + 15.0;
    let _ = writeln!(s, r#"<g class="legend" font-family="sans-serif" font-size="11">"#);
    for (k, level) in levels.iter().enumerate().rev() {
        let y = MARGIN_TOP + 10.0 + 16.0 * (levels.len() - 1 - k) as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{level:.3}</text>"#,
            lx + 18.0,
            level_colour(k, levels.len()),
            lx + 24.0,
            y + 4.0
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    Ok(s)
}
