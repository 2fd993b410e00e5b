//! Sweeps of the standardized third moment: fixed-α tables and the
//! rectangular lattice behind the contour plot, with their CSV formats.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::standardized_m3;
use crate::params::{check_alpha, GammaPair};

/// Right end of every γ1 sweep.
pub const SWEEP_END: f64 = -0.505;
pub const DEFAULT_POINTS: usize = 10;
pub const DEFAULT_GRID_STEP: f64 = 0.005;

pub const TABLE_HEADER: &str = "gamma1,gamma2,M3";
pub const GRID_HEADER: &str = "gamma1,gamma2,M3,inside";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRow {
    pub gamma1: f64,
    pub gamma2: f64,
    pub m3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridCell {
    pub gamma1: f64,
    pub gamma2: f64,
    /// Standardized third moment; `None` outside the parameter domain.
    pub m3: Option<f64>,
}

impl GridCell {
    pub fn inside(&self) -> bool {
        self.m3.is_some()
    }
}

/// `points` equally spaced values from `α/2` to −0.505, both included.
pub fn gamma1_sweep(alpha: f64, points: usize) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    if points < 2 {
        return Err(Error::domain(format!("a sweep needs at least 2 points (got {points})")));
    }
    let start = alpha / 2.0;
    let span = SWEEP_END - start;
    let last = points - 1;
    Ok((0..points)
        .map(|k| {
            if k == last {
                SWEEP_END
            } else {
                start + span * k as f64 / last as f64
            }
        })
        .collect())
}

/// `M3(γ1, α − γ1)` along the sweep. Rows come back in sweep order
/// whatever the thread count.
pub fn table(alpha: f64, points: usize) -> Result<Vec<TableRow>> {
    gamma1_sweep(alpha, points)?
        .into_par_iter()
        .map(|g1| {
            let p = GammaPair::new(g1, alpha - g1)?;
            Ok(TableRow {
                gamma1: g1,
                gamma2: p.gamma2(),
                m3: standardized_m3(&p),
            })
        })
        .collect()
}

/// Lattice coordinates `−1 + k·step` strictly inside `(−1, −1/2)`, rounded
/// to 12 decimals so that `−0.7` is hit exactly.
pub fn grid_axis(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step < 0.25) {
        return Err(Error::domain(format!("grid step must lie in (0, 0.25) (got {step})")));
    }
    let mut out = Vec::new();
    for k in 1.. {
        let v = ((-1.0 + k as f64 * step) * 1e12).round() / 1e12;
        if v >= -0.5 {
            break;
        }
        out.push(v);
    }
    Ok(out)
}

/// Standardized third moment over the square lattice, `γ1` major.
pub fn grid(step: f64) -> Result<Vec<GridCell>> {
    let axis = grid_axis(step)?;
    let cells = axis
        .iter()
        .flat_map(|&g1| axis.iter().map(move |&g2| (g1, g2)))
        .collect::<Vec<_>>();
    Ok(cells
        .into_par_iter()
        .map(|(g1, g2)| GridCell {
            gamma1: g1,
            gamma2: g2,
            m3: GammaPair::new(g1, g2).ok().map(|p| standardized_m3(&p)),
        })
        .collect())
}

/// Fixed-point decimal with 17 significant digits.
pub fn format_full(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let int_digits = x.abs().log10().floor() as i32 + 1;
    let decimals = (17 - int_digits).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn write_table_csv<W: Write>(rows: &[TableRow], mut out: W) -> Result<()> {
    writeln!(out, "{TABLE_HEADER}")?;
    for r in rows {
        writeln!(out, "{},{},{}", format_full(r.gamma1), format_full(r.gamma2), format_full(r.m3))?;
    }
    Ok(())
}

pub fn write_grid_csv<W: Write>(cells: &[GridCell], mut out: W) -> Result<()> {
    writeln!(out, "{GRID_HEADER}")?;
    for c in cells {
        let m3 = c.m3.map(format_full).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{}",
            format_full(c.gamma1),
            format_full(c.gamma2),
            m3,
            c.inside()
        )?;
    }
    Ok(())
}

fn parse_f64(field: &str, line: usize, name: &str) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("{name}: expected a number, got {field:?}"),
    })
}

fn data_lines<'a>(text: &'a str, header: &str) -> Result<impl Iterator<Item = (usize, &'a str)>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, h)) if h.trim() == header => {}
        Some((n, h)) => {
            return Err(Error::Parse {
                line: n,
                message: format!("expected header {header:?}, got {h:?}"),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "empty input".into(),
            })
        }
    }
    Ok(lines.filter(|(_, l)| !l.trim().is_empty()))
}

fn split_fields(l: &str, n: usize, want: usize) -> Result<Vec<&str>> {
    let f: Vec<&str> = l.split(',').collect();
    if f.len() != want {
        return Err(Error::Parse {
            line: n,
            message: format!("expected {want} fields, got {}", f.len()),
        });
    }
    Ok(f)
}

pub fn parse_table_csv(text: &str) -> Result<Vec<TableRow>> {
    data_lines(text, TABLE_HEADER)?
        .map(|(n, l)| {
            let f = split_fields(l, n, 3)?;
            Ok(TableRow {
                gamma1: parse_f64(f[0], n, "gamma1")?,
                gamma2: parse_f64(f[1], n, "gamma2")?,
                m3: parse_f64(f[2], n, "M3")?,
            })
        })
        .collect()
}

pub fn parse_grid_csv(text: &str) -> Result<Vec<GridCell>> {
    data_lines(text, GRID_HEADER)?
        .map(|(n, l)| {
            let f = split_fields(l, n, 4)?;
            let inside = match f[3].trim() {
                "true" => true,
                "false" => false,
                other => {
                    return Err(Error::Parse {
                        line: n,
                        message: format!("inside: expected true or false, got {other:?}"),
                    })
                }
            };
            let m3 = match (inside, f[2].trim()) {
                (false, "") => None,
                (true, v) => Some(parse_f64(v, n, "M3")?),
                (false, v) => {
                    return Err(Error::Parse {
                        line: n,
                        message: format!("M3 must be empty outside the domain, got {v:?}"),
                    })
                }
            };
            Ok(GridCell {
                gamma1: parse_f64(f[0], n, "gamma1")?,
                gamma2: parse_f64(f[1], n, "gamma2")?,
                m3,
            })
        })
        .collect()
}

/// Two-row layout with 3-decimal cells: γ1 on top, `M3(γ1, α−γ1)` below.
pub fn render_table_text(alpha: f64, rows: &[TableRow]) -> String {
    let head = ["γ1", "M3(γ1, α−γ1)"];
    let label_w = head.iter().map(|h| h.chars().count()).max().unwrap_or(0);
    let cells: Vec<(String, String)> = rows
        .iter()
        .map(|r| (format!("{:.3}", r.gamma1), format!("{:.3}", r.m3)))
        .collect();
    let col_w = cells
        .iter()
        .map(|(a, b)| a.len().max(b.len()))
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(out, "M3(γ1, α−γ1) with α = {alpha:.3} (H = {:.3})", alpha + 2.0);
    let pad = |s: &str, w: usize| format!("{s}{}", " ".repeat(w.saturating_sub(s.chars().count())));
    let _ = write!(out, "{}", pad(head[0], label_w));
    for (g, _) in &cells {
        let _ = write!(out, " | {g:>col_w$}");
    }
    out.push('\n');
    let _ = write!(out, "{}", pad(head[1], label_w));
    for (_, m) in &cells {
        let _ = write!(out, " | {m:>col_w$}");
    }
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_matches_printed_columns() {
        let s = gamma1_sweep(-1.4, 10).unwrap();
        let printed = [-0.700, -0.678, -0.657, -0.635, -0.613, -0.592, -0.570, -0.548, -0.527, -0.505];
        for (a, b) in s.iter().zip(printed) {
            assert!((a - b).abs() <= 5e-4 + 1e-12, "{a} vs {b}");
        }
        assert_eq!(s[0], -0.7);
        assert_eq!(s[9], -0.505);
    }

    #[test]
    fn rows_keep_alpha_fixed() {
        for alpha in [-1.4, -1.3, -1.2, -1.1] {
            for r in table(alpha, 10).unwrap() {
                assert!((r.gamma1 + r.gamma2 - alpha).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn table_first_and_last_entries() {
        let t = table(-1.4, 10).unwrap();
        assert!((t[0].m3 - 1.183).abs() <= 1e-3);
        assert!((t[9].m3 - 0.947).abs() <= 1e-3);
        assert!((t[9].gamma2 + 0.895).abs() < 1e-12);
    }

    #[test]
    fn bad_sweeps() {
        assert!(table(-1.6, 10).is_err());
        assert!(table(-1.0, 10).is_err());
        assert!(gamma1_sweep(-1.4, 1).is_err());
        // α close to −1 pushes γ2 past −1/2 at the end of the sweep
        assert!(table(-1.004, 10).is_err());
    }

    #[test]
    fn grid_axis_hits_table_points() {
        let axis = grid_axis(0.005).unwrap();
        assert_eq!(axis.len(), 99);
        assert!(axis.contains(&-0.7));
        assert_eq!(axis[0], -0.995);
        assert_eq!(*axis.last().unwrap(), -0.505);
        assert!(grid_axis(0.0).is_err());
        assert!(grid_axis(0.25).is_err());
    }

    #[test]
    fn grid_cells() {
        let g = grid(0.1).unwrap();
        let axis = grid_axis(0.1).unwrap();
        assert_eq!(axis, vec![-0.9, -0.8, -0.7, -0.6]);
        assert_eq!(g.len(), 16);
        let at = |a: f64, b: f64| g.iter().find(|c| c.gamma1 == a && c.gamma2 == b).unwrap();
        assert!(!at(-0.9, -0.7).inside());
        assert!(!at(-0.8, -0.7).inside());
        assert!((at(-0.7, -0.7).m3.unwrap() - 1.183).abs() <= 1e-3);
        assert_eq!(at(-0.6, -0.8).m3, at(-0.8, -0.6).m3);
    }

    #[test]
    fn csv_round_trip() {
        let t = table(-1.3, 10).unwrap();
        let mut buf = Vec::new();
        write_table_csv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("gamma1,gamma2,M3\n-0.65000000000000002,"));
        assert_eq!(parse_table_csv(&text).unwrap(), t);

        let g = grid(0.1).unwrap();
        let mut buf = Vec::new();
        write_grid_csv(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("-0.90000000000000002,-0.69999999999999996,,false"));
        assert_eq!(parse_grid_csv(&text).unwrap(), g);
    }

    #[test]
    fn full_precision_format() {
        assert_eq!(format_full(1.0), "1.0000000000000000");
        assert_eq!(format_full(-0.5), "-0.50000000000000000");
        assert_eq!(format_full(12.5), "12.500000000000000");
        assert_eq!(format_full(0.0), "0");
        for x in [0.1, -0.678, 2.770_123_456_789, 1e-3] {
            assert_eq!(format_full(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = parse_table_csv("gamma1,gamma2,M3\n-0.7,-0.7,1.1\n-0.6,x,1\n").unwrap_err();
        assert_eq!(e, Error::Parse { line: 3, message: "gamma2: expected a number, got \"x\"".into() });
        let e = parse_table_csv("a,b\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse_grid_csv("gamma1,gamma2,M3,inside\n-0.7,-0.7,1,maybe\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_grid_csv("gamma1,gamma2,M3,inside\n-0.7,-0.7\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn text_layout() {
        let t = table(-1.4, 10).unwrap();
        let s = render_table_text(-1.4, &t);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("γ1") && lines[1].contains("| -0.700 |"));
        assert!(lines[2].contains("|  1.183 |") && lines[2].ends_with("0.947"));
    }
}
