//! Plain-text CSV formats for functions and convergence series.
//!
//! Numbers are written in the shortest decimal form that parses back to the
//! same `f64`, so every emitted file round-trips bit for bit.
//!
//! | kind        | first line                                               |
//! |-------------|----------------------------------------------------------|
//! | step        | `breakpoint,value`, then `b,v` rows and a final `b,` row |
//! | lattice     | `site,value`, one row per support site, increasing       |
//! | grid        | `m,h`, then `2m+1` rows of `2m+1` values, `j = -m..m`     |
//! | series      | `n,lp_error,weighted_mass,sup_error,deviation_measure`   |

use std::fmt::Write as _;

use crate::analysis::{ConvergenceSeries, SeriesRecord};
use crate::error::{Error, Result};
use crate::grid2d::GridFunction;
use crate::lattice::LatticeFunction;
use crate::numeric::format_f64;
use crate::step1d::StepFunction;

pub const STEP_HEADER: &str = "breakpoint,value";
pub const LATTICE_HEADER: &str = "site,value";
pub const SERIES_HEADER: &str = "n,lp_error,weighted_mass,sup_error,deviation_measure";

/// Which function format a file holds, judged from its first line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Step,
    Lattice,
    Grid,
}

pub fn detect_kind(text: &str) -> Option<FileKind> {
    let first = text.lines().next()?.trim();
    match first {
        STEP_HEADER => Some(FileKind::Step),
        LATTICE_HEADER => Some(FileKind::Lattice),
        _ => {
            let mut fields = first.split(',');
            let m = fields.next()?.trim().parse::<usize>().ok()?;
            let h = fields.next()?.trim().parse::<f64>().ok()?;
            (fields.next().is_none() && h > 0.0 && m < usize::MAX / 4).then_some(FileKind::Grid)
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_number(field: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("`{field}` is not a number")))
}

/// Non-empty lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
}

fn expect_header<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    header: &str,
) -> Result<()> {
    match lines.next() {
        Some((_, l)) if l.trim() == header => Ok(()),
        Some((n, l)) => Err(parse_err(
            n,
            format!("expected header `{header}`, found `{l}`"),
        )),
        None => Err(parse_err(1, format!("missing header `{header}`"))),
    }
}

pub fn write_step(u: &StepFunction) -> String {
    let mut out = String::from(STEP_HEADER);
    out.push('\n');
    for (a, _, v) in u.pieces() {
        let _ = writeln!(out, "{},{}", format_f64(a), format_f64(v));
    }
    if let Some(&last) = u.breakpoints().last() {
        let _ = writeln!(out, "{},", format_f64(last));
    }
    out
}

pub fn parse_step(text: &str) -> Result<StepFunction> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, STEP_HEADER)?;
    let mut breakpoints = Vec::new();
    let mut values = Vec::new();
    let mut closed = false;
    for (n, line) in lines {
        if closed {
            return Err(parse_err(n, "rows after the closing breakpoint"));
        }
        let (b, v) = line
            .split_once(',')
            .ok_or_else(|| parse_err(n, "expected `breakpoint,value`"))?;
        breakpoints.push(parse_number(b, n)?);
        if v.trim().is_empty() {
            closed = true;
        } else {
            values.push(parse_number(v, n)?);
        }
    }
    if !breakpoints.is_empty() && !closed {
        return Err(parse_err(
            text.lines().count(),
            "missing closing row `breakpoint,` with an empty value",
        ));
    }
    StepFunction::new(breakpoints, values)
}

pub fn write_lattice(u: &LatticeFunction) -> String {
    let mut out = String::from(LATTICE_HEADER);
    out.push('\n');
    for (x, v) in u.iter() {
        let _ = writeln!(out, "{},{}", x, format_f64(v));
    }
    out
}

pub fn parse_lattice(text: &str) -> Result<LatticeFunction> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, LATTICE_HEADER)?;
    let mut entries = Vec::new();
    let mut previous: Option<i64> = None;
    for (n, line) in lines {
        let (x, v) = line
            .split_once(',')
            .ok_or_else(|| parse_err(n, "expected `site,value`"))?;
        let x: i64 = x
            .trim()
            .parse()
            .map_err(|_| parse_err(n, format!("`{x}` is not an integer site")))?;
        if previous.is_some_and(|p| p >= x) {
            return Err(parse_err(n, "sites must be strictly increasing"));
        }
        previous = Some(x);
        entries.push((x, parse_number(v, n)?));
    }
    LatticeFunction::new(entries)
}

pub fn write_grid(u: &GridFunction) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{},{}", u.half_width(), format_f64(u.cell_size()));
    let side = 2 * u.half_width() + 1;
    for row in u.values().chunks(side) {
        let line: Vec<String> = row.iter().map(|&v| format_f64(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_grid(text: &str) -> Result<GridFunction> {
    let mut lines = content_lines(text);
    let (n, first) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty grid file"))?;
    let (m, h) = first
        .split_once(',')
        .ok_or_else(|| parse_err(n, "expected `m,h`"))?;
    let m: usize = m
        .trim()
        .parse()
        .map_err(|_| parse_err(n, format!("`{m}` is not a half-width")))?;
    let h = parse_number(h, n)?;
    let side = 2 * m + 1;
    let mut values = Vec::with_capacity(side * side);
    let mut rows = 0;
    for (n, line) in lines {
        let row: Vec<f64> = line
            .split(',')
            .map(|f| parse_number(f, n))
            .collect::<Result<_>>()?;
        if row.len() != side {
            return Err(parse_err(
                n,
                format!("expected {side} values, found {}", row.len()),
            ));
        }
        values.extend(row);
        rows += 1;
    }
    if rows != side {
        return Err(parse_err(
            text.lines().count(),
            format!("expected {side} rows, found {rows}"),
        ));
    }
    GridFunction::new(m, h, values)
}

pub fn write_series(series: &ConvergenceSeries) -> String {
    let mut out = String::from(SERIES_HEADER);
    out.push('\n');
    for r in &series.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            format_f64(r.lp_error),
            format_f64(r.weighted_mass),
            format_f64(r.sup_error),
            format_f64(r.deviation_measure)
        );
    }
    out
}

pub fn parse_series(text: &str) -> Result<Vec<SeriesRecord>> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, SERIES_HEADER)?;
    lines
        .map(|(n, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(parse_err(n, "expected 5 fields"));
            }
            Ok(SeriesRecord {
                n: fields[0]
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(n, "bad iteration index"))?,
                lp_error: parse_number(fields[1], n)?,
                weighted_mass: parse_number(fields[2], n)?,
                sup_error: parse_number(fields[3], n)?,
                deviation_measure: parse_number(fields[4], n)?,
            })
        })
        .collect()
}
