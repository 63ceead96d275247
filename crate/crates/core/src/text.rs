//! Plain-text formats: PL maps, pair lists, oracle tables and CSV reports.
//!
//! A map is written as
//!
//! ```text
//! left_slope: 1
//! right_slope: 3
//! points:
//! (0, 0)
//! (1, 2)
//! ```
//!
//! Affine maps replace the `points:` block with `intercept: b`. Rationals are
//! rendered `p/q`, or `p` when `q = 1`, so serialization is byte-stable.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::approx::ApproximationGrid;
use crate::pl::{PlError, PlMap};
use crate::rational::{parse_rational, to_decimal, Rational};
use crate::structured::GrowthRow;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid map: {0}")]
    Invariant(#[from] PlError),
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> TextError {
    TextError::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn rational_at(text: &str, line: usize, column: usize) -> Result<Rational, TextError> {
    parse_rational(text).map_err(|e| parse_err(line, column, e.to_string()))
}

pub fn serialize_map(f: &PlMap) -> String {
    let mut out = String::new();
    writeln!(out, "left_slope: {}", f.left_slope()).unwrap();
    writeln!(out, "right_slope: {}", f.right_slope()).unwrap();
    match f.intercept() {
        Some(b) => writeln!(out, "intercept: {b}").unwrap(),
        None => {
            out.push_str("points:\n");
            for (x, y) in f.knots() {
                writeln!(out, "({x}, {y})").unwrap();
            }
        }
    }
    out
}

/// Parses `(x, y)` groups out of one line, returning them with their columns.
fn parse_point_groups(
    body: &str,
    line: usize,
    base_column: usize,
) -> Result<Vec<(Rational, Rational)>, TextError> {
    let mut out = Vec::new();
    let mut rest = body;
    let mut column = base_column;
    loop {
        let trimmed = rest.trim_start();
        column += rest.len() - trimmed.len();
        if trimmed.is_empty() {
            return Ok(out);
        }
        if !trimmed.starts_with('(') {
            return Err(parse_err(line, column, "expected `(`"));
        }
        let close = trimmed
            .find(')')
            .ok_or_else(|| parse_err(line, column, "unclosed `(`"))?;
        let inner = &trimmed[1..close];
        let (xs, ys) = inner
            .split_once(',')
            .ok_or_else(|| parse_err(line, column, "expected `x, y`"))?;
        let x = rational_at(xs, line, column + 1)?;
        let y = rational_at(ys, line, column + 2 + xs.len())?;
        out.push((x, y));
        rest = &trimmed[close + 1..];
        column += close + 1;
    }
}

pub fn parse_map(text: &str) -> Result<PlMap, TextError> {
    let mut left = None;
    let mut right = None;
    let mut intercept = None;
    let mut points: Vec<(Rational, Rational)> = Vec::new();
    let mut saw_points = false;
    let mut in_points = false;
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        let trimmed = content.trim_start();
        if trimmed.starts_with('(') {
            if !in_points {
                return Err(parse_err(
                    line,
                    indent + 1,
                    "point outside a `points:` block",
                ));
            }
            points.extend(parse_point_groups(content, line, 1)?);
            continue;
        }
        let (key, value) = trimmed
            .split_once(':')
            .ok_or_else(|| parse_err(line, indent + 1, "expected `key: value`"))?;
        let value_column = indent + key.len() + 2 + (value.len() - value.trim_start().len());
        in_points = false;
        match key.trim() {
            "left_slope" => left = Some(rational_at(value, line, value_column)?),
            "right_slope" => right = Some(rational_at(value, line, value_column)?),
            "intercept" => intercept = Some(rational_at(value, line, value_column)?),
            "points" => {
                saw_points = true;
                in_points = true;
                points.extend(parse_point_groups(value, line, indent + key.len() + 2)?);
            }
            other => {
                return Err(parse_err(
                    line,
                    indent + 1,
                    format!("unknown field `{other}`"),
                ));
            }
        }
    }
    let end = last_line.max(1);
    let left = left.ok_or_else(|| parse_err(end, 1, "missing `left_slope`"))?;
    let right = right.ok_or_else(|| parse_err(end, 1, "missing `right_slope`"))?;
    match (intercept, saw_points && !points.is_empty()) {
        (Some(_), true) => Err(parse_err(
            end,
            1,
            "give either `intercept` or `points`, not both",
        )),
        (Some(b), false) => {
            if left != right {
                return Err(PlError::AffineSlopeMismatch { left, right }.into());
            }
            Ok(PlMap::affine(left, b)?)
        }
        (None, true) => Ok(PlMap::new(points, left, right)?),
        (None, false) => Err(parse_err(end, 1, "missing `points` or `intercept`")),
    }
}

/// Splits a line on commas and/or whitespace.
fn fields(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        let sep = c == ',' || c.is_whitespace();
        match (sep, start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out
}

/// A field and its byte offset in the line.
type Field<'a> = (usize, &'a str);

fn two_columns(
    text: &str,
) -> impl Iterator<Item = Result<(usize, Field<'_>, Field<'_>), TextError>> {
    text.lines().enumerate().filter_map(|(idx, raw)| {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let cols = fields(content);
        match cols.len() {
            0 => None,
            2 => Some(Ok((line, cols[0], cols[1]))),
            n => Some(Err(parse_err(
                line,
                cols.get(2).map_or(1, |c| c.0 + 1),
                format!("expected 2 columns, found {n}"),
            ))),
        }
    })
}

/// Two exact-rational columns per line.
pub fn parse_pairs(text: &str) -> Result<Vec<(Rational, Rational)>, TextError> {
    two_columns(text)
        .map(|row| {
            let (line, (cx, x), (cy, y)) = row?;
            Ok((rational_at(x, line, cx + 1)?, rational_at(y, line, cy + 1)?))
        })
        .collect()
}

/// `integer, rational` per line; repeated integers are rejected.
pub fn parse_table(text: &str) -> Result<BTreeMap<i64, Rational>, TextError> {
    let mut table = BTreeMap::new();
    for row in two_columns(text) {
        let (line, (cx, x), (cy, y)) = row?;
        let key: i64 = x
            .parse()
            .map_err(|_| parse_err(line, cx + 1, format!("`{x}` is not an integer")))?;
        let value = rational_at(y, line, cy + 1)?;
        if table.insert(key, value).is_some() {
            return Err(parse_err(
                line,
                cx + 1,
                format!("duplicate entry for {key}"),
            ));
        }
    }
    Ok(table)
}

pub fn grid_csv(grid: &ApproximationGrid) -> String {
    let mut out = String::from("k,x_k,y_k,eval_y_k\n");
    for (k, y, fy) in grid.nodes() {
        writeln!(out, "{k},{},{y},{fy}", grid.x(k)).unwrap();
    }
    out
}

pub const GROWTH_HEADER: &str =
    "n,point,value,displacement,point_approx,value_approx,displacement_approx";

pub fn growth_csv(rows: &[GrowthRow], digits: usize) -> String {
    let mut out = String::from(GROWTH_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n,
            r.point,
            r.value,
            r.displacement,
            to_decimal(&r.point, digits),
            to_decimal(&r.value, digits),
            to_decimal(&r.displacement, digits),
        )
        .unwrap();
    }
    out
}
