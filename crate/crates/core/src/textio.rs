//! Plain-text formats for matrices and operators.
//!
//! A symmetric matrix is written as its order `n` on one line followed by
//! `n` rows of `n` reals. An operator is written as `OP n` followed by the
//! `d = n(n+1)/2` rows of its coordinate matrix. Blank lines and lines
//! starting with `#` are ignored. Reals are printed with 17 significant
//! digits, which round-trips every `f64` exactly.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::operator::OperatorMatrix;
use crate::symmetric::{packed_len, Matrix, SymMatrix};

/// Relative tolerance for mirrored entries of a loaded symmetric matrix.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Formats a real with 17 significant digits; `-0` is printed as `0`.
pub fn format_real(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn push_row<'a>(out: &mut String, row: impl Iterator<Item = &'a f64>) {
    let mut first = true;
    for v in row {
        if !first {
            out.push(' ');
        }
        out.push_str(&format_real(*v));
        first = false;
    }
    out.push('\n');
}

fn push_rows(out: &mut String, m: &Matrix) {
    for i in 0..m.nrows() {
        push_row(out, m.row(i).iter());
    }
}

pub fn write_symmetric(a: &SymMatrix) -> String {
    let mut out = format!("{}\n", a.n());
    push_rows(&mut out, &a.to_dense());
    out
}

/// Square matrix in the same layout as [`write_symmetric`], without the symmetry requirement.
pub fn write_dense(m: &Matrix) -> String {
    let mut out = format!("{}\n", m.nrows());
    push_rows(&mut out, m);
    out
}

pub fn write_operator(t: &OperatorMatrix) -> String {
    let mut out = format!("OP {}\n", t.n());
    push_rows(&mut out, t.matrix());
    out
}

/// Space-separated reals on a single line.
pub fn write_vector(x: &[f64]) -> String {
    let mut out = String::new();
    push_row(&mut out, x.iter());
    out
}

/// Non-comment lines with their one-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_order(line: usize, token: &str) -> Result<usize> {
    match token.parse::<usize>() {
        Ok(0) => Err(parse_error(line, "order must be positive")),
        Ok(n) => Ok(n),
        Err(_) => Err(parse_error(
            line,
            format!("expected an order, found {token:?}"),
        )),
    }
}

fn parse_row(line: usize, text: &str, width: usize) -> Result<Vec<f64>> {
    let row = text
        .split_whitespace()
        .map(|tok| match tok.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(parse_error(
                line,
                format!("expected a finite real, found {tok:?}"),
            )),
        })
        .collect::<Result<Vec<f64>>>()?;
    if row.len() != width {
        return Err(parse_error(
            line,
            format!("expected {width} entries, found {}", row.len()),
        ));
    }
    Ok(row)
}

/// Reads `count` rows of `count` reals; returns the matrix and each row's line number.
fn parse_rows<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    header_line: usize,
    count: usize,
) -> Result<(Matrix, Vec<usize>)> {
    let mut m = Matrix::zeros(count, count);
    let mut row_lines = Vec::with_capacity(count);
    for i in 0..count {
        let last = row_lines.last().copied().unwrap_or(header_line);
        let (line, text) = lines
            .next()
            .ok_or_else(|| parse_error(last + 1, format!("expected {count} rows, found {i}")))?;
        for (j, v) in parse_row(line, text, count)?.into_iter().enumerate() {
            m[(i, j)] = v;
        }
        row_lines.push(line);
    }
    if let Some((line, _)) = lines.next() {
        return Err(parse_error(line, "unexpected trailing content"));
    }
    Ok((m, row_lines))
}

fn parse_square(text: &str) -> Result<(Matrix, Vec<usize>)> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| parse_error(1, "empty input"))?;
    let n = parse_order(line, header)?;
    parse_rows(&mut lines, line, n)
}

/// Square matrix written by [`write_dense`] or [`write_symmetric`].
pub fn parse_dense(text: &str) -> Result<Matrix> {
    Ok(parse_square(text)?.0)
}

/// Symmetric matrix; mirrored entries must agree within [`SYMMETRY_TOLERANCE`].
pub fn parse_symmetric(text: &str) -> Result<SymMatrix> {
    let (m, row_lines) = parse_square(text)?;
    SymMatrix::from_dense(&m, SYMMETRY_TOLERANCE).map_err(|e| match e {
        Error::NotSymmetric { row, col, .. } => parse_error(
            row_lines[col],
            format!(
                "entry ({}, {}) differs from its mirror ({}, {})",
                col + 1,
                row + 1,
                row + 1,
                col + 1
            ),
        ),
        other => other,
    })
}

pub fn parse_operator(text: &str) -> Result<OperatorMatrix> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| parse_error(1, "empty input"))?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("OP") {
        return Err(parse_error(line, "operator header must read `OP n`"));
    }
    let n = parse_order(line, tokens.next().unwrap_or(""))?;
    if tokens.next().is_some() {
        return Err(parse_error(line, "operator header must read `OP n`"));
    }
    let (mat, _) = parse_rows(&mut lines, line, packed_len(n))?;
    OperatorMatrix::new(n, mat)
}

/// Reads a file, or standard input when `path` is `-`.
pub fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

/// Labeled section: a header line followed by its body.
pub fn section(out: &mut String, header: &str, body: &str) {
    let _ = writeln!(out, "{header}");
    out.push_str(body);
}
