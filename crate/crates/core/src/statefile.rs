//! Plain-text state files.
//!
//! ```text
//! # comment
//! dim 4
//! 0.5,0 0,0 0,0 0.5,0
//! 0,0   0,0 0,0 0,0
//! 0,0   0,0 0,0 0,0
//! 0.5,0 0,0 0,0 0.5,0
//! ```
//!
//! or a single line `family <id> <param>`. Everything after `#` is ignored.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::states::{make_example, DensityMatrix, ExampleFamily};

#[derive(Debug, Clone, PartialEq)]
pub enum StateSource {
    Family(ExampleFamily),
    Matrix(ComplexMatrix),
}

impl StateSource {
    pub fn resolve(&self) -> Result<DensityMatrix> {
        match self {
            StateSource::Family(f) => make_example(*f),
            StateSource::Matrix(m) => DensityMatrix::from_matrix(m.clone()),
        }
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_entry(tok: &str, line: usize) -> Result<Complex64> {
    let (re, im) = tok
        .split_once(',')
        .ok_or_else(|| parse_err(line, format!("expected `re,im`, found `{tok}`")))?;
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| parse_err(line, format!("invalid number `{s}`")))
    };
    Ok(Complex64::new(num(re)?, num(im)?))
}

fn parse_row(text: &str, n: usize, line: usize) -> Result<Vec<Complex64>> {
    let row = text
        .split_whitespace()
        .map(|t| parse_entry(t, line))
        .collect::<Result<Vec<_>>>()?;
    if row.len() != n {
        return Err(parse_err(line, format!("expected {n} entries, found {}", row.len())));
    }
    Ok(row)
}

/// Parses a state file into its source description.
pub fn parse_state(text: &str) -> Result<StateSource> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (first_no, first) = lines.next().ok_or_else(|| parse_err(0, "empty state file"))?;
    let words: Vec<&str> = first.split_whitespace().collect();
    match words.as_slice() {
        ["family", id, param] => {
            let p: f64 = param
                .parse()
                .map_err(|_| parse_err(first_no, format!("invalid parameter `{param}`")))?;
            let family = ExampleFamily::from_id(id, p).map_err(|e| parse_err(first_no, e.to_string()))?;
            if lines.next().is_some() {
                return Err(parse_err(first_no + 1, "trailing content after family line"));
            }
            Ok(StateSource::Family(family))
        }
        ["dim", n] => {
            let n: usize = n
                .parse()
                .map_err(|_| parse_err(first_no, format!("invalid dimension `{n}`")))?;
            if n == 0 {
                return Err(parse_err(first_no, "dimension must be positive"));
            }
            let mut data = Vec::with_capacity(n * n);
            for r in 0..n {
                let (no, l) = lines
                    .next()
                    .ok_or_else(|| parse_err(first_no + r + 1, format!("missing row {}", r + 1)))?;
                data.extend(parse_row(l, n, no)?);
            }
            if let Some((no, _)) = lines.next() {
                return Err(parse_err(no, "more rows than `dim` declares"));
            }
            ComplexMatrix::from_row_major(n, n, data).map_err(|e| parse_err(first_no, e.to_string()))
                .map(StateSource::Matrix)
        }
        _ => Err(parse_err(first_no, "expected `dim N` or `family <id> <param>`")),
    }
}

/// Rows separated by `;`, entries by whitespace: `"0.5,0 0,0; 0,0 0.5,0"`.
pub fn parse_inline(text: &str) -> Result<ComplexMatrix> {
    let rows: Vec<&str> = text.split(';').map(str::trim).filter(|r| !r.is_empty()).collect();
    let n = rows.len();
    if n == 0 {
        return Err(parse_err(1, "empty matrix"));
    }
    let mut data = Vec::with_capacity(n * n);
    for (i, r) in rows.iter().enumerate() {
        data.extend(parse_row(r, n, i + 1)?);
    }
    ComplexMatrix::from_row_major(n, n, data).map_err(|e| parse_err(1, e.to_string()))
}

/// Writes `m` in the file grammar. Numbers use the shortest representation
/// that parses back to the same `f64`.
pub fn format_matrix(m: &ComplexMatrix) -> String {
    let mut out = format!("dim {}\n", m.rows());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols())
            .map(|j| {
                let z = m[(i, j)];
                format!("{:?},{:?}", z.re, z.im)
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
