//! General row-windowed matrices and their JSON form.
//!
//! ```json
//! {"kind": "rows", "rows": [["1", 0], ["1/2", "-1"]]}
//! {"kind": "dense", "entries": [[1, 0], [0, 1]]}
//! {"kind": "band", "size": 8, "diagonals": {"0": ["1"], "-1": ["-1/2"]}}
//! {"kind": "E"}
//! ```
//! Rows past the stored ones are zero. The closed-form kinds (`identity`,
//! `zero`, `lambda`, `fhat`, `E`, `E-inverse`) are infinite triangles.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use num_traits::Zero;
use serde::Deserialize;

use super::{make_E, make_E_inverse, make_fhat, make_lambda_matrix, Triangle};
use crate::arith::{parse_rational, Rational};
use crate::error::{Error, Result};
use crate::sequences::LambdaSeq;

/// Row access to a (not necessarily triangular) infinite matrix.
pub trait RowSource: Send + Sync {
    fn entry(&self, n: usize, k: usize) -> Rational;

    /// Row `n` vanishes from this column on, if that is known.
    fn row_support(&self, n: usize) -> Option<usize>;

    /// Rows from this index on vanish, if that is known.
    fn row_count(&self) -> Option<usize>;

    fn describe(&self) -> String;

    /// Every row (not just the ones asked about) has finite support.
    fn every_row_finite(&self) -> bool {
        false
    }

    /// Row `n` on columns `0..support`.
    fn row_prefix(&self, n: usize, width: usize) -> Vec<Rational> {
        (0..width).map(|k| self.entry(n, k)).collect()
    }
}

impl RowSource for Triangle {
    fn entry(&self, n: usize, k: usize) -> Rational {
        Triangle::entry(self, n, k)
    }

    fn row_support(&self, n: usize) -> Option<usize> {
        Some(n + 1)
    }

    fn row_count(&self) -> Option<usize> {
        self.nonzero_rows()
    }

    fn describe(&self) -> String {
        self.name().to_string()
    }

    fn every_row_finite(&self) -> bool {
        true
    }
}

/// Finitely many stored rows of arbitrary width; everything else is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowMatrix {
    rows: Vec<Vec<Rational>>,
    name: String,
}

impl WindowMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Self {
        let mut rows = rows;
        for r in &mut rows {
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        while rows.last().is_some_and(|r| r.is_empty()) {
            rows.pop();
        }
        let name = format!("rows[{}]", rows.len());
        WindowMatrix { rows, name }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn width(&self) -> usize {
        self.rows.iter().map(Vec::len).max().unwrap_or(0)
    }
}

impl RowSource for WindowMatrix {
    fn entry(&self, n: usize, k: usize) -> Rational {
        self.rows
            .get(n)
            .and_then(|r| r.get(k))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    fn row_support(&self, n: usize) -> Option<usize> {
        Some(self.rows.get(n).map_or(0, Vec::len))
    }

    fn row_count(&self) -> Option<usize> {
        Some(self.rows.len())
    }

    fn describe(&self) -> String {
        self.name.clone()
    }

    fn every_row_finite(&self) -> bool {
        true
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Cell {
    Int(i64),
    Text(String),
}

impl Cell {
    fn value(&self) -> Result<Rational> {
        match self {
            Cell::Int(i) => Ok(Rational::from_integer((*i).into())),
            Cell::Text(s) => parse_rational(s),
        }
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum Spec {
    Dense {
        entries: Vec<Vec<Cell>>,
        #[serde(default)]
        tail: Option<String>,
    },
    Rows {
        rows: Vec<Vec<Cell>>,
        #[serde(default)]
        tail: Option<String>,
    },
    Band {
        size: usize,
        diagonals: BTreeMap<String, Vec<Cell>>,
        #[serde(default)]
        tail: Option<String>,
    },
    Identity,
    Zero,
    Lambda,
    Fhat,
    #[serde(rename = "E")]
    E,
    #[serde(rename = "E-inverse")]
    EInverse,
}

fn cells(rows: &[Vec<Cell>]) -> Result<Vec<Vec<Rational>>> {
    rows.iter()
        .map(|r| r.iter().map(Cell::value).collect())
        .collect()
}

fn check_tail(tail: &Option<String>) -> Result<()> {
    match tail.as_deref() {
        None | Some("zero") => Ok(()),
        Some(other) => Err(Error::parse("matrix tail", other, "only \"zero\" is supported")),
    }
}

/// Parses the matrix JSON format; `lambda` feeds the closed-form kinds.
pub fn parse_matrix_json(text: &str, lambda: &LambdaSeq) -> Result<Arc<dyn RowSource>> {
    let spec: Spec =
        serde_json::from_str(text).map_err(|e| Error::parse("matrix JSON", text, e.to_string()))?;
    Ok(match spec {
        Spec::Dense { entries, tail } | Spec::Rows {
            rows: entries,
            tail,
        } => {
            check_tail(&tail)?;
            Arc::new(WindowMatrix::new(cells(&entries)?))
        }
        Spec::Band {
            size,
            diagonals,
            tail,
        } => {
            check_tail(&tail)?;
            let mut rows = vec![Vec::new(); size];
            for (offset, values) in &diagonals {
                let off: i64 = offset
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse("band offset", offset, "expected an integer"))?;
                for n in 0..size {
                    let k = n as i64 + off;
                    if k < 0 {
                        continue;
                    }
                    // a short diagonal list repeats its last value
                    let Some(cell) = values.get(n).or(values.last()) else {
                        continue;
                    };
                    let row: &mut Vec<Rational> = &mut rows[n];
                    let k = k as usize;
                    if row.len() <= k {
                        row.resize(k + 1, Rational::zero());
                    }
                    row[k] = cell.value()?;
                }
            }
            Arc::new(WindowMatrix::new(rows))
        }
        Spec::Identity => Arc::new(Triangle::identity()),
        Spec::Zero => Arc::new(Triangle::zero()),
        Spec::Lambda => Arc::new(make_lambda_matrix(lambda)),
        Spec::Fhat => Arc::new(make_fhat()),
        Spec::E => Arc::new(make_E(lambda)),
        Spec::EInverse => Arc::new(make_E_inverse(lambda)),
    })
}

pub fn read_matrix_file(path: &Path, lambda: &LambdaSeq) -> Result<Arc<dyn RowSource>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_matrix_json(&text, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};

    fn lin() -> LambdaSeq {
        "linear:1,1".parse().unwrap()
    }

    #[test]
    fn rows_format() {
        let m = parse_matrix_json(r#"{"kind":"rows","rows":[["1/2",0,"3"],[],["-1"]]}"#, &lin())
            .unwrap();
        assert_eq!(m.entry(0, 0), ratio(1, 2));
        assert_eq!(m.entry(0, 2), rat(3));
        assert_eq!(m.entry(2, 0), rat(-1));
        assert_eq!(m.entry(9, 9), rat(0));
        assert_eq!(m.row_count(), Some(3));
        assert_eq!(m.row_support(1), Some(0));
    }

    #[test]
    fn band_format() {
        let m = parse_matrix_json(
            r#"{"kind":"band","size":4,"diagonals":{"0":["2"],"-1":["-1"]},"tail":"zero"}"#,
            &lin(),
        )
        .unwrap();
        assert_eq!(m.entry(3, 3), rat(2));
        assert_eq!(m.entry(3, 2), rat(-1));
        assert_eq!(m.entry(0, 0), rat(2));
        assert_eq!(m.entry(4, 4), rat(0));
    }

    #[test]
    fn closed_forms() {
        let m = parse_matrix_json(r#"{"kind":"E"}"#, &lin()).unwrap();
        assert_eq!(m.entry(1, 0), ratio(-1, 2));
        assert_eq!(m.row_count(), None);
        let z = parse_matrix_json(r#"{"kind":"zero"}"#, &lin()).unwrap();
        assert_eq!(z.row_count(), Some(0));
    }

    #[test]
    fn malformed_is_input_error() {
        for text in [
            "{",
            r#"{"kind":"sparse"}"#,
            r#"{"kind":"rows","rows":[["x"]]}"#,
            r#"{"kind":"rows","rows":[],"tail":"periodic"}"#,
        ] {
            let err = parse_matrix_json(text, &lin()).err().unwrap();
            assert!(err.is_input_error(), "{text}: {err}");
        }
    }
}
