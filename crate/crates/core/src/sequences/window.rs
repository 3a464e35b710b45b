//! Finite prefixes of sequences, with enough provenance to regenerate them.

use std::fmt;
use std::path::Path;

use num_traits::Zero;

use crate::arith::{parse_rational, Rational, Real};
use crate::error::{Error, Result};

/// Where a window came from: the generator plus its parameters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Provenance {
    pub generator: String,
    pub lambda: Option<String>,
    pub p: Option<String>,
}

impl Provenance {
    pub fn new(generator: impl Into<String>) -> Self {
        Provenance {
            generator: generator.into(),
            ..Default::default()
        }
    }

    pub fn with_lambda(mut self, lambda: impl fmt::Display) -> Self {
        self.lambda = Some(lambda.to_string());
        self
    }

    pub fn with_p(mut self, p: impl fmt::Display) -> Self {
        self.p = Some(p.to_string());
        self
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.generator)?;
        if let Some(l) = &self.lambda {
            write!(f, " lambda={l}")?;
        }
        if let Some(p) = &self.p {
            write!(f, " p={p}")?;
        }
        Ok(())
    }
}

/// `(x_0, ..., x_(N-1))`, `N >= 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeqWindow {
    values: Vec<Rational>,
    provenance: Provenance,
}

impl SeqWindow {
    pub fn new(values: Vec<Rational>, provenance: Provenance) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyWindow);
        }
        Ok(SeqWindow { values, provenance })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![Rational::zero(); n], Provenance::new("zero"))
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `x_k`, with `x_k = 0` for negative `k`.
    pub fn at(&self, k: isize) -> Rational {
        if k < 0 {
            Rational::zero()
        } else {
            self.values[k as usize].clone()
        }
    }

    pub fn to_csv(&self) -> String {
        values_to_csv(&self.values)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        let values = parse_csv(&text)?;
        Self::new(values, Provenance::new(format!("file:{}", path.display())))
    }
}

pub fn values_to_csv(values: &[Rational]) -> String {
    let mut out = String::new();
    for v in values {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

/// One rational per line; blank lines and `#` comments are skipped.
pub fn parse_csv(text: &str) -> Result<Vec<Rational>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(parse_rational)
        .collect()
}

/// A window of certified reals, for sequences with irrational entries.
#[derive(Clone, Debug)]
pub struct RealWindow {
    pub values: Vec<Real>,
    pub provenance: Provenance,
}
