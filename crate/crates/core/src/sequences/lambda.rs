//! Strictly increasing positive weight sequences `lambda` tending to infinity.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::arith::{parse_rational, Rational};
use crate::error::{Error, Result};

/// How an explicit sequence continues past its stored values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailRule {
    /// Keeps adding the given step.
    Linear(Rational),
    /// Keeps multiplying by the given ratio (> 1).
    Geometric(Rational),
}

type Oracle = Arc<dyn Fn(usize) -> Rational + Send + Sync>;

#[derive(Clone)]
pub enum Family {
    /// `lambda_n = a n + b`
    Linear { a: Rational, b: Rational },
    /// `lambda_n = c r^n`
    Geometric { r: Rational, c: Rational },
    Explicit { values: Vec<Rational>, tail: TailRule },
    /// User oracle; strict increase is checked over each queried window.
    Custom {
        name: String,
        oracle: Oracle,
        summable_reciprocals: bool,
    },
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Linear { a, b } => write!(f, "Linear({a}, {b})"),
            Family::Geometric { r, c } => write!(f, "Geometric({r}, {c})"),
            Family::Explicit { values, tail } => write!(f, "Explicit({values:?}, {tail:?})"),
            Family::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// A validated `lambda` oracle. Index `-1` reads as 0.
#[derive(Clone, Debug)]
pub struct LambdaSeq {
    family: Family,
    source: String,
}

impl LambdaSeq {
    pub fn linear(a: Rational, b: Rational) -> Result<Self> {
        if !b.is_positive() {
            return Err(Error::NonPositiveStart);
        }
        if !a.is_positive() {
            return Err(Error::NotStrictlyIncreasing(0));
        }
        let source = format!("linear:{a},{b}");
        Ok(LambdaSeq {
            family: Family::Linear { a, b },
            source,
        })
    }

    pub fn geometric(r: Rational, c: Rational) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::NonPositiveStart);
        }
        if r <= Rational::one() {
            return Err(Error::NotStrictlyIncreasing(0));
        }
        let source = format!("geometric:{r},{c}");
        Ok(LambdaSeq {
            family: Family::Geometric { r, c },
            source,
        })
    }

    /// Stored values followed by `tail`; without a tail rule the last
    /// difference is repeated.
    pub fn explicit(values: Vec<Rational>, tail: Option<TailRule>) -> Result<Self> {
        let first = values.first().ok_or(Error::EmptyWindow)?;
        if !first.is_positive() {
            return Err(Error::NonPositiveStart);
        }
        for (i, w) in values.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::NotStrictlyIncreasing(i + 1));
            }
        }
        let tail = match tail {
            Some(TailRule::Linear(s)) if !s.is_positive() => {
                return Err(Error::NotStrictlyIncreasing(values.len()))
            }
            Some(TailRule::Geometric(r)) if r <= Rational::one() => {
                return Err(Error::NotStrictlyIncreasing(values.len()))
            }
            Some(t) => t,
            None if values.len() >= 2 => {
                TailRule::Linear(&values[values.len() - 1] - &values[values.len() - 2])
            }
            None => TailRule::Linear(first.clone()),
        };
        let source = format!(
            "explicit:{}",
            values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
        );
        Ok(LambdaSeq {
            family: Family::Explicit { values, tail },
            source,
        })
    }

    pub fn custom(
        name: impl Into<String>,
        oracle: impl Fn(usize) -> Rational + Send + Sync + 'static,
        summable_reciprocals: bool,
    ) -> Result<Self> {
        let name = name.into();
        let oracle: Oracle = Arc::new(oracle);
        if !oracle(0).is_positive() {
            return Err(Error::NonPositiveStart);
        }
        Ok(LambdaSeq {
            source: format!("custom:{name}"),
            family: Family::Custom {
                name,
                oracle,
                summable_reciprocals,
            },
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// `lambda_n` for `n >= 0`.
    pub fn get(&self, n: usize) -> Rational {
        match &self.family {
            Family::Linear { a, b } => a * Rational::from_integer(n.into()) + b,
            Family::Geometric { r, c } => c * num_traits::pow(r.clone(), n),
            Family::Explicit { values, tail } => match values.get(n) {
                Some(v) => v.clone(),
                None => {
                    let last = values.len() - 1;
                    let steps = n - last;
                    match tail {
                        TailRule::Linear(s) => {
                            &values[last] + s * Rational::from_integer(steps.into())
                        }
                        TailRule::Geometric(r) => &values[last] * num_traits::pow(r.clone(), steps),
                    }
                }
            },
            Family::Custom { oracle, .. } => oracle(n),
        }
    }

    /// `lambda_n` with the convention `lambda_(-1) = 0`.
    pub fn at(&self, n: isize) -> Rational {
        if n < 0 {
            Rational::zero()
        } else {
            self.get(n as usize)
        }
    }

    /// `lambda_n - lambda_(n-1)`
    pub fn diff(&self, n: usize) -> Rational {
        self.get(n) - self.at(n as isize - 1)
    }

    /// The first `n` values, checked for positivity and strict increase.
    pub fn window(&self, n: usize) -> Result<Vec<Rational>> {
        let values: Vec<Rational> = (0..n).map(|i| self.get(i)).collect();
        if let Some(first) = values.first() {
            if !first.is_positive() {
                return Err(Error::NonPositiveStart);
            }
        }
        for (i, w) in values.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::NotStrictlyIncreasing(i + 1));
            }
        }
        Ok(values)
    }

    /// Every built-in family tends to infinity.
    pub fn divergent(&self) -> bool {
        true
    }

    /// Whether `(1/lambda_n)` is summable, as known from the family.
    pub fn summable_reciprocals(&self) -> bool {
        match &self.family {
            Family::Linear { .. } => false,
            Family::Geometric { .. } => true,
            Family::Explicit { tail, .. } => matches!(tail, TailRule::Geometric(_)),
            Family::Custom {
                summable_reciprocals,
                ..
            } => *summable_reciprocals,
        }
    }

    /// `sum_{n > big_n} 1/lambda_n`, exactly.
    pub fn reciprocal_tail(&self, big_n: usize) -> Result<Rational> {
        match &self.family {
            Family::Geometric { r, c } => {
                let rn = num_traits::pow(r.clone(), big_n);
                Ok(Rational::one() / (c * (r - Rational::one()) * rn))
            }
            Family::Explicit {
                values,
                tail: TailRule::Geometric(r),
            } => {
                let last = values.len() - 1;
                let anchor = &values[last];
                let start = big_n.max(last);
                let steps = start - last;
                let mut total =
                    Rational::one() / (anchor * (r - Rational::one()) * num_traits::pow(r.clone(), steps));
                for n in big_n + 1..=last {
                    total += self.get(n).recip();
                }
                Ok(total)
            }
            _ => Err(Error::DivergentTail(self.source.clone())),
        }
    }
}

impl fmt::Display for LambdaSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

fn two_params(body: &str, input: &str) -> Result<(Rational, Rational)> {
    let parts: Vec<&str> = body.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::parse("lambda", input, "expected two parameters"));
    }
    Ok((parse_rational(parts[0])?, parse_rational(parts[1])?))
}

/// Reads one rational per line; `#` starts a comment and a line
/// `tail=linear:<step>` or `tail=geometric:<r>` sets the continuation.
pub fn parse_lambda_text(text: &str, origin: &str) -> Result<LambdaSeq> {
    let mut values = Vec::new();
    let mut tail = None;
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rule) = line.strip_prefix("tail=") {
            tail = Some(match rule.split_once(':') {
                Some(("linear", s)) => TailRule::Linear(parse_rational(s)?),
                Some(("geometric", r)) => TailRule::Geometric(parse_rational(r)?),
                _ => return Err(Error::parse("lambda tail", rule, "unknown tail rule")),
            });
            continue;
        }
        values.push(parse_rational(line)?);
    }
    if values.is_empty() {
        return Err(Error::parse("lambda", origin, "no values"));
    }
    let mut seq = LambdaSeq::explicit(values, tail)?;
    seq.source = format!("file:{origin}");
    Ok(seq)
}

impl FromStr for LambdaSeq {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| Error::parse("lambda", s, "expected <family>:<params>"))?;
        match kind.trim() {
            "linear" => {
                let (a, b) = two_params(body, s)?;
                LambdaSeq::linear(a, b)
            }
            "geometric" => {
                let (r, c) = two_params(body, s)?;
                LambdaSeq::geometric(r, c)
            }
            "file" => {
                let text = std::fs::read_to_string(body).map_err(|e| Error::Io {
                    path: body.to_string(),
                    reason: e.to_string(),
                })?;
                parse_lambda_text(&text, body)
            }
            "explicit" => {
                let values = body
                    .split(',')
                    .map(parse_rational)
                    .collect::<Result<Vec<_>>>()?;
                LambdaSeq::explicit(values, None)
            }
            _ => Err(Error::parse("lambda", s, "unknown family")),
        }
    }
}
