//! Prefix-extendable sequence sources, parsed from command-line specs.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use super::{fib_rational, gen_witness, gen_witness_real, parse_csv, LambdaSeq, WitnessId};
use crate::arith::{parse_rational, Exponent, Rational, Real};
use crate::error::{Error, Result};

/// A sequence that can produce any prefix.
pub trait SeqGenerator: Send + Sync {
    fn describe(&self) -> String;

    fn exact_prefix(&self, n: usize) -> Result<Vec<Rational>>;

    fn real_prefix(&self, n: usize, precision: u32) -> Result<Vec<Real>> {
        Ok(self
            .exact_prefix(n)?
            .into_iter()
            .map(|v| Real::exact(v, precision))
            .collect())
    }

    /// Every entry from this index on is zero, if known.
    fn support_bound(&self) -> Option<usize> {
        None
    }
}

/// `witness:<id>`, `unit:<k>`, `zero`, `ones`, `inv-fib-cube`,
/// `list:<r>,<r>,...` or `file:<path>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeqSpec {
    Witness(WitnessId),
    Unit(usize),
    Zero,
    Ones,
    /// `1 / f_(k+1)^3`
    InvFibCube,
    /// Listed values, then zeros.
    List(Vec<Rational>),
}

impl FromStr for SeqSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(id) = s.strip_prefix("witness:") {
            return Ok(SeqSpec::Witness(id.parse()?));
        }
        if let Some(k) = s.strip_prefix("unit:") {
            let k = k
                .parse()
                .map_err(|_| Error::parse("sequence", s, "unit index must be an integer"))?;
            return Ok(SeqSpec::Unit(k));
        }
        if let Some(body) = s.strip_prefix("list:") {
            let values = body
                .split(',')
                .map(parse_rational)
                .collect::<Result<Vec<_>>>()?;
            return Ok(SeqSpec::List(values));
        }
        if let Some(path) = s.strip_prefix("file:") {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.to_string(),
                reason: e.to_string(),
            })?;
            return Ok(SeqSpec::List(parse_csv(&text)?));
        }
        match s {
            "zero" => Ok(SeqSpec::Zero),
            "ones" => Ok(SeqSpec::Ones),
            "inv-fib-cube" => Ok(SeqSpec::InvFibCube),
            _ => Err(Error::parse("sequence", s, "unknown sequence spec")),
        }
    }
}

impl fmt::Display for SeqSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeqSpec::Witness(id) => write!(f, "witness:{id}"),
            SeqSpec::Unit(k) => write!(f, "unit:{k}"),
            SeqSpec::Zero => f.write_str("zero"),
            SeqSpec::Ones => f.write_str("ones"),
            SeqSpec::InvFibCube => f.write_str("inv-fib-cube"),
            SeqSpec::List(v) => write!(
                f,
                "list:{}",
                v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",")
            ),
        }
    }
}

/// A [`SeqSpec`] bound to the weights and exponent that witnesses need.
#[derive(Clone, Debug)]
pub struct SpecGenerator {
    pub spec: SeqSpec,
    pub lambda: LambdaSeq,
    pub p: Option<Exponent>,
}

impl SpecGenerator {
    pub fn new(spec: SeqSpec, lambda: LambdaSeq, p: Option<Exponent>) -> Self {
        SpecGenerator { spec, lambda, p }
    }
}

impl SeqGenerator for SpecGenerator {
    fn describe(&self) -> String {
        self.spec.to_string()
    }

    fn exact_prefix(&self, n: usize) -> Result<Vec<Rational>> {
        Ok(match &self.spec {
            SeqSpec::Witness(id) => gen_witness(*id, &self.lambda, self.p.as_ref(), n)?.into_values(),
            SeqSpec::Unit(k) => (0..n)
                .map(|i| if i == *k { Rational::one() } else { Rational::zero() })
                .collect(),
            SeqSpec::Zero => vec![Rational::zero(); n],
            SeqSpec::Ones => vec![Rational::one(); n],
            SeqSpec::InvFibCube => (0..n)
                .map(|k| {
                    let f = fib_rational(k + 1);
                    (&f * &f * &f).recip()
                })
                .collect(),
            SeqSpec::List(v) => (0..n)
                .map(|i| v.get(i).cloned().unwrap_or_else(Rational::zero))
                .collect(),
        })
    }

    fn real_prefix(&self, n: usize, precision: u32) -> Result<Vec<Real>> {
        match &self.spec {
            SeqSpec::Witness(id) => {
                Ok(gen_witness_real(*id, &self.lambda, self.p.as_ref(), n, precision)?.values)
            }
            _ => Ok(self
                .exact_prefix(n)?
                .into_iter()
                .map(|v| Real::exact(v, precision))
                .collect()),
        }
    }

    fn support_bound(&self) -> Option<usize> {
        match &self.spec {
            SeqSpec::Zero => Some(0),
            SeqSpec::Unit(k) => Some(k + 1),
            SeqSpec::Witness(WitnessId::Unit(k)) => Some(k + 1),
            SeqSpec::List(v) => Some(v.iter().rposition(|x| !x.is_zero()).map_or(0, |i| i + 1)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};

    fn gen(s: &str) -> SpecGenerator {
        SpecGenerator::new(s.parse().unwrap(), "linear:1,1".parse().unwrap(), None)
    }

    #[test]
    fn specs() {
        assert_eq!(gen("witness:t").exact_prefix(3).unwrap(), [rat(1), rat(6), rat(15)]);
        assert_eq!(gen("unit:1").exact_prefix(3).unwrap(), [rat(0), rat(1), rat(0)]);
        assert_eq!(gen("list:1/2,0,3,0").exact_prefix(5).unwrap()[2], rat(3));
        assert_eq!(gen("list:1/2,0,3,0").support_bound(), Some(3));
        assert_eq!(gen("inv-fib-cube").exact_prefix(3).unwrap()[2], ratio(1, 27));
        assert_eq!(gen("zero").support_bound(), Some(0));
        assert_eq!(gen("ones").support_bound(), None);
    }

    #[test]
    fn bad_specs() {
        assert!("nope".parse::<SeqSpec>().unwrap_err().is_input_error());
        assert!("witness:w".parse::<SeqSpec>().unwrap_err().is_input_error());
        assert!("file:/definitely/missing".parse::<SeqSpec>().unwrap_err().is_input_error());
    }

    #[test]
    fn display_roundtrip() {
        for s in ["witness:v-e0", "unit:3", "zero", "ones", "inv-fib-cube", "list:1,-1/2"] {
            assert_eq!(s.parse::<SeqSpec>().unwrap().to_string(), s);
        }
    }
}
