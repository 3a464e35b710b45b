//! Witness sequences, each defined as the preimage under `E` of a simple image.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use super::{LambdaSeq, Provenance, RealWindow, SeqWindow};
use crate::arith::{rat, rpow, Exponent, Rational, Real};
use crate::error::{Error, Result};
use crate::matrices::{inverse_transform, inverse_transform_real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WitnessId {
    /// image `(1, 1, 0, 0, ...)`
    U,
    /// image `(1, -1, 0, 0, ...)`
    VHilbert,
    /// image `(1, 1, 1, ...)`
    T,
    /// image `e^(0)`
    VE0,
    /// image `((n+1)^(-1/p))`, irrational in general
    PowerLaw,
    /// image `((-1)^n)`
    Alternating,
    /// the coordinate vector itself
    Unit(usize),
}

impl FromStr for WitnessId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "u" => WitnessId::U,
            "v-hilbert" => WitnessId::VHilbert,
            "t" => WitnessId::T,
            "v-e0" => WitnessId::VE0,
            "power-law" => WitnessId::PowerLaw,
            "alternating" => WitnessId::Alternating,
            other => match other.strip_prefix("unit:").map(|k| k.parse::<usize>()) {
                Some(Ok(k)) => WitnessId::Unit(k),
                _ => return Err(Error::UnknownWitness(s.to_string())),
            },
        })
    }
}

impl fmt::Display for WitnessId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessId::U => f.write_str("u"),
            WitnessId::VHilbert => f.write_str("v-hilbert"),
            WitnessId::T => f.write_str("t"),
            WitnessId::VE0 => f.write_str("v-e0"),
            WitnessId::PowerLaw => f.write_str("power-law"),
            WitnessId::Alternating => f.write_str("alternating"),
            WitnessId::Unit(k) => write!(f, "unit:{k}"),
        }
    }
}

fn unit(k: usize, n: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    if k < n {
        v[k] = Rational::one();
    }
    v
}

/// The rational `E`-image defining the witness, on indices `0..n`.
pub fn witness_image(id: WitnessId, n: usize) -> Result<Vec<Rational>> {
    Ok(match id {
        WitnessId::U => (0..n).map(|i| rat((i < 2) as i64)).collect(),
        WitnessId::VHilbert => (0..n)
            .map(|i| match i {
                0 => rat(1),
                1 => rat(-1),
                _ => rat(0),
            })
            .collect(),
        WitnessId::T => vec![Rational::one(); n],
        WitnessId::VE0 => unit(0, n),
        WitnessId::Alternating => (0..n).map(|i| rat(if i % 2 == 0 { 1 } else { -1 })).collect(),
        WitnessId::PowerLaw => return Err(Error::RealOnlyWitness(id.to_string())),
        WitnessId::Unit(_) => {
            return Err(Error::IndexOutOfRange(
                "a unit vector is not defined through its image".into(),
            ))
        }
    })
}

fn power_law_image(p: &Exponent, n: usize, precision: u32) -> Result<Vec<Real>> {
    let e = match p {
        Exponent::Infinity => Rational::zero(),
        Exponent::Finite(p) => -p.recip(),
    };
    (0..n)
        .map(|i| rpow(&rat(i as i64 + 1), &e, precision))
        .collect()
}

/// The exact witness window of length `n`.
pub fn gen_witness(id: WitnessId, l: &LambdaSeq, p: Option<&Exponent>, n: usize) -> Result<SeqWindow> {
    if n == 0 {
        return Err(Error::EmptyWindow);
    }
    let mut prov = Provenance::new(format!("witness:{id}")).with_lambda(l);
    if id == WitnessId::PowerLaw {
        return Err(match p {
            None => Error::MissingP(id.to_string()),
            Some(_) => Error::RealOnlyWitness(id.to_string()),
        });
    }
    if let Some(p) = p {
        prov = prov.with_p(p);
    }
    if let WitnessId::Unit(k) = id {
        return SeqWindow::new(unit(k, n), prov);
    }
    let image = SeqWindow::new(witness_image(id, n)?, Provenance::new("image"))?;
    let x = inverse_transform(&image, l)?;
    SeqWindow::new(x.into_values(), prov)
}

/// The witness window as certified reals; covers the irrational power-law witness.
pub fn gen_witness_real(
    id: WitnessId,
    l: &LambdaSeq,
    p: Option<&Exponent>,
    n: usize,
    precision: u32,
) -> Result<RealWindow> {
    if id != WitnessId::PowerLaw {
        let w = gen_witness(id, l, p, n)?;
        let provenance = w.provenance().clone();
        let values = w
            .into_values()
            .into_iter()
            .map(|v| Real::exact(v, precision))
            .collect();
        return Ok(RealWindow { values, provenance });
    }
    if n == 0 {
        return Err(Error::EmptyWindow);
    }
    let p = p.ok_or_else(|| Error::MissingP(id.to_string()))?;
    let image = power_law_image(p, n, precision)?;
    let values = inverse_transform_real(&image, l, precision)?;
    Ok(RealWindow {
        values,
        provenance: Provenance::new(format!("witness:{id}")).with_lambda(l).with_p(p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use crate::matrices::{forward_transform, forward_transform_real};
    use crate::sequences::fib_rational;

    fn lin() -> LambdaSeq {
        "linear:1,1".parse().unwrap()
    }

    #[test]
    fn t_window_and_closed_form() {
        let t = gen_witness(WitnessId::T, &lin(), None, 3).unwrap();
        assert_eq!(t.values(), [rat(1), rat(6), rat(15)]);
        // f_3^2 (1/(f_1 f_2) + 1/(f_2 f_3) + 1)
        let f = |n| fib_rational(n);
        let t2 = &f(3) * &f(3) * (Rational::one() / (f(1) * f(2)) + Rational::one() / (f(2) * f(3)) + rat(1));
        assert_eq!(t.values()[2], t2);
    }

    #[test]
    fn t_is_lambda_independent() {
        let g: LambdaSeq = "geometric:2,1".parse().unwrap();
        assert_eq!(
            gen_witness(WitnessId::T, &lin(), None, 40).unwrap().values(),
            gen_witness(WitnessId::T, &g, None, 40).unwrap().values()
        );
    }

    #[test]
    fn u_window_and_leading_closed_form() {
        let l = lin();
        let u = gen_witness(WitnessId::U, &l, None, 4).unwrap();
        assert_eq!(&u.values()[..3], [rat(1), rat(6), ratio(21, 2)]);
        let f = |n| fib_rational(n);
        // f_2^2 + f_2 and f_3^2 (1 + 1/f_2) - lambda_1 f_3 / ((lambda_2 - lambda_1) f_2)
        assert_eq!(u.values()[1], &f(2) * &f(2) + f(2));
        let u2 = &f(3) * &f(3) * (rat(1) + f(2).recip())
            - l.get(1) * f(3) / ((l.get(2) - l.get(1)) * f(2));
        assert_eq!(u.values()[2], u2);
        // past the leading indices the sequence grows like f_(k+1)^2
        assert_eq!(u.values()[3], ratio(7, 6) * &f(4) * &f(4));
    }

    #[test]
    fn unit_and_errors() {
        let e = gen_witness(WitnessId::Unit(0), &lin(), None, 4).unwrap();
        assert_eq!(e.values(), [rat(1), rat(0), rat(0), rat(0)]);
        assert!(matches!("w".parse::<WitnessId>(), Err(Error::UnknownWitness(_))));
        assert!(matches!("unit:x".parse::<WitnessId>(), Err(Error::UnknownWitness(_))));
        assert!(matches!(
            gen_witness(WitnessId::PowerLaw, &lin(), None, 4),
            Err(Error::MissingP(_))
        ));
        let two = Exponent::integer(2);
        assert!(matches!(
            gen_witness(WitnessId::PowerLaw, &lin(), Some(&two), 4),
            Err(Error::RealOnlyWitness(_))
        ));
    }

    #[test]
    fn images_are_reproduced() {
        for spec in ["linear:1,1", "linear:2,3", "geometric:2,1"] {
            let l: LambdaSeq = spec.parse().unwrap();
            for id in [WitnessId::U, WitnessId::VHilbert, WitnessId::T, WitnessId::VE0, WitnessId::Alternating] {
                let x = gen_witness(id, &l, None, 24).unwrap();
                let y = forward_transform(&x, &l).unwrap();
                assert_eq!(y.values(), witness_image(id, 24).unwrap(), "{id} {spec}");
            }
        }
    }

    #[test]
    fn power_law_image_within_bound() {
        let l = lin();
        let two = Exponent::integer(2);
        let x = gen_witness_real(WitnessId::PowerLaw, &l, Some(&two), 16, 256).unwrap();
        let y = forward_transform_real(&x.values, &l, 256).unwrap();
        for (n, v) in y.iter().enumerate() {
            let target = rpow(&rat(n as i64 + 1), &ratio(-1, 2), 256).unwrap();
            assert!(v.overlaps(&target), "n = {n}");
        }
    }

    #[test]
    fn ids_roundtrip() {
        for s in ["u", "v-hilbert", "t", "v-e0", "power-law", "alternating", "unit:7"] {
            assert_eq!(s.parse::<WitnessId>().unwrap().to_string(), s);
        }
    }
}
