//! Exact rationals, conjugate exponents and certified real balls.
//!
//! Every matrix entry in this crate is a [`Rational`]. Irrational quantities
//! (`|x|^p` for non-integer `p`, `p`-th roots of sums) are carried as
//! [`Real`] balls: an exact rational midpoint plus a rational radius that
//! bounds the absolute error. Radii are propagated through every operation,
//! so comparisons never rely on a fixed epsilon.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational. `num-rational` keeps it reduced with a
/// positive denominator after every operation.
pub type Rational = BigRational;

/// Default working precision for [`Real`] values, in bits.
pub const DEFAULT_PRECISION: u32 = 256;

/// Extra bits spent inside root extraction beyond the requested precision.
pub const GUARD_BITS: u32 = 16;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"num/den"`, `"int"` or a plain decimal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::parse("rational", s, "empty"));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if t.contains('/') {
            return Err(Error::parse("rational", s, "mixed decimal and fraction"));
        }
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
            .map_err(|e| Error::parse("rational", s, e.to_string()))?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    let r = Rational::from_str(t).map_err(|e| Error::parse("rational", s, e.to_string()))?;
    if r.denom().is_zero() {
        return Err(Error::parse("rational", s, "zero denominator"));
    }
    Ok(r)
}

/// Canonical text form: `"21/2"` or `"-7"`.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Renders a rational as a decimal with `digits` fractional digits (truncated).
pub fn rational_to_decimal(r: &Rational, digits: usize) -> String {
    let neg = r.is_negative();
    let a = r.abs();
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (a.numer() * &scale).div_floor(a.denom());
    let (int, frac) = scaled.div_rem(&scale);
    let mut s = String::new();
    if neg && !scaled.is_zero() {
        s.push('-');
    }
    s.push_str(&int.to_string());
    if digits > 0 {
        let f = frac.to_string();
        s.push('.');
        for _ in f.len()..digits {
            s.push('0');
        }
        s.push_str(&f);
    }
    s
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // fall back through logarithms for values outside the f64 range
    let n = r.numer().bits() as i64;
    let d = r.denom().bits() as i64;
    let shift = n - d;
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    if shift > 1000 {
        sign * f64::INFINITY
    } else {
        0.0
    }
}

/// A norm exponent: a rational `p >= 1`, or infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(Rational),
    Infinity,
}

impl Exponent {
    pub fn finite(p: Rational) -> Result<Self> {
        if p < Rational::one() {
            return Err(Error::ExponentOutOfRange(p.to_string()));
        }
        Ok(Exponent::Finite(p))
    }

    pub fn integer(p: u32) -> Self {
        assert!(p >= 1, "exponent must be >= 1");
        Exponent::Finite(rat(p as i64))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Exponent::Finite(p) if p.is_one())
    }

    /// `1 < p < infinity`
    pub fn is_interior(&self) -> bool {
        matches!(self, Exponent::Finite(p) if !p.is_one())
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Exponent::Finite(p) => Some(p),
            Exponent::Infinity => None,
        }
    }

    /// `q` with `1/p + 1/q = 1`.
    pub fn conjugate(&self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::Finite(Rational::one()),
            Exponent::Finite(p) if p.is_one() => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(p / (p - Rational::one())),
        }
    }
}

pub fn conjugate(p: &Exponent) -> Exponent {
    p.conjugate()
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" | "Inf" => Ok(Exponent::Infinity),
            t => Exponent::finite(parse_rational(t)?),
        }
    }
}

/// A certified real: the true value lies in `[mid - rad, mid + rad]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Real {
    mid: Rational,
    rad: Rational,
    prec: u32,
}

impl Real {
    pub fn exact(value: Rational, prec: u32) -> Self {
        Real {
            mid: value,
            rad: Rational::zero(),
            prec,
        }
    }

    pub fn zero(prec: u32) -> Self {
        Self::exact(Rational::zero(), prec)
    }

    /// Builds a ball; a negative radius is taken in absolute value.
    pub fn with_radius(mid: Rational, rad: Rational, prec: u32) -> Self {
        Real {
            mid,
            rad: rad.abs(),
            prec,
        }
        .normalized()
    }

    fn from_bounds(lo: Rational, hi: Rational, prec: u32) -> Self {
        let two = rat(2);
        let mid = (&lo + &hi) / &two;
        let rad = (&hi - &lo) / two;
        Self::with_radius(mid, rad, prec)
    }

    pub fn mid(&self) -> &Rational {
        &self.mid
    }

    pub fn rad(&self) -> &Rational {
        &self.rad
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn lower(&self) -> Rational {
        &self.mid - &self.rad
    }

    pub fn upper(&self) -> Rational {
        &self.mid + &self.rad
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.mid)
    }

    pub fn error_f64(&self) -> f64 {
        rational_to_f64(&self.rad)
    }

    /// Inexact balls get their endpoints rounded outward onto the
    /// `2^-(prec+GUARD_BITS)` grid; exact values stay exact. Outward rounding
    /// keeps a nonnegative ball nonnegative.
    fn normalized(mut self) -> Self {
        if self.rad.is_zero() {
            return self;
        }
        let grid = Rational::from_integer(BigInt::one() << (self.prec + GUARD_BITS) as usize);
        let lo = ((&self.mid - &self.rad) * &grid).floor() / &grid;
        let hi = ((&self.mid + &self.rad) * &grid).ceil() / &grid;
        let two = rat(2);
        self.mid = (&lo + &hi) / &two;
        self.rad = (hi - lo) / two;
        self
    }

    pub fn abs(&self) -> Real {
        let lo = self.lower();
        let hi = self.upper();
        if !lo.is_negative() {
            self.clone()
        } else if !hi.is_positive() {
            -self.clone()
        } else {
            let m = std::cmp::max(-lo, hi);
            Real::from_bounds(Rational::zero(), m, self.prec)
        }
    }

    /// Intersects the ball with `[0, inf)`; for quantities known to be nonnegative.
    pub fn clamp_nonneg(&self) -> Real {
        if !self.lower().is_negative() {
            return self.clone();
        }
        let hi = self.upper();
        if hi.is_negative() {
            return Real::zero(self.prec);
        }
        Real::from_bounds(Rational::zero(), hi, self.prec)
    }

    pub fn scale(&self, c: &Rational) -> Real {
        Real::with_radius(&self.mid * c, &self.rad * c.abs(), self.prec)
    }

    /// Upper-bound maximum of two balls: the ball of `max(x, y)`.
    pub fn max(&self, other: &Real) -> Real {
        let lo = std::cmp::max(self.lower(), other.lower());
        let hi = std::cmp::max(self.upper(), other.upper());
        if self.is_exact() && other.is_exact() {
            return Real::exact(lo, self.prec.max(other.prec));
        }
        Real::from_bounds(lo, hi, self.prec.max(other.prec))
    }

    pub fn contains(&self, v: &Rational) -> bool {
        (&self.mid - v).abs() <= self.rad
    }

    pub fn overlaps(&self, other: &Real) -> bool {
        (&self.mid - &other.mid).abs() <= &self.rad + &other.rad
    }

    /// Certainly `self < other`.
    pub fn certainly_lt(&self, other: &Real) -> bool {
        self.upper() < other.lower()
    }

    /// Certainly `self <= other`.
    pub fn certainly_le(&self, other: &Real) -> bool {
        self.upper() <= other.lower()
    }

    /// `|self - other|` strictly exceeds `factor` times the combined error.
    pub fn separated_by(&self, other: &Real, factor: &Rational) -> bool {
        let gap = (&self.mid - &other.mid).abs();
        let err = &self.rad + &other.rad;
        gap > err * factor
    }

    /// `self^e` for a nonnegative ball and rational `e >= 0`.
    pub fn powr(&self, e: &Rational) -> Result<Real> {
        if e.is_negative() {
            return Err(Error::ExponentOutOfRange(e.to_string()));
        }
        if self.is_exact() {
            return rpow(&self.mid, e, self.prec);
        }
        let lo = self.lower();
        if lo.is_negative() {
            if e.is_integer() {
                return self.abs().powr(e).map(|r| {
                    if self.mid.is_negative() && e.to_integer().is_odd() {
                        -r
                    } else {
                        r
                    }
                });
            }
            return Err(Error::NegativeBase(self.to_string()));
        }
        let hi = self.upper();
        if e.is_integer() {
            let k = e.to_integer().to_usize().expect("exponent fits usize");
            let a = num_traits::pow(lo, k);
            let b = num_traits::pow(hi, k);
            return Ok(Real::from_bounds(a, b, self.prec));
        }
        let num = e.numer().to_usize().expect("exponent numerator fits usize");
        let den = e.denom().to_u32().expect("exponent denominator fits u32");
        let bits = self.prec + GUARD_BITS;
        let lo_pow = num_traits::pow(lo, num);
        let hi_pow = num_traits::pow(hi, num);
        let (l, _) = root_floor(&lo_pow, den, bits);
        let (h, exact_hi) = root_floor(&hi_pow, den, bits);
        let h = if exact_hi { h } else { h + BigUint::one() };
        let scale = Rational::from_integer(BigInt::one() << bits as usize);
        let lo_r = Rational::from_integer(BigInt::from(l)) / &scale;
        let hi_r = Rational::from_integer(BigInt::from(h)) / &scale;
        Ok(Real::from_bounds(lo_r, hi_r, self.prec))
    }

    /// Errors when the radius exceeds `2^-(precision - GUARD_BITS) * max(1, |mid|)`.
    pub fn check_precision(self) -> Result<Real> {
        let bits = self.prec.saturating_sub(GUARD_BITS);
        let unit = Rational::new(BigInt::one(), BigInt::one() << bits as usize);
        let mag = std::cmp::max(Rational::one(), self.mid.abs());
        if self.rad > unit * mag {
            return Err(Error::PrecisionExhausted {
                achieved: format_error(&self.rad),
                bits,
            });
        }
        Ok(self)
    }

    pub fn sum<'a>(items: impl IntoIterator<Item = &'a Real>, prec: u32) -> Real {
        let mut mid = Rational::zero();
        let mut rad = Rational::zero();
        for r in items {
            mid += &r.mid;
            rad += &r.rad;
        }
        Real::with_radius(mid, rad, prec)
    }
}

impl Add for &Real {
    type Output = Real;
    fn add(self, rhs: &Real) -> Real {
        Real::with_radius(
            &self.mid + &rhs.mid,
            &self.rad + &rhs.rad,
            self.prec.max(rhs.prec),
        )
    }
}

impl Sub for &Real {
    type Output = Real;
    fn sub(self, rhs: &Real) -> Real {
        Real::with_radius(
            &self.mid - &rhs.mid,
            &self.rad + &rhs.rad,
            self.prec.max(rhs.prec),
        )
    }
}

impl Mul for &Real {
    type Output = Real;
    fn mul(self, rhs: &Real) -> Real {
        let rad = self.mid.abs() * &rhs.rad + rhs.mid.abs() * &self.rad + &self.rad * &rhs.rad;
        Real::with_radius(&self.mid * &rhs.mid, rad, self.prec.max(rhs.prec))
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(mut self) -> Real {
        self.mid = -self.mid;
        self
    }
}

impl PartialOrd for Real {
    /// Defined only when the balls are disjoint or both exact.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.is_exact() && other.is_exact() {
            return self.mid.partial_cmp(&other.mid);
        }
        if self.certainly_lt(other) {
            Some(Ordering::Less)
        } else if other.certainly_lt(self) {
            Some(Ordering::Greater)
        } else {
            None
        }
    }
}

fn format_error(r: &Rational) -> String {
    let v = rational_to_f64(r);
    if v == 0.0 && !r.is_zero() {
        let bits = r.denom().bits() as i64 - r.numer().bits() as i64;
        format!("2^-{bits}")
    } else {
        format!("{v:.3e}")
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() && self.mid.is_integer() {
            return write!(f, "{} ± 0", self.mid);
        }
        let digits = ((self.prec as usize * 30103) / 100000).clamp(6, 60);
        write!(
            f,
            "{} ± {}",
            rational_to_decimal(&self.mid, digits),
            format_error(&self.rad)
        )
    }
}

/// `(floor(v * 2^(den*bits))^(1/den), exact)` for `v >= 0`, where `exact`
/// means the returned root times `2^-bits` equals `v^(1/den)`.
fn root_floor(v: &Rational, den: u32, bits: u32) -> (BigUint, bool) {
    debug_assert!(!v.is_negative());
    let shift = den as usize * bits as usize;
    let numer = v.numer().magnitude() << shift;
    let denom = v.denom().magnitude();
    let (q, rem) = numer.div_rem(denom);
    let root = q.nth_root(den);
    let exact = rem.is_zero() && num_traits::pow(root.clone(), den as usize) == q;
    (root, exact)
}

/// `x^e` for rational `e`, certified to `2^-(precision+GUARD_BITS)`.
///
/// Integer exponents are evaluated exactly (negative bases allowed); a
/// non-integer exponent requires `x >= 0`.
pub fn rpow(x: &Rational, e: &Rational, precision: u32) -> Result<Real> {
    if e.is_zero() {
        return Ok(Real::exact(Rational::one(), precision));
    }
    if x.is_zero() {
        if e.is_negative() {
            return Err(Error::NegativeBase("0 with negative exponent".into()));
        }
        return Ok(Real::zero(precision));
    }
    let (base, e) = if e.is_negative() {
        (x.recip(), -e.clone())
    } else {
        (x.clone(), e.clone())
    };
    if e.is_integer() {
        let k = e
            .to_integer()
            .to_usize()
            .ok_or_else(|| Error::ExponentOutOfRange(e.to_string()))?;
        return Ok(Real::exact(num_traits::pow(base, k), precision));
    }
    if base.is_negative() {
        return Err(Error::NegativeBase(x.to_string()));
    }
    let num = e
        .numer()
        .to_usize()
        .ok_or_else(|| Error::ExponentOutOfRange(e.to_string()))?;
    let den = e
        .denom()
        .to_u32()
        .ok_or_else(|| Error::ExponentOutOfRange(e.to_string()))?;
    let powered = num_traits::pow(base, num);
    let bits = precision + GUARD_BITS;
    let (root, exact) = root_floor(&powered, den, bits);
    let scale = Rational::from_integer(BigInt::one() << bits as usize);
    let lo = Rational::from_integer(BigInt::from_biguint(Sign::Plus, root)) / &scale;
    if exact {
        return Ok(Real::exact(lo, precision));
    }
    let hi = &lo + scale.recip();
    Ok(Real::from_bounds(lo, hi, precision))
}

/// `(sum |x_k|^p)^(e/p)`, or `max |x_k|^e` for `p = infinity`.
pub fn window_norm_pow(x: &[Rational], p: &Exponent, e: &Rational, precision: u32) -> Result<Real> {
    if x.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let nonzero: Vec<&Rational> = x.iter().filter(|v| !v.is_zero()).collect();
    if nonzero.is_empty() {
        return Ok(Real::zero(precision));
    }
    let value = match p {
        Exponent::Infinity => {
            let m = nonzero.iter().map(|v| v.abs()).max().expect("nonempty");
            rpow(&m, e, precision)?
        }
        // a single nonzero entry: every p-norm equals its modulus
        Exponent::Finite(_) if nonzero.len() == 1 => rpow(&nonzero[0].abs(), e, precision)?,
        Exponent::Finite(p) => {
            let outer = e / p;
            if p.is_integer() {
                let k = p.to_integer().to_usize().expect("integer exponent");
                let s: Rational = nonzero.iter().map(|v| num_traits::pow(v.abs(), k)).sum();
                rpow(&s, &outer, precision)?
            } else {
                let terms = nonzero
                    .iter()
                    .map(|v| rpow(&v.abs(), p, precision))
                    .collect::<Result<Vec<_>>>()?;
                Real::sum(&terms, precision).powr(&outer)?
            }
        }
    };
    value.check_precision()
}

/// The `p`-norm of a finite window, certified; exact for `p = infinity`.
pub fn window_norm(x: &[Rational], p: &Exponent, precision: u32) -> Result<Real> {
    window_norm_pow(x, p, &Rational::one(), precision)
}

/// `(sum |x_k|^p)^(e/p)` for a window of balls.
pub fn window_norm_pow_real(x: &[Real], p: &Exponent, e: &Rational, precision: u32) -> Result<Real> {
    if x.is_empty() {
        return Err(Error::EmptyWindow);
    }
    if x.iter().all(Real::is_exact) {
        let exact: Vec<Rational> = x.iter().map(|r| r.mid().clone()).collect();
        return window_norm_pow(&exact, p, e, precision);
    }
    let value = match p {
        Exponent::Infinity => {
            let mut acc = Real::zero(precision);
            for v in x {
                acc = acc.max(&v.abs());
            }
            acc.clamp_nonneg().powr(e)?
        }
        Exponent::Finite(p) => {
            let terms = x
                .iter()
                .map(|v| v.abs().clamp_nonneg().powr(p))
                .collect::<Result<Vec<_>>>()?;
            Real::sum(&terms, precision).clamp_nonneg().powr(&(e / p))?
        }
    };
    value.check_precision()
}

pub fn window_norm_real(x: &[Real], p: &Exponent, precision: u32) -> Result<Real> {
    window_norm_pow_real(x, p, &Rational::one(), precision)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(conjugate(&p("2")), p("2"));
        assert_eq!(conjugate(&p("1")), Exponent::Infinity);
        assert_eq!(conjugate(&Exponent::Infinity), p("1"));
        assert_eq!(conjugate(&p("4/3")), p("4"));
    }

    #[test]
    fn exponent_below_one_rejected() {
        assert!(matches!(
            "1/2".parse::<Exponent>(),
            Err(Error::ExponentOutOfRange(_))
        ));
    }

    #[test]
    fn rational_text_format() {
        assert_eq!(parse_rational("21/2").unwrap(), ratio(21, 2));
        assert_eq!(parse_rational("-7").unwrap(), rat(-7));
        assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), ratio(-3, 2));
        assert_eq!(format_rational(&ratio(42, 4)), "21/2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn norm_examples() {
        let two_units = [rat(1), rat(1), rat(0), rat(0)];
        let n = window_norm(&two_units, &p("2"), 256).unwrap();
        let sqrt2 = ratio(14142135623730951, 10000000000000000);
        assert!((n.mid() - &sqrt2).abs() < ratio(1, 1_000_000_000_000_000));
        assert!(!n.is_exact());
        assert!(n.rad() < &Rational::new(BigInt::one(), BigInt::one() << 250));

        let sup = window_norm(&[rat(1), rat(-1), rat(0)], &Exponent::Infinity, 256).unwrap();
        assert!(sup.is_exact());
        assert_eq!(sup.mid(), &rat(1));

        let pyth = window_norm(&[rat(3), rat(4)], &p("2"), 256).unwrap();
        assert!(pyth.is_exact());
        assert_eq!(pyth.mid(), &rat(5));
    }

    #[test]
    fn empty_window_rejected() {
        assert_eq!(window_norm(&[], &p("2"), 256), Err(Error::EmptyWindow));
    }

    #[test]
    fn rpow_examples() {
        let r = rpow(&rat(4), &ratio(1, 2), 256).unwrap();
        assert!(r.is_exact());
        assert_eq!(r.mid(), &rat(2));
        assert_eq!(rpow(&rat(0), &rat(3), 256).unwrap(), Real::zero(256));
        assert!(matches!(
            rpow(&rat(-2), &ratio(3, 2), 256),
            Err(Error::NegativeBase(_))
        ));
        assert_eq!(rpow(&rat(-2), &rat(3), 256).unwrap().mid(), &rat(-8));
    }

    /// Interval Newton on y^2 = 8 brackets 2^(3/2) independently of the root code.
    #[test]
    fn rpow_matches_interval_newton() {
        let target = rat(8);
        let mut lo = ratio(2, 1);
        let mut hi = ratio(3, 1);
        for _ in 0..12 {
            let mid = (&lo + &hi) / rat(2);
            let newton = (&mid + &target / &mid) / rat(2);
            // Newton from above is an upper bound; target/newton is a lower bound
            hi = std::cmp::min(hi, newton.clone());
            lo = std::cmp::max(lo, &target / &newton);
            // keep denominators bounded
            let grid = Rational::from_integer(BigInt::one() << 300usize);
            lo = (&lo * &grid).floor() / &grid;
            hi = (&hi * &grid).ceil() / &grid;
        }
        assert!(&hi - &lo < Rational::new(BigInt::one(), BigInt::one() << 280usize));
        let r = rpow(&rat(2), &ratio(3, 2), 256).unwrap();
        assert!(r.lower() <= hi && r.upper() >= lo);
        assert!(r.rad() <= &Rational::new(BigInt::one(), BigInt::one() << 256usize));
        assert!((r.to_f64() - 2.8284271247461903).abs() < 1e-15);
    }

    #[test]
    fn precision_exhaustion_reported() {
        let tiny = Real::with_radius(
            Rational::new(BigInt::one(), BigInt::one() << 600usize),
            Rational::new(BigInt::one(), BigInt::one() << 290usize),
            256,
        );
        let root = tiny.clamp_nonneg().powr(&ratio(1, 2)).unwrap();
        assert!(matches!(
            root.check_precision(),
            Err(Error::PrecisionExhausted { .. })
        ));
    }

    #[test]
    fn monotone_in_p_on_probability_windows() {
        let x = [ratio(1, 2), ratio(1, 4), ratio(1, 8), ratio(1, 8)];
        let ps = ["1", "3/2", "2", "3"];
        let mut prev: Option<Real> = None;
        for s in ps.iter().map(|s| p(s)).chain([Exponent::Infinity]) {
            let n = window_norm(&x, &s, 256).unwrap();
            if let Some(prev) = &prev {
                assert!(n.upper() <= prev.upper(), "norm increased at p={s}");
                assert!(n.lower() <= prev.upper());
            }
            prev = Some(n);
        }
    }

    #[test]
    fn display_has_error_bound() {
        let r = rpow(&rat(2), &ratio(1, 2), 64).unwrap();
        let s = r.to_string();
        assert!(s.starts_with("1.41421356"), "{s}");
        assert!(s.contains('±'));
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-1000i64..1000, 1i64..50).prop_map(|(n, d)| ratio(n, d))
    }

    proptest! {
        #[test]
        fn conjugate_is_involution(n in 1i64..200, d in 1i64..200) {
            prop_assume!(n >= d);
            let e = Exponent::finite(ratio(n, d)).unwrap();
            prop_assert_eq!(e.conjugate().conjugate(), e);
        }

        #[test]
        fn rational_add_sub_roundtrip(a in small_rational(), b in small_rational()) {
            prop_assert_eq!(&(&a + &b) - &b, a);
        }

        #[test]
        fn norm_is_absolutely_homogeneous(
            c in small_rational(),
            x in proptest::collection::vec(small_rational(), 1..8),
            which in 0usize..4,
        ) {
            let exps = [p("1"), p("3/2"), p("2"), Exponent::Infinity];
            let e = &exps[which];
            let scaled: Vec<Rational> = x.iter().map(|v| v * &c).collect();
            let lhs = window_norm(&scaled, e, 256).unwrap();
            let rhs = window_norm(&x, e, 256).unwrap().scale(&c.abs());
            prop_assert!(lhs.overlaps(&rhs));
        }
    }
}
