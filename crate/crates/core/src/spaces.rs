//! Norms of the domains `l_p^lambda(Fhat) = { x : Ex in l_p }` and the
//! inequalities they satisfy.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{rat, rational_to_f64, rpow, window_norm, window_norm_pow, window_norm_pow_real, Exponent, Rational, Real};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::matrices::{forward_transform, forward_transform_real};
use crate::sequences::{gen_witness, Family, LambdaSeq, SeqGenerator, SeqWindow, TailRule, WitnessId};
use crate::verdict::{classify_bounded, Status, Verdict};

#[derive(Clone, Debug, PartialEq)]
pub struct NormEstimate {
    pub value: Real,
    pub window: usize,
    /// Share of `sum |y_k|^p` carried by the last quarter of the window.
    pub tail_fraction: Option<f64>,
    /// Where `sup |y_k|` is attained, for `p = infinity`.
    pub sup_index: Option<usize>,
}

fn tail_fraction(y: &[f64], p: f64) -> f64 {
    let total: f64 = y.iter().map(|v| v.abs().powf(p)).sum();
    if total == 0.0 {
        return 0.0;
    }
    let tail: f64 = y[(3 * y.len()) / 4..].iter().map(|v| v.abs().powf(p)).sum();
    (tail / total).clamp(0.0, 1.0)
}

fn diagnose(y: Vec<f64>, p: &Exponent, value: Real) -> NormEstimate {
    let window = y.len();
    match p {
        Exponent::Infinity => {
            let sup_index = y
                .iter()
                .enumerate()
                .fold((0, -1.0), |best, (i, v)| if v.abs() > best.1 { (i, v.abs()) } else { best })
                .0;
            NormEstimate {
                value,
                window,
                tail_fraction: None,
                sup_index: Some(sup_index),
            }
        }
        Exponent::Finite(q) => NormEstimate {
            value,
            window,
            tail_fraction: Some(tail_fraction(&y, rational_to_f64(q))),
            sup_index: None,
        },
    }
}

/// `||x|| = ||Ex||_p` on the window; exact for `p` in `{1, infinity}`.
pub fn space_norm(x: &SeqWindow, l: &LambdaSeq, p: &Exponent, precision: u32) -> Result<NormEstimate> {
    let y = forward_transform(x, l)?;
    let value = window_norm(y.values(), p, precision)?;
    Ok(diagnose(y.values().iter().map(rational_to_f64).collect(), p, value))
}

/// [`space_norm`] for a window of certified reals.
pub fn space_norm_real(x: &[Real], l: &LambdaSeq, p: &Exponent, precision: u32) -> Result<NormEstimate> {
    let y = forward_transform_real(x, l, precision)?;
    let value = window_norm_pow_real(&y, p, &Rational::one(), precision)?;
    Ok(diagnose(y.iter().map(Real::to_f64).collect(), p, value))
}

/// Working precision that survives the `f_(n+1)^2` growth of an inverse
/// transform followed by the cancellation of a forward one.
pub fn working_precision(precision: u32, n: usize) -> u32 {
    precision + 2 * n as u32 + 32
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParallelogramReport {
    pub p: String,
    #[serde(serialize_with = "ser_real")]
    pub lhs: Real,
    #[serde(serialize_with = "ser_real")]
    pub rhs: Real,
    /// The two sides agree within their certified error.
    pub equal: bool,
}

pub(crate) fn ser_real<S: serde::Serializer>(r: &Real, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Real", 3)?;
    st.serialize_field("value", &r.to_f64())?;
    st.serialize_field("decimal", &crate::arith::rational_to_decimal(r.mid(), 40))?;
    st.serialize_field("error_bound", &r.error_f64())?;
    st.end()
}

/// `||u+v||^2 + ||u-v||^2` against `2(||u||^2 + ||v||^2)` for the two
/// witnesses whose images are `(1, 1, 0, ...)` and `(1, -1, 0, ...)`.
pub fn parallelogram_check(l: &LambdaSeq, p: &Exponent, precision: u32) -> Result<ParallelogramReport> {
    const N: usize = 8;
    let u = gen_witness(WitnessId::U, l, None, N)?;
    let v = gen_witness(WitnessId::VHilbert, l, None, N)?;
    let combine = |sign: i64| -> Result<SeqWindow> {
        let values = u
            .values()
            .iter()
            .zip(v.values())
            .map(|(a, b)| a + b * rat(sign))
            .collect();
        SeqWindow::new(values, u.provenance().clone())
    };
    let two = rat(2);
    let sq = |x: &SeqWindow| -> Result<Real> {
        let y = forward_transform(x, l)?;
        window_norm_pow(y.values(), p, &two, precision)
    };
    let lhs = &sq(&combine(1)?)? + &sq(&combine(-1)?)?;
    let rhs = (&sq(&u)? + &sq(&v)?).scale(&two);
    Ok(ParallelogramReport {
        p: p.to_string(),
        equal: lhs.overlaps(&rhs),
        lhs,
        rhs,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaM {
    /// `sup_k (lambda_k - lambda_(k-1)) sum_(n>=k) 1/lambda_n`, exact.
    pub value: Rational,
    /// The tail sums for `k = 0..`, each exact.
    pub terms: Vec<Rational>,
    pub verdict: Verdict,
}

/// Index from which every tail sum takes the same value.
fn constant_from(l: &LambdaSeq) -> Option<usize> {
    match l.family() {
        Family::Geometric { .. } => Some(1),
        Family::Explicit {
            values,
            tail: TailRule::Geometric(_),
        } => Some(values.len() + 1),
        _ => None,
    }
}

/// The constant `M` bounding `(lambda_k - lambda_(k-1)) sum_(n>=k) 1/lambda_n`.
///
/// Tails are summed in closed form, so every term is exact. For geometric
/// tails the terms are constant from some index on, and the maximum over
/// `k <= max(depth, that index)` is the supremum.
pub fn lambda_m(l: &LambdaSeq, depth: usize) -> Result<LambdaM> {
    if !l.summable_reciprocals() {
        return Err(Error::DivergentTail(l.to_string()));
    }
    let stable = constant_from(l);
    let upto = depth.max(2).max(stable.unwrap_or(0) + 1);
    let terms = (0..=upto)
        .map(|k| {
            let tail = if k == 0 {
                l.get(0).recip() + l.reciprocal_tail(0)?
            } else {
                l.reciprocal_tail(k - 1)?
            };
            Ok(l.diff(k) * tail)
        })
        .collect::<Result<Vec<Rational>>>()?;
    let value = terms.iter().max().cloned().expect("nonempty");
    let sweep = terms.iter().enumerate().map(|(k, t)| (k, rational_to_f64(t))).collect();
    let verdict = if stable.is_some() {
        Verdict::exact(sweep)
    } else {
        classify_bounded(sweep)
    };
    Ok(LambdaM { value, terms, verdict })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bound {
    #[serde(serialize_with = "ser_real")]
    pub lhs: Real,
    #[serde(serialize_with = "ser_real")]
    pub rhs: Real,
    /// Not certainly violated: `lhs <= rhs` up to certified error.
    pub holds: bool,
}

impl Bound {
    fn new(lhs: Real, rhs: Real) -> Self {
        let holds = !rhs.certainly_lt(&lhs);
        Bound { lhs, rhs, holds }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InclusionReport {
    /// `||Ex||_inf <= 4 ||x||_inf`.
    pub sup_bound: Bound,
    /// `||Ex||_p <= 4 M^(1/p) ||x||_p`, when `1/lambda_n` is summable and `p` finite.
    pub p_bound: Option<Bound>,
}

pub fn inclusion_bounds_check(
    x: &SeqWindow,
    l: &LambdaSeq,
    p: &Exponent,
    precision: u32,
) -> Result<InclusionReport> {
    let four = rat(4);
    let y = forward_transform(x, l)?;
    let sup_bound = Bound::new(
        window_norm(y.values(), &Exponent::Infinity, precision)?,
        window_norm(x.values(), &Exponent::Infinity, precision)?.scale(&four),
    );
    let p_bound = match p {
        Exponent::Finite(pr) if l.summable_reciprocals() => {
            let m = lambda_m(l, 8)?;
            let factor = rpow(&m.value, &pr.recip(), precision)?;
            let rhs = (&factor * &window_norm(x.values(), p, precision)?).scale(&four);
            Some(Bound::new(window_norm(y.values(), p, precision)?, rhs))
        }
        _ => None,
    };
    Ok(InclusionReport { sup_bound, p_bound })
}

/// Norm of the image over growing windows, classified.
///
/// Lower-triangularity means the image of a prefix is the prefix of the
/// image, so one transform at the largest window serves the whole sweep.
pub fn membership_evidence(
    x: &dyn SeqGenerator,
    l: &LambdaSeq,
    p: &Exponent,
    sweep: &[usize],
    precision: u32,
    exec: Exec,
) -> Result<Verdict> {
    let Some(&big) = sweep.iter().max() else {
        return Err(Error::EmptyWindow);
    };
    if big == 0 {
        return Err(Error::EmptyWindow);
    }
    let image: Vec<Real> = match x.exact_prefix(big) {
        Ok(v) => {
            let w = SeqWindow::new(v, crate::sequences::Provenance::new(x.describe()))?;
            forward_transform(&w, l)?
                .into_values()
                .into_iter()
                .map(|v| Real::exact(v, precision))
                .collect()
        }
        Err(Error::RealOnlyWitness(_)) => {
            let work = working_precision(precision, big);
            forward_transform_real(&x.real_prefix(big, work)?, l, work)?
        }
        Err(e) => return Err(e),
    };
    if image.iter().all(|v| v.is_exact() && v.mid().is_zero()) {
        return Ok(Verdict::exact(sweep.iter().map(|&n| (n, 0.0)).collect()));
    }
    let values = exec.try_map(sweep.len(), |i| -> Result<(usize, f64)> {
        let n = sweep[i];
        if n == 0 {
            return Err(Error::EmptyWindow);
        }
        let v = window_norm_pow_real(&image[..n], p, &Rational::one(), precision)?;
        Ok((n, v.to_f64()))
    })?;
    Ok(classify_bounded(values))
}

/// `sup` over the window of `|E_n x|` against `|E_n |x||`, for the
/// non-absolute-type check.
pub fn absolute_value_gap(x: &SeqWindow, l: &LambdaSeq, p: &Exponent, precision: u32) -> Result<(Real, Real)> {
    let abs = SeqWindow::new(x.values().iter().map(Signed::abs).collect(), x.provenance().clone())?;
    Ok((
        space_norm(x, l, p, precision)?.value,
        space_norm(&abs, l, p, precision)?.value,
    ))
}

/// Status of a membership run that should be read as "bounded".
pub fn is_member(v: &Verdict) -> bool {
    v.status == Status::HoldsExactly || v.status == Status::EvidenceBounded
}
