//! Operator norms, Hausdorff measures of noncompactness and compactness of
//! `L_A`, all read off from `ehat`.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::class::Target;
use super::hat::{HatMatrix, HatRow};
use crate::arith::{rat, ratio, window_norm, Exponent, Rational, Real};
use crate::duals::{max_real, running_max};
use crate::error::{Error, Result};
use crate::exec::EvalOptions;
use crate::matrices::RowSource;
use crate::sequences::LambdaSeq;
use crate::spaces::ser_real;
use crate::subset::subset_sup;
use crate::verdict::{classify_bounded, classify_to_zero, doubling_sweep, Status, Verdict};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpNorm {
    pub p: String,
    pub target: String,
    /// `||L_A||` lies in `[low, high]`; the two coincide unless only a
    /// four-factor bracket is known.
    #[serde(serialize_with = "ser_real")]
    pub low: Real,
    #[serde(serialize_with = "ser_real")]
    pub high: Real,
    /// The supremum is attained within the rows examined.
    pub exact: bool,
    /// The subset supremum came from a heuristic search.
    pub lower_bound: bool,
    /// Boundedness evidence over growing windows.
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MncEstimate {
    pub p: String,
    pub target: String,
    /// `(r, s(r))` for `r = 0..=r_max`.
    pub sweep: Vec<(usize, f64)>,
    /// `lim_r s(r)`: exactly 0 when `A` has finitely many rows, otherwise `s(r_max)`.
    #[serde(serialize_with = "ser_real")]
    pub limit: Real,
    /// `||L_A||_chi` lies in `[low, high]`.
    #[serde(serialize_with = "ser_real")]
    pub low: Real,
    #[serde(serialize_with = "ser_real")]
    pub high: Real,
    pub exact: bool,
    pub lower_bound: bool,
    /// Evidence that `A` belongs to the class at all.
    pub verdict: Verdict,
}

/// `||(ehat_nk)_k||` in the norm dual to `l_p`: `l_1` for `p = inf`,
/// `l_q` for `1 < p < inf`, `l_inf` for `p = 1`.
fn dual_row_norm(values: &[Rational], p: &Exponent, precision: u32) -> Result<Real> {
    if values.iter().all(Zero::is_zero) {
        return Ok(Real::zero(precision));
    }
    window_norm(values, &p.conjugate(), precision)
}

/// `v^(1/q)` for a subset supremum `v = sup_F sum_k |sum_{n in F} ehat_nk|^q`.
fn subset_root(v: &Real, q: &Exponent) -> Result<Real> {
    match q {
        Exponent::Finite(q) if !q.is_one() => v.clamp_nonneg().powr(&q.recip()),
        _ => Ok(v.clone()),
    }
}

fn four(v: &Real) -> Real {
    v.scale(&rat(4))
}

fn check_target(y: &Target) -> Result<Target> {
    let y = y.clone().normalized();
    match y {
        Target::C0 | Target::C | Target::Linf | Target::L1 => Ok(y),
        Target::Lp(_) => Err(Error::UnsupportedTarget(y.to_string())),
    }
}

/// `sup_k sum_{n in rows} |ehat_nk|`, exact.
fn column_abs_sup(rows: &[Arc<HatRow>], precision: u32) -> Real {
    let width = rows.iter().map(|r| r.values.len()).max().unwrap_or(0);
    let best = (0..width)
        .map(|k| rows.iter().map(|r| r.get(k).abs()).sum::<Rational>())
        .max()
        .unwrap_or_else(Rational::zero);
    Real::exact(best, precision)
}

/// `||L_A||` for `A : l_p^lambda(Fhat) -> Y`, `Y` one of `c0`, `c`, `linf` (one
/// formula) or `l1` (exact for `p = 1`, a bracket `[v, 4v]` otherwise).
pub fn op_norm(a: Arc<dyn RowSource>, l: &LambdaSeq, p: &Exponent, y: &Target, opts: EvalOptions) -> Result<OpNorm> {
    let y = check_target(y)?;
    let hat = HatMatrix::new(a, l, opts.window);
    let rows = hat.rows(hat.rows_in_scope(), opts.exec)?;
    let finite = hat.is_finite();
    let prec = opts.precision;
    let (low, high, lower_bound, verdict) = if y == Target::L1 {
        l1_norm(&rows, p, finite, opts)?
    } else {
        let per_row = opts.exec.try_map(rows.len(), |n| dual_row_norm(&rows[n].values, p, prec))?;
        let values: Vec<(usize, f64)> = per_row.iter().enumerate().map(|(n, v)| (n, v.to_f64())).collect();
        let v = max_real(per_row, prec);
        let verdict = if finite {
            Verdict::exact(running_max(&values))
        } else {
            classify_bounded(running_max(&values)[values.len().min(3)..].to_vec())
        };
        (v.clone(), v, false, verdict)
    };
    Ok(OpNorm {
        p: p.to_string(),
        target: y.to_string(),
        low,
        high,
        exact: finite && !lower_bound,
        lower_bound,
        verdict,
    })
}

fn l1_norm(rows: &[Arc<HatRow>], p: &Exponent, finite: bool, opts: EvalOptions) -> Result<(Real, Real, bool, Verdict)> {
    let prec = opts.precision;
    let points = if finite { vec![rows.len()] } else { doubling_sweep(4, rows.len()) };
    if p.is_one() {
        let sweep: Vec<(usize, f64)> = points.iter().map(|&n| (n, column_abs_sup(&rows[..n], prec).to_f64())).collect();
        let v = column_abs_sup(rows, prec);
        let verdict = if finite { Verdict::exact(sweep) } else { classify_bounded(sweep) };
        return Ok((v.clone(), v, false, verdict));
    }
    let q = p.conjugate();
    let mut sweep = Vec::new();
    let mut last = None;
    for &n in &points {
        let window: Vec<Vec<Rational>> = rows[..n].iter().map(|r| r.values.clone()).collect();
        let s = subset_sup(&window, &q, opts.strategy, prec, opts.exec)?;
        sweep.push((n, s.value.to_f64()));
        last = Some(s);
    }
    let last = last.expect("nonempty sweep");
    let v = subset_root(&last.value, &q)?;
    let verdict = if finite { Verdict::exact(sweep) } else { classify_bounded(sweep) };
    Ok((v.clone(), four(&v), !last.exhaustive, verdict))
}

/// `||L_A||_chi` for `A : l_p^lambda(Fhat) -> Y`, `Y` one of `c0`, `c`, `l1`,
/// from `s(r)`, the supremum over rows `n >= r` of the relevant row quantity.
///
/// On infinitely many rows, `2 (r_max + 1)` rows are examined; for `Y = c`
/// the column limits are read off rows `[W, 2W)` and must be constant there.
pub fn mnc_estimate(a: Arc<dyn RowSource>, l: &LambdaSeq, p: &Exponent, y: &Target, r_max: usize, opts: EvalOptions) -> Result<MncEstimate> {
    if r_max < 4 {
        return Err(Error::IndexOutOfRange(format!("r_max {r_max} is below 4")));
    }
    let y = match check_target(y)? {
        Target::Linf => return Err(Error::UnsupportedTarget("linf".into())),
        y => y,
    };
    let prec = opts.precision;
    let probe = HatMatrix::new(a.clone(), l, 2 * (r_max + 1));
    let finitely_many = probe.row_count().is_some();
    let w = probe.row_count().unwrap_or(2 * (r_max + 1));
    let hat = HatMatrix::new(a, l, w.max(opts.window));
    let rows = hat.rows(w, opts.exec)?;
    let finite = hat.is_finite();

    let alpha = if y == Target::C && !finitely_many { column_limits(&hat, w, opts)? } else { Vec::new() };

    // rho_n and the membership evidence
    let (s, lower_bound, verdict) = if y == Target::L1 {
        l1_tails(&rows, p, r_max, finite, opts)?
    } else {
        let per_row = opts.exec.try_map(rows.len(), |n| {
            let shifted: Vec<Rational> = if alpha.is_empty() {
                rows[n].values.clone()
            } else {
                let width = rows[n].values.len().max(alpha.len());
                (0..width)
                    .map(|k| rows[n].get(k) - alpha.get(k).cloned().unwrap_or_else(Rational::zero))
                    .collect()
            };
            dual_row_norm(&shifted, p, prec)
        })?;
        let values: Vec<(usize, f64)> = per_row.iter().enumerate().map(|(n, v)| (n, v.to_f64())).collect();
        let verdict = if finite {
            Verdict::exact(running_max(&values))
        } else {
            classify_bounded(running_max(&values)[values.len().min(3)..].to_vec())
        };
        let mut tail = vec![Real::zero(prec); per_row.len() + 1];
        for n in (0..per_row.len()).rev() {
            tail[n] = tail[n + 1].max(&per_row[n]);
        }
        let s = (0..=r_max).map(|r| tail[r.min(per_row.len())].clone()).collect::<Vec<_>>();
        (s, false, verdict)
    };

    let sweep: Vec<(usize, f64)> = s.iter().enumerate().map(|(r, v)| (r, v.to_f64())).collect();
    let limit = if finitely_many {
        Real::zero(prec)
    } else {
        s[r_max].clone()
    };
    let (low, high) = match &y {
        Target::L1 if !p.is_one() => (limit.clone(), four(&limit)),
        Target::C => (limit.scale(&ratio(1, 2)), limit.clone()),
        _ => (limit.clone(), limit.clone()),
    };
    Ok(MncEstimate {
        p: p.to_string(),
        target: y.to_string(),
        sweep,
        limit,
        low,
        high,
        exact: finitely_many,
        lower_bound,
        verdict,
    })
}

/// `alpha_k = lim_n ehat_nk` for the columns the first `w` rows reach; each
/// column must be constant over rows `[w, 2w)`.
fn column_limits(hat: &HatMatrix, w: usize, opts: EvalOptions) -> Result<Vec<Rational>> {
    let late = hat.rows(2 * w, opts.exec)?;
    let width = late[..w].iter().map(|r| r.values.len()).max().unwrap_or(0);
    (0..width)
        .map(|k| {
            let v = late[2 * w - 1].get(k);
            if late[w..].iter().all(|r| r.get(k) == v) {
                Ok(v)
            } else {
                Err(Error::AlphaLimitUndetermined(k))
            }
        })
        .collect()
}

/// `s(r)` for `Y = l1`: `sup_k sum_{n >= r} |ehat_nk|` for `p = 1`, else
/// `(sup_{F subset N_r} sum_k |sum_{n in F} ehat_nk|^q)^(1/q)`.
fn l1_tails(rows: &[Arc<HatRow>], p: &Exponent, r_max: usize, finite: bool, opts: EvalOptions) -> Result<(Vec<Real>, bool, Verdict)> {
    let prec = opts.precision;
    let (_, _, _, verdict) = l1_norm(rows, p, finite, opts)?;
    if p.is_one() {
        let s = (0..=r_max).map(|r| column_abs_sup(&rows[r.min(rows.len())..], prec)).collect();
        return Ok((s, false, verdict));
    }
    let q = p.conjugate();
    let all: Vec<Vec<Rational>> = rows.iter().map(|r| r.values.clone()).collect();
    let tails = opts.exec.try_map(r_max + 1, |r| {
        let s = subset_sup(&all[r.min(all.len())..], &q, opts.strategy, prec, crate::exec::Exec::Sequential)?;
        Ok::<_, Error>((subset_root(&s.value, &q)?, s.exhaustive))
    })?;
    let lower_bound = tails.iter().any(|t| !t.1);
    Ok((tails.into_iter().map(|t| t.0).collect(), lower_bound, verdict))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Compactness {
    /// `||L_A||_chi = 0` exactly.
    Compact,
    /// `s(r)` tends to zero over the sweep.
    EvidenceCompact,
    /// `s(r)` stays away from zero.
    EvidenceNoncompact,
    Inconclusive,
}

impl Compactness {
    /// As a verdict status on "L_A is compact".
    pub fn status(self) -> Status {
        match self {
            Compactness::Compact => Status::HoldsExactly,
            Compactness::EvidenceCompact => Status::EvidenceBounded,
            Compactness::EvidenceNoncompact => Status::EvidenceDiverging,
            Compactness::Inconclusive => Status::Inconclusive,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompactnessReport {
    pub compactness: Compactness,
    pub estimate: MncEstimate,
}

/// `L_A` is compact iff `lim_r s(r) = 0`.
pub fn compactness_verdict(a: Arc<dyn RowSource>, l: &LambdaSeq, p: &Exponent, y: &Target, r_max: usize, opts: EvalOptions) -> Result<CompactnessReport> {
    let estimate = mnc_estimate(a, l, p, y, r_max, opts)?;
    Ok(CompactnessReport {
        compactness: judge(&estimate),
        estimate,
    })
}

fn judge(m: &MncEstimate) -> Compactness {
    if m.exact && m.limit.mid().is_zero() && m.limit.is_exact() {
        return Compactness::Compact;
    }
    if m.verdict.status == Status::EvidenceDiverging {
        return Compactness::Inconclusive;
    }
    match classify_to_zero(m.sweep.clone()).status {
        Status::HoldsExactly | Status::EvidenceBounded => Compactness::EvidenceCompact,
        Status::EvidenceDiverging => Compactness::EvidenceNoncompact,
        Status::Inconclusive => Compactness::Inconclusive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrices::{make_E, Triangle, WindowMatrix};
    use num_traits::One;
    use proptest::prelude::*;

    fn lin() -> LambdaSeq {
        "linear:1,1".parse().unwrap()
    }

    fn opts() -> EvalOptions {
        EvalOptions::new(16)
    }

    fn rows(r: Vec<Vec<Rational>>) -> Arc<dyn RowSource> {
        Arc::new(WindowMatrix::new(r))
    }

    fn two() -> Exponent {
        Exponent::integer(2)
    }

    #[test]
    fn single_row_norms() {
        let a = rows(vec![vec![rat(1)]]);
        let n = op_norm(a.clone(), &lin(), &two(), &Target::Linf, opts()).unwrap();
        assert!(n.exact);
        assert_eq!(n.low.mid(), &Rational::one());
        assert_eq!(n.low, n.high);
        let m = mnc_estimate(a.clone(), &lin(), &two(), &Target::C0, 8, opts()).unwrap();
        assert!(m.exact);
        assert!(m.limit.mid().is_zero());
        assert_eq!(m.sweep[0].1, 1.0);
        assert!(m.sweep[1..].iter().all(|p| p.1 == 0.0));
        let c = compactness_verdict(a, &lin(), &two(), &Target::C0, 8, opts()).unwrap();
        assert_eq!(c.compactness, Compactness::Compact);
    }

    #[test]
    fn zero_matrix() {
        let z: Arc<dyn RowSource> = Arc::new(Triangle::zero());
        for y in [Target::C0, Target::C, Target::Linf, Target::L1] {
            let n = op_norm(z.clone(), &lin(), &two(), &y, opts()).unwrap();
            assert!(n.high.mid().is_zero());
        }
        for y in [Target::C0, Target::C, Target::L1] {
            let m = mnc_estimate(z.clone(), &lin(), &two(), &y, 8, opts()).unwrap();
            assert!(m.limit.mid().is_zero() && m.exact);
            let c = compactness_verdict(z.clone(), &lin(), &two(), &y, 8, opts()).unwrap();
            assert_eq!(c.compactness, Compactness::Compact);
        }
    }

    #[test]
    fn two_row_l1_bracket() {
        let a = rows(vec![vec![rat(1)], vec![rat(1)]]);
        let n = op_norm(a, &lin(), &two(), &Target::L1, opts()).unwrap();
        assert_eq!(n.low.mid(), &rat(2));
        assert_eq!(n.high.mid(), &rat(8));
        assert!(n.exact);
    }

    #[test]
    fn unsupported_targets() {
        let a = rows(vec![vec![rat(1)]]);
        let e = op_norm(a.clone(), &lin(), &two(), &Target::Lp(Exponent::integer(3)), opts()).unwrap_err();
        assert!(matches!(e, Error::UnsupportedTarget(_)));
        assert!(mnc_estimate(a.clone(), &lin(), &two(), &Target::Linf, 8, opts()).is_err());
        assert!(mnc_estimate(a, &lin(), &two(), &Target::C0, 3, opts()).is_err());
    }

    #[test]
    fn identity_is_not_in_the_class() {
        let m = mnc_estimate(Arc::new(Triangle::identity()), &lin(), &two(), &Target::C0, 16, opts()).unwrap();
        assert_eq!(m.verdict.status, Status::EvidenceDiverging);
        assert!(!m.exact);
        assert!(m.sweep.windows(2).all(|w| w[1].1 <= w[0].1));
        let c = compactness_verdict(Arc::new(Triangle::identity()), &lin(), &two(), &Target::C0, 16, opts()).unwrap();
        assert_eq!(c.compactness, Compactness::Inconclusive);
    }

    #[test]
    fn transformed_identity_is_noncompact() {
        // ehat of E itself is the identity
        let l = lin();
        for y in [Target::C0, Target::C] {
            let m = mnc_estimate(Arc::new(make_E(&l)), &l, &two(), &y, 32, opts()).unwrap();
            assert!(m.sweep.iter().all(|p| p.1 == 1.0), "{y}");
            assert_eq!(m.verdict.status, Status::EvidenceBounded);
            let c = compactness_verdict(Arc::new(make_E(&l)), &l, &two(), &y, 32, opts()).unwrap();
            assert_eq!(c.compactness, Compactness::EvidenceNoncompact);
        }
        let m = mnc_estimate(Arc::new(make_E(&l)), &l, &two(), &Target::C, 8, opts()).unwrap();
        assert_eq!(m.low.mid(), &ratio(1, 2));
        assert_eq!(m.high.mid(), &rat(1));
    }

    #[test]
    fn unstable_columns_leave_alpha_undetermined() {
        let e = mnc_estimate(Arc::new(Triangle::identity()), &lin(), &two(), &Target::C, 8, opts()).unwrap_err();
        assert!(matches!(e, Error::AlphaLimitUndetermined(_)));
    }

    #[test]
    fn l1_target_p_one_is_exact_column_sum() {
        let a = rows(vec![vec![rat(1), rat(-1)], vec![rat(2)]]);
        let n = op_norm(a.clone(), &lin(), &Exponent::integer(1), &Target::L1, opts()).unwrap();
        assert_eq!(n.low, n.high);
        let m = mnc_estimate(a, &lin(), &Exponent::integer(1), &Target::L1, 4, opts()).unwrap();
        assert_eq!(m.low, m.high);
        assert!(m.limit.mid().is_zero());
        assert!((m.sweep[0].1 - n.low.to_f64()).abs() < 1e-12);
    }

    fn arb_matrix() -> impl Strategy<Value = Vec<Vec<Rational>>> {
        proptest::collection::vec(
            proptest::collection::vec((-6i64..6, 1i64..4).prop_map(|(n, d)| ratio(n, d)), 1..6),
            1..7,
        )
    }

    fn arb_p() -> impl Strategy<Value = Exponent> {
        prop_oneof![Just(Exponent::integer(1)), Just(Exponent::integer(2)), Just(Exponent::Infinity)]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn sweeps_are_monotone_and_dominated(m in arb_matrix(), p in arb_p()) {
            let a = rows(m);
            for y in [Target::C0, Target::C, Target::L1] {
                let est = mnc_estimate(a.clone(), &lin(), &p, &y, 6, opts()).unwrap();
                prop_assert!(est.sweep.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12));
                prop_assert!(est.exact && est.limit.mid().is_zero());
                prop_assert!(est.low.certainly_le(&est.high) || est.low == est.high);
                let c = compactness_verdict(a.clone(), &lin(), &p, &y, 6, opts()).unwrap();
                prop_assert_eq!(c.compactness, Compactness::Compact);
                let norm = op_norm(a.clone(), &lin(), &p, &y, opts()).unwrap();
                // s(0) is the norm itself (or its lower bracket end)
                prop_assert!(est.sweep[0].1 <= norm.high.to_f64() * (1.0 + 1e-12) + 1e-12);
                prop_assert!(!norm.high.certainly_lt(&est.high));
            }
        }
    }
}
