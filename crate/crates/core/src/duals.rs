//! Alpha, beta and gamma duals of the domains of `E`.
//!
//! Writing `g_nk` for the entries of `E^-1`, the pairing `sum_k a_k x_k` with
//! `y = Ex` becomes `sum_k abar_k(n) y_k + g_nn a_n y_n`, where
//! `abar_k(n) = sum_{j=k..n} g_jk a_j`. Since `g_jk = f_(j+1)^2 G_k` below the
//! diagonal, `abar_k(n)` is a prefix-sum lookup.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::arith::{rational_to_f64, Exponent, Rational, Real};
use crate::error::{Error, Result};
use crate::exec::EvalOptions;
use crate::matrices::{fib_sq, g_column_factor, DenseWindow, Triangle};
use crate::sequences::{LambdaSeq, SeqGenerator, SeqWindow};
use crate::subset::subset_sup;
use crate::verdict::{classify_bounded, classify_to_zero, conjunction, doubling_sweep, Status, Verdict};

/// Exact `abar_k(n)` lookups for a fixed window of `a`.
pub struct AbarTable {
    a: Vec<Rational>,
    /// `g_kk`
    diag: Vec<Rational>,
    /// `G_k`, with `g_jk = f_(j+1)^2 G_k` for `j > k`
    below: Vec<Rational>,
    /// `sum_{j<=n} f_(j+1)^2 a_j`
    prefix: Vec<Rational>,
}

impl AbarTable {
    pub fn new(a: &[Rational], l: &LambdaSeq) -> Result<Self> {
        l.window(a.len().max(1))?;
        let diag = (0..a.len()).map(|k| fib_sq(k + 1) * g_column_factor(l, k, true)).collect();
        let below = (0..a.len()).map(|k| g_column_factor(l, k, false)).collect();
        let mut acc = Rational::zero();
        let prefix = a
            .iter()
            .enumerate()
            .map(|(j, v)| {
                if !v.is_zero() {
                    acc += fib_sq(j + 1) * v;
                }
                acc.clone()
            })
            .collect();
        Ok(AbarTable {
            a: a.to_vec(),
            diag,
            below,
            prefix,
        })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `abar_k(n)`; zero when `k >= n`.
    pub fn abar(&self, k: usize, n: usize) -> Rational {
        if k >= n {
            return Rational::zero();
        }
        let n = n.min(self.len() - 1);
        &self.diag[k] * &self.a[k] + &self.below[k] * (&self.prefix[n] - &self.prefix[k])
    }

    /// `g_nn a_n`, the diagonal of `T`.
    pub fn diagonal(&self, n: usize) -> Rational {
        &self.diag[n] * &self.a[n]
    }

    /// `sum_{j>k} f_(j+1)^2 a_j` over the window.
    pub fn series_tail(&self, k: usize) -> Rational {
        self.prefix.last().expect("nonempty") - &self.prefix[k]
    }

    /// Row `n` of `B`: `b_nk = a_n g_nk`.
    pub fn b_row(&self, n: usize) -> Vec<Rational> {
        let an = &self.a[n];
        if an.is_zero() {
            return Vec::new();
        }
        let f2 = fib_sq(n + 1);
        (0..=n)
            .map(|k| {
                if k == n {
                    an * &self.diag[n]
                } else {
                    an * &f2 * &self.below[k]
                }
            })
            .collect()
    }
}

/// `B = (a_n g_nk)`; rows past the window of `a` are unavailable.
pub fn alpha_matrix_b(a: &SeqWindow, l: &LambdaSeq) -> Result<Triangle> {
    let t = AbarTable::new(a.values(), l)?;
    let rows = (0..a.len())
        .map(|n| {
            let mut r = t.b_row(n);
            r.resize(n + 1, Rational::zero());
            r
        })
        .collect();
    Ok(Triangle::from_dense(DenseWindow::from_rows(rows)?, false))
}

/// `abar_k(n)` for `k < n <= len(a)`.
pub fn abar(a: &SeqWindow, l: &LambdaSeq, k: usize, n: usize) -> Result<Rational> {
    if k >= n || n > a.len() {
        return Err(Error::IndexOutOfRange(format!(
            "abar_{k}({n}) needs k < n <= {}",
            a.len()
        )));
    }
    let mut values = a.values().to_vec();
    // abar_k(len) reads a_len, which lies one past the window only when
    // n == len; the sum then stops at the last stored entry
    if n == a.len() {
        values.push(Rational::zero());
    }
    Ok(AbarTable::new(&values, l)?.abar(k, n))
}

/// `T`: `abar_k(n)` below the diagonal, `g_nn a_n` on it.
pub fn beta_matrix_t(a: &SeqWindow, l: &LambdaSeq) -> Result<Triangle> {
    let t = AbarTable::new(a.values(), l)?;
    let rows = (0..a.len())
        .map(|n| (0..=n).map(|k| if k == n { t.diagonal(n) } else { t.abar(k, n) }).collect())
        .collect();
    Ok(Triangle::from_dense(DenseWindow::from_rows(rows)?, false))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DualCondition {
    D1,
    D2,
    D3,
    D4,
    D5,
    D6,
    D7,
    D8,
}

impl DualCondition {
    pub const ALL: [DualCondition; 8] = [
        DualCondition::D1,
        DualCondition::D2,
        DualCondition::D3,
        DualCondition::D4,
        DualCondition::D5,
        DualCondition::D6,
        DualCondition::D7,
        DualCondition::D8,
    ];
}

impl fmt::Display for DualCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = DualCondition::ALL.iter().position(|c| c == self).expect("listed") + 1;
        write!(f, "d{i}")
    }
}

impl FromStr for DualCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        DualCondition::ALL
            .iter()
            .find(|c| c.to_string() == t)
            .copied()
            .ok_or_else(|| Error::UnknownCondition(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualReport {
    pub condition: DualCondition,
    /// The exponent the condition was evaluated with (`q` for d1 and d4).
    pub q: Option<String>,
    pub lambda: String,
    pub window: usize,
    /// Per-index values of the defining quantity.
    pub values: Vec<(usize, f64)>,
    /// The supremum (or limit) when finitely determined.
    #[serde(serialize_with = "ser_opt_real")]
    pub value: Option<Real>,
    /// `value` comes from a heuristic subset search.
    pub lower_bound: bool,
    pub verdict: Verdict,
}

pub(crate) fn ser_opt_real<S: serde::Serializer>(r: &Option<Real>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => crate::spaces::ser_real(r, s),
        None => s.serialize_none(),
    }
}

/// `sum |v|^q` (or `max |v|`), exact for integer `q`.
pub(crate) fn power_sum(values: &[Rational], q: &Exponent, precision: u32) -> Result<Real> {
    let nonzero: Vec<Rational> = values.iter().filter(|v| !v.is_zero()).cloned().collect();
    if nonzero.is_empty() {
        return Ok(Real::zero(precision));
    }
    match q {
        Exponent::Infinity => Ok(Real::exact(nonzero.iter().map(Signed::abs).max().expect("nonempty"), precision)),
        Exponent::Finite(p) => crate::arith::window_norm_pow(&nonzero, q, p, precision),
    }
}

pub(crate) fn running_max(values: &[(usize, f64)]) -> Vec<(usize, f64)> {
    let mut m = f64::NEG_INFINITY;
    values
        .iter()
        .map(|&(n, v)| {
            m = m.max(v);
            (n + 1, m)
        })
        .collect()
}

pub(crate) fn max_real(values: Vec<Real>, precision: u32) -> Real {
    values.into_iter().fold(Real::zero(precision), |acc, v| acc.max(&v))
}

struct Context<'a> {
    table: AbarTable,
    l: &'a LambdaSeq,
    /// Every entry of `a` from here on is zero.
    support: Option<usize>,
    opts: EvalOptions,
}

impl Context<'_> {
    fn n(&self) -> usize {
        self.table.len()
    }

    fn finite(&self) -> bool {
        self.support.is_some()
    }

    fn report(&self, condition: DualCondition, q: Option<&Exponent>, values: Vec<(usize, f64)>, value: Option<Real>, verdict: Verdict) -> DualReport {
        DualReport {
            condition,
            q: q.map(ToString::to_string),
            lambda: self.l.to_string(),
            window: self.n(),
            values,
            value,
            lower_bound: false,
            verdict,
        }
    }

    /// A supremum over `n` of a per-row quantity.
    fn sup_over_rows(&self, condition: DualCondition, q: Option<&Exponent>, per_row: Vec<Real>) -> DualReport {
        let values: Vec<(usize, f64)> = per_row.iter().enumerate().map(|(n, v)| (n, v.to_f64())).collect();
        if self.finite() {
            let value = max_real(per_row, self.opts.precision);
            let verdict = Verdict::exact(running_max(&values));
            return self.report(condition, q, values, Some(value), verdict);
        }
        let verdict = classify_bounded(running_max(&values)[3..].to_vec());
        self.report(condition, q, values, None, verdict)
    }

    fn d1(&self, q: &Exponent) -> Result<DualReport> {
        let rows: Vec<Vec<Rational>> = (0..self.n()).map(|n| self.table.b_row(n)).collect();
        let points = if self.finite() {
            vec![self.n()]
        } else {
            doubling_sweep(4, self.n())
        };
        let mut sweep = Vec::new();
        let mut last = None;
        for &n in &points {
            let s = subset_sup(&rows[..n], q, self.opts.strategy, self.opts.precision, self.opts.exec)?;
            sweep.push((n, s.value.to_f64()));
            last = Some(s);
        }
        let last = last.expect("nonempty sweep");
        let verdict = if self.finite() {
            Verdict::exact(sweep.clone())
        } else {
            classify_bounded(sweep.clone())
        };
        let mut r = self.report(DualCondition::D1, Some(q), sweep, Some(last.value), verdict);
        r.lower_bound = !last.exhaustive;
        Ok(r)
    }

    fn d2(&self) -> DualReport {
        let rows: Vec<Vec<Rational>> = (0..self.n()).map(|n| self.table.b_row(n)).collect();
        let cols: Vec<Real> = (0..self.n())
            .map(|k| {
                let s: Rational = rows.iter().filter_map(|r| r.get(k)).map(Signed::abs).sum();
                Real::exact(s, self.opts.precision)
            })
            .collect();
        let values: Vec<(usize, f64)> = cols.iter().enumerate().map(|(k, v)| (k, v.to_f64())).collect();
        if self.finite() {
            let value = max_real(cols, self.opts.precision);
            return self.report(DualCondition::D2, None, values.clone(), Some(value), Verdict::exact(running_max(&values)));
        }
        // column sums over growing row windows
        let sweep: Vec<(usize, f64)> = (4..=self.n())
            .map(|big| {
                let m = (0..big)
                    .map(|k| rows[..big].iter().filter_map(|r| r.get(k)).map(|v| rational_to_f64(v).abs()).sum::<f64>())
                    .fold(0.0, f64::max);
                (big, m)
            })
            .collect();
        self.report(DualCondition::D2, None, values, None, classify_bounded(sweep))
    }

    fn d3(&self) -> DualReport {
        let n = self.n();
        if self.finite() {
            let values = (0..n).map(|k| (k, rational_to_f64(&self.table.series_tail(k)))).collect();
            return self.report(DualCondition::D3, None, values, None, Verdict::exact(vec![(n, 0.0)]));
        }
        let mut acc = 0.0;
        let mut terms = Vec::with_capacity(n);
        let partial: Vec<(usize, f64)> = (0..n)
            .map(|j| {
                let t = rational_to_f64(&(fib_sq(j + 1) * &self.table.a[j])).abs();
                terms.push(t);
                acc += t;
                (j + 1, acc)
            })
            .collect();
        let mut verdict = classify_bounded(partial[3..].to_vec());
        if verdict.status != Status::EvidenceBounded {
            // a divergent absolute series whose terms still vanish may converge conditionally
            let peak = terms.iter().copied().fold(0.0, f64::max);
            let vanishing = terms.last().is_some_and(|t| *t <= 1e-6 * peak);
            verdict.status = if vanishing { Status::Inconclusive } else { Status::EvidenceDiverging };
        }
        self.report(DualCondition::D3, None, partial, None, verdict)
    }

    fn row_abar(&self, n: usize) -> Vec<Rational> {
        (0..n).map(|k| self.table.abar(k, n)).collect()
    }

    fn d4(&self, q: &Exponent) -> Result<DualReport> {
        let per_row = self
            .opts
            .exec
            .try_map(self.n(), |n| power_sum(&self.row_abar(n), q, self.opts.precision))?;
        Ok(self.sup_over_rows(DualCondition::D4, Some(q), per_row))
    }

    fn d5(&self) -> DualReport {
        let per_row = (0..self.n())
            .map(|n| Real::exact(self.table.diagonal(n).abs(), self.opts.precision))
            .collect();
        self.sup_over_rows(DualCondition::D5, None, per_row)
    }

    fn d6(&self) -> Result<DualReport> {
        let per_row = self
            .opts
            .exec
            .try_map(self.n(), |n| power_sum(&self.row_abar(n), &Exponent::Infinity, self.opts.precision))?;
        Ok(self.sup_over_rows(DualCondition::D6, None, per_row))
    }

    fn d8(&self) -> Result<DualReport> {
        let one = Exponent::integer(1);
        let per_row = self
            .opts
            .exec
            .try_map(self.n(), |n| power_sum(&self.row_abar(n), &one, self.opts.precision))?;
        Ok(self.sup_over_rows(DualCondition::D8, None, per_row))
    }

    /// `sum_k |abar_k(n) - abar_k| -> 0`, with `abar_k` read off at the end of
    /// the window (exact once `n` passes a finite support).
    fn d7(&self) -> DualReport {
        let n = self.n();
        let limit: Vec<Rational> = (0..n).map(|k| self.table.abar(k, n)).collect();
        let gap = |m: usize| -> Rational {
            (0..n)
                .map(|k| (self.table.abar(k, m) - &limit[k]).abs())
                .sum()
        };
        if let Some(s) = self.support {
            let values: Vec<(usize, f64)> = (0..n).map(|m| (m, rational_to_f64(&gap(m)))).collect();
            debug_assert!(values[s.min(n - 1)..].iter().all(|(_, v)| *v == 0.0));
            return self.report(DualCondition::D7, None, values.clone(), Some(Real::zero(self.opts.precision)), Verdict::exact(values));
        }
        let values: Vec<(usize, f64)> = (1..=n / 2).map(|m| (m, rational_to_f64(&gap(m)))).collect();
        let verdict = classify_to_zero(values.clone());
        self.report(DualCondition::D7, None, values, None, verdict)
    }
}

fn context<'a>(a: &dyn SeqGenerator, l: &'a LambdaSeq, opts: EvalOptions) -> Result<Context<'a>> {
    if opts.window < 4 {
        return Err(Error::IndexOutOfRange(format!("dual window {} is below 4", opts.window)));
    }
    let support = a.support_bound();
    let n = match support {
        Some(s) => opts.window.max(s + 2),
        None => opts.window,
    };
    let values = a.exact_prefix(n)?;
    Ok(Context {
        table: AbarTable::new(&values, l)?,
        l,
        support,
        opts,
    })
}

/// Evaluates one of the defining quantities d1..d8 over the window; `q` is
/// the exponent used by d1 and d4.
pub fn dual_condition(
    a: &dyn SeqGenerator,
    l: &LambdaSeq,
    id: DualCondition,
    q: &Exponent,
    opts: EvalOptions,
) -> Result<DualReport> {
    let ctx = context(a, l, opts)?;
    evaluate(&ctx, id, q)
}

fn evaluate(ctx: &Context, id: DualCondition, q: &Exponent) -> Result<DualReport> {
    Ok(match id {
        DualCondition::D1 => ctx.d1(q)?,
        DualCondition::D2 => ctx.d2(),
        DualCondition::D3 => ctx.d3(),
        DualCondition::D4 => ctx.d4(q)?,
        DualCondition::D5 => ctx.d5(),
        DualCondition::D6 => ctx.d6()?,
        DualCondition::D7 => ctx.d7(),
        DualCondition::D8 => ctx.d8()?,
    })
}

/// The base space `l_1`, `l_p` or `l_inf` whose domain is dualized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    L1,
    Lp(Exponent),
    Linf,
}

impl SpaceKind {
    pub fn exponent(&self) -> Exponent {
        match self {
            SpaceKind::L1 => Exponent::integer(1),
            SpaceKind::Lp(p) => p.clone(),
            SpaceKind::Linf => Exponent::Infinity,
        }
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceKind::L1 => f.write_str("l1"),
            SpaceKind::Lp(p) => write!(f, "lp:{p}"),
            SpaceKind::Linf => f.write_str("linf"),
        }
    }
}

/// `l1`, `linf`, `lp:<p>` (with `lp:1` and `lp:inf` normalized).
impl FromStr for SpaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "l1" => return Ok(SpaceKind::L1),
            "linf" | "l_inf" => return Ok(SpaceKind::Linf),
            _ => {}
        }
        let p = t
            .strip_prefix("lp:")
            .or_else(|| t.strip_prefix("l"))
            .ok_or_else(|| Error::parse("space", s, "expected l1, linf or lp:<p>"))?;
        let p: Exponent = p.parse()?;
        Ok(if p.is_one() {
            SpaceKind::L1
        } else if p.is_infinite() {
            SpaceKind::Linf
        } else {
            SpaceKind::Lp(p)
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DualKind {
    Alpha,
    Beta,
    Gamma,
}

impl FromStr for DualKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "alpha" => Ok(DualKind::Alpha),
            "beta" => Ok(DualKind::Beta),
            "gamma" => Ok(DualKind::Gamma),
            _ => Err(Error::parse("dual kind", s, "expected alpha, beta or gamma")),
        }
    }
}

/// The conditions characterizing a dual, with the exponent for d1/d4.
pub fn dual_conditions(space: &SpaceKind, kind: DualKind) -> (Vec<DualCondition>, Exponent) {
    use DualCondition::*;
    let q = match space {
        SpaceKind::L1 => Exponent::Infinity,
        SpaceKind::Lp(p) => p.conjugate(),
        SpaceKind::Linf => Exponent::integer(1),
    };
    let ids = match (kind, space) {
        (DualKind::Alpha, SpaceKind::L1) => vec![D2],
        (DualKind::Alpha, _) => vec![D1],
        (DualKind::Beta, SpaceKind::L1) => vec![D3, D5, D6],
        (DualKind::Beta, SpaceKind::Lp(_)) => vec![D3, D4, D5],
        (DualKind::Beta, SpaceKind::Linf) => vec![D4, D7, D8],
        (DualKind::Gamma, SpaceKind::L1) => vec![D5, D6],
        (DualKind::Gamma, _) => vec![D5, D8],
    };
    (ids, q)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualMembership {
    pub kind: DualKind,
    pub space: String,
    pub reports: Vec<DualReport>,
    pub status: Status,
}

/// Evaluates exactly the conditions characterizing the requested dual.
pub fn dual_membership(
    a: &dyn SeqGenerator,
    l: &LambdaSeq,
    space: &SpaceKind,
    kind: DualKind,
    opts: EvalOptions,
) -> Result<DualMembership> {
    let (ids, q) = dual_conditions(space, kind);
    let ctx = context(a, l, opts)?;
    let reports = ids
        .iter()
        .map(|id| evaluate(&ctx, *id, &q))
        .collect::<Result<Vec<_>>>()?;
    let status = conjunction(&reports.iter().map(|r| r.verdict.status).collect::<Vec<_>>());
    Ok(DualMembership {
        kind,
        space: space.to_string(),
        reports,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};
    use crate::matrices::forward_transform;
    use crate::sequences::{Provenance, SpecGenerator};
    use crate::subset::SubsetStrategy;
    use proptest::prelude::*;

    fn lam(s: &str) -> LambdaSeq {
        s.parse().unwrap()
    }

    fn win(v: Vec<Rational>) -> SeqWindow {
        SeqWindow::new(v, Provenance::new("test")).unwrap()
    }

    fn unit(k: usize, n: usize) -> SeqWindow {
        win((0..n).map(|i| rat((i == k) as i64)).collect())
    }

    fn gen(spec: &str) -> SpecGenerator {
        SpecGenerator::new(spec.parse().unwrap(), lam("linear:1,1"), None)
    }

    #[test]
    fn b_examples() {
        let l = lam("linear:1,1");
        let b = alpha_matrix_b(&unit(0, 6), &l).unwrap();
        assert_eq!(b.entry(0, 0), rat(1));
        for n in 1..6 {
            for k in 0..=n {
                assert_eq!(b.entry(n, k), rat(0));
            }
        }
        let z = alpha_matrix_b(&win(vec![rat(0); 5]), &l).unwrap();
        assert!(z.window(5).rows().iter().flatten().all(Zero::is_zero));
        let a = win((0..6).map(|i| ratio(i + 1, 3)).collect());
        let a2 = win(a.values().iter().map(|v| v * rat(2)).collect());
        let (b1, b2) = (alpha_matrix_b(&a, &l).unwrap(), alpha_matrix_b(&a2, &l).unwrap());
        for n in 0..6 {
            for k in 0..=n {
                assert_eq!(b2.entry(n, k), b1.entry(n, k) * rat(2));
            }
        }
    }

    #[test]
    fn abar_examples() {
        let l = lam("linear:1,1");
        for n in 1..8 {
            assert_eq!(abar(&unit(0, 8), &l, 0, n).unwrap(), rat(1));
            assert_eq!(abar(&unit(0, 8), &l, 2, n.max(3)).unwrap(), rat(0));
        }
        for n in 2..8 {
            assert_eq!(abar(&unit(1, 8), &l, 0, n).unwrap(), rat(2));
        }
        assert!(matches!(abar(&unit(0, 4), &l, 2, 2), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(abar(&unit(0, 4), &l, 0, 5), Err(Error::IndexOutOfRange(_))));
        let t = beta_matrix_t(&unit(0, 4), &l).unwrap();
        assert_eq!(t.entry(0, 0), rat(1));
    }

    fn arb_pair() -> impl Strategy<Value = (Vec<Rational>, Vec<Rational>)> {
        let v = || proptest::collection::vec((-9i64..9, 1i64..5).prop_map(|(n, d)| ratio(n, d)), 24);
        (v(), v())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]

        #[test]
        fn abel_and_alpha_pairings((a, x) in arb_pair(), which in 0usize..2) {
            let l = lam(["linear:1,1", "geometric:2,1"][which]);
            let aw = win(a.clone());
            let y = forward_transform(&win(x.clone()), &l).unwrap();
            let t = beta_matrix_t(&aw, &l).unwrap();
            let b = alpha_matrix_b(&aw, &l).unwrap();
            let mut lhs = Rational::zero();
            for n in 0..24 {
                lhs += &a[n] * &x[n];
                let tn: Rational = (0..=n).map(|k| t.entry(n, k) * &y.values()[k]).sum();
                prop_assert_eq!(&tn, &lhs);
                let bn: Rational = (0..=n).map(|k| b.entry(n, k) * &y.values()[k]).sum();
                prop_assert_eq!(bn, &a[n] * &x[n]);
            }
        }

        #[test]
        fn finite_support_stabilizes(a in proptest::collection::vec(-5i64..5, 1..6)) {
            let l = lam("linear:2,3");
            let s = a.len();
            let mut v: Vec<Rational> = a.into_iter().map(rat).collect();
            v.resize(s + 6, Rational::zero());
            let table = AbarTable::new(&v, &l).unwrap();
            for k in 0..s {
                for n in s..s + 6 {
                    prop_assert_eq!(table.abar(k, n), table.abar(k, s + 5));
                }
            }
        }
    }

    #[test]
    fn d5_unit() {
        let r = dual_condition(&gen("unit:0"), &lam("linear:1,1"), DualCondition::D5, &Exponent::integer(2), EvalOptions::new(8)).unwrap();
        assert_eq!(r.values[0], (0, 1.0));
        assert!(r.values[1..].iter().all(|(_, v)| *v == 0.0));
        assert_eq!(r.value, Some(Real::exact(rat(1), crate::arith::DEFAULT_PRECISION)));
        assert!(r.verdict.status.is_positive());
    }

    #[test]
    fn d3_of_ones_diverges() {
        let r = dual_condition(&gen("ones"), &lam("linear:1,1"), DualCondition::D3, &Exponent::integer(2), EvalOptions::new(32)).unwrap();
        assert_eq!(r.verdict.status, Status::EvidenceDiverging);
    }

    #[test]
    fn d6_of_inverse_fibonacci_cube_is_bounded() {
        let r = dual_condition(&gen("inv-fib-cube"), &lam("linear:1,1"), DualCondition::D6, &Exponent::integer(2), EvalOptions::new(20)).unwrap();
        assert_eq!(r.verdict.status, Status::EvidenceBounded);
        let r = dual_condition(&gen("inv-fib-cube"), &lam("linear:1,1"), DualCondition::D3, &Exponent::integer(2), EvalOptions::new(32)).unwrap();
        assert_eq!(r.verdict.status, Status::EvidenceBounded);
    }

    #[test]
    fn memberships() {
        let l = lam("linear:1,1");
        let p2 = SpaceKind::Lp(Exponent::integer(2));
        let m = dual_membership(&gen("unit:0"), &l, &p2, DualKind::Beta, EvalOptions::new(16)).unwrap();
        assert_eq!(m.status, Status::HoldsExactly);
        assert_eq!(m.reports.iter().map(|r| r.condition).collect::<Vec<_>>(), [DualCondition::D3, DualCondition::D4, DualCondition::D5]);
        let m = dual_membership(&gen("ones"), &l, &p2, DualKind::Beta, EvalOptions::new(32)).unwrap();
        assert_eq!(m.reports[0].verdict.status, Status::EvidenceDiverging);
        assert_eq!(m.status, Status::EvidenceDiverging);
        for space in [SpaceKind::L1, p2.clone(), SpaceKind::Linf] {
            for kind in [DualKind::Alpha, DualKind::Beta, DualKind::Gamma] {
                let m = dual_membership(&gen("zero"), &l, &space, kind, EvalOptions::new(8)).unwrap();
                assert_eq!(m.status, Status::HoldsExactly, "{space} {kind:?}");
            }
        }
    }

    #[test]
    fn d7_of_ones_does_not_settle() {
        let r = dual_condition(&gen("ones"), &lam("linear:1,1"), DualCondition::D7, &Exponent::integer(1), EvalOptions::new(24)).unwrap();
        assert_eq!(r.verdict.status, Status::EvidenceDiverging);
    }

    #[test]
    fn d1_sampling_never_exceeds_enumeration() {
        let l = lam("linear:1,1");
        let a = gen("list:1,-1/2,1/3,-1/4,1/5,-1/6,1/7,-1/8,1/9,-1/10,1/11,-1/12");
        let q = Exponent::integer(2);
        let exact = dual_condition(&a, &l, DualCondition::D1, &q, EvalOptions::new(12)).unwrap();
        let mut opts = EvalOptions::new(12);
        opts.strategy = SubsetStrategy::Heuristic { seed: 3 };
        let sampled = dual_condition(&a, &l, DualCondition::D1, &q, opts).unwrap();
        assert!(!exact.lower_bound && sampled.lower_bound);
        assert!(sampled.value.unwrap().mid() <= exact.value.unwrap().mid());
    }

    #[test]
    fn parsing() {
        assert_eq!("d7".parse::<DualCondition>().unwrap(), DualCondition::D7);
        assert_eq!("d9".parse::<DualCondition>().unwrap_err(), Error::UnknownCondition("d9".into()));
        assert_eq!("lp:2".parse::<SpaceKind>().unwrap(), SpaceKind::Lp(Exponent::integer(2)));
        assert_eq!("lp:inf".parse::<SpaceKind>().unwrap(), SpaceKind::Linf);
        assert_eq!("l1".parse::<SpaceKind>().unwrap(), SpaceKind::L1);
        assert!("beta".parse::<DualKind>().is_ok());
    }
}
