//! Membership of `A` in `(X^lambda(Fhat) : Y)`, decided condition by
//! condition on the transformed matrix `ehat`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::hat::{abs_sum, HatMatrix, HatRow, RowSupport};
use crate::arith::{rational_to_f64, Exponent, Rational, Real};
use crate::duals::{dual_membership, max_real, power_sum, running_max, ser_opt_real, DualKind, SpaceKind};
use crate::error::{Error, Result};
use crate::exec::EvalOptions;
use crate::matrices::RowSource;
use crate::sequences::{LambdaSeq, SeqGenerator};
use crate::subset::{subset_sup, transpose};
use crate::verdict::{classify_bounded, classify_to_zero, conjunction, doubling_sweep, Status, Verdict};

/// Columns whose limits and partial-sum convergence are examined on infinite matrices.
const PROBE_COLUMNS: usize = 4;

/// The target space of a matrix class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    C0,
    C,
    Linf,
    L1,
    Lp(Exponent),
}

impl Target {
    /// `lp:1` is `l1` and `lp:inf` is `linf`.
    pub fn normalized(self) -> Target {
        match self {
            Target::Lp(p) if p.is_one() => Target::L1,
            Target::Lp(p) if p.is_infinite() => Target::Linf,
            t => t,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::C0 => f.write_str("c0"),
            Target::C => f.write_str("c"),
            Target::Linf => f.write_str("linf"),
            Target::L1 => f.write_str("l1"),
            Target::Lp(p) => write!(f, "lp:{p}"),
        }
    }
}

/// `c0`, `c`, `linf`, `l1` or `lp:<p>`.
impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        Ok(match t {
            "c0" => Target::C0,
            "c" => Target::C,
            _ => match t.parse::<SpaceKind>() {
                Ok(SpaceKind::L1) => Target::L1,
                Ok(SpaceKind::Linf) => Target::Linf,
                Ok(SpaceKind::Lp(p)) => Target::Lp(p),
                Err(_) => return Err(Error::parse("target space", s, "expected c0, c, linf, l1 or lp:<p>")),
            },
        })
    }
}

/// The conditions the class characterizations are built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassCondition {
    /// `sum_{j>k} a_nj f_(j+1)^2` exists for every `n, k`.
    RowSeries,
    /// `(g_kk a_nk)_k` is bounded for every `n`.
    ScaledDiagonal,
    /// `sup_n sum_k |ehat_nk|^q < inf`
    RowQNorms,
    /// Every row of `A` lies in the beta-dual of the domain.
    RowsInBetaDual,
    /// `sup_{n,k} |ehat_nk| < inf`
    EntriesBounded,
    /// `sup_n sum_k |ehat_nk| < inf`
    RowSumsBounded,
    /// `sum_n |ehat_nk(m) - ehat_nk| -> 0` as `m -> inf`, for each `k`.
    PartialUniform,
    /// `lim_n ehat_nk` exists for each `k`.
    ColumnLimits,
    /// `sum_k |ehat_nk - alpha_k| -> 0`
    RowsToLimit,
    /// `lim_n ehat_nk = 0` for each `k`.
    ColumnLimitsZero,
    /// `sum_k |ehat_nk| -> 0`
    RowSumsToZero,
    /// `sup_k sum_n |ehat_nk| < inf`
    ColumnSumsBounded,
    /// `sup_F sum_k |sum_{n in F} ehat_nk|^q < inf`
    SubsetQ,
    /// `sup_F sum_k |sum_{n in F} ehat_nk| < inf`
    SubsetOne,
    /// `sup_k sum_n |ehat_nk|^p < inf`
    ColumnPSums,
    /// `sum_k |ehat_nk|` converges for every `n`.
    RowsAbsolutelySummable,
    /// `sup_K sum_n |sum_{k in K} ehat_nk|^p < inf`
    ColumnSubsetP,
}

impl ClassCondition {
    pub const ALL: [ClassCondition; 17] = [
        ClassCondition::RowSeries,
        ClassCondition::ScaledDiagonal,
        ClassCondition::RowQNorms,
        ClassCondition::RowsInBetaDual,
        ClassCondition::EntriesBounded,
        ClassCondition::RowSumsBounded,
        ClassCondition::PartialUniform,
        ClassCondition::ColumnLimits,
        ClassCondition::RowsToLimit,
        ClassCondition::ColumnLimitsZero,
        ClassCondition::RowSumsToZero,
        ClassCondition::ColumnSumsBounded,
        ClassCondition::SubsetQ,
        ClassCondition::SubsetOne,
        ClassCondition::ColumnPSums,
        ClassCondition::RowsAbsolutelySummable,
        ClassCondition::ColumnSubsetP,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassCondition::RowSeries => "row-series",
            ClassCondition::ScaledDiagonal => "scaled-diagonal",
            ClassCondition::RowQNorms => "row-q-norms",
            ClassCondition::RowsInBetaDual => "rows-in-beta-dual",
            ClassCondition::EntriesBounded => "entries-bounded",
            ClassCondition::RowSumsBounded => "row-sums-bounded",
            ClassCondition::PartialUniform => "partial-uniform",
            ClassCondition::ColumnLimits => "column-limits",
            ClassCondition::RowsToLimit => "rows-to-limit",
            ClassCondition::ColumnLimitsZero => "column-limits-zero",
            ClassCondition::RowSumsToZero => "row-sums-to-zero",
            ClassCondition::ColumnSumsBounded => "column-sums-bounded",
            ClassCondition::SubsetQ => "subset-q",
            ClassCondition::SubsetOne => "subset-one",
            ClassCondition::ColumnPSums => "column-p-sums",
            ClassCondition::RowsAbsolutelySummable => "rows-absolutely-summable",
            ClassCondition::ColumnSubsetP => "column-subset-p",
        }
    }
}

impl fmt::Display for ClassCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        ClassCondition::ALL
            .iter()
            .find(|c| c.as_str() == t)
            .copied()
            .ok_or_else(|| Error::UnknownCondition(s.to_string()))
    }
}

/// The conditions characterizing `(X^lambda(Fhat) : Y)`.
pub fn class_conditions(x: &SpaceKind, y: &Target) -> Result<Vec<ClassCondition>> {
    use ClassCondition::*;
    let extra = match (x, y.clone().normalized()) {
        (SpaceKind::L1, Target::Linf) => vec![EntriesBounded],
        (SpaceKind::Lp(_), Target::Linf) => vec![RowQNorms, RowsInBetaDual],
        (SpaceKind::Linf, Target::Linf) => vec![RowSumsBounded, PartialUniform],
        (SpaceKind::L1, Target::C) => vec![ColumnLimits],
        (SpaceKind::Lp(_), Target::C) => vec![RowQNorms, RowsInBetaDual, ColumnLimits],
        (SpaceKind::Linf, Target::C) => vec![PartialUniform, RowsToLimit],
        (SpaceKind::L1, Target::C0) => vec![ColumnLimitsZero],
        (SpaceKind::Lp(_), Target::C0) => vec![RowQNorms, RowsInBetaDual, ColumnLimitsZero],
        (SpaceKind::Linf, Target::C0) => vec![PartialUniform, RowSumsToZero],
        (SpaceKind::L1, Target::L1) => vec![EntriesBounded, ColumnSumsBounded],
        (SpaceKind::Lp(_), Target::L1) => vec![RowQNorms, RowsInBetaDual, SubsetQ],
        (SpaceKind::Linf, Target::L1) => vec![PartialUniform, SubsetOne],
        (SpaceKind::L1, Target::Lp(_)) => vec![ColumnPSums],
        (SpaceKind::Linf, Target::Lp(_)) => vec![RowsAbsolutelySummable, ColumnSubsetP],
        (SpaceKind::Lp(_), Target::Lp(_)) => {
            return Err(Error::UnsupportedPair(x.to_string(), y.to_string()));
        }
    };
    let mut ids = vec![RowSeries, ScaledDiagonal];
    ids.extend(extra);
    Ok(ids)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub id: ClassCondition,
    /// The exponent the quantity was evaluated with, if any.
    pub exponent: Option<String>,
    /// Per-index values of the defining quantity.
    pub values: Vec<(usize, f64)>,
    /// The supremum over the examined window, when the condition is a supremum.
    #[serde(serialize_with = "ser_opt_real")]
    pub value: Option<Real>,
    /// `value` comes from a heuristic subset search.
    pub lower_bound: bool,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassReport {
    pub x: String,
    pub y: String,
    pub lambda: String,
    /// Rows of `ehat` examined.
    pub rows: usize,
    /// `A` has finitely many rows, each finitely supported.
    pub finite: bool,
    pub conditions: Vec<ConditionReport>,
    pub status: Status,
}

impl ClassReport {
    pub fn condition(&self, id: ClassCondition) -> Option<&ConditionReport> {
        self.conditions.iter().find(|c| c.id == id)
    }
}

fn from_three(v: &[(usize, f64)]) -> Vec<(usize, f64)> {
    v[v.len().min(3)..].to_vec()
}

/// Row `n` of `A` as a sequence, for the beta-dual conditions.
struct RowSeq {
    a: Arc<dyn RowSource>,
    n: usize,
}

impl SeqGenerator for RowSeq {
    fn describe(&self) -> String {
        format!("row {} of {}", self.n, self.a.describe())
    }

    fn exact_prefix(&self, len: usize) -> Result<Vec<Rational>> {
        Ok(self.a.row_prefix(self.n, len))
    }

    fn support_bound(&self) -> Option<usize> {
        self.a.row_support(self.n)
    }
}

pub(crate) struct Context<'a> {
    pub hat: &'a HatMatrix,
    pub rows: Vec<Arc<HatRow>>,
    pub finite: bool,
    pub opts: EvalOptions,
}

impl<'a> Context<'a> {
    pub fn new(hat: &'a HatMatrix, opts: EvalOptions) -> Result<Self> {
        let rows = hat.rows(hat.rows_in_scope(), opts.exec)?;
        Ok(Context {
            hat,
            rows,
            finite: hat.is_finite(),
            opts,
        })
    }

    fn prec(&self) -> u32 {
        self.opts.precision
    }

    fn report(&self, id: ClassCondition, exponent: Option<&Exponent>, values: Vec<(usize, f64)>, value: Option<Real>, verdict: Verdict) -> ConditionReport {
        ConditionReport {
            id,
            exponent: exponent.map(ToString::to_string),
            values,
            value,
            lower_bound: false,
            verdict,
        }
    }

    /// A supremum over rows of a per-row quantity.
    fn sup_rows(&self, id: ClassCondition, exponent: Option<&Exponent>, per_row: Vec<Real>) -> ConditionReport {
        let values: Vec<(usize, f64)> = per_row.iter().enumerate().map(|(n, v)| (n, v.to_f64())).collect();
        let value = max_real(per_row, self.prec());
        let verdict = if self.finite {
            Verdict::exact(running_max(&values))
        } else {
            classify_bounded(from_three(&running_max(&values)))
        };
        self.report(id, exponent, values, Some(value), verdict)
    }

    /// A property of each row separately; only the rows examined are certified.
    fn each_row(&self, id: ClassCondition, per_row: Vec<(f64, Status)>) -> ConditionReport {
        let statuses: Vec<Status> = per_row.iter().map(|p| p.1).collect();
        let mut status = conjunction(&statuses);
        if !self.finite && status == Status::HoldsExactly {
            status = Status::EvidenceBounded;
        }
        let values = per_row.iter().enumerate().map(|(n, p)| (n, p.0)).collect();
        self.report(id, None, values, None, Verdict::with_status(status, Vec::new()))
    }

    fn row_power_sums(&self, q: &Exponent) -> Result<Vec<Real>> {
        self.opts.exec.try_map(self.rows.len(), |n| power_sum(&self.rows[n].values, q, self.prec()))
    }

    /// A limit in `n` that should be zero; finite matrices vanish past their rows.
    fn to_zero(&self, id: ClassCondition, values: Vec<(usize, f64)>) -> ConditionReport {
        let verdict = if self.finite {
            Verdict::exact(values.clone())
        } else {
            classify_to_zero(values.clone())
        };
        self.report(id, None, values, Some(Real::zero(self.prec())).filter(|_| self.finite), verdict)
    }

    fn row_series(&self) -> ConditionReport {
        let per_row = self
            .rows
            .iter()
            .map(|r| match &r.support {
                RowSupport::Finite(_) => (r.weight_sum, Status::HoldsExactly),
                RowSupport::Truncated(v) => (r.weight_sum, v.status),
            })
            .collect();
        self.each_row(ClassCondition::RowSeries, per_row)
    }

    fn scaled_diagonal(&self) -> ConditionReport {
        let per_row = (0..self.rows.len())
            .map(|n| {
                let scaled: Vec<(usize, f64)> = self
                    .hat
                    .source_row(n)
                    .iter()
                    .enumerate()
                    .map(|(k, a)| (k, rational_to_f64(&(self.hat.diagonal_factor(k) * a)).abs()))
                    .collect();
                let sup = scaled.iter().map(|p| p.1).fold(0.0, f64::max);
                let status = if self.rows[n].is_exact() {
                    Status::HoldsExactly
                } else {
                    classify_bounded(from_three(&running_max(&scaled))).status
                };
                (sup, status)
            })
            .collect();
        self.each_row(ClassCondition::ScaledDiagonal, per_row)
    }

    fn rows_in_beta_dual(&self, p: &Exponent) -> Result<ConditionReport> {
        let space = SpaceKind::Lp(p.clone());
        let mut opts = self.opts;
        opts.window = opts.window.max(4);
        let per_row = (0..self.rows.len())
            .map(|n| {
                let row = RowSeq {
                    a: self.hat.source_arc(),
                    n,
                };
                let m = dual_membership(&row, self.hat.lambda(), &space, DualKind::Beta, opts)?;
                Ok((m.status.is_positive() as u8 as f64, m.status))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut r = self.each_row(ClassCondition::RowsInBetaDual, per_row);
        r.exponent = Some(p.to_string());
        Ok(r)
    }

    /// `max_{k < PROBE_COLUMNS} sum_n |ehat_nk(m) - ehat_nk|` over `m`.
    fn partial_uniform(&self) -> ConditionReport {
        let width = self.rows.iter().map(|r| r.values.len()).max().unwrap_or(0);
        let ms: Vec<usize> = if self.finite {
            (0..=width).collect()
        } else {
            (1..=(self.hat.window() / 2).max(1)).collect()
        };
        let gap = |m: usize| -> f64 {
            (0..PROBE_COLUMNS)
                .map(|k| {
                    self.rows
                        .iter()
                        .map(|r| rational_to_f64(&self.hat.partial_gap(r, k, m)).abs())
                        .sum::<f64>()
                })
                .fold(0.0, f64::max)
        };
        let values: Vec<(usize, f64)> = ms.into_iter().map(|m| (m, gap(m))).collect();
        if self.finite {
            debug_assert!(values.last().is_some_and(|v| v.1 == 0.0));
        }
        self.to_zero(ClassCondition::PartialUniform, values)
    }

    fn probe_columns(&self) -> usize {
        (self.rows.len() / 4).max(1)
    }

    /// Cauchy gap of the first columns against the last examined row.
    fn column_limits(&self) -> ConditionReport {
        if self.finite {
            let values = vec![(self.rows.len(), 0.0)];
            return self.report(ClassCondition::ColumnLimits, None, values.clone(), None, Verdict::exact(values));
        }
        let last = self.rows.len() - 1;
        let cols = self.probe_columns();
        let values: Vec<(usize, f64)> = (0..=last / 2)
            .map(|n| {
                let g = (n..=last)
                    .flat_map(|i| (0..cols).map(move |k| (i, k)))
                    .map(|(i, k)| rational_to_f64(&(self.rows[i].get(k) - self.rows[last].get(k))).abs())
                    .fold(0.0, f64::max);
                (n, g)
            })
            .collect();
        let verdict = classify_to_zero(values.clone());
        self.report(ClassCondition::ColumnLimits, None, values, None, verdict)
    }

    fn column_limits_zero(&self) -> ConditionReport {
        let cols = self.probe_columns();
        let mut tail = 0.0f64;
        let mut values: Vec<(usize, f64)> = (0..self.rows.len())
            .rev()
            .map(|n| {
                let m = (0..cols).map(|k| rational_to_f64(&self.rows[n].get(k)).abs()).fold(0.0, f64::max);
                tail = tail.max(m);
                (n, tail)
            })
            .collect();
        values.reverse();
        self.to_zero(ClassCondition::ColumnLimitsZero, values)
    }

    fn rows_to_limit(&self) -> ConditionReport {
        let alpha: Vec<Rational> = if self.finite {
            Vec::new()
        } else {
            self.rows.last().map(|r| r.values.clone()).unwrap_or_default()
        };
        let count = if self.finite { self.rows.len() + 1 } else { self.rows.len() / 2 + 1 };
        let values = (0..count)
            .map(|n| {
                let row = self.rows.get(n).map(|r| r.values.as_slice()).unwrap_or(&[]);
                let width = row.len().max(alpha.len());
                let gap: Rational = (0..width)
                    .map(|k| {
                        let e = row.get(k).cloned().unwrap_or_else(Rational::zero);
                        let a = alpha.get(k).cloned().unwrap_or_else(Rational::zero);
                        (e - a).abs()
                    })
                    .sum();
                (n, rational_to_f64(&gap))
            })
            .collect();
        self.to_zero(ClassCondition::RowsToLimit, values)
    }

    fn row_sums_to_zero(&self) -> ConditionReport {
        let mut values: Vec<(usize, f64)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(n, r)| (n, rational_to_f64(&abs_sum(&r.values))))
            .collect();
        if self.finite {
            values.push((self.rows.len(), 0.0));
        }
        self.to_zero(ClassCondition::RowSumsToZero, values)
    }

    /// `sup_k sum_n |ehat_nk|^e`
    fn column_sums(&self, id: ClassCondition, e: &Exponent) -> Result<ConditionReport> {
        let width = self.rows.iter().map(|r| r.values.len()).max().unwrap_or(0);
        let column = |k: usize, rows: usize| -> Vec<Rational> { self.rows[..rows].iter().map(|r| r.get(k)).collect() };
        let per_col = self
            .opts
            .exec
            .try_map(width, |k| power_sum(&column(k, self.rows.len()), e, self.prec()))?;
        let value = max_real(per_col.clone(), self.prec());
        let exponent = Some(e).filter(|e| !e.is_one());
        if self.finite {
            let values: Vec<(usize, f64)> = per_col.iter().enumerate().map(|(k, v)| (k, v.to_f64())).collect();
            return Ok(self.report(id, exponent, values.clone(), Some(value), Verdict::exact(running_max(&values))));
        }
        let f = match e {
            Exponent::Finite(p) => rational_to_f64(p),
            Exponent::Infinity => f64::INFINITY,
        };
        let sweep: Vec<(usize, f64)> = (4..=self.rows.len())
            .map(|big| {
                let m = (0..width.min(big))
                    .map(|k| {
                        let c = column(k, big).iter().map(|v| rational_to_f64(v).abs()).collect::<Vec<_>>();
                        if f.is_infinite() {
                            c.into_iter().fold(0.0, f64::max)
                        } else {
                            c.into_iter().map(|v| v.powf(f)).sum()
                        }
                    })
                    .fold(0.0, f64::max);
                (big, m)
            })
            .collect();
        Ok(self.report(id, exponent, sweep.clone(), Some(value), classify_bounded(sweep)))
    }

    /// A subset supremum over doubling windows of rows (or, transposed, columns).
    fn subset(&self, id: ClassCondition, q: &Exponent, columns: bool) -> Result<ConditionReport> {
        let window = |n: usize| -> Vec<Vec<Rational>> {
            let rows: Vec<Vec<Rational>> = self.rows[..n.min(self.rows.len())]
                .iter()
                .map(|r| {
                    if self.finite {
                        r.values.clone()
                    } else {
                        r.values.iter().take(n).cloned().collect()
                    }
                })
                .collect();
            if columns {
                transpose(&rows)
            } else {
                rows
            }
        };
        let points = if self.finite {
            vec![self.rows.len()]
        } else {
            doubling_sweep(4, self.rows.len())
        };
        let mut sweep = Vec::new();
        let mut last = None;
        for &n in &points {
            let s = subset_sup(&window(n), q, self.opts.strategy, self.prec(), self.opts.exec)?;
            sweep.push((n, s.value.to_f64()));
            last = Some(s);
        }
        let last = last.expect("nonempty sweep");
        let verdict = if self.finite {
            Verdict::exact(sweep.clone())
        } else {
            classify_bounded(sweep.clone())
        };
        let mut r = self.report(id, Some(q), sweep, Some(last.value), verdict);
        r.lower_bound = !last.exhaustive;
        Ok(r)
    }

    fn rows_absolutely_summable(&self) -> ConditionReport {
        let per_row = self
            .rows
            .iter()
            .map(|r| {
                let total = rational_to_f64(&abs_sum(&r.values));
                if r.is_exact() {
                    return (total, Status::HoldsExactly);
                }
                let mut acc = 0.0;
                let partial: Vec<(usize, f64)> = r
                    .values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        acc += rational_to_f64(v).abs();
                        (k + 1, acc)
                    })
                    .collect();
                (total, classify_bounded(from_three(&partial)).status)
            })
            .collect();
        self.each_row(ClassCondition::RowsAbsolutelySummable, per_row)
    }

    pub fn evaluate(&self, id: ClassCondition, x: &SpaceKind, y: &Target) -> Result<ConditionReport> {
        use ClassCondition::*;
        let q = x.exponent().conjugate();
        Ok(match id {
            RowSeries => self.row_series(),
            ScaledDiagonal => self.scaled_diagonal(),
            RowQNorms => self.sup_rows(id, Some(&q), self.row_power_sums(&q)?),
            RowsInBetaDual => self.rows_in_beta_dual(&x.exponent())?,
            EntriesBounded => self.sup_rows(id, None, self.row_power_sums(&Exponent::Infinity)?),
            RowSumsBounded => self.sup_rows(id, None, self.row_power_sums(&Exponent::integer(1))?),
            PartialUniform => self.partial_uniform(),
            ColumnLimits => self.column_limits(),
            RowsToLimit => self.rows_to_limit(),
            ColumnLimitsZero => self.column_limits_zero(),
            RowSumsToZero => self.row_sums_to_zero(),
            ColumnSumsBounded => self.column_sums(id, &Exponent::integer(1))?,
            SubsetQ => self.subset(id, &q, false)?,
            SubsetOne => self.subset(id, &Exponent::integer(1), false)?,
            ColumnPSums => self.column_sums(id, &target_exponent(y))?,
            RowsAbsolutelySummable => self.rows_absolutely_summable(),
            ColumnSubsetP => self.subset(id, &target_exponent(y), true)?,
        })
    }
}

fn target_exponent(y: &Target) -> Exponent {
    match y {
        Target::Lp(p) => p.clone(),
        Target::L1 => Exponent::integer(1),
        _ => Exponent::Infinity,
    }
}

/// Evaluates exactly the conditions characterizing `(X^lambda(Fhat) : Y)`.
///
/// A matrix with finitely many, finitely supported rows is decided exactly;
/// otherwise `opts.window` rows (and columns of infinite rows) are examined.
pub fn class_check(
    a: Arc<dyn RowSource>,
    l: &LambdaSeq,
    x: &SpaceKind,
    y: &Target,
    opts: EvalOptions,
) -> Result<ClassReport> {
    if opts.window < 4 {
        return Err(Error::IndexOutOfRange(format!("class window {} is below 4", opts.window)));
    }
    let y = y.clone().normalized();
    let ids = class_conditions(x, &y)?;
    let hat = HatMatrix::new(a, l, opts.window);
    let conditions = match Context::new(&hat, opts) {
        Ok(ctx) => ids
            .iter()
            .map(|id| ctx.evaluate(*id, x, &y))
            .collect::<Result<Vec<_>>>()?,
        Err(Error::RowSeriesDivergent(n)) => divergent_rows(&ids, n),
        Err(e) => return Err(e),
    };
    let status = conjunction(&conditions.iter().map(|c| c.verdict.status).collect::<Vec<_>>());
    Ok(ClassReport {
        x: x.to_string(),
        y: y.to_string(),
        lambda: l.to_string(),
        rows: hat.rows_in_scope(),
        finite: hat.is_finite(),
        conditions,
        status,
    })
}

/// Row `n` has no convergent series: the class fails there, and nothing
/// else can be evaluated.
fn divergent_rows(ids: &[ClassCondition], n: usize) -> Vec<ConditionReport> {
    ids.iter()
        .map(|&id| {
            let status = if id == ClassCondition::RowSeries {
                Status::EvidenceDiverging
            } else {
                Status::Inconclusive
            };
            ConditionReport {
                id,
                exponent: None,
                values: if id == ClassCondition::RowSeries { vec![(n, f64::INFINITY)] } else { Vec::new() },
                value: None,
                lower_bound: false,
                verdict: Verdict::with_status(status, Vec::new()),
            }
        })
        .collect()
}
