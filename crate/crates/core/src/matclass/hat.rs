//! `ehat_nk = sum_{j>=k} g_jk a_nj`, the matrix through which every class,
//! norm and compactness criterion for `A` acting on a domain of `E` is read.
//!
//! Below the diagonal `g_jk = f_(j+1)^2 G_k`, so
//! `ehat_nk = g_kk a_nk + G_k sum_{j>k} f_(j+1)^2 a_nj`: one suffix sum per row.

use std::sync::Arc;

use dashmap::DashMap;
use num_traits::{Signed, Zero};

use crate::arith::{rational_to_f64, Rational};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::matrices::{fib_sq, g_column_factor, RowSource};
use crate::sequences::LambdaSeq;
use crate::verdict::{classify_bounded, Status, Verdict};

/// How much of row `n` of `A` the series behind `ehat_nk` saw.
#[derive(Clone, Debug, PartialEq)]
pub enum RowSupport {
    /// The row vanishes from this column on; every sum is exact.
    Finite(usize),
    /// Read up to the window; the verdict classifies `sum_j |f_(j+1)^2 a_nj|`.
    Truncated(Verdict),
}

#[derive(Clone, Debug, PartialEq)]
pub struct HatRow {
    /// `ehat_nk` for `k` below the support (or window).
    pub values: Vec<Rational>,
    /// `sum_{j>i} f_(j+1)^2 a_nj` over the same range.
    tails: Vec<Rational>,
    /// `sum_j |f_(j+1)^2 a_nj|` over the row as read.
    pub weight_sum: f64,
    pub support: RowSupport,
}

impl HatRow {
    pub fn is_exact(&self) -> bool {
        matches!(self.support, RowSupport::Finite(_))
    }

    pub fn get(&self, k: usize) -> Rational {
        self.values.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    fn tail(&self, i: usize) -> Rational {
        self.tails.get(i).cloned().unwrap_or_else(Rational::zero)
    }
}

/// `A` with its rows lazily transformed; rows are memoized, and concurrent
/// readers of the same row may both compute it before one insert wins.
pub struct HatMatrix {
    a: Arc<dyn RowSource>,
    lambda: LambdaSeq,
    window: usize,
    coeffs: DashMap<usize, Arc<(Rational, Rational)>>,
    rows: DashMap<usize, Arc<HatRow>>,
}

impl HatMatrix {
    /// `window` bounds rows and columns of unknown extent.
    pub fn new(a: Arc<dyn RowSource>, lambda: &LambdaSeq, window: usize) -> Self {
        HatMatrix {
            a,
            lambda: lambda.clone(),
            window: window.max(1),
            coeffs: DashMap::new(),
            rows: DashMap::new(),
        }
    }

    pub fn source(&self) -> &dyn RowSource {
        self.a.as_ref()
    }

    pub fn source_arc(&self) -> Arc<dyn RowSource> {
        self.a.clone()
    }

    pub fn lambda(&self) -> &LambdaSeq {
        &self.lambda
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Rows from here on vanish, when known.
    pub fn row_count(&self) -> Option<usize> {
        self.a.row_count()
    }

    /// Rows examined: all of them when finitely many, else the window.
    pub fn rows_in_scope(&self) -> usize {
        self.row_count().unwrap_or(self.window)
    }

    /// Finitely many rows, each finitely supported: every criterion is
    /// then finitely determined.
    pub fn is_finite(&self) -> bool {
        match self.row_count() {
            Some(r) => self.a.every_row_finite() || (0..r).all(|n| self.a.row_support(n).is_some()),
            None => false,
        }
    }

    /// `g_kk`, the factor on `a_nk` in `ehat_nk`.
    pub fn diagonal_factor(&self, k: usize) -> Rational {
        self.coeff(k).0.clone()
    }

    /// `(g_kk, G_k)`
    fn coeff(&self, k: usize) -> Arc<(Rational, Rational)> {
        if let Some(c) = self.coeffs.get(&k) {
            return c.clone();
        }
        let c = Arc::new((
            fib_sq(k + 1) * g_column_factor(&self.lambda, k, true),
            g_column_factor(&self.lambda, k, false),
        ));
        self.coeffs.insert(k, c.clone());
        c
    }

    pub fn row(&self, n: usize) -> Result<Arc<HatRow>> {
        if let Some(r) = self.rows.get(&n) {
            return Ok(r.clone());
        }
        let row = Arc::new(self.compute_row(n)?);
        self.rows.insert(n, row.clone());
        Ok(row)
    }

    /// Rows `0..count`.
    pub fn rows(&self, count: usize, exec: Exec) -> Result<Vec<Arc<HatRow>>> {
        exec.try_map(count, |n| self.row(n))
    }

    fn compute_row(&self, n: usize) -> Result<HatRow> {
        if self.row_count().is_some_and(|r| n >= r) {
            return Ok(HatRow {
                values: Vec::new(),
                tails: Vec::new(),
                weight_sum: 0.0,
                support: RowSupport::Finite(0),
            });
        }
        let (width, support) = match self.a.row_support(n) {
            Some(s) => (s, None),
            None => (self.window, Some(())),
        };
        let a = self.a.row_prefix(n, width);
        let weighted: Vec<Rational> = a
            .iter()
            .enumerate()
            .map(|(j, v)| if v.is_zero() { Rational::zero() } else { fib_sq(j + 1) * v })
            .collect();
        let weight_sum = weighted.iter().map(|w| rational_to_f64(w).abs()).sum();
        let support = match support {
            None => RowSupport::Finite(width),
            Some(()) => {
                let mut acc = 0.0;
                let sweep: Vec<(usize, f64)> = weighted
                    .iter()
                    .enumerate()
                    .map(|(j, w)| {
                        acc += rational_to_f64(w).abs();
                        (j + 1, acc)
                    })
                    .collect();
                let verdict = classify_bounded(sweep[sweep.len().min(3)..].to_vec());
                if verdict.status == Status::EvidenceDiverging {
                    return Err(Error::RowSeriesDivergent(n));
                }
                RowSupport::Truncated(verdict)
            }
        };
        let mut tails = vec![Rational::zero(); width];
        let mut acc = Rational::zero();
        for i in (0..width).rev() {
            tails[i] = acc.clone();
            acc += &weighted[i];
        }
        let values = (0..width)
            .map(|k| {
                let c = self.coeff(k);
                &c.0 * &a[k] + &c.1 * &tails[k]
            })
            .collect();
        Ok(HatRow {
            values,
            tails,
            weight_sum,
            support,
        })
    }

    /// `ehat_nk`; exact when row `n` is finitely supported.
    pub fn ehat(&self, n: usize, k: usize) -> Result<Rational> {
        Ok(self.row(n)?.get(k))
    }

    /// `ehat_nk(m) = g_kk a_nk + G_k sum_{j=k+1..m} f_(j+1)^2 a_nj` for `k < m`,
    /// and 0 for `k >= m`.
    pub fn ehat_partial(&self, n: usize, k: usize, m: usize) -> Result<Rational> {
        if k >= m {
            return Ok(Rational::zero());
        }
        let row = self.row(n)?;
        let c = self.coeff(k);
        Ok(row.get(k) - &c.1 * row.tail(m))
    }

    /// `ehat_nk(m) - ehat_nk` without recomputing the row.
    pub(crate) fn partial_gap(&self, row: &HatRow, k: usize, m: usize) -> Rational {
        if k >= m {
            return -row.get(k);
        }
        -(&self.coeff(k).1 * row.tail(m))
    }

    /// Row `n` of `A` itself, on its support (or the window).
    pub fn source_row(&self, n: usize) -> Vec<Rational> {
        let width = self.a.row_support(n).unwrap_or(self.window);
        self.a.row_prefix(n, width)
    }
}

/// `ehat_nk`, or `ehat_nk(m)` when `m` is given.
pub fn ehat(a: Arc<dyn RowSource>, l: &LambdaSeq, n: usize, k: usize, m: Option<usize>, window: usize) -> Result<Rational> {
    let h = HatMatrix::new(a, l, window);
    match m {
        Some(m) => h.ehat_partial(n, k, m),
        None => h.ehat(n, k),
    }
}

/// `sum_k |v_k|`
pub(crate) fn abs_sum(v: &[Rational]) -> Rational {
    v.iter().map(Signed::abs).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};
    use crate::matrices::{make_E, make_E_inverse, Triangle, WindowMatrix};
    use proptest::prelude::*;

    fn lin() -> LambdaSeq {
        "linear:1,1".parse().unwrap()
    }

    #[test]
    fn identity_gives_inverse_diagonal() {
        let h = HatMatrix::new(Arc::new(Triangle::identity()), &lin(), 16);
        assert_eq!(h.ehat(1, 1).unwrap(), rat(4));
        let inv = make_E_inverse(&lin());
        for n in 0..8 {
            for k in 0..=n {
                assert_eq!(h.ehat(n, k).unwrap(), inv.entry(n, k));
            }
        }
    }

    #[test]
    fn single_row_and_zero() {
        let a = Arc::new(WindowMatrix::new(vec![vec![rat(1)]]));
        let h = HatMatrix::new(a, &lin(), 8);
        assert_eq!(h.ehat(0, 0).unwrap(), rat(1));
        assert_eq!(h.ehat(0, 3).unwrap(), rat(0));
        assert_eq!(h.ehat(5, 0).unwrap(), rat(0));
        assert!(h.is_finite());
        let z = HatMatrix::new(Arc::new(Triangle::zero()), &lin(), 8);
        assert_eq!(z.ehat(3, 1).unwrap(), rat(0));
    }

    #[test]
    fn e_transforms_to_identity() {
        let l: LambdaSeq = "geometric:2,1".parse().unwrap();
        let h = HatMatrix::new(Arc::new(make_E(&l)), &l, 16);
        for n in 0..12 {
            for k in 0..=n {
                assert_eq!(h.ehat(n, k).unwrap(), rat((n == k) as i64));
            }
        }
    }

    #[test]
    fn partials_reach_the_full_value() {
        let a = Arc::new(WindowMatrix::new(vec![vec![rat(1), rat(-2), ratio(1, 3), rat(5)]]));
        let h = HatMatrix::new(a, &lin(), 8);
        for k in 0..4 {
            assert_eq!(h.ehat_partial(0, k, 4).unwrap(), h.ehat(0, k).unwrap());
            assert_eq!(h.ehat_partial(0, k, k).unwrap(), rat(0));
        }
        let row = h.row(0).unwrap();
        for m in 0..5 {
            for k in 0..4 {
                assert_eq!(
                    h.partial_gap(&row, k, m),
                    h.ehat_partial(0, k, m).unwrap() - h.ehat(0, k).unwrap()
                );
            }
        }
    }

    /// An infinite row whose weighted series diverges.
    struct Ones;

    impl RowSource for Ones {
        fn entry(&self, _: usize, _: usize) -> Rational {
            rat(1)
        }
        fn row_support(&self, _: usize) -> Option<usize> {
            None
        }
        fn row_count(&self) -> Option<usize> {
            Some(1)
        }
        fn describe(&self) -> String {
            "ones".into()
        }
    }

    #[test]
    fn divergent_row_series_is_reported() {
        let h = HatMatrix::new(Arc::new(Ones), &lin(), 24);
        assert_eq!(h.ehat(0, 0).unwrap_err(), Error::RowSeriesDivergent(0));
        assert!(!h.is_finite());
    }

    fn arb_rows() -> impl Strategy<Value = Vec<Vec<Rational>>> {
        proptest::collection::vec(
            proptest::collection::vec((-9i64..9, 1i64..4).prop_map(|(n, d)| ratio(n, d)), 0..16),
            1..16,
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]

        /// `ehat_nk` is the `k`-th coefficient of row `n` of `A E^-1`.
        #[test]
        fn matches_pairing_with_inverse(rows in arb_rows()) {
            let l = lin();
            let inv = make_E_inverse(&l);
            let h = HatMatrix::new(Arc::new(WindowMatrix::new(rows.clone())), &l, 16);
            for (n, row) in rows.iter().enumerate() {
                for k in 0..16 {
                    let direct: Rational = row.iter().enumerate().skip(k).map(|(j, a)| a * inv.entry(j, k)).sum();
                    prop_assert_eq!(h.ehat(n, k).unwrap(), direct);
                }
            }
        }
    }
}
