//! Infinite lower-triangular matrices as lazily evaluated entry oracles.

mod dense;
mod json;
mod transform;

pub use dense::{triangle_invert, triangle_invert_with, triangle_solve, DenseWindow};
pub use json::{parse_matrix_json, read_matrix_file, RowSource, WindowMatrix};
pub use transform::{
    basis_vector, forward_transform, forward_transform_real, inverse_transform,
    inverse_transform_real,
};

use std::fmt;
use std::sync::Arc;

use dashmap::DashMap;
use num_traits::{One, Zero};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::sequences::{fib_rational, LambdaSeq, Provenance, SeqWindow};

type Oracle = Arc<dyn Fn(usize, usize) -> Rational + Send + Sync>;

#[derive(Clone)]
enum Backing {
    Zero,
    Identity,
    Lambda(LambdaSeq),
    FHat,
    E(LambdaSeq),
    EInverse(LambdaSeq),
    Compose(Triangle, Triangle),
    Dense(Arc<DenseWindow>, bool),
    Oracle(Oracle),
}

struct Inner {
    backing: Backing,
    name: String,
    memo: DashMap<(usize, usize), Rational>,
}

/// A lower-triangular infinite matrix. Cloning shares the memo table.
#[derive(Clone)]
pub struct Triangle {
    inner: Arc<Inner>,
}

impl fmt::Debug for Triangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Triangle({})", self.inner.name)
    }
}

impl Triangle {
    fn from_backing(backing: Backing, name: String) -> Self {
        Triangle {
            inner: Arc::new(Inner {
                backing,
                name,
                memo: DashMap::new(),
            }),
        }
    }

    pub fn zero() -> Self {
        Self::from_backing(Backing::Zero, "zero".into())
    }

    pub fn identity() -> Self {
        Self::from_backing(Backing::Identity, "identity".into())
    }

    /// A finite window; rows past it are zero when `tail_zero`, otherwise
    /// undefined and rejected by [`triangle_apply`].
    pub fn from_dense(window: DenseWindow, tail_zero: bool) -> Self {
        let name = format!("dense[{}]", window.size());
        Self::from_backing(Backing::Dense(Arc::new(window), tail_zero), name)
    }

    /// Entries from a closure; values above the diagonal are ignored.
    pub fn from_fn(
        name: impl Into<String>,
        f: impl Fn(usize, usize) -> Rational + Send + Sync + 'static,
    ) -> Self {
        Self::from_backing(Backing::Oracle(Arc::new(f)), name.into())
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    /// Rows with index `>= defined_rows()` are not available.
    pub fn defined_rows(&self) -> Option<usize> {
        match &self.inner.backing {
            Backing::Dense(w, false) => Some(w.size()),
            Backing::Compose(a, b) => match (a.defined_rows(), b.defined_rows()) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            },
            _ => None,
        }
    }

    /// Entries with `n - k` larger than this vanish.
    pub fn lower_bandwidth(&self) -> Option<usize> {
        match &self.inner.backing {
            Backing::Zero | Backing::Identity => Some(0),
            Backing::FHat => Some(1),
            Backing::Compose(a, b) => Some(a.lower_bandwidth()? + b.lower_bandwidth()?),
            _ => None,
        }
    }

    /// Number of leading rows that may be nonzero, when finite.
    pub fn nonzero_rows(&self) -> Option<usize> {
        match &self.inner.backing {
            Backing::Zero => Some(0),
            Backing::Dense(w, true) => Some(w.nonzero_rows()),
            Backing::Compose(a, _) => a.nonzero_rows(),
            _ => None,
        }
    }

    pub fn entry(&self, n: usize, k: usize) -> Rational {
        if k > n {
            return Rational::zero();
        }
        match &self.inner.backing {
            Backing::Zero => Rational::zero(),
            Backing::Identity => {
                if n == k {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }
            Backing::FHat => fhat_entry(n, k),
            Backing::Dense(w, _) => {
                if n < w.size() {
                    w.get(n, k).clone()
                } else {
                    Rational::zero()
                }
            }
            _ => {
                if let Some(v) = self.inner.memo.get(&(n, k)) {
                    return v.clone();
                }
                let v = self.compute(n, k);
                self.inner.memo.insert((n, k), v.clone());
                v
            }
        }
    }

    fn compute(&self, n: usize, k: usize) -> Rational {
        match &self.inner.backing {
            Backing::Lambda(l) => l.diff(k) / l.get(n),
            Backing::E(l) => e_entry(l, n, k),
            Backing::EInverse(l) => e_inverse_entry(l, n, k),
            Backing::Compose(a, b) => {
                let mut lo = k;
                let mut hi = n;
                if let Some(bw) = b.lower_bandwidth() {
                    hi = hi.min(k + bw);
                }
                if let Some(bw) = a.lower_bandwidth() {
                    lo = lo.max(n.saturating_sub(bw));
                }
                let mut acc = Rational::zero();
                for j in lo..=hi {
                    let x = a.entry(n, j);
                    if x.is_zero() {
                        continue;
                    }
                    acc += x * b.entry(j, k);
                }
                acc
            }
            Backing::Oracle(f) => f(n, k),
            _ => unreachable!("handled without memo"),
        }
    }

    /// The leading `size x size` block.
    pub fn window(&self, size: usize) -> DenseWindow {
        self.window_with(size, Exec::default())
    }

    pub fn window_with(&self, size: usize, exec: Exec) -> DenseWindow {
        let rows = exec.map(size, |n| (0..=n).map(|k| self.entry(n, k)).collect());
        DenseWindow::from_rows_unchecked(rows)
    }

    /// Row `n` restricted to columns `0..=n`.
    pub fn row(&self, n: usize) -> Vec<Rational> {
        (0..=n).map(|k| self.entry(n, k)).collect()
    }
}

fn fhat_entry(n: usize, k: usize) -> Rational {
    if n == k {
        crate::sequences::fib_ratio(n)
    } else if n == k + 1 {
        -(fib_rational(n + 1) / fib_rational(n))
    } else {
        Rational::zero()
    }
}

/// `(lambda_k - lambda_(k-1)) f_k/f_(k+1) - (lambda_(k+1) - lambda_k) f_(k+2)/f_(k+1)`,
/// the numerator shared by every sub-diagonal entry of column `k` of `E`.
pub(crate) fn e_column_coefficient(l: &LambdaSeq, k: usize) -> Rational {
    let fk = fib_rational(k);
    let fk1 = fib_rational(k + 1);
    let fk2 = fib_rational(k + 2);
    (l.diff(k) * fk - l.diff(k + 1) * fk2) / fk1
}

/// `(lambda_n - lambda_(n-1)) f_n / f_(n+1)`, the diagonal numerator of `E`.
pub(crate) fn e_diagonal_coefficient(l: &LambdaSeq, n: usize) -> Rational {
    l.diff(n) * crate::sequences::fib_ratio(n)
}

fn e_entry(l: &LambdaSeq, n: usize, k: usize) -> Rational {
    let num = if k == n {
        e_diagonal_coefficient(l, n)
    } else {
        e_column_coefficient(l, k)
    };
    num / l.get(n)
}

/// `lambda_k [1/((lambda_k - lambda_(k-1)) f_k f_(k+1)) - 1/((lambda_(k+1) - lambda_k) f_(k+1) f_(k+2))]`
/// for `k < n`, or the first term alone on the diagonal; multiply by `f_(n+1)^2`.
pub(crate) fn g_column_factor(l: &LambdaSeq, k: usize, diagonal: bool) -> Rational {
    let fk = fib_rational(k);
    let fk1 = fib_rational(k + 1);
    let first = Rational::one() / (l.diff(k) * &fk * &fk1);
    let bracket = if diagonal {
        first
    } else {
        let fk2 = fib_rational(k + 2);
        first - Rational::one() / (l.diff(k + 1) * &fk1 * fk2)
    };
    l.get(k) * bracket
}

pub(crate) fn fib_sq(n: usize) -> Rational {
    let f = fib_rational(n);
    &f * &f
}

fn e_inverse_entry(l: &LambdaSeq, n: usize, k: usize) -> Rational {
    fib_sq(n + 1) * g_column_factor(l, k, k == n)
}

/// `Lambda = (lambda_nk)` with `lambda_nk = (lambda_k - lambda_(k-1)) / lambda_n`.
pub fn make_lambda_matrix(l: &LambdaSeq) -> Triangle {
    Triangle::from_backing(Backing::Lambda(l.clone()), format!("Lambda({l})"))
}

/// The Fibonacci band matrix: `f_n/f_(n+1)` on the diagonal, `-f_(n+1)/f_n` below.
pub fn make_fhat() -> Triangle {
    Triangle::from_backing(Backing::FHat, "Fhat".into())
}

/// The closed form of `Lambda * Fhat`.
#[allow(non_snake_case)]
pub fn make_E(l: &LambdaSeq) -> Triangle {
    Triangle::from_backing(Backing::E(l.clone()), format!("E({l})"))
}

/// The closed form of `E^-1`.
#[allow(non_snake_case)]
pub fn make_E_inverse(l: &LambdaSeq) -> Triangle {
    Triangle::from_backing(Backing::EInverse(l.clone()), format!("E^-1({l})"))
}

/// `(AB)_nk = sum_{j=k..n} A_nj B_jk`, evaluated on demand.
pub fn triangle_compose(a: &Triangle, b: &Triangle) -> Triangle {
    let name = format!("{}*{}", a.name(), b.name());
    Triangle::from_backing(Backing::Compose(a.clone(), b.clone()), name)
}

/// `(Ax)_n = sum_{k<=n} a_nk x_k` for every index of the window.
pub fn triangle_apply(a: &Triangle, x: &SeqWindow) -> Result<SeqWindow> {
    triangle_apply_with(a, x, Exec::default())
}

pub fn triangle_apply_with(a: &Triangle, x: &SeqWindow, exec: Exec) -> Result<SeqWindow> {
    if let Some(rows) = a.defined_rows() {
        if rows < x.len() {
            return Err(Error::WindowMismatch {
                expected: rows,
                got: x.len(),
            });
        }
    }
    let xs = x.values();
    let values = exec.map(xs.len(), |n| {
        let mut acc = Rational::zero();
        for (k, xk) in xs.iter().enumerate().take(n + 1) {
            if xk.is_zero() {
                continue;
            }
            acc += a.entry(n, k) * xk;
        }
        acc
    });
    SeqWindow::new(
        values,
        Provenance::new(format!("{} applied to {}", a.name(), x.provenance())),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};

    fn lin() -> LambdaSeq {
        "linear:1,1".parse().unwrap()
    }

    #[test]
    fn lambda_matrix_examples() {
        let m = make_lambda_matrix(&lin());
        assert_eq!(m.entry(2, 1), ratio(1, 3));
        assert_eq!(m.entry(0, 0), rat(1));
        let g = make_lambda_matrix(&"geometric:3,2".parse().unwrap());
        for n in 0..=50 {
            let s: Rational = g.row(n).into_iter().sum();
            assert_eq!(s, rat(1), "row {n}");
        }
    }

    #[test]
    fn fhat_examples() {
        let f = make_fhat();
        assert_eq!(f.entry(1, 0), rat(-2));
        assert_eq!(f.entry(0, 0), rat(1));
        assert_eq!(f.entry(3, 1), rat(0));
        assert_eq!(f.entry(1, 2), rat(0));
    }

    #[test]
    fn e_examples() {
        let e = make_E(&lin());
        assert_eq!(e.entry(1, 0), ratio(-1, 2));
        assert_eq!(e.entry(1, 1), ratio(1, 4));
        let g = make_E_inverse(&lin());
        assert_eq!(g.entry(0, 0), rat(1));
        assert_eq!(g.entry(2, 0), ratio(9, 2));
    }

    #[test]
    fn composition_matches_closed_form() {
        for spec in ["linear:1,1", "linear:2,3", "geometric:2,1"] {
            let l: LambdaSeq = spec.parse().unwrap();
            let composed = triangle_compose(&make_lambda_matrix(&l), &make_fhat());
            assert_eq!(composed.window(40), make_E(&l).window(40), "{spec}");
        }
    }

    #[test]
    fn identity_composition() {
        let b = make_E(&lin());
        let left = triangle_compose(&Triangle::identity(), &b);
        assert_eq!(left.window(12), b.window(12));
        let product = triangle_compose(&b, &make_E_inverse(&lin()));
        assert!(product.window(40).is_identity());
    }

    #[test]
    fn e_image_of_first_unit_vector() {
        let l = lin();
        let mut e0 = vec![rat(0); 16];
        e0[0] = rat(1);
        let x = SeqWindow::new(e0, Provenance::new("unit:0")).unwrap();
        let y = triangle_apply(&make_E(&l), &x).unwrap();
        assert_eq!(y.values()[0], rat(1));
        for n in 1..16 {
            assert_eq!(y.values()[n], ratio(-1, n as i64 + 1));
        }
    }

    #[test]
    fn undefined_rows_are_rejected() {
        let w = DenseWindow::identity(3);
        let t = Triangle::from_dense(w.clone(), false);
        let x = SeqWindow::zeros(5).unwrap();
        assert_eq!(
            triangle_apply(&t, &x).unwrap_err(),
            Error::WindowMismatch { expected: 3, got: 5 }
        );
        let t = Triangle::from_dense(w, true);
        assert_eq!(triangle_apply(&t, &x).unwrap(), x_with_provenance(&t, &x));
    }

    fn x_with_provenance(t: &Triangle, x: &SeqWindow) -> SeqWindow {
        SeqWindow::new(
            x.values().to_vec(),
            Provenance::new(format!("{} applied to {}", t.name(), x.provenance())),
        )
        .unwrap()
    }

    #[test]
    fn triangularity_on_random_probes() {
        use rand::{Rng, SeedableRng};
        let l: LambdaSeq = "linear:2,3".parse().unwrap();
        let all = [
            make_lambda_matrix(&l),
            make_fhat(),
            make_E(&l),
            make_E_inverse(&l),
            triangle_compose(&make_E(&l), &make_fhat()),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let n = rng.gen_range(0..200);
            let k = rng.gen_range(n + 1..n + 300);
            for t in &all {
                assert!(t.entry(n, k).is_zero());
            }
        }
    }
}
