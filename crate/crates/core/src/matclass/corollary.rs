//! The matrices `C` (and `C'`) whose classes into `l_p` mirror the classes
//! of `A` into the domain of `E`: `C = E A`, written out.

use num_traits::Zero;

use crate::arith::Rational;
use crate::matrices::{RowSource, WindowMatrix};
use crate::sequences::{fib_ratio, LambdaSeq};

/// `c_nk = (1/l_n) sum_{i<=n} (l_i - l_(i-1)) (f_i/f_(i+1) a_ik - f_(i+1)/f_i a_(i-1),k)`
/// on the leading `size x size` window.
pub fn corollary_c(a: &dyn RowSource, l: &LambdaSeq, size: usize) -> WindowMatrix {
    let rows = (0..size)
        .map(|k| {
            // column k, accumulated down the rows
            let mut acc = Rational::zero();
            let mut prev = Rational::zero();
            (0..size)
                .map(|i| {
                    let cur = a.entry(i, k);
                    let mut term = fib_ratio(i) * &cur;
                    if i > 0 && !prev.is_zero() {
                        term -= fib_ratio(i).recip() * &prev;
                    }
                    acc += l.diff(i) * term;
                    prev = cur;
                    &acc / l.get(i)
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>();
    let by_row = (0..size).map(|n| rows.iter().map(|col| col[n].clone()).collect()).collect();
    WindowMatrix::new(by_row).named(format!("C[{}]", a.describe()))
}

/// `C'`: the same construction with a second weight sequence.
pub fn corollary_c_prime(a: &dyn RowSource, l_prime: &LambdaSeq, size: usize) -> WindowMatrix {
    corollary_c(a, l_prime, size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};
    use crate::exec::Exec;
    use crate::matrices::{make_E, DenseWindow, Triangle};
    use proptest::prelude::*;

    fn lam(s: &str) -> LambdaSeq {
        s.parse().unwrap()
    }

    #[test]
    fn identity_gives_e() {
        let l = lam("linear:1,1");
        let c = corollary_c(&Triangle::identity(), &l, 24);
        let e = make_E(&l);
        for n in 0..24 {
            for k in 0..24 {
                assert_eq!(c.entry(n, k), e.entry(n, k), "({n}, {k})");
            }
        }
    }

    #[test]
    fn zero_gives_zero() {
        let c = corollary_c(&Triangle::zero(), &lam("linear:2,3"), 8);
        assert!(c.rows().iter().flatten().all(Zero::is_zero));
    }

    #[test]
    fn prime_uses_its_own_weights() {
        let a = Triangle::identity();
        let lp = lam("geometric:2,1");
        assert_eq!(corollary_c_prime(&a, &lp, 6).rows(), corollary_c(&a, &lp, 6).rows());
        assert_ne!(corollary_c_prime(&a, &lp, 6).rows(), corollary_c(&a, &lam("linear:1,1"), 6).rows());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn factors_through_e(entries in proptest::collection::vec((-9i64..9, 1i64..5), 136)) {
            let l = lam("linear:2,3");
            let mut it = entries.into_iter();
            let rows: Vec<Vec<Rational>> = (0..16)
                .map(|n| {
                    (0..16)
                        .map(|k| if k <= n { let (a, b) = it.next().unwrap(); ratio(a, b) } else { rat(0) })
                        .collect()
                })
                .collect();
            let a = DenseWindow::from_rows(rows).unwrap();
            let ea = make_E(&l).window(16).matmul(&a, Exec::Sequential).unwrap();
            let c = corollary_c(&Triangle::from_dense(a, true), &l, 16);
            for n in 0..16 {
                for k in 0..16 {
                    prop_assert_eq!(c.entry(n, k), ea.entry(n, k));
                }
            }
        }
    }
}
