//! Every data-parallel kernel returns exactly what its sequential path does.

use std::sync::Arc;

use fibdomain::arith::{ratio, Exponent, Rational, DEFAULT_PRECISION};
use fibdomain::exec::{EvalOptions, Exec};
use fibdomain::matclass::{class_check, mnc_estimate, HatMatrix, Target};
use fibdomain::matrices::{make_E, triangle_invert_with, DenseWindow, RowSource, Triangle, WindowMatrix};
use fibdomain::sequences::LambdaSeq;
use fibdomain::subset::{subset_sup, SubsetStrategy};
use proptest::prelude::*;

fn lower(entries: &[(i64, i64)], n: usize) -> Vec<Vec<Rational>> {
    let mut it = entries.iter().cycle();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|k| match it.next() {
                    Some(&(a, b)) if k < i => ratio(a, b),
                    // keep the diagonal nonzero so the window inverts
                    Some(&(a, b)) if k == i => ratio(a.abs() + 1, b),
                    _ => ratio(0, 1),
                })
                .collect()
        })
        .collect()
}

fn both<T: PartialEq + std::fmt::Debug>(f: impl Fn(Exec) -> T) {
    assert_eq!(f(Exec::Parallel), f(Exec::Sequential));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dense_kernels(entries in proptest::collection::vec((-9i64..9, 1i64..6), 1..60), n in 1usize..12) {
        let a = DenseWindow::from_rows(lower(&entries, n)).unwrap();
        let t = Triangle::from_dense(a.clone(), true);
        both(|exec| a.matmul(&a, exec).unwrap());
        both(|exec| triangle_invert_with(&t, n, exec).unwrap());
        both(|exec| t.window_with(n, exec));
    }

    #[test]
    fn subset_search(entries in proptest::collection::vec((-9i64..9, 1i64..6), 1..60), seed in 0u64..4) {
        let rows = lower(&entries, 9);
        for q in [Exponent::integer(1), "3/2".parse().unwrap(), Exponent::Infinity] {
            both(|exec| subset_sup(&rows, &q, SubsetStrategy::Auto { seed }, DEFAULT_PRECISION, exec).unwrap().value);
            both(|exec| subset_sup(&rows, &q, SubsetStrategy::Heuristic { seed }, DEFAULT_PRECISION, exec).unwrap().value);
        }
    }
}

#[test]
fn transformed_rows_and_reports() {
    let l: LambdaSeq = "linear:2,3".parse().unwrap();
    let a: Arc<dyn RowSource> = Arc::new(WindowMatrix::new(lower(&[(3, 2), (-1, 4), (5, 3), (0, 1)], 10)));
    both(|exec| {
        let rows = HatMatrix::new(a.clone(), &l, 16).rows(10, exec).unwrap();
        rows.iter().map(|r| r.values.clone()).collect::<Vec<_>>()
    });
    let opts = |exec| EvalOptions { exec, ..EvalOptions::new(16) };
    let x = "lp:3/2".parse().unwrap();
    both(|exec| class_check(a.clone(), &l, &x, &Target::L1, opts(exec)).unwrap());
    let e: Arc<dyn RowSource> = Arc::new(make_E(&l));
    both(|exec| mnc_estimate(e.clone(), &l, &Exponent::integer(2), &Target::C0, 8, opts(exec)).unwrap());
}
