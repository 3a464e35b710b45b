//! Fibonacci numbers with `f_0 = f_1 = 1`, memoized process-wide.

use num_bigint::BigInt;
use num_traits::One;
use once_cell::sync::Lazy;
use parking_lot::RwLock;

use crate::arith::Rational;

static CACHE: Lazy<RwLock<Vec<BigInt>>> =
    Lazy::new(|| RwLock::new(vec![BigInt::one(), BigInt::one()]));

/// `f_n` under the indexing `f_0 = f_1 = 1`.
pub fn fib(n: usize) -> BigInt {
    {
        let cache = CACHE.read();
        if let Some(v) = cache.get(n) {
            return v.clone();
        }
    }
    let mut cache = CACHE.write();
    // another writer may have extended the table while we waited
    while cache.len() <= n {
        let len = cache.len();
        let next = &cache[len - 1] + &cache[len - 2];
        cache.push(next);
    }
    cache[n].clone()
}

pub fn fib_rational(n: usize) -> Rational {
    Rational::from_integer(fib(n))
}

/// `f_n / f_(n+1)`
pub fn fib_ratio(n: usize) -> Rational {
    Rational::new(fib(n), fib(n + 1))
}

/// `f_(n-1) f_(n+1) - f_n^2`, which Cassini's identity puts at `(-1)^(n+1)`.
pub fn cassini(n: usize) -> BigInt {
    assert!(n >= 1, "Cassini form needs n >= 1");
    fib(n - 1) * fib(n + 1) - fib(n) * fib(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_values() {
        let v: Vec<u64> = (0..10).map(|n| fib(n).try_into().unwrap()).collect();
        assert_eq!(v, [1, 1, 2, 3, 5, 8, 13, 21, 34, 55]);
        assert_eq!(fib(5), BigInt::from(8));
    }

    #[test]
    fn cassini_small() {
        // f_2 f_4 - f_3^2 = 2*5 - 9
        assert_eq!(cassini(3), BigInt::one());
        for n in 1..=200usize {
            let expected = if n % 2 == 1 { BigInt::one() } else { -BigInt::one() };
            assert_eq!(cassini(n), expected, "n = {n}");
        }
    }

    #[test]
    fn concurrent_extension_is_consistent() {
        let handles: Vec<_> = (0..8)
            .map(|t| std::thread::spawn(move || fib(300 + 7 * t)))
            .collect();
        let got: Vec<BigInt> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        for (t, v) in got.iter().enumerate() {
            let n = 300 + 7 * t;
            assert_eq!(v, &(fib(n - 1) + fib(n - 2)));
        }
    }
}
