//! `y = Ex` and `x = E^-1 y` in linear time, plus the basis `b^(k)`.
//!
//! Every sub-diagonal entry of column `j` of `E` has the same numerator
//! `c_j`, so `y_k = (sum_{j<k} c_j x_j + d_k x_k) / lambda_k` is a prefix sum.
//! Likewise `E^-1 = Fhat^-1 Lambda^-1` where `Fhat^-1` has entries
//! `f_(n+1)^2 / (f_j f_(j+1))`, which makes the inverse a prefix sum too.

use num_traits::Zero;

use super::{e_column_coefficient, e_diagonal_coefficient, fib_sq, g_column_factor};
use crate::arith::{Rational, Real};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::sequences::{fib_rational, LambdaSeq, Provenance, SeqWindow};

struct ForwardCoefficients {
    column: Vec<Rational>,
    diagonal: Vec<Rational>,
    lambda: Vec<Rational>,
}

fn forward_coefficients(l: &LambdaSeq, n: usize, exec: Exec) -> Result<ForwardCoefficients> {
    let lambda = l.window(n)?;
    let column = exec.map(n, |j| e_column_coefficient(l, j));
    let diagonal = exec.map(n, |j| e_diagonal_coefficient(l, j));
    Ok(ForwardCoefficients {
        column,
        diagonal,
        lambda,
    })
}

/// `y = Ex`; agrees exactly with applying the matrix `E` entry by entry.
pub fn forward_transform(x: &SeqWindow, l: &LambdaSeq) -> Result<SeqWindow> {
    let values = forward_values(x.values(), l, Exec::default())?;
    SeqWindow::new(
        values,
        Provenance::new(format!("E({})", x.provenance().generator)).with_lambda(l),
    )
}

pub(crate) fn forward_values(x: &[Rational], l: &LambdaSeq, exec: Exec) -> Result<Vec<Rational>> {
    let c = forward_coefficients(l, x.len(), exec)?;
    let mut out = Vec::with_capacity(x.len());
    let mut acc = Rational::zero();
    for (k, xk) in x.iter().enumerate() {
        out.push((&acc + &c.diagonal[k] * xk) / &c.lambda[k]);
        acc += &c.column[k] * xk;
    }
    Ok(out)
}

pub fn forward_transform_real(x: &[Real], l: &LambdaSeq, precision: u32) -> Result<Vec<Real>> {
    let c = forward_coefficients(l, x.len(), Exec::default())?;
    let mut out = Vec::with_capacity(x.len());
    let mut acc = Real::zero(precision);
    for (k, xk) in x.iter().enumerate() {
        let inv = c.lambda[k].recip();
        out.push((&acc + &xk.scale(&c.diagonal[k])).scale(&inv));
        acc = &acc + &xk.scale(&c.column[k]);
    }
    Ok(out)
}

/// `(lambda_j y_j - lambda_(j-1) y_(j-1)) / ((lambda_j - lambda_(j-1)) f_j f_(j+1))`
/// split into its two coefficients.
fn inverse_weights(l: &LambdaSeq, n: usize) -> Result<Vec<(Rational, Rational)>> {
    let lambda = l.window(n)?;
    Ok((0..n)
        .map(|j| {
            let den = l.diff(j) * fib_rational(j) * fib_rational(j + 1);
            let prev = if j == 0 {
                Rational::zero()
            } else {
                &lambda[j - 1] / &den
            };
            (&lambda[j] / &den, prev)
        })
        .collect())
}

/// `x_k = sum_{j<=k} sum_{i=j-1..j} (-1)^(j-i) f_(k+1)^2 lambda_i y_i / ((lambda_j - lambda_(j-1)) f_j f_(j+1))`.
///
/// The inner double sum does not depend on `k` apart from `f_(k+1)^2`, so it
/// is accumulated once.
pub fn inverse_transform(y: &SeqWindow, l: &LambdaSeq) -> Result<SeqWindow> {
    let values = inverse_values(y.values(), l)?;
    SeqWindow::new(
        values,
        Provenance::new(format!("E^-1({})", y.provenance().generator)).with_lambda(l),
    )
}

pub(crate) fn inverse_values(y: &[Rational], l: &LambdaSeq) -> Result<Vec<Rational>> {
    let w = inverse_weights(l, y.len())?;
    let mut acc = Rational::zero();
    let mut out = Vec::with_capacity(y.len());
    for k in 0..y.len() {
        acc += &w[k].0 * &y[k];
        if k > 0 {
            acc -= &w[k].1 * &y[k - 1];
        }
        out.push(fib_sq(k + 1) * &acc);
    }
    Ok(out)
}

pub fn inverse_transform_real(y: &[Real], l: &LambdaSeq, precision: u32) -> Result<Vec<Real>> {
    let w = inverse_weights(l, y.len())?;
    let mut acc = Real::zero(precision);
    let mut out = Vec::with_capacity(y.len());
    for k in 0..y.len() {
        acc = &acc + &y[k].scale(&w[k].0);
        if k > 0 {
            acc = &acc - &y[k - 1].scale(&w[k].1);
        }
        out.push(acc.scale(&fib_sq(k + 1)));
    }
    Ok(out)
}

/// `b^(k)`: zero before index `k`, then column `k` of `E^-1`.
pub fn basis_vector(k: usize, l: &LambdaSeq, n: usize) -> Result<SeqWindow> {
    if k >= n {
        return Err(Error::IndexOutOfRange(format!(
            "basis index {k} outside a window of length {n}"
        )));
    }
    l.window(n)?;
    let on_diagonal = g_column_factor(l, k, true);
    let below = g_column_factor(l, k, false);
    let values = (0..n)
        .map(|i| match i.cmp(&k) {
            std::cmp::Ordering::Less => Rational::zero(),
            std::cmp::Ordering::Equal => fib_sq(i + 1) * &on_diagonal,
            std::cmp::Ordering::Greater => fib_sq(i + 1) * &below,
        })
        .collect();
    SeqWindow::new(values, Provenance::new(format!("basis:{k}")).with_lambda(l))
}
