//! Exact scalars and function rings in the zero-mode symbols `x1..xN`.

mod function;
mod poly;
pub mod rational;

pub use function::{series_inverse, series_log, FunctionElem, Mode};
pub use poly::{Exp, Poly};
pub use rational::Rational;

use num_traits::Zero;

use crate::linalg;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoeffError {
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("coefficient mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("truncation underflow: series known only through order {order}")]
    TruncationUnderflow { order: i64 },
    #[error("coordinate change not invertible: {0}")]
    NotInvertibleChange(String),
}

/// Jacobian matrix `∂g^i/∂x_j`.
pub fn jacobian(g: &[FunctionElem]) -> Vec<Vec<FunctionElem>> {
    let n = g.len();
    g.iter()
        .map(|gi| (0..n).map(|j| gi.partial(j)).collect())
        .collect()
}

/// Inverse `f` of the change `x -> g(x)` through total degree `d`, so that
/// `g(f(y)) = y` and `f(g(x)) = x` modulo degree `d + 1`.
pub fn compose_and_invert(g: &[FunctionElem], d: u32) -> Result<Vec<FunctionElem>, CoeffError> {
    let n = g.len();
    let gs: Vec<FunctionElem> = g
        .iter()
        .map(|gi| gi.expand(d))
        .collect::<Result<_, _>>()?;
    for gi in &gs {
        if !gi.constant_term()?.is_zero() {
            return Err(CoeffError::NotInvertibleChange(
                "the change must fix the origin".into(),
            ));
        }
    }
    let lin: Vec<Vec<Rational>> = gs
        .iter()
        .map(|gi| {
            (0..n)
                .map(|j| gi.numerator().coeff(&Exp::var(j)))
                .collect()
        })
        .collect();
    let ainv = linalg::inverse(&lin)
        .ok_or_else(|| CoeffError::NotInvertibleChange("singular Jacobian at the origin".into()))?;
    let higher: Vec<FunctionElem> = gs
        .iter()
        .zip(&lin)
        .map(|(gi, row)| {
            let mut p = gi.numerator().clone();
            for (j, c) in row.iter().enumerate() {
                p.add_term(Exp::var(j), -c.clone());
            }
            FunctionElem::series(p, d)
        })
        .collect();
    let y: Vec<FunctionElem> = (0..n).map(|i| FunctionElem::series(Poly::var(i), d)).collect();
    let apply_ainv = |v: &[FunctionElem]| -> Vec<FunctionElem> {
        (0..n)
            .map(|i| {
                (0..n).fold(FunctionElem::series(Poly::zero(), d), |acc, j| {
                    &acc + &v[j].scale(&ainv[i][j])
                })
            })
            .collect()
    };
    let mut f = apply_ainv(&y);
    for _ in 1..d {
        let hf: Vec<FunctionElem> = higher
            .iter()
            .map(|h| h.compose(&f))
            .collect::<Result<_, _>>()?;
        let rhs: Vec<FunctionElem> = y.iter().zip(&hf).map(|(a, b)| a - b).collect();
        f = apply_ainv(&rhs);
    }
    for (i, gi) in gs.iter().enumerate() {
        if !gi.compose(&f)?.agrees_with(&y[i])? {
            return Err(CoeffError::NotInvertibleChange("back-substitution failed".into()));
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests;
