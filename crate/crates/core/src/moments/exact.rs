//! Moments derived from the distribution of the basis weights.
//!
//! `W_{n,k}^a(x)` is the law of `k = X + Y` with `X` negative binomial
//! (size `n`, mean `nx`) and `Y` Poisson with mean `λ = a x/(1+x)`, so
//! `L((t-y)^j; x) = E[(k + α - N y)^j] / N^j`. Central moments of `k` come
//! from its cumulants, and `T` follows from exact integration of
//! `(t-y)^m` over each interval:
//! `T((t-y)^m) = Σ_j C(m,j) / ((m-j+1) N^{m-j}) · L((t-y)^j)`.

use crate::basis::OperatorParams;
use crate::error::{Error, Result};
use crate::special::binomial;

/// Highest order supported by the cumulant tables.
pub const MAX_ORDER: u32 = 4;

fn check_order(order: u32) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::InvalidArgument(format!("moment order {order} exceeds {MAX_ORDER}")));
    }
    Ok(())
}

/// Central moments `μ_0..μ_4` of `k`.
fn central_moments_of_k(params: &OperatorParams, x: f64) -> [f64; 5] {
    let n = f64::from(params.n);
    let lambda = params.a * x / (1.0 + x);
    let k2 = n * x * (1.0 + x) + lambda;
    let k3 = n * x * (1.0 + x) * (1.0 + 2.0 * x) + lambda;
    let k4 = n * x * (1.0 + x) * (1.0 + 6.0 * x + 6.0 * x * x) + lambda;
    [1.0, 0.0, k2, k3, k4 + 3.0 * k2 * k2]
}

/// `E[(k + α - N y)^j]` for `j = 0..=4` with the offset `d = E[k] + α - N y`.
fn shifted_moments(mu: &[f64; 5], d: f64) -> [f64; 5] {
    let mut out = [0.0; 5];
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = (0..=j).map(|i| binomial(j as u32, i as u32) * mu[i] * d.powi((j - i) as i32)).sum();
    }
    out
}

/// Offset `E[k] + α - N y`, written without cancellation when `y = x`.
fn offset(params: &OperatorParams, x: f64, center: f64) -> f64 {
    let n = f64::from(params.n);
    let lambda = params.a * x / (1.0 + x);
    if center == x {
        lambda + params.alpha - params.beta * x
    } else {
        n * x + lambda + params.alpha - params.denom() * center
    }
}

/// `L((t-y)^j; x)` for `j = 0..=4`.
fn l_about(params: &OperatorParams, x: f64, center: f64) -> [f64; 5] {
    let mu = central_moments_of_k(params, x);
    let e = shifted_moments(&mu, offset(params, x, center));
    let big_n = params.denom();
    let mut out = [0.0; 5];
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = e[j] / big_n.powi(j as i32);
    }
    out
}

/// Interval-shift identity: `T((t-y)^m)` from `L((t-y)^j)`, `j ≤ m`.
pub fn t_from_l(l: &[f64], m: u32, big_n: f64) -> f64 {
    (0..=m)
        .map(|j| {
            let gap = m - j;
            binomial(m, j) / (f64::from(gap + 1) * big_n.powi(gap as i32)) * l[j as usize]
        })
        .sum()
}

/// `L(t^m; x)`.
pub fn raw_moment_l(params: &OperatorParams, order: u32, x: f64) -> Result<f64> {
    check_order(order)?;
    Ok(l_about(params, x, 0.0)[order as usize])
}

/// `T(t^m; x)`.
pub fn raw_moment_t(params: &OperatorParams, order: u32, x: f64) -> Result<f64> {
    check_order(order)?;
    Ok(t_from_l(&l_about(params, x, 0.0), order, params.denom()))
}

/// `L((t-x)^m; x)`.
pub fn central_moment_l(params: &OperatorParams, order: u32, x: f64) -> Result<f64> {
    check_order(order)?;
    Ok(l_about(params, x, x)[order as usize])
}

/// `T((t-x)^m; x)`.
pub fn central_moment_t(params: &OperatorParams, order: u32, x: f64) -> Result<f64> {
    check_order(order)?;
    Ok(t_from_l(&l_about(params, x, x), order, params.denom()))
}

/// `T((t-x)^m; x) = Σ_j C(m,j) (-x)^{m-j} T(t^j; x)`. Algebraically equal
/// to [`central_moment_t`] but loses digits to cancellation for large `x`.
pub fn central_moment_t_by_expansion(params: &OperatorParams, order: u32, x: f64) -> Result<f64> {
    check_order(order)?;
    let l = l_about(params, x, 0.0);
    let big_n = params.denom();
    Ok((0..=order)
        .map(|j| binomial(order, j) * (-x).powi((order - j) as i32) * t_from_l(&l, j, big_n))
        .sum())
}

/// Shift of `T` away from the identity,
/// `T(t; x) - x = -β x/N + a/N · x/(1+x) + (2α+1)/(2N)`.
pub fn first_moment_shift(params: &OperatorParams, x: f64) -> f64 {
    let big_n = params.denom();
    (-params.beta * x + params.a * x / (1.0 + x) + params.alpha + 0.5) / big_n
}
