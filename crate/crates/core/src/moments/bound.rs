//! Fourth central moment bound `T((t-x)^4; x) ≤ M (x^4+x^3+x^2+x+1)/N^2`
//! with `M = max_i A_i`.

use crate::basis::OperatorParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourthMomentCoefficients {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub bound_constant: f64,
}

impl FourthMomentCoefficients {
    pub fn new(params: &OperatorParams) -> Self {
        let n = f64::from(params.n);
        let (a, al, be) = (params.a, params.alpha, params.beta);
        let n2 = params.denom().powi(2);
        let n4 = n2 * n2;
        let a4 = ((3.0 - 12.0 * be + 12.0 * a) * n * n
            + (6.0 + 4.0 * be + 2.0 * be * be + 4.0 * be.powi(3) + 8.0 * a + 6.0 * a * a) * n
            + be.powi(4)
            - 4.0 * a * be.powi(3)
            + 6.0 * a * a * be * be
            - 4.0 * a.powi(3) * be
            + a.powi(4))
            / n2;
        let a3 = ((6.0 - 12.0 * a - 12.0 * be * al + 12.0 * a) * n * n
            + (13.0 + 8.0 * al - 18.0 * be + 12.0 * a * be + 9.0 * be * be + 18.0 * a + 6.0 * a * a) * n
            - 4.0 * be.powi(3) * al
            - 2.0 * be * be)
            / n2
            + ((6.0 * a * (1.0 + 2.0 * al) * be * be - 12.0 * a * a + 12.0 * al * a * a) * be + 6.0 * a.powi(3) + 4.0 * al * a.powi(3)) / n4;
        let a2 = (11.0 - 18.0 * al + 18.0 * al * al) * n * n / n2
            + ((15.0 + 18.0 * al + 14.0 * a + 24.0 * al * a - 24.0 * al * be - 6.0 * a * al * al) * n
                + 12.0 * al * al * be * be
                + 2.0 * be * be
                - (6.0 * a + 18.0 * al * al * a) * be
                + 7.0 * a * a
                + 12.0 * a * a * al)
                / n2;
        let a1 = ((6.0 + 10.0 * al + 5.0 * al * al) * n - 4.0 * be * (al.powi(3) + 1.5 * al * al + al)
            + a
            + 4.0 * al * a
            + 6.0 * al * al * a
            + 6.0 * al.powi(3) * a)
            / n2;
        let bound_constant = a1.max(a2).max(a3).max(a4);
        FourthMomentCoefficients { a1, a2, a3, a4, bound_constant }
    }

    /// `(A_1, A_2, A_3, A_4)` as `n → ∞`.
    pub fn limits(a: f64, alpha: f64, beta: f64) -> [f64; 4] {
        [
            0.0,
            11.0 - 18.0 * alpha + 18.0 * alpha * alpha,
            6.0 - 12.0 * beta * alpha,
            3.0 - 12.0 * beta + 12.0 * a,
        ]
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.a1, self.a2, self.a3, self.a4]
    }
}

/// `(bound, coefficients)` at the given `n`.
pub fn fourth_moment_bound(params: &OperatorParams, x: f64) -> (f64, FourthMomentCoefficients) {
    let coeffs = FourthMomentCoefficients::new(params);
    let poly = x.powi(4) + x.powi(3) + x * x + x + 1.0;
    (coeffs.bound_constant * poly / params.denom().powi(2), coeffs)
}

/// `sup_{n_min ≤ n ≤ n_max} max_i A_i` over a log-spaced grid of `n`
/// (every integer below 64, then 32 points per decade).
pub fn uniform_bound_constant(a: f64, alpha: f64, beta: f64, n_min: u32, n_max: u32) -> Result<f64> {
    if n_min == 0 || n_min > n_max {
        return Err(Error::InvalidArgument(format!("need 1 <= n_min <= n_max, got {n_min}..{n_max}")));
    }
    let mut ns: Vec<u32> = (n_min..=n_max.min(63)).collect();
    let (lo, hi) = (f64::from(n_min.max(64)).log10(), f64::from(n_max).log10());
    if hi >= lo {
        let steps = ((hi - lo) * 32.0).ceil().max(1.0) as u32;
        for i in 0..=steps {
            let n = 10f64.powf(lo + (hi - lo) * f64::from(i) / f64::from(steps)).round() as u32;
            ns.push(n.clamp(n_min, n_max));
        }
    }
    ns.dedup();
    let mut sup = f64::NEG_INFINITY;
    for n in ns {
        let params = OperatorParams::new_relaxed(n, a, alpha, beta)?;
        sup = sup.max(FourthMomentCoefficients::new(&params).bound_constant);
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_coefficients() {
        let params = OperatorParams::new(100, 0.0, 0.0, 0.0).unwrap();
        let c = FourthMomentCoefficients::new(&params);
        assert!((c.a4 - (3.0 * 1e4 + 600.0) / 1e4).abs() < 1e-15);
        assert!((c.a2 - (11.0 + 15.0 / 100.0)).abs() < 1e-14);
        let (bound, c) = fourth_moment_bound(&params, 0.0);
        assert!((bound - c.bound_constant / 1e4).abs() < 1e-18);
    }

    #[test]
    fn coefficients_approach_limits() {
        for &(a, al, be) in &[(0.0, 0.0, 0.0), (1.0, 1.0, 2.0), (2.0, 1.0, 3.0)] {
            let params = OperatorParams::new(1_000_000, a, al, be).unwrap();
            let got = FourthMomentCoefficients::new(&params).as_array();
            let lim = FourthMomentCoefficients::limits(a, al, be);
            for i in 0..4 {
                assert!((got[i] - lim[i]).abs() <= 0.01 * lim[i].abs().max(1.0), "A{} {} vs {}", i + 1, got[i], lim[i]);
            }
        }
    }

    #[test]
    fn uniform_constant_covers_each_n() {
        let sup = uniform_bound_constant(1.0, 1.0, 2.0, 5, 10_000).unwrap();
        for n in [5, 17, 63, 10_000] {
            let params = OperatorParams::new(n, 1.0, 1.0, 2.0).unwrap();
            assert!(FourthMomentCoefficients::new(&params).bound_constant <= sup);
        }
    }
}
