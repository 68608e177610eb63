//! Weighted sup norms with `ρ(x) = 1 + x²` and the Korovkin-type
//! convergence table for the test functions `1, t, t²`.

use crate::basis::OperatorParams;
use crate::error::{Error, Result};
use crate::function::TestFunction;
use crate::moments::exact;

pub fn rho(x: f64) -> f64 {
    1.0 + x * x
}

/// Truncation of `[0, ∞)` used for weighted suprema.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedSpaceParams {
    pub x_max: f64,
    pub norm_grid_step: f64,
}

impl Default for WeightedSpaceParams {
    fn default() -> Self {
        WeightedSpaceParams { x_max: 1000.0, norm_grid_step: 0.01 }
    }
}

impl WeightedSpaceParams {
    pub fn new(x_max: f64, norm_grid_step: f64) -> Result<Self> {
        if !(x_max > 0.0 && norm_grid_step > 0.0 && norm_grid_step < x_max) {
            return Err(Error::InvalidArgument(format!("bad weighted grid: x_max={x_max}, step={norm_grid_step}")));
        }
        Ok(WeightedSpaceParams { x_max, norm_grid_step })
    }

    fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let count = (self.x_max / self.norm_grid_step * (1.0 + 1e-12)).floor() as usize;
        (0..=count).map(move |i| i as f64 * self.norm_grid_step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedNorm {
    pub value: f64,
    pub argmax: f64,
    /// `|f(X_max)| / ρ(X_max)`, the ratio at the truncation point; for
    /// `f ∈ C_ρ^k` it approximates `|k|`, the limit the tail tends to.
    pub boundary_ratio: f64,
}

/// `sup |g(x)| / ρ(x)` over the grid, for any real map.
pub fn weighted_sup<G: Fn(f64) -> f64>(g: G, space: &WeightedSpaceParams) -> WeightedNorm {
    let mut best = WeightedNorm { value: 0.0, argmax: 0.0, boundary_ratio: 0.0 };
    for x in space.points() {
        let r = g(x).abs() / rho(x);
        if r > best.value {
            best.value = r;
            best.argmax = x;
        }
    }
    best.boundary_ratio = g(space.x_max).abs() / rho(space.x_max);
    best
}

/// `‖f‖_ρ`.
pub fn weighted_norm(f: &TestFunction, space: &WeightedSpaceParams) -> Result<f64> {
    Ok(weighted_norm_detailed(f, space)?.value)
}

pub fn weighted_norm_detailed(f: &TestFunction, space: &WeightedSpaceParams) -> Result<WeightedNorm> {
    if !f.growth.within_rho() {
        return Err(Error::NotInWeightedSpace(format!("{} grows faster than 1 + x^2", f.name())));
    }
    Ok(weighted_sup(|x| f.eval(x), space))
}

/// `T(t^i; x) - x^i` for `i ≤ 2`, assembled from central moments so that
/// no large terms cancel.
pub fn test_function_deviation(params: &OperatorParams, i: u32, x: f64) -> Result<f64> {
    match i {
        0 => Ok(exact::raw_moment_t(params, 0, x)? - 1.0),
        1 => exact::central_moment_t(params, 1, x),
        2 => Ok(exact::central_moment_t(params, 2, x)? + 2.0 * x * exact::central_moment_t(params, 1, x)?),
        _ => Err(Error::InvalidArgument(format!("test function t^{i} is not part of the table"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub i: u32,
    pub norms: Vec<(u32, f64)>,
    /// Least-squares slope of `ln ‖·‖_ρ` against `ln n`; `None` when every
    /// norm is exactly zero.
    pub slope: Option<f64>,
}

/// Decay of one convergence row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayCheck {
    /// Norms never increase along the sweep, up to rounding.
    pub monotone: bool,
    /// Last norm over first norm; 0 for an identically zero row.
    pub ratio: f64,
    pub passes: bool,
}

/// Relative slack allowed between consecutive norms.
const MONOTONE_SLACK: f64 = 1e-12;

impl ConvergenceRow {
    /// Requires non-increasing norms and a last norm at most `factor` times
    /// the first. A row that is zero throughout passes.
    pub fn decay(&self, factor: f64) -> DecayCheck {
        let monotone = self.norms.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + MONOTONE_SLACK));
        let first = self.norms.first().map_or(0.0, |p| p.1);
        let last = self.norms.last().map_or(0.0, |p| p.1);
        let ratio = if first == 0.0 {
            if last == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            last / first
        };
        DecayCheck { monotone, ratio, passes: monotone && ratio <= factor }
    }
}

/// `‖T(t^i) - x^i‖_ρ` for `i = 0, 1, 2` over the `n` sweep.
pub fn convergence_table(a: f64, alpha: f64, beta: f64, ns: &[u32], space: &WeightedSpaceParams) -> Result<Vec<ConvergenceRow>> {
    if ns.is_empty() {
        return Err(Error::InvalidArgument("empty n list".into()));
    }
    let mut rows = Vec::with_capacity(3);
    for i in 0..=2u32 {
        let mut norms = Vec::with_capacity(ns.len());
        for &n in ns {
            let params = OperatorParams::new(n, a, alpha, beta)?;
            let dev = weighted_sup(|x| test_function_deviation(&params, i, x).unwrap_or(f64::NAN), space);
            norms.push((n, dev.value));
        }
        let slope = log_log_slope(&norms);
        rows.push(ConvergenceRow { i, norms, slope });
    }
    Ok(rows)
}

/// Least-squares slope of `ln y` on `ln n`; `None` if all `y` are zero or
/// fewer than two points are positive.
pub fn log_log_slope(points: &[(u32, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.1 > 0.0).map(|&(n, y)| (f64::from(n).ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}
