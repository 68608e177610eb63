//! Grid estimates of the moduli of smoothness.
//!
//! Every estimate is a supremum over finitely many sample points, hence a
//! lower estimate of the true modulus. Callers that put a modulus on the
//! right-hand side of an inequality inflate it by [`RHS_INFLATION`].

use crate::error::{Error, Result};
use crate::function::TestFunction;

/// Factor applied to a modulus estimate used on the larger side of an
/// inequality.
pub const RHS_INFLATION: f64 = 1.05;
/// Relative change at which step refinement stops.
pub const REFINE_TOL: f64 = 1e-3;
/// Initial and final number of `h` samples per unit `δ` in refinement.
const M_START: usize = 10;
const M_MAX: usize = 160;
/// Cap on the number of `x` samples per estimate.
const MAX_X_POINTS: usize = 200_000;

/// Closed interval `[lo, hi]` standing in for `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi > lo) {
            return Err(Error::InvalidArgument(format!("bad window [{lo}, {hi}]")));
        }
        Ok(Window { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

impl Default for Window {
    fn default() -> Self {
        Window { lo: 0.0, hi: 20.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusEstimate {
    pub value: f64,
    pub delta: f64,
    pub grid_step: f64,
    pub window: Window,
}

impl ModulusEstimate {
    pub fn inflated(&self) -> f64 {
        RHS_INFLATION * self.value
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulusKind {
    /// `sup_{0<h≤δ} |f(x+h) - f(x)|` with `x, x+h` in the window.
    First,
    /// `sup_{0<h≤δ} |f(x+2h) - 2f(x+h) + f(x)|` with `x, x+2h` in the window.
    Second,
    /// `sup_{|h|≤δ} |f(x+h) - f(x)| / ((1+h²)(1+x²))` with `x` in the
    /// window and `x + h ≥ 0`.
    Weighted,
}

/// Sample layout: `x_i = lo + i·sx`, `h_j = j·q·sx` for `j = 1..=m` when
/// `commensurate`, so that every shifted point is itself a grid node.
struct Layout {
    sx: f64,
    q: usize,
    m: usize,
    n_x: usize,
    hstep: f64,
    commensurate: bool,
}

impl Layout {
    fn new(delta: f64, window: &Window, m: usize) -> Self {
        let w = window.width();
        let hstep = delta / m as f64;
        let target = (w / (100.0 * m as f64)).min(hstep);
        let q = (hstep / target).ceil().max(1.0) as usize;
        let sx = hstep / q as f64;
        let n_x = (w / sx * (1.0 + 1e-12)).floor() as usize;
        if n_x <= MAX_X_POINTS {
            Layout { sx, q, m, n_x, hstep, commensurate: true }
        } else {
            let sx = w / MAX_X_POINTS as f64;
            Layout { sx, q: 0, m, n_x: MAX_X_POINTS, hstep, commensurate: false }
        }
    }

    fn from_step(delta: f64, window: &Window, step: f64) -> Self {
        let m = ((delta / step).round() as usize).max(1);
        let hstep = delta / m as f64;
        let n_x = (window.width() / hstep * (1.0 + 1e-12)).floor() as usize;
        Layout { sx: hstep, q: 1, m, n_x, hstep, commensurate: true }
    }

    fn x(&self, window: &Window, i: usize) -> f64 {
        window.lo + i as f64 * self.sx
    }

    /// `x_i + c·h_j` for `c ∈ {-1, 1, 2}`.
    fn shifted(&self, window: &Window, i: usize, j: usize, c: i64) -> f64 {
        if self.commensurate {
            let k = i as i64 + c * (j * self.q) as i64;
            window.lo + k as f64 * self.sx
        } else {
            self.x(window, i) + c as f64 * j as f64 * self.hstep
        }
    }
}

fn sample(kind: ModulusKind, f: &TestFunction, window: &Window, layout: &Layout) -> f64 {
    let mut sup = 0.0_f64;
    for i in 0..=layout.n_x {
        let x = layout.x(window, i);
        if x > window.hi {
            break;
        }
        let fx = f.eval(x);
        for j in 1..=layout.m {
            match kind {
                ModulusKind::First => {
                    let y = layout.shifted(window, i, j, 1);
                    if y > window.hi * (1.0 + 1e-14) {
                        break;
                    }
                    sup = sup.max((f.eval(y) - fx).abs());
                }
                ModulusKind::Second => {
                    let y2 = layout.shifted(window, i, j, 2);
                    if y2 > window.hi * (1.0 + 1e-14) {
                        break;
                    }
                    let y1 = layout.shifted(window, i, j, 1);
                    sup = sup.max((f.eval(y2) - 2.0 * f.eval(y1) + fx).abs());
                }
                ModulusKind::Weighted => {
                    let h = j as f64 * layout.hstep;
                    let denom = (1.0 + h * h) * (1.0 + x * x);
                    let up = layout.shifted(window, i, j, 1);
                    sup = sup.max((f.eval(up) - fx).abs() / denom);
                    let down = layout.shifted(window, i, j, -1);
                    if down >= 0.0 {
                        sup = sup.max((f.eval(down) - fx).abs() / denom);
                    }
                }
            }
        }
    }
    sup
}

fn check_inputs(kind: ModulusKind, delta: f64, window: &Window) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let reach = match kind {
        ModulusKind::First => delta,
        ModulusKind::Second => 2.0 * delta,
        ModulusKind::Weighted => 0.0,
    };
    if window.width() < reach {
        return Err(Error::WindowTooSmall { lo: window.lo, hi: window.hi, delta });
    }
    Ok(())
}

/// Estimate at a fixed grid step (`x` and `h` both on multiples of `step`).
pub fn modulus_at_step(kind: ModulusKind, f: &TestFunction, delta: f64, window: &Window, step: f64) -> Result<ModulusEstimate> {
    check_inputs(kind, delta, window)?;
    if !(step > 0.0) || step > delta / 10.0 * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!("step {step} must lie in (0, delta/10]")));
    }
    let layout = Layout::from_step(delta, window, step);
    let value = sample(kind, f, window, &layout);
    Ok(ModulusEstimate { value, delta, grid_step: layout.sx, window: *window })
}

/// Estimate with the grid halved until two successive halvings each change
/// the value by less than [`REFINE_TOL`] relative.
pub fn modulus_refined(kind: ModulusKind, f: &TestFunction, delta: f64, window: &Window) -> Result<ModulusEstimate> {
    check_inputs(kind, delta, window)?;
    let mut m = M_START;
    let mut layout = Layout::new(delta, window, m);
    let mut value = sample(kind, f, window, &layout);
    let mut settled_runs = 0;
    while m < M_MAX {
        m *= 2;
        let next_layout = Layout::new(delta, window, m);
        let next = sample(kind, f, window, &next_layout);
        // Nested lattices often share their best node, so one quiet halving
        // is not evidence of convergence.
        if (next - value).abs() <= REFINE_TOL * next.abs() {
            settled_runs += 1;
        } else {
            settled_runs = 0;
        }
        value = value.max(next);
        layout = next_layout;
        if settled_runs == 2 {
            break;
        }
    }
    Ok(ModulusEstimate { value, delta, grid_step: layout.sx, window: *window })
}

/// `ω(f; δ)`.
pub fn modulus_omega(f: &TestFunction, delta: f64, window: &Window) -> Result<ModulusEstimate> {
    modulus_refined(ModulusKind::First, f, delta, window)
}

/// `ω₂(f; δ)` with `h ∈ (0, δ]`.
pub fn modulus_omega2(f: &TestFunction, delta: f64, window: &Window) -> Result<ModulusEstimate> {
    modulus_refined(ModulusKind::Second, f, delta, window)
}

/// Weighted modulus `Ω(f; δ)`.
pub fn weighted_modulus(f: &TestFunction, delta: f64, window: &Window) -> Result<ModulusEstimate> {
    modulus_refined(ModulusKind::Weighted, f, delta, window)
}

/// Estimates on an increasing `δ` list. Each entry is the maximum of its
/// own refined estimate and all entries before it: the samples taken for
/// a smaller `δ` also lie in the admissible set of a larger one, so the
/// profile stays a lower estimate and is non-decreasing in `δ`.
pub fn modulus_profile(kind: ModulusKind, f: &TestFunction, deltas: &[f64], window: &Window) -> Result<Vec<ModulusEstimate>> {
    if deltas.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("delta list must be non-decreasing".into()));
    }
    let mut out: Vec<ModulusEstimate> = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let mut est = modulus_refined(kind, f, delta, window)?;
        if let Some(prev) = out.last() {
            est.value = est.value.max(prev.value);
        }
        out.push(est);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{by_name, Growth, Smoothness};

    #[test]
    fn constant_has_zero_moduli() {
        let one = by_name("const1").unwrap();
        let w = Window::default();
        assert_eq!(modulus_omega(&one, 0.3, &w).unwrap().value, 0.0);
        assert_eq!(modulus_omega2(&one, 0.3, &w).unwrap().value, 0.0);
        assert_eq!(weighted_modulus(&one, 0.3, &w).unwrap().value, 0.0);
    }

    #[test]
    fn identity_modulus_is_delta() {
        let t = by_name("t").unwrap();
        let w = Window::new(0.0, 10.0).unwrap();
        let est = modulus_omega(&t, 0.1, &w).unwrap();
        assert!((est.value - 0.1).abs() < 1e-6);
        let est = modulus_at_step(ModulusKind::First, &t, 0.1, &w, 0.01).unwrap();
        assert!((est.value - 0.1).abs() < 1e-12);
        assert!(modulus_omega2(&t, 0.5, &w).unwrap().value < 1e-12);
    }

    #[test]
    fn sine_modulus() {
        let f = by_name("sin").unwrap();
        let est = modulus_omega(&f, 0.5, &Window::default()).unwrap();
        let want = 2.0 * 0.25_f64.sin();
        assert!(est.value <= want + 1e-12);
        assert!((est.value - want).abs() < 1e-3 * want, "{}", est.value);
    }

    #[test]
    fn second_modulus_examples() {
        let t2 = by_name("t2").unwrap();
        let h0 = 0.3;
        let est = modulus_omega2(&t2, h0, &Window::default()).unwrap();
        assert!((est.value - 2.0 * h0 * h0).abs() < 1e-8);
        let kink = by_name("abs_t_minus_1").unwrap();
        let est = modulus_omega2(&kink, 0.2, &Window::new(0.0, 3.0).unwrap()).unwrap();
        assert!((est.value - 0.4).abs() < 1e-9, "{}", est.value);
    }

    #[test]
    fn weighted_modulus_examples() {
        let t = by_name("t").unwrap();
        let est = weighted_modulus(&t, 1.0, &Window::default()).unwrap();
        assert!((est.value - 0.5).abs() < 1e-12);
        let t2 = by_name("t2").unwrap();
        let est = weighted_modulus(&t2, 0.1, &Window::default()).unwrap();
        // Attained near x = 1 with h = δ: (2δ + δ²)/((1+δ²)(1+x²)) maximised over x.
        let brute = (0..=200_000)
            .map(|i| {
                let x = i as f64 * 1e-4;
                (2.0 * x * 0.1 + 0.01) / (1.01 * (1.0 + x * x))
            })
            .fold(0.0_f64, f64::max);
        assert!(est.value <= brute * (1.0 + 1e-9));
        assert!(est.value >= brute * (1.0 - 1e-3));
    }

    #[test]
    fn window_checks() {
        let t = by_name("t").unwrap();
        let w = Window::new(0.0, 0.3).unwrap();
        assert!(matches!(modulus_omega2(&t, 0.2, &w), Err(Error::WindowTooSmall { .. })));
        assert!(modulus_at_step(ModulusKind::First, &t, 0.1, &w, 0.05).is_err());
        assert!(Window::new(1.0, 0.5).is_err());
    }

    #[test]
    fn profile_is_monotone() {
        let f = TestFunction::general("wiggle", |t: f64| (5.0 * t).sin() + 0.1 * t, Growth::Polynomial(1), Smoothness::TwiceDifferentiable);
        let deltas = [0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0];
        let prof = modulus_profile(ModulusKind::Weighted, &f, &deltas, &Window::default()).unwrap();
        for w in prof.windows(2) {
            assert!(w[0].value <= w[1].value);
        }
    }
}
