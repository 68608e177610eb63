//! Upper estimates of the K-functional
//! `K₂(f, δ) = inf_g { ‖f - g‖ + δ ‖g''‖ }` over a finite family of
//! smooth candidates.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::function::TestFunction;
use crate::quadrature::GaussLegendre;
use crate::smoothness::moduli::Window;

type RealMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A twice-differentiable candidate `g` with its second derivative.
#[derive(Clone)]
pub struct Smoother {
    pub name: String,
    value: RealMap,
    second_derivative: RealMap,
}

impl std::fmt::Debug for Smoother {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Smoother").field("name", &self.name).finish()
    }
}

impl Smoother {
    pub fn new<G, D>(name: impl Into<String>, value: G, second_derivative: D) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Smoother { name: name.into(), value: Arc::new(value), second_derivative: Arc::new(second_derivative) }
    }

    /// `g = f`, available when `f''` is known.
    pub fn identity(f: &TestFunction) -> Option<Self> {
        f.second_derivative(0.0)?;
        let (fv, fd) = (f.clone(), f.clone());
        Some(Smoother::new(
            format!("{}:self", f.name()),
            move |t| fv.eval(t),
            move |t| fd.second_derivative(t).unwrap_or(f64::NAN),
        ))
    }

    /// Steklov double mean `g_h(x) = h^{-2} ∫_0^h ∫_0^h f(x+s+t) ds dt`,
    /// whose second derivative is `(f(x+2h) - 2f(x+h) + f(x))/h²`.
    pub fn steklov(f: &TestFunction, h: f64) -> Self {
        let rule = GaussLegendre::new(24);
        let (fv, fd) = (f.clone(), f.clone());
        Smoother::new(
            format!("{}:steklov({h})", f.name()),
            move |x| {
                // Triangular kernel (h - |u - h|)/h² on [0, 2h].
                let up = rule.integrate(|u| fv.eval(x + u) * u, 0.0, h);
                let down = rule.integrate(|u| fv.eval(x + u) * (2.0 * h - u), h, 2.0 * h);
                (up + down) / (h * h)
            },
            move |x| (fd.eval(x + 2.0 * h) - 2.0 * fd.eval(x + h) + fd.eval(x)) / (h * h),
        )
    }

    /// Smoothing of `|t - c|`: the parabola `(t-c)²/(2r) + r/2` on
    /// `|t - c| ≤ r`, `|t - c|` outside.
    pub fn quadratic_kink(center: f64, radius: f64) -> Self {
        Smoother::new(
            format!("kink({center},{radius})"),
            move |t| {
                let d = (t - center).abs();
                if d <= radius {
                    d * d / (2.0 * radius) + radius / 2.0
                } else {
                    d
                }
            },
            move |t| if (t - center).abs() <= radius { 1.0 / radius } else { 0.0 },
        )
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.value)(t)
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        (self.second_derivative)(t)
    }
}

/// `f` itself when it is `C²`, plus Steklov means at the given radii.
pub fn default_family(f: &TestFunction, radii: &[f64]) -> Vec<Smoother> {
    let mut out: Vec<Smoother> = Smoother::identity(f).into_iter().collect();
    out.extend(radii.iter().map(|&h| Smoother::steklov(f, h)));
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct KCandidate {
    pub name: String,
    pub distance: f64,
    pub curvature: f64,
    pub value: f64,
}

/// `‖f - g‖ + δ‖g''‖` for each candidate, sup norms over window grid nodes.
pub fn k_functional_candidates(
    f: &TestFunction,
    delta: f64,
    family: &[Smoother],
    window: &Window,
    step: f64,
) -> Result<Vec<KCandidate>> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    if family.is_empty() {
        return Err(Error::InvalidArgument("smoother family is empty".into()));
    }
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    let count = (window.width() / step * (1.0 + 1e-12)).floor() as usize;
    Ok(family
        .iter()
        .map(|g| {
            let (mut distance, mut curvature) = (0.0_f64, 0.0_f64);
            for i in 0..=count {
                let t = window.lo + i as f64 * step;
                distance = distance.max((f.eval(t) - g.eval(t)).abs());
                curvature = curvature.max(g.second_derivative(t).abs());
            }
            KCandidate { name: g.name.clone(), distance, curvature, value: distance + delta * curvature }
        })
        .collect())
}

/// Minimum over the family of `‖f - g‖ + δ‖g''‖`.
pub fn k_functional_estimate(f: &TestFunction, delta: f64, family: &[Smoother], window: &Window, step: f64) -> Result<f64> {
    let candidates = k_functional_candidates(f, delta, family, window, step)?;
    Ok(candidates.iter().map(|c| c.value).fold(f64::INFINITY, f64::min))
}
