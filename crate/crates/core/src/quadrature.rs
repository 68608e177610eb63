//! Interval integration for the Kantorovich averages.

use std::collections::BinaryHeap;
use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::function::TestFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadratureMethod {
    /// Closed-form integration of a polynomial integrand.
    ExactPolynomial,
    /// The function's own closed-form integral.
    ClosedForm,
    /// Fixed Gauss-Legendre rule with the given number of nodes.
    GaussLegendre(usize),
    /// Adaptive Gauss-Kronrod (7/15) with an absolute tolerance.
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub method: QuadratureMethod,
    /// Absolute tolerance on each interval *average*; used by `Adaptive`.
    pub tolerance: f64,
}

impl QuadratureSpec {
    pub fn exact_polynomial() -> Self {
        Self { method: QuadratureMethod::ExactPolynomial, tolerance: 0.0 }
    }

    pub fn closed_form() -> Self {
        Self { method: QuadratureMethod::ClosedForm, tolerance: 0.0 }
    }

    pub fn gauss_legendre(order: usize) -> Self {
        Self { method: QuadratureMethod::GaussLegendre(order), tolerance: 0.0 }
    }

    pub fn adaptive(tolerance: f64) -> Self {
        Self { method: QuadratureMethod::Adaptive, tolerance }
    }

    /// Exact when the function allows it, adaptive otherwise.
    pub fn auto_for(f: &TestFunction, tolerance: f64) -> Self {
        if f.as_polynomial().is_some() {
            Self::exact_polynomial()
        } else if f.has_exact_integral() {
            Self::closed_form()
        } else {
            Self::adaptive(tolerance)
        }
    }

    pub fn validate_for(&self, f: &TestFunction) -> Result<()> {
        match self.method {
            QuadratureMethod::ExactPolynomial if f.as_polynomial().is_none() => Err(Error::QuadratureNotApplicable(
                format!("exact-polynomial quadrature requires a polynomial integrand, {} is not", f.name()),
            )),
            QuadratureMethod::ClosedForm if !f.has_exact_integral() => {
                Err(Error::QuadratureNotApplicable(format!("{} has no closed-form integral", f.name())))
            }
            QuadratureMethod::GaussLegendre(0) => Err(Error::QuadratureNotApplicable("Gauss-Legendre order must be >= 1".into())),
            QuadratureMethod::Adaptive if !(self.tolerance > 0.0) => {
                Err(Error::QuadratureNotApplicable("adaptive quadrature needs a positive tolerance".into()))
            }
            _ => Ok(()),
        }
    }
}

/// `∫_lo^hi f(t) dt`.
pub fn integrate_interval(f: &TestFunction, lo: f64, hi: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(lo <= hi) {
        return Err(Error::InvalidArgument(format!("integration bounds out of order: [{lo}, {hi}]")));
    }
    Ok(interval_average(f, lo, hi, quad)? * (hi - lo))
}

/// Mean of `f` over `[lo, hi]`; equals `f(lo)` on a degenerate interval.
pub fn interval_average(f: &TestFunction, lo: f64, hi: f64, quad: &QuadratureSpec) -> Result<f64> {
    quad.validate_for(f)?;
    let width = hi - lo;
    if width == 0.0 {
        return Ok(f.eval(lo));
    }
    match quad.method {
        QuadratureMethod::ExactPolynomial => Ok(f.as_polynomial().expect("validated").interval_average(lo, hi)),
        QuadratureMethod::ClosedForm => Ok(f.exact_integral(lo, hi).expect("validated") / width),
        QuadratureMethod::GaussLegendre(order) => {
            let rule = GaussLegendre::new(order);
            Ok(rule.integrate(|t| f.eval(t), lo, hi) / width)
        }
        QuadratureMethod::Adaptive => {
            let integral = adaptive_gauss_kronrod(|t| f.eval(t), lo, hi, quad.tolerance * width, 200)?;
            Ok(integral / width)
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes from Newton iteration on `P_order`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let m = order as f64;
        for i in 0..order.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=order {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                let p = if order == 1 { x } else { p1 };
                let p_prev = if order == 1 { 1.0 } else { p0 };
                dp = m * (x * p - p_prev) / (x * x - 1.0);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, lo: f64, hi: f64) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        half * self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(mid + half * x)).sum::<f64>()
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One 15-point Kronrod panel: (integral, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let fc = f(mid);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(mid - dx) + f(mid + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss-Kronrod integration: bisects the panel with the
/// largest error estimate until the summed estimate is below `abs_tol`.
pub fn adaptive_gauss_kronrod<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, abs_tol: f64, max_panels: usize) -> Result<f64> {
    let (value, error) = gk15(&f, lo, hi);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { lo, hi, value, error });
    let mut total_err = error;
    while total_err > abs_tol {
        if heap.len() >= max_panels {
            return Err(Error::QuadratureDidNotConverge { lo, hi, error_estimate: total_err });
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        let (v1, e1) = gk15(&f, worst.lo, mid);
        let (v2, e2) = gk15(&f, mid, worst.hi);
        total_err += e1 + e2 - worst.error;
        heap.push(Panel { lo: worst.lo, hi: mid, value: v1, error: e1 });
        heap.push(Panel { lo: mid, hi: worst.hi, value: v2, error: e2 });
    }
    // Re-sum to shed the drift of the running updates.
    Ok(heap.iter().map(|p| p.value).sum())
}
