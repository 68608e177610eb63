//! Test functions on `[0, ∞)` with the metadata the bound checks need.

use std::fmt;
use std::sync::Arc;

use crate::special::binomial;

type RealMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type IntervalMap = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    UnitInterval,
    HalfLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Growth {
    Bounded,
    /// `|f(t)| ≤ C (1 + t^d)`.
    Polynomial(u32),
}

impl Growth {
    /// Whether the growth class fits under the weight `ρ(x) = 1 + x²`.
    pub fn within_rho(self) -> bool {
        match self {
            Growth::Bounded => true,
            Growth::Polynomial(d) => d <= 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoothness {
    Continuous,
    /// `|f(t) - f(x)| ≤ constant · |t - x|^exponent`.
    Lipschitz { exponent: f64, constant: f64 },
    TwiceDifferentiable,
}

/// Membership certificate for the class
/// `|f(t) - f(x)| ≤ M |t - x|^γ / (t + x)^{γ/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipStarCertificate {
    pub constant: f64,
    pub exponent: f64,
}

/// Polynomial `Σ_j c_j (t - center)^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub center: f64,
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(center: f64, coeffs: Vec<f64>) -> Self {
        Self { center, coeffs }
    }

    /// `t^m`.
    pub fn monomial(m: usize) -> Self {
        Self::shifted_monomial(m, 0.0)
    }

    /// `(t - center)^m`.
    pub fn shifted_monomial(m: usize, center: f64) -> Self {
        let mut coeffs = vec![0.0; m + 1];
        coeffs[m] = 1.0;
        Self { center, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let s = t - self.center;
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
    }

    /// Mean value over `[lo, hi]`.
    ///
    /// Uses `(B^{j+1} - A^{j+1}) / ((j+1)(B - A)) = Σ_{i=0}^{j} A^i B^{j-i} / (j+1)`
    /// with `A = lo - center`, `B = hi - center`, which involves no
    /// subtraction of nearly equal powers.
    pub fn interval_average(&self, lo: f64, hi: f64) -> f64 {
        let a = lo - self.center;
        let b = hi - self.center;
        let mut total = 0.0;
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let mut s = 0.0;
            let mut a_pow = 1.0;
            for i in 0..=j {
                s += a_pow * b.powi((j - i) as i32);
                a_pow *= a;
            }
            total += c * s / (j + 1) as f64;
        }
        total
    }

    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        (hi - lo) * self.interval_average(lo, hi)
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(j, &c)| j as f64 * c).collect::<Vec<_>>();
        Self { center: self.center, coeffs: if coeffs.is_empty() { vec![0.0] } else { coeffs } }
    }

    /// The same polynomial expanded around zero.
    pub fn recentered_at_zero(&self) -> Self {
        let mut out = vec![0.0; self.coeffs.len()];
        for (j, &c) in self.coeffs.iter().enumerate() {
            for (i, slot) in out.iter_mut().enumerate().take(j + 1) {
                *slot += c * binomial(j as u32, i as u32) * (-self.center).powi((j - i) as i32);
            }
        }
        Self { center: 0.0, coeffs: out }
    }

    fn scaled_sum(c1: f64, p: &Polynomial, c2: f64, q: &Polynomial) -> Polynomial {
        let (p, q) = if p.center == q.center { (p.clone(), q.clone()) } else { (p.recentered_at_zero(), q.recentered_at_zero()) };
        let len = p.coeffs.len().max(q.coeffs.len());
        let coeffs = (0..len)
            .map(|j| c1 * p.coeffs.get(j).copied().unwrap_or(0.0) + c2 * q.coeffs.get(j).copied().unwrap_or(0.0))
            .collect();
        Polynomial { center: p.center, coeffs }
    }
}

#[derive(Clone)]
enum Repr {
    Polynomial(Polynomial),
    General {
        value: RealMap,
        integral: Option<IntervalMap>,
        second_derivative: Option<RealMap>,
    },
}

/// A named real function with growth and smoothness metadata.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    repr: Repr,
    pub domain: Domain,
    pub growth: Growth,
    pub smoothness: Smoothness,
    pub lip_star: Option<LipStarCertificate>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("growth", &self.growth)
            .field("smoothness", &self.smoothness)
            .field("lip_star", &self.lip_star)
            .finish()
    }
}

impl TestFunction {
    pub fn polynomial(name: impl Into<String>, poly: Polynomial) -> Self {
        let degree = poly.degree() as u32;
        let growth = if poly.coeffs.iter().skip(1).all(|&c| c == 0.0) { Growth::Bounded } else { Growth::Polynomial(degree) };
        Self {
            name: name.into(),
            repr: Repr::Polynomial(poly),
            domain: Domain::HalfLine,
            growth,
            smoothness: Smoothness::TwiceDifferentiable,
            lip_star: None,
        }
    }

    pub fn general<F>(name: impl Into<String>, value: F, growth: Growth, smoothness: Smoothness) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            repr: Repr::General { value: Arc::new(value), integral: None, second_derivative: None },
            domain: Domain::HalfLine,
            growth,
            smoothness,
            lip_star: None,
        }
    }

    /// Attach a closed-form `∫_lo^hi f`.
    pub fn with_integral<F>(mut self, integral: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        if let Repr::General { integral: slot, .. } = &mut self.repr {
            *slot = Some(Arc::new(integral));
        }
        self
    }

    pub fn with_second_derivative<F>(mut self, d2: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if let Repr::General { second_derivative: slot, .. } = &mut self.repr {
            *slot = Some(Arc::new(d2));
        }
        self
    }

    pub fn with_lip_star(mut self, cert: LipStarCertificate) -> Self {
        self.lip_star = Some(cert);
        self
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Polynomial(p) => p.eval(t),
            Repr::General { value, .. } => value(t),
        }
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        match &self.repr {
            Repr::Polynomial(p) => Some(p),
            Repr::General { .. } => None,
        }
    }

    pub fn has_exact_integral(&self) -> bool {
        match &self.repr {
            Repr::Polynomial(_) => true,
            Repr::General { integral, .. } => integral.is_some(),
        }
    }

    /// `∫_lo^hi f` in closed form, when available.
    pub fn exact_integral(&self, lo: f64, hi: f64) -> Option<f64> {
        match &self.repr {
            Repr::Polynomial(p) => Some(p.integral(lo, hi)),
            Repr::General { integral, .. } => integral.as_ref().map(|i| i(lo, hi)),
        }
    }

    pub fn second_derivative(&self, t: f64) -> Option<f64> {
        match &self.repr {
            Repr::Polynomial(p) => Some(p.derivative().derivative().eval(t)),
            Repr::General { second_derivative, .. } => second_derivative.as_ref().map(|d| d(t)),
        }
    }

    /// `c1·f + c2·g`. Polynomials stay polynomials; otherwise closed-form
    /// integrals and second derivatives are kept when both sides have them.
    pub fn linear_combination(c1: f64, f: &TestFunction, c2: f64, g: &TestFunction) -> TestFunction {
        let name = format!("{c1}*{}+{c2}*{}", f.name, g.name);
        let growth = match (f.growth, g.growth) {
            (Growth::Bounded, other) | (other, Growth::Bounded) => other,
            (Growth::Polynomial(d1), Growth::Polynomial(d2)) => Growth::Polynomial(d1.max(d2)),
        };
        let smoothness = if f.smoothness == g.smoothness { f.smoothness } else { Smoothness::Continuous };
        if let (Some(p), Some(q)) = (f.as_polynomial(), g.as_polynomial()) {
            let mut out = TestFunction::polynomial(name, Polynomial::scaled_sum(c1, p, c2, q));
            out.growth = growth;
            return out;
        }
        let (fa, ga) = (f.clone(), g.clone());
        let mut out = TestFunction::general(name, move |t| c1 * fa.eval(t) + c2 * ga.eval(t), growth, smoothness);
        if f.has_exact_integral() && g.has_exact_integral() {
            let (fa, ga) = (f.clone(), g.clone());
            out = out.with_integral(move |lo, hi| {
                c1 * fa.exact_integral(lo, hi).unwrap_or(f64::NAN) + c2 * ga.exact_integral(lo, hi).unwrap_or(f64::NAN)
            });
        }
        if f.second_derivative(0.0).is_some() && g.second_derivative(0.0).is_some() {
            let (fa, ga) = (f.clone(), g.clone());
            out = out.with_second_derivative(move |t| {
                c1 * fa.second_derivative(t).unwrap_or(f64::NAN) + c2 * ga.second_derivative(t).unwrap_or(f64::NAN)
            });
        }
        out
    }
}

/// Names accepted by [`by_name`], in catalog order.
pub const CATALOG_NAMES: &[&str] = &[
    "const1",
    "t",
    "t2",
    "t3",
    "t4",
    "exp_neg",
    "sin",
    "abs_t_minus_1",
    "sqrt",
    "inv_1p_t2",
    "one_plus_t2",
];

pub fn catalog() -> Vec<TestFunction> {
    CATALOG_NAMES.iter().filter_map(|n| by_name(n)).collect()
}

pub fn by_name(name: &str) -> Option<TestFunction> {
    let f = match name {
        "const1" => TestFunction::polynomial(name, Polynomial::monomial(0)),
        "t" => TestFunction::polynomial(name, Polynomial::monomial(1)),
        "t2" => TestFunction::polynomial(name, Polynomial::monomial(2)),
        "t3" => TestFunction::polynomial(name, Polynomial::monomial(3)),
        "t4" => TestFunction::polynomial(name, Polynomial::monomial(4)),
        "one_plus_t2" => TestFunction::polynomial(name, Polynomial::new(0.0, vec![1.0, 0.0, 1.0])),
        "exp_neg" => TestFunction::general(name, |t: f64| (-t).exp(), Growth::Bounded, Smoothness::TwiceDifferentiable)
            // e^{-lo} - e^{-hi} = -e^{-lo} expm1(-(hi - lo))
            .with_integral(|lo: f64, hi: f64| -(-lo).exp() * (-(hi - lo)).exp_m1())
            .with_second_derivative(|t: f64| (-t).exp()),
        "sin" => TestFunction::general(name, f64::sin, Growth::Bounded, Smoothness::TwiceDifferentiable)
            // cos lo - cos hi = 2 sin((lo+hi)/2) sin((hi-lo)/2)
            .with_integral(|lo: f64, hi: f64| 2.0 * (0.5 * (lo + hi)).sin() * (0.5 * (hi - lo)).sin())
            .with_second_derivative(|t: f64| -t.sin()),
        "abs_t_minus_1" => TestFunction::general(
            name,
            |t: f64| (t - 1.0).abs(),
            Growth::Polynomial(1),
            Smoothness::Lipschitz { exponent: 1.0, constant: 1.0 },
        )
        .with_integral(|lo: f64, hi: f64| {
            let anti = |t: f64| 0.5 * (t - 1.0) * (t - 1.0).abs();
            anti(hi) - anti(lo)
        }),
        "sqrt" => TestFunction::general(
            name,
            |t: f64| t.max(0.0).sqrt(),
            Growth::Polynomial(1),
            Smoothness::Lipschitz { exponent: 0.5, constant: 1.0 },
        )
        // (2/3)(hi^{3/2} - lo^{3/2}) = (2/3)(hi - lo)(lo + sqrt(lo hi) + hi)/(sqrt(lo) + sqrt(hi))
        .with_integral(|lo: f64, hi: f64| {
            let (sl, sh) = (lo.max(0.0).sqrt(), hi.max(0.0).sqrt());
            if sl + sh == 0.0 {
                return 0.0;
            }
            2.0 / 3.0 * (hi - lo) * (lo + sl * sh + hi) / (sl + sh)
        })
        .with_lip_star(LipStarCertificate { constant: 1.0, exponent: 1.0 }),
        "inv_1p_t2" => TestFunction::general(name, |t: f64| 1.0 / (1.0 + t * t), Growth::Bounded, Smoothness::TwiceDifferentiable)
            // atan hi - atan lo = atan((hi - lo)/(1 + lo hi))
            .with_integral(|lo: f64, hi: f64| ((hi - lo) / (1.0 + lo * hi)).atan())
            .with_second_derivative(|t: f64| (6.0 * t * t - 2.0) / (1.0 + t * t).powi(3)),
        _ => return None,
    };
    Some(f)
}
