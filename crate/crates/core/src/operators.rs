//! The Baskakov-Kantorovich-Stancu operator, its point-evaluation variant,
//! and the classical baselines.

use rayon::prelude::*;

use crate::basis::{OperatorParams, SeriesPolicy, WeightStream};
use crate::error::{Error, Result};
use crate::function::TestFunction;
use crate::quadrature::{interval_average, QuadratureMethod, QuadratureSpec};
use crate::special::{ln_binomial, NeumaierSum};

/// Safety factor on the geometric tail estimate used after the mass
/// criterion has been met.
const TAIL_SAFETY: f64 = 4.0;

/// Sums `Σ_k W_k(x) g(k)`.
///
/// Summation runs at least to the mass-based truncation index. Past it the
/// weights decay geometrically with ratio at most `x/(1+x)`, so the
/// remaining tail is about `(1+x)` times the current term; summation stops
/// once that estimate falls below `tail_epsilon` relative to the absolute
/// sum. This matters only for unbounded `g`.
fn sum_series<G>(params: &OperatorParams, x: f64, policy: &SeriesPolicy, mut g: G) -> Result<f64>
where
    G: FnMut(usize) -> Result<f64>,
{
    let stream = WeightStream::new(params, x, policy.log_domain)?;
    let mut mass = NeumaierSum::default();
    let mut acc = NeumaierSum::default();
    let mut abs_acc = 0.0_f64;
    let threshold = 1.0 - policy.tail_epsilon;
    for (k, w) in stream.take(policy.k_max_hard + 1).enumerate() {
        mass.add(w);
        if w == 0.0 && k > 0 && mass.value() >= threshold {
            return Ok(acc.value());
        }
        let term = if w == 0.0 { 0.0 } else { w * g(k)? };
        acc.add(term);
        abs_acc += term.abs();
        if mass.value() >= threshold && TAIL_SAFETY * (1.0 + x) * term.abs() <= policy.tail_epsilon * abs_acc {
            return Ok(acc.value());
        }
    }
    Err(Error::TailNotAbsorbed { x, k_max_hard: policy.k_max_hard, mass: mass.value() })
}

fn check_x(x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::DomainViolation { x, domain: "[0, inf)", operator: "generalized Baskakov" });
    }
    Ok(())
}

/// `T_{n,a}^{α,β}(f; x) = (n+β) Σ_k W_k(x) ∫_{(k+α)/(n+β)}^{(k+α+1)/(n+β)} f`.
pub fn eval_t(params: &OperatorParams, f: &TestFunction, x: f64, policy: &SeriesPolicy, quad: &QuadratureSpec) -> Result<f64> {
    check_x(x)?;
    quad.validate_for(f)?;
    sum_series(params, x, policy, |k| {
        let (lo, hi) = params.interval(k);
        interval_average(f, lo, hi, quad)
    })
}

/// `L_{n,a}^{α,β}(f; x) = Σ_k W_k(x) f((k+α)/(n+β))`.
pub fn eval_l(params: &OperatorParams, f: &TestFunction, x: f64, policy: &SeriesPolicy) -> Result<f64> {
    check_x(x)?;
    sum_series(params, x, policy, |k| Ok(f.eval(params.node(k))))
}

/// `eval_t` over a grid; grid points are evaluated in parallel, each with a
/// fixed summation order.
pub fn eval_t_grid(
    params: &OperatorParams,
    f: &TestFunction,
    xs: &[f64],
    policy: &SeriesPolicy,
    quad: &QuadratureSpec,
) -> Result<Vec<f64>> {
    xs.par_iter().map(|&x| eval_t(params, f, x, policy, quad)).collect()
}

/// Classical operators used as comparison baselines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Baseline {
    /// `Σ C(n,k) x^k (1-x)^{n-k} f(k/n)`.
    Bernstein,
    /// `(n+1) Σ C(n,k) x^k (1-x)^{n-k} ∫_{k/(n+1)}^{(k+1)/(n+1)} f`.
    Kantorovich,
    /// `Σ C(n,k) x^k (1-x)^{n-k} f((k+α)/(n+β))`.
    Stancu { alpha: f64, beta: f64 },
    /// `(n+β+1) Σ C(n,k) x^k (1-x)^{n-k} ∫_{(k+α)/(n+β+1)}^{(k+α+1)/(n+β+1)} f`.
    KantorovichStancu { alpha: f64, beta: f64 },
    /// `n Σ W_{n,k}^a(x) ∫_{k/n}^{(k+1)/n} f`.
    BaskakovKantorovich { a: f64 },
}

impl Baseline {
    pub fn name(&self) -> &'static str {
        match self {
            Baseline::Bernstein => "bernstein",
            Baseline::Kantorovich => "kantorovich",
            Baseline::Stancu { .. } => "stancu",
            Baseline::KantorovichStancu { .. } => "kantorovich_stancu",
            Baseline::BaskakovKantorovich { .. } => "baskakov_kantorovich",
        }
    }
}

/// `C(n,k) x^k (1-x)^{n-k}` for `k = 0..=n`.
fn bernstein_basis(n: u32, x: f64) -> Vec<f64> {
    let n64 = u64::from(n);
    (0..=n64)
        .map(|k| {
            if x == 0.0 {
                return if k == 0 { 1.0 } else { 0.0 };
            }
            if x == 1.0 {
                return if k == n64 { 1.0 } else { 0.0 };
            }
            (ln_binomial(n64, k) + k as f64 * x.ln() + (n64 - k) as f64 * (-x).ln_1p()).exp()
        })
        .collect()
}

pub fn eval_baseline(
    which: Baseline,
    n: u32,
    f: &TestFunction,
    x: f64,
    policy: &SeriesPolicy,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be >= 1".into()));
    }
    let unit = |x: f64| -> Result<()> {
        if (0.0..=1.0).contains(&x) {
            Ok(())
        } else {
            Err(Error::DomainViolation { x, domain: "[0, 1]", operator: which.name() })
        }
    };
    let nf = f64::from(n);
    match which {
        Baseline::Bernstein => {
            unit(x)?;
            let b = bernstein_basis(n, x);
            Ok(b.iter().enumerate().map(|(k, w)| w * f.eval(k as f64 / nf)).sum::<NeumaierSum>().value())
        }
        Baseline::Stancu { alpha, beta } => {
            unit(x)?;
            let b = bernstein_basis(n, x);
            Ok(b.iter().enumerate().map(|(k, w)| w * f.eval((k as f64 + alpha) / (nf + beta))).sum::<NeumaierSum>().value())
        }
        Baseline::Kantorovich | Baseline::KantorovichStancu { .. } => {
            unit(x)?;
            quad.validate_for(f)?;
            let (alpha, beta) = match which {
                Baseline::KantorovichStancu { alpha, beta } => (alpha, beta),
                _ => (0.0, 0.0),
            };
            let d = nf + beta + 1.0;
            let b = bernstein_basis(n, x);
            let mut acc = NeumaierSum::default();
            for (k, w) in b.iter().enumerate() {
                let lo = (k as f64 + alpha) / d;
                let hi = (k as f64 + alpha + 1.0) / d;
                acc.add(w * interval_average(f, lo, hi, quad)?);
            }
            Ok(acc.value())
        }
        Baseline::BaskakovKantorovich { a } => {
            check_x(x)?;
            quad.validate_for(f)?;
            let params = OperatorParams::classical(n, a)?;
            sum_series(&params, x, policy, |k| {
                let lo = k as f64 / nf;
                let hi = (k as f64 + 1.0) / nf;
                interval_average(f, lo, hi, quad)
            })
        }
    }
}

/// Quadrature spec used when a caller has no preference: exact where the
/// function allows, adaptive with the series tail tolerance otherwise.
pub fn default_quadrature(f: &TestFunction, policy: &SeriesPolicy) -> QuadratureSpec {
    let q = QuadratureSpec::auto_for(f, policy.tail_epsilon);
    debug_assert!(q.method != QuadratureMethod::Adaptive || q.tolerance > 0.0);
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::by_name;

    fn p(n: u32, a: f64, alpha: f64, beta: f64) -> OperatorParams {
        OperatorParams::new(n, a, alpha, beta).unwrap()
    }

    #[test]
    fn constant_is_reproduced() {
        let one = by_name("const1").unwrap();
        let policy = SeriesPolicy::default();
        let quad = QuadratureSpec::exact_polynomial();
        for params in [p(1, 0.0, 0.0, 0.0), p(7, 2.0, 1.0, 2.0), p(50, 0.5, 0.0, 3.0)] {
            let t = eval_t(&params, &one, 2.0, &policy, &quad).unwrap();
            assert!((t - 1.0).abs() <= policy.tail_epsilon + 1e-15);
            let l = eval_l(&params, &one, 3.0, &policy).unwrap();
            assert!((l - 1.0).abs() <= policy.tail_epsilon + 1e-15);
        }
    }

    #[test]
    fn first_moment_examples() {
        let t = by_name("t").unwrap();
        let policy = SeriesPolicy::default();
        let quad = QuadratureSpec::exact_polynomial();
        let v = eval_t(&p(10, 0.0, 0.0, 0.0), &t, 1.0, &policy, &quad).unwrap();
        assert!((v - 1.05).abs() < 1e-9);
        let v = eval_l(&p(10, 0.0, 0.0, 0.0), &t, 1.0, &policy).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        // (4/7)·2 + (2/7)(2/3) + 1/7
        let want = 8.0 / 7.0 + 4.0 / 21.0 + 1.0 / 7.0;
        let v = eval_l(&p(4, 2.0, 1.0, 3.0), &t, 2.0, &policy).unwrap();
        assert!((v - want).abs() < 1e-9);
        assert!((want - 1.4762).abs() < 1e-4);
    }

    #[test]
    fn negative_x_is_rejected() {
        let t = by_name("t").unwrap();
        let err = eval_t(&p(3, 0.0, 0.0, 0.0), &t, -0.5, &SeriesPolicy::default(), &QuadratureSpec::exact_polynomial());
        assert!(matches!(err, Err(Error::DomainViolation { .. })));
    }

    #[test]
    fn baseline_examples() {
        let policy = SeriesPolicy::default();
        let quad = QuadratureSpec::exact_polynomial();
        let one = by_name("const1").unwrap();
        let t2 = by_name("t2").unwrap();
        for n in [1, 4, 17] {
            let v = eval_baseline(Baseline::Bernstein, n, &one, 0.3, &policy, &quad).unwrap();
            assert!((v - 1.0).abs() < 1e-14);
        }
        let v = eval_baseline(Baseline::Bernstein, 2, &t2, 0.5, &policy, &quad).unwrap();
        assert!((v - 0.375).abs() < 1e-15);
        let v = eval_baseline(Baseline::Kantorovich, 1, &one, 0.7, &policy, &quad).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        let err = eval_baseline(Baseline::Bernstein, 3, &one, 1.5, &policy, &quad).unwrap_err();
        assert!(matches!(err, Error::DomainViolation { domain: "[0, 1]", .. }));
    }

    #[test]
    fn stancu_baselines_reduce_to_classical_at_zero_shift() {
        let policy = SeriesPolicy::default();
        let quad = QuadratureSpec::closed_form();
        let f = by_name("sin").unwrap();
        for &x in &[0.0, 0.25, 0.6, 1.0] {
            let b = eval_baseline(Baseline::Bernstein, 9, &f, x, &policy, &quad).unwrap();
            let s = eval_baseline(Baseline::Stancu { alpha: 0.0, beta: 0.0 }, 9, &f, x, &policy, &quad).unwrap();
            assert!((b - s).abs() < 1e-15);
            let k = eval_baseline(Baseline::Kantorovich, 9, &f, x, &policy, &quad).unwrap();
            let ks = eval_baseline(Baseline::KantorovichStancu { alpha: 0.0, beta: 0.0 }, 9, &f, x, &policy, &quad).unwrap();
            assert!((k - ks).abs() < 1e-15);
        }
    }

    #[test]
    fn kantorovich_first_moment() {
        // K_n(t; x) = (n x + 1/2)/(n + 1).
        let t = by_name("t").unwrap();
        let v = eval_baseline(Baseline::Kantorovich, 6, &t, 0.4, &SeriesPolicy::default(), &QuadratureSpec::exact_polynomial()).unwrap();
        assert!((v - (6.0 * 0.4 + 0.5) / 7.0).abs() < 1e-14);
    }

    #[test]
    fn quadrature_errors_propagate() {
        let f = by_name("sin").unwrap();
        let r = eval_t(&p(3, 0.0, 0.0, 0.0), &f, 1.0, &SeriesPolicy::default(), &QuadratureSpec::exact_polynomial());
        assert!(matches!(r, Err(Error::QuadratureNotApplicable(_))));
    }

    #[test]
    fn tail_error_propagates() {
        let t = by_name("t").unwrap();
        let policy = SeriesPolicy::new(1e-8, 10, true).unwrap();
        let r = eval_t(&p(2, 1.0, 0.0, 0.0), &t, 50.0, &policy, &QuadratureSpec::exact_polynomial());
        assert!(matches!(r, Err(Error::TailNotAbsorbed { .. })));
    }
}
