//! Basis weights `W_{n,k}^a(x)` of the generalized Baskakov operator.
//!
//! The weights are
//!
//! ```text
//! W_{n,k}^a(x) = e^{-a x/(1+x)} p_k(n,a)/k! · x^k/(1+x)^{k+n},
//! p_k(n,a)     = Σ_{i=0}^{k} C(k,i) (n)_i a^{k-i},
//! ```
//!
//! and sum to one over `k ≥ 0`. Writing `z = x/(1+x)` and splitting
//! `p_k/k!` term by term gives
//!
//! ```text
//! W_k = Σ_{i+j=k} [(n)_i/i! z^i (1-z)^n] · [e^{-az} (az)^j / j!],
//! ```
//!
//! a negative-binomial mass (size `n`, mean `n x`) convolved with a Poisson
//! mass (mean `a z`). [`WeightStream`] evaluates the weights in that form,
//! one `k` at a time, so that the per-term factors never overflow.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::special::{compensated_sum, ln_neg_binomial_pmf, ln_poisson_pmf, log_sum_exp, NeumaierSum};

/// Parameters `(n, a, α, β)` of one operator instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorParams {
    pub n: u32,
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl OperatorParams {
    /// Validated constructor; requires `n ≥ 1`, `a, α, β ≥ 0` and `α ≤ β`.
    pub fn new(n: u32, a: f64, alpha: f64, beta: f64) -> Result<Self> {
        let params = Self::new_relaxed(n, a, alpha, beta)?;
        if alpha > beta {
            return Err(Error::InvalidParams(format!(
                "Stancu condition 0 <= alpha <= beta violated (alpha = {alpha}, beta = {beta}); \
                 use new_relaxed to override"
            )));
        }
        Ok(params)
    }

    /// Like [`OperatorParams::new`] but without the `α ≤ β` ordering check.
    pub fn new_relaxed(n: u32, a: f64, alpha: f64, beta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("n must be >= 1".into()));
        }
        for (name, v) in [("a", a), ("alpha", alpha), ("beta", beta)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParams(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self { n, a, alpha, beta })
    }

    /// Classical Baskakov-Kantorovich instance (`α = β = 0`).
    pub fn classical(n: u32, a: f64) -> Result<Self> {
        Self::new(n, a, 0.0, 0.0)
    }

    /// `n + β`, the denominator of the Stancu nodes.
    pub fn denom(&self) -> f64 {
        f64::from(self.n) + self.beta
    }

    /// Interval `[(k+α)/(n+β), (k+α+1)/(n+β)]` averaged by the Kantorovich operator.
    pub fn interval(&self, k: usize) -> (f64, f64) {
        let d = self.denom();
        let lo = (k as f64 + self.alpha) / d;
        let hi = (k as f64 + self.alpha + 1.0) / d;
        (lo, hi)
    }

    /// Sampling node `(k+α)/(n+β)` of the point-evaluation operator.
    pub fn node(&self, k: usize) -> f64 {
        (k as f64 + self.alpha) / self.denom()
    }
}

/// Truncation controls for the infinite sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPolicy {
    /// Largest admissible un-summed basis mass.
    pub tail_epsilon: f64,
    /// Largest summation index.
    pub k_max_hard: usize,
    /// Evaluate term magnitudes through logarithms.
    pub log_domain: bool,
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        Self { tail_epsilon: 1e-12, k_max_hard: 20_000, log_domain: true }
    }
}

impl SeriesPolicy {
    pub fn new(tail_epsilon: f64, k_max_hard: usize, log_domain: bool) -> Result<Self> {
        if !(tail_epsilon > 0.0 && tail_epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!("tail_epsilon must lie in (0, 1), got {tail_epsilon}")));
        }
        if k_max_hard == 0 {
            return Err(Error::InvalidArgument("k_max_hard must be >= 1".into()));
        }
        Ok(Self { tail_epsilon, k_max_hard, log_domain })
    }

    /// Tightened policy used by the brute-force moment oracle.
    pub fn oracle() -> Self {
        Self { tail_epsilon: 1e-14, k_max_hard: 200_000, log_domain: true }
    }
}

/// Rising factorial `(n)_i = n (n+1) ... (n+i-1)`.
///
/// Returns [`Error::LinearDomainRange`] once the product leaves the finite
/// range; [`ln_pochhammer_rising`] has no such limit.
pub fn pochhammer_rising(n: u64, i: u64) -> Result<f64> {
    let mut acc = 1.0_f64;
    for j in 0..i {
        acc *= (n + j) as f64;
        if !acc.is_finite() {
            return Err(Error::LinearDomainRange(format!("({n})_{i} overflows")));
        }
    }
    Ok(acc)
}

/// `ln (n)_i`.
pub fn ln_pochhammer_rising(n: u64, i: u64) -> f64 {
    compensated_sum((0..i).map(|j| ((n + j) as f64).ln()))
}

/// `p_k(n,a) = Σ_{i=0}^{k} C(k,i) (n)_i a^{k-i}` in the linear domain.
///
/// The sum is accumulated from `i = k` downwards; every term is positive.
pub fn p_coeff(n: u64, a: f64, k: u64) -> Result<f64> {
    let mut term = pochhammer_rising(n, k)?;
    let mut acc = NeumaierSum::default();
    acc.add(term);
    // term_{i-1} = term_i · i/(k-i+1) · a/(n+i-1)
    for i in (1..=k).rev() {
        term *= i as f64 / (k - i + 1) as f64 * a / (n + i - 1) as f64;
        acc.add(term);
    }
    let v = acc.value();
    if !v.is_finite() {
        return Err(Error::LinearDomainRange(format!("p_{k}({n}, {a}) overflows")));
    }
    Ok(v)
}

/// `ln p_k(n,a)`, by log-sum-exp over the same terms as [`p_coeff`].
pub fn ln_p_coeff(n: u64, a: f64, k: u64) -> f64 {
    let top = ln_pochhammer_rising(n, k);
    if a == 0.0 || k == 0 {
        return top;
    }
    let ln_a = a.ln();
    let mut logs = Vec::with_capacity(k as usize + 1);
    let mut t = top;
    logs.push(t);
    for i in (1..=k).rev() {
        t += (i as f64).ln() - ((k - i + 1) as f64).ln() + ln_a - ((n + i - 1) as f64).ln();
        logs.push(t);
    }
    log_sum_exp(&logs)
}

/// `ln W_{n,k}^a(x)`; `-∞` where the weight vanishes.
pub fn ln_basis_weight(params: &OperatorParams, k: u64, x: f64) -> f64 {
    if x == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let n = u64::from(params.n);
    let z = x / (1.0 + x);
    let ln_1px = x.ln_1p();
    -params.a * z + ln_p_coeff(n, params.a, k) - crate::special::ln_factorial(k) + k as f64 * x.ln()
        - (k + n) as f64 * ln_1px
}

/// `W_{n,k}^a(x)` through the log-domain path. Underflows quietly to zero.
pub fn basis_weight(params: &OperatorParams, k: u64, x: f64) -> f64 {
    ln_basis_weight(params, k, x).exp()
}

/// `W_{n,k}^a(x)` evaluated literally in the linear domain.
///
/// Fails with [`Error::LinearDomainRange`] when any factor leaves the
/// finite range (large `k` or `n`).
pub fn basis_weight_linear(params: &OperatorParams, k: u64, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    let n = u64::from(params.n);
    let p = p_coeff(n, params.a, k)?;
    let fact = pochhammer_rising(1, k)?;
    let z = x / (1.0 + x);
    let pow_x = x.powi(k as i32);
    let pow_1px = (1.0 + x).powi((k + n) as i32);
    if !pow_x.is_finite() || !pow_1px.is_finite() || pow_1px == 0.0 {
        return Err(Error::LinearDomainRange(format!("powers of x = {x} at k = {k}")));
    }
    let w = (-params.a * z).exp() * p / fact * pow_x / pow_1px;
    if !w.is_finite() {
        return Err(Error::LinearDomainRange(format!("W_{k} at x = {x}")));
    }
    Ok(w)
}

/// Natural-log threshold below which a Poisson factor is dropped.
const LN_NEGLIGIBLE: f64 = -700.0;

/// Sequential generator of `W_0(x), W_1(x), ...`.
#[derive(Debug, Clone)]
pub struct WeightStream {
    k: u64,
    size: u64,
    prob: f64,
    one_minus_prob: f64,
    z: f64,
    log_domain: bool,
    next_nb_linear: f64,
    nb_recent: VecDeque<f64>,
    poisson: Vec<f64>,
}

impl WeightStream {
    pub fn new(params: &OperatorParams, x: f64, log_domain: bool) -> Result<Self> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::InvalidArgument(format!("x must be finite and >= 0, got {x}")));
        }
        let size = u64::from(params.n);
        let z = x / (1.0 + x);
        let prob = 1.0 / (1.0 + x);
        let lambda = params.a * z;

        let mut poisson = Vec::new();
        let mut next_nb_linear = 0.0;
        if log_domain {
            for j in 0u64.. {
                let lp = ln_poisson_pmf(j, lambda);
                if (j as f64) > lambda && lp < LN_NEGLIGIBLE {
                    break;
                }
                poisson.push(lp.exp());
            }
        } else {
            let nb0 = (-(size as f64) * x.ln_1p()).exp();
            if nb0 < 1e-290 {
                return Err(Error::LinearDomainRange(format!("(1+x)^-n underflows at n = {size}, x = {x}")));
            }
            next_nb_linear = nb0;
            if lambda > 700.0 {
                return Err(Error::LinearDomainRange(format!("e^-az underflows at az = {lambda}")));
            }
            let mut p = (-lambda).exp();
            let mut j = 0u64;
            loop {
                poisson.push(p);
                j += 1;
                p *= lambda / j as f64;
                if (j as f64) > lambda && p < 1e-304 {
                    break;
                }
            }
        }
        Ok(Self {
            k: 0,
            size,
            prob,
            one_minus_prob: z,
            z,
            log_domain,
            next_nb_linear,
            nb_recent: VecDeque::with_capacity(poisson.len() + 1),
            poisson,
        })
    }

    /// Index of the next weight to be produced.
    pub fn position(&self) -> u64 {
        self.k
    }

    fn next_nb(&mut self) -> f64 {
        let i = self.k;
        if self.log_domain {
            ln_neg_binomial_pmf(i, self.size, self.prob, self.one_minus_prob).exp()
        } else {
            let v = self.next_nb_linear;
            self.next_nb_linear = v * (self.size + i) as f64 / (i + 1) as f64 * self.z;
            v
        }
    }
}

impl Iterator for WeightStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let nb = self.next_nb();
        self.nb_recent.push_front(nb);
        self.nb_recent.truncate(self.poisson.len());
        let w = compensated_sum(self.poisson.iter().zip(self.nb_recent.iter()).map(|(p, q)| p * q));
        self.k += 1;
        Some(w)
    }
}

/// Smallest `K` with `Σ_{k≤K} W_k(x) ≥ 1 - tail_epsilon`.
pub fn truncation_index(params: &OperatorParams, x: f64, policy: &SeriesPolicy) -> Result<usize> {
    Ok(basis_weights(params, x, policy)?.truncation_index())
}

/// Weights `W_0..=W_K` up to the truncation index, with their total mass.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisWeights {
    pub weights: Vec<f64>,
    pub mass: f64,
}

impl BasisWeights {
    pub fn truncation_index(&self) -> usize {
        self.weights.len() - 1
    }
}

pub fn basis_weights(params: &OperatorParams, x: f64, policy: &SeriesPolicy) -> Result<BasisWeights> {
    let stream = WeightStream::new(params, x, policy.log_domain)?;
    let mut mass = NeumaierSum::default();
    let mut weights = Vec::new();
    for w in stream.take(policy.k_max_hard + 1) {
        weights.push(w);
        mass.add(w);
        if mass.value() >= 1.0 - policy.tail_epsilon {
            return Ok(BasisWeights { weights, mass: mass.value() });
        }
    }
    Err(Error::TailNotAbsorbed { x, k_max_hard: policy.k_max_hard, mass: mass.value() })
}
