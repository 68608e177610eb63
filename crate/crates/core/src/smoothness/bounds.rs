//! Numerical checks of the pointwise and weighted error bounds, with the
//! unspecified absolute constants fitted over an `n` sweep.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::basis::{OperatorParams, SeriesPolicy};
use crate::error::{Error, Result};
use crate::function::{LipStarCertificate, Smoothness, TestFunction};
use crate::moments::{fmt_num, oracle_moment, MomentKind};
use crate::operators::{default_quadrature, eval_t};
use crate::smoothness::gamma::{gamma_n, gamma_n_reconstructed, shift, ShiftForm};
use crate::smoothness::moduli::{modulus_omega, modulus_omega2, weighted_modulus, Window};

/// The three error bounds under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundTheorem {
    /// `|T(f;x) - f(x)| ≤ K ω₂(f; √γ_n(x)) + ω(f; shift(x))` for `f ∈ C²_B`.
    Smooth,
    /// `|T(f;x) - f(x)| ≤ M (Λ_n(x)/x)^{γ/2}` for `f ∈ Lip*_M(γ)`.
    LipStar,
    /// `sup_x |T(f;x) - f(x)|/(1+x²)³ ≤ M Ω(f; N^{-1/2})`.
    Weighted,
}

impl BoundTheorem {
    pub fn label(self) -> &'static str {
        match self {
            BoundTheorem::Smooth => "T3.1",
            BoundTheorem::LipStar => "T3.2",
            BoundTheorem::Weighted => "T4.3",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        match label {
            "T3.1" => Some(BoundTheorem::Smooth),
            "T3.2" => Some(BoundTheorem::LipStar),
            "T4.3" => Some(BoundTheorem::Weighted),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheckRecord {
    pub theorem: BoundTheorem,
    pub params: OperatorParams,
    pub x: f64,
    pub empirical_error: f64,
    pub theoretical_bound: f64,
    pub fitted_constant: f64,
    pub holds: bool,
}

pub const BOUND_CSV_HEADER: &str = "theorem,n,a,alpha,beta,x,empirical_error,theoretical_bound,fitted_constant,holds";

pub fn write_bound_csv<W: Write>(mut out: W, records: &[BoundCheckRecord]) -> std::io::Result<()> {
    writeln!(out, "{BOUND_CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.theorem.label(),
            r.params.n,
            fmt_num(r.params.a),
            fmt_num(r.params.alpha),
            fmt_num(r.params.beta),
            fmt_num(r.x),
            fmt_num(r.empirical_error),
            fmt_num(r.theoretical_bound),
            fmt_num(r.fitted_constant),
            r.holds
        )?;
    }
    Ok(())
}

/// Constant needed at one `n` and the running maximum over the sweep so far.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FittedConstant {
    pub n: u32,
    pub required: f64,
    pub fitted: f64,
}

/// `max/min` of the fitted constants; 1 when all vanish.
pub fn stability_ratio(constants: &[FittedConstant]) -> f64 {
    let max = constants.iter().map(|c| c.fitted).fold(0.0_f64, f64::max);
    let min = constants.iter().map(|c| c.fitted).fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        1.0
    } else if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// `max/min` of the per-`n` required constants; 1 when all vanish.
pub fn required_ratio(constants: &[FittedConstant]) -> f64 {
    let max = constants.iter().map(|c| c.required).fold(0.0_f64, f64::max);
    let min = constants.iter().map(|c| c.required).fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        1.0
    } else if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn running_max(per_n: &[(u32, f64)]) -> Vec<FittedConstant> {
    let mut fitted = 0.0_f64;
    per_n
        .iter()
        .map(|&(n, required)| {
            fitted = fitted.max(required);
            FittedConstant { n, required, fitted }
        })
        .collect()
}

/// Ratio that tolerates `0/0`.
fn required(err: f64, scale: f64) -> f64 {
    if err == 0.0 {
        0.0
    } else if scale > 0.0 {
        err / scale
    } else {
        f64::INFINITY
    }
}

/// Errors below this level are indistinguishable from series truncation.
fn noise_floor(policy: &SeriesPolicy, fx: f64) -> f64 {
    10.0 * policy.tail_epsilon * fx.abs().max(1.0)
}

/// `(|T(f;x) - f(x)|, noise floor)`.
fn operator_error(params: &OperatorParams, f: &TestFunction, x: f64, policy: &SeriesPolicy) -> Result<(f64, f64)> {
    let quad = default_quadrature(f, policy);
    let fx = f.eval(x);
    Ok(((eval_t(params, f, x, policy, &quad)? - fx).abs(), noise_floor(policy, fx)))
}

/// Error with the truncation noise removed, used to fit constants.
fn resolved(err: f64, noise: f64) -> f64 {
    (err - noise).max(0.0)
}

fn grid_params(ns: &[u32], a: f64, alpha: f64, beta: f64) -> Result<Vec<OperatorParams>> {
    if ns.is_empty() {
        return Err(Error::InvalidArgument("empty n list".into()));
    }
    ns.iter().map(|&n| OperatorParams::new(n, a, alpha, beta)).collect()
}

/// Everything computed at one `(n, x)` cell of the smooth-function sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothCell {
    pub params: OperatorParams,
    pub x: f64,
    pub error: f64,
    pub noise: f64,
    pub gamma_literal: f64,
    pub gamma_reconstructed: f64,
    /// Inflated `ω₂(f; √γ_n(x))`.
    pub omega2: f64,
    /// Inflated `ω(f; shift(x))` for the statement and proof shifts.
    pub omega_statement: f64,
    pub omega_proof: f64,
}

impl SmoothCell {
    /// `K` needed from the `ω₂` term alone.
    pub fn k_without_omega(&self) -> f64 {
        required(resolved(self.error, self.noise), self.omega2)
    }

    /// `K` needed once the `ω` term of the given form is credited.
    pub fn k_with_omega(&self, form: ShiftForm) -> f64 {
        let w = match form {
            ShiftForm::Statement => self.omega_statement,
            ShiftForm::Proof => self.omega_proof,
        };
        required(resolved(self.error, self.noise + w), self.omega2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothSweep {
    pub function: String,
    pub cells: Vec<SmoothCell>,
    pub constants: Vec<FittedConstant>,
    pub records: Vec<BoundCheckRecord>,
    pub stability_ratio: f64,
}

/// Smooth-function bound. `K` is fitted on `|T f - f| ≤ K ω₂` alone, which
/// implies the full inequality with either shift; the records carry the
/// statement-form right-hand side `K ω₂ + ω(f; shift)`.
#[allow(clippy::too_many_arguments)]
pub fn check_smooth_bound(
    f: &TestFunction,
    a: f64,
    alpha: f64,
    beta: f64,
    ns: &[u32],
    xs: &[f64],
    window: &Window,
    policy: &SeriesPolicy,
) -> Result<SmoothSweep> {
    if f.smoothness != Smoothness::TwiceDifferentiable {
        return Err(Error::MetadataMismatch(format!("{} is not twice continuously differentiable", f.name())));
    }
    let params = grid_params(ns, a, alpha, beta)?;
    let jobs: Vec<(OperatorParams, f64)> = params.iter().flat_map(|p| xs.iter().map(move |&x| (*p, x))).collect();
    let cells: Vec<SmoothCell> = jobs
        .par_iter()
        .map(|&(p, x)| -> Result<SmoothCell> {
            let (error, noise) = operator_error(&p, f, x, policy)?;
            let gl = gamma_n(&p, x);
            let omega2 = modulus_omega2(f, gl.sqrt(), window)?.inflated();
            let omega_statement = modulus_omega(f, shift(&p, x, ShiftForm::Statement), window)?.inflated();
            let omega_proof = modulus_omega(f, shift(&p, x, ShiftForm::Proof), window)?.inflated();
            Ok(SmoothCell {
                params: p,
                x,
                error,
                noise,
                gamma_literal: gl,
                gamma_reconstructed: gamma_n_reconstructed(&p, x),
                omega2,
                omega_statement,
                omega_proof,
            })
        })
        .collect::<Result<_>>()?;
    let per_n: Vec<(u32, f64)> = ns
        .iter()
        .map(|&n| {
            let k = cells.iter().filter(|c| c.params.n == n).map(SmoothCell::k_without_omega).fold(0.0, f64::max);
            (n, k)
        })
        .collect();
    let constants = running_max(&per_n);
    let records = cells
        .iter()
        .map(|c| {
            let k = constants.iter().find(|k| k.n == c.params.n).map_or(f64::NAN, |k| k.fitted);
            let bound = k * c.omega2 + c.omega_statement;
            BoundCheckRecord {
                theorem: BoundTheorem::Smooth,
                params: c.params,
                x: c.x,
                empirical_error: c.error,
                theoretical_bound: bound,
                fitted_constant: k,
                holds: c.error <= bound + c.noise,
            }
        })
        .collect();
    Ok(SmoothSweep { function: f.name().to_string(), stability_ratio: stability_ratio(&constants), cells, constants, records })
}

/// Checks `|f(t) - f(x)| ≤ M |t-x|^γ / (t+x)^{γ/2}` on `pairs` random
/// pairs drawn log-uniformly from `[1e-6, 1e3]`.
pub fn verify_lip_star(f: &TestFunction, cert: &LipStarCertificate, pairs: usize, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (1e-6_f64.ln(), 1e3_f64.ln());
    for _ in 0..pairs {
        let t = rng.gen_range(lo..hi).exp();
        let x = rng.gen_range(lo..hi).exp();
        let lhs = (f.eval(t) - f.eval(x)).abs();
        let rhs = cert.constant * (t - x).abs().powf(cert.exponent) / (t + x).powf(cert.exponent / 2.0);
        if lhs > rhs + 1e-9 {
            return Err(Error::CertificateViolation { t, x, excess: lhs - rhs });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipStarSweep {
    pub function: String,
    pub certificate: LipStarCertificate,
    pub records: Vec<BoundCheckRecord>,
    pub constants: Vec<FittedConstant>,
    pub stability_ratio: f64,
}

impl LipStarSweep {
    /// `(n, |T f - f|·√n)` at the given `x`, in sweep order.
    pub fn scaled_errors_at(&self, x: f64) -> Vec<(u32, f64)> {
        self.records
            .iter()
            .filter(|r| r.x == x)
            .map(|r| (r.params.n, r.empirical_error * f64::from(r.params.n).sqrt()))
            .collect()
    }
}

/// Lipschitz-type bound with `Λ_n(x)` the oracle second central moment.
/// `fitted_constant` is the running maximum over `n` of the `M` the data
/// require; `holds` compares against the certified `M`.
pub fn check_lip_star_bound(
    f: &TestFunction,
    a: f64,
    alpha: f64,
    beta: f64,
    ns: &[u32],
    xs: &[f64],
    policy: &SeriesPolicy,
) -> Result<LipStarSweep> {
    let cert = f.lip_star.ok_or_else(|| Error::MetadataMismatch(format!("{} carries no Lip* certificate", f.name())))?;
    verify_lip_star(f, &cert, 10_000, 0x5eed)?;
    if let Some(&x) = xs.iter().find(|&&x| !(x > 0.0)) {
        return Err(Error::DomainViolation { x, domain: "(0, inf)", operator: "Lip* bound" });
    }
    let params = grid_params(ns, a, alpha, beta)?;
    let oracle_policy = SeriesPolicy::oracle();
    let jobs: Vec<(OperatorParams, f64)> = params.iter().flat_map(|p| xs.iter().map(move |&x| (*p, x))).collect();
    let cells: Vec<(OperatorParams, f64, f64, f64, f64)> = jobs
        .par_iter()
        .map(|&(p, x)| -> Result<_> {
            let (err, noise) = operator_error(&p, f, x, policy)?;
            let lambda = oracle_moment(MomentKind::CentralT, &p, 2, x, &oracle_policy)?;
            let scale = (lambda / x).powf(cert.exponent / 2.0);
            Ok((p, x, err, noise, scale))
        })
        .collect::<Result<_>>()?;
    let per_n: Vec<(u32, f64)> = ns
        .iter()
        .map(|&n| (n, cells.iter().filter(|c| c.0.n == n).map(|c| required(resolved(c.2, c.3), c.4)).fold(0.0, f64::max)))
        .collect();
    let constants = running_max(&per_n);
    let records = cells
        .iter()
        .map(|&(p, x, err, noise, scale)| {
            let fitted = constants.iter().find(|k| k.n == p.n).map_or(f64::NAN, |k| k.fitted);
            let bound = cert.constant * scale;
            BoundCheckRecord {
                theorem: BoundTheorem::LipStar,
                params: p,
                x,
                empirical_error: err,
                theoretical_bound: bound,
                fitted_constant: fitted,
                holds: err <= bound + noise,
            }
        })
        .collect();
    Ok(LipStarSweep { function: f.name().to_string(), certificate: cert, stability_ratio: stability_ratio(&constants), records, constants })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSweep {
    pub function: String,
    pub records: Vec<BoundCheckRecord>,
    pub constants: Vec<FittedConstant>,
    /// `(n, sup_x |T f - f|/(1+x²)³, inflated Ω(f; N^{-1/2}))`.
    pub sides: Vec<(u32, f64, f64)>,
    pub stability_ratio: f64,
}

/// Weighted bound over `x ∈ xs`, with `Ω` estimated on `window`.
#[allow(clippy::too_many_arguments)]
pub fn check_weighted_bound(
    f: &TestFunction,
    a: f64,
    alpha: f64,
    beta: f64,
    ns: &[u32],
    xs: &[f64],
    window: &Window,
    policy: &SeriesPolicy,
) -> Result<WeightedSweep> {
    if !f.growth.within_rho() {
        return Err(Error::MetadataMismatch(format!("{} grows faster than 1 + x^2", f.name())));
    }
    let params = grid_params(ns, a, alpha, beta)?;
    let jobs: Vec<(OperatorParams, f64)> = params.iter().flat_map(|p| xs.iter().map(move |&x| (*p, x))).collect();
    let errors: Vec<(f64, f64)> = jobs.par_iter().map(|&(p, x)| operator_error(&p, f, x, policy)).collect::<Result<_>>()?;
    let mut sides = Vec::with_capacity(params.len());
    for p in &params {
        let lhs = jobs
            .iter()
            .zip(&errors)
            .filter(|(j, _)| j.0.n == p.n)
            .map(|(j, e)| resolved(e.0, e.1) / (1.0 + j.1 * j.1).powi(3))
            .fold(0.0, f64::max);
        let omega = weighted_modulus(f, p.denom().powf(-0.5), window)?.inflated();
        sides.push((p.n, lhs, omega));
    }
    let per_n: Vec<(u32, f64)> = sides.iter().map(|&(n, lhs, omega)| (n, required(lhs, omega))).collect();
    let constants = running_max(&per_n);
    let records = jobs
        .iter()
        .zip(&errors)
        .map(|(&(p, x), &(err, noise))| {
            let k = constants.iter().find(|k| k.n == p.n).map_or(f64::NAN, |k| k.fitted);
            let omega = sides.iter().find(|s| s.0 == p.n).map_or(f64::NAN, |s| s.2);
            let bound = k * omega * (1.0 + x * x).powi(3);
            BoundCheckRecord {
                theorem: BoundTheorem::Weighted,
                params: p,
                x,
                empirical_error: err,
                theoretical_bound: bound,
                fitted_constant: k,
                holds: err <= bound + noise,
            }
        })
        .collect();
    Ok(WeightedSweep { function: f.name().to_string(), stability_ratio: stability_ratio(&constants), records, constants, sides })
}

/// Outcome of `Ω(f; λδ) ≤ 2(1+λ)(1+δ²) Ω(f; δ)` at one `(λ, δ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingCheck {
    pub lambda: f64,
    pub delta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn check_scaling_inequality(f: &TestFunction, lambdas: &[f64], deltas: &[f64], window: &Window) -> Result<Vec<ScalingCheck>> {
    let mut out = Vec::new();
    for &delta in deltas {
        let base = weighted_modulus(f, delta, window)?.value;
        for &lambda in lambdas {
            let lhs = weighted_modulus(f, lambda * delta, window)?.value;
            let rhs = 2.0 * (1.0 + lambda) * (1.0 + delta * delta) * base;
            out.push(ScalingCheck { lambda, delta, lhs, rhs, holds: lhs <= rhs + 1e-12 });
        }
    }
    Ok(out)
}

/// `(Ω(f; small), Ω(f; 1), Ω(f; small) ≤ 0.01 Ω(f; 1))`.
pub fn check_modulus_decay(f: &TestFunction, small: f64, window: &Window) -> Result<(f64, f64, bool)> {
    let lo = weighted_modulus(f, small, window)?.value;
    let hi = weighted_modulus(f, 1.0, window)?.value;
    Ok((lo, hi, lo <= 0.01 * hi))
}

/// Worst ratio `|f(t) - f(x)| / (2(|t-x|/δ + 1) Ω (1+x²)(1+(t-x)²))` over
/// random pairs in the window, with `Ω` inflated. Values `≤ 1` mean the
/// pointwise inequality held at every pair.
pub fn check_pointwise_inequality(f: &TestFunction, delta: f64, window: &Window, pairs: usize, seed: u64) -> Result<f64> {
    let omega = weighted_modulus(f, delta, window)?.inflated();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..pairs {
        let t = rng.gen_range(window.lo..=window.hi);
        let x = rng.gen_range(window.lo..=window.hi);
        let lhs = (f.eval(t) - f.eval(x)).abs();
        let d = (t - x).abs();
        let rhs = 2.0 * (d / delta + 1.0) * omega * (1.0 + x * x) * (1.0 + d * d);
        if lhs > 0.0 {
            worst = worst.max(if rhs > 0.0 { lhs / rhs } else { f64::INFINITY });
        }
    }
    Ok(worst)
}

/// Worst ratio LHS/RHS of `(|t-x|/δ + 1)(1+(t-x)²) ≤ 2(1+δ²)(1+(t-x)⁴/δ⁴)`
/// over random triples: `t, x` uniform on `[0, 20]`, `δ` log-uniform on
/// `[1e-3, 10]`.
pub fn check_algebraic_inequality(triples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (1e-3_f64.ln(), 10_f64.ln());
    let mut worst = 0.0_f64;
    for _ in 0..triples {
        let t: f64 = rng.gen_range(0.0..20.0);
        let x: f64 = rng.gen_range(0.0..20.0);
        let delta = rng.gen_range(lo..hi).exp();
        let d = (t - x).abs();
        let lhs = (d / delta + 1.0) * (1.0 + d * d);
        let rhs = 2.0 * (1.0 + delta * delta) * (1.0 + (d / delta).powi(4));
        worst = worst.max(lhs / rhs);
    }
    worst
}
