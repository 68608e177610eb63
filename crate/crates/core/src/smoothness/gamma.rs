//! The second-order scale `γ_n(x)` of the smooth-function error bound.

use crate::basis::OperatorParams;
use crate::moments::exact;

/// Which displacement of the first moment enters the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftForm {
    /// `β/N·x + a/N·x/(1+x) + (2α+1)/(2N)`.
    Statement,
    /// `n/N·x + a/N·x/(1+x) + (2α+1)/(2N)`.
    Proof,
}

impl ShiftForm {
    pub fn as_str(self) -> &'static str {
        match self {
            ShiftForm::Statement => "statement",
            ShiftForm::Proof => "proof",
        }
    }
}

pub fn shift(params: &OperatorParams, x: f64, form: ShiftForm) -> f64 {
    let big_n = params.denom();
    let lead = match form {
        ShiftForm::Statement => params.beta,
        ShiftForm::Proof => f64::from(params.n),
    };
    (lead * x + params.a * x / (1.0 + x) + params.alpha + 0.5) / big_n
}

/// `γ_n(x)` as published.
pub fn gamma_n(params: &OperatorParams, x: f64) -> f64 {
    let n = f64::from(params.n);
    let (a, al, be) = (params.a, params.alpha, params.beta);
    let u = x / (1.0 + x);
    ((n + 2.0 * be * be) * x * x + (n - be) * x + 2.0 * a * a * u * u + a * (3.0 + 4.0 * al) * u + (7.0 * al * al + 4.0 * al + 2.0) / 3.0)
        / params.denom().powi(2)
}

/// `T((t-x)²; x) + shift(x)²` with the exact second central moment and the
/// statement-form shift.
pub fn gamma_n_reconstructed(params: &OperatorParams, x: f64) -> f64 {
    let psi2 = exact::central_moment_t(params, 2, x).expect("order 2 is supported");
    let s = shift(params, x, ShiftForm::Statement);
    psi2 + s * s
}
