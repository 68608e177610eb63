//! Moduli of smoothness, K-functional estimates, weighted norms, and
//! numerical checks of the approximation error bounds.

pub mod bounds;
pub mod gamma;
pub mod kfunctional;
pub mod moduli;
pub mod weighted;

pub use bounds::{
    check_algebraic_inequality, check_lip_star_bound, check_modulus_decay, check_pointwise_inequality, check_scaling_inequality,
    check_smooth_bound, check_weighted_bound, verify_lip_star, write_bound_csv, BoundCheckRecord, BoundTheorem, FittedConstant,
    BOUND_CSV_HEADER,
};
pub use gamma::{gamma_n, gamma_n_reconstructed, shift, ShiftForm};
pub use kfunctional::{k_functional_estimate, Smoother};
pub use moduli::{modulus_omega, modulus_omega2, weighted_modulus, ModulusEstimate, ModulusKind, Window};
pub use weighted::{convergence_table, weighted_norm, ConvergenceRow, DecayCheck, WeightedSpaceParams};
