#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod error;
pub mod function;
pub mod moments;
pub mod operators;
pub mod quadrature;
pub mod smoothness;
pub mod special;
