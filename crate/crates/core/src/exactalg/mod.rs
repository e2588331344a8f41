//! Exact scalar and quasi-polynomial algebra.

pub mod dense;
pub mod linalg;
pub mod qpoly;
pub mod scalar;
pub mod wronskian;

pub use linalg::Matrix;
pub use qpoly::{Degree, QuasiPoly};
pub use scalar::{q, qi, CycScalar, Q};
pub use wronskian::{
    divided_wronskian, gcd_squarefree, is_squarefree, substitute_scale, wronskian, wronskian_ode_solve, BranchRule, Normalization,
    OdeSolution,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgError {
    #[error("inexact division: quotient is not finitely supported")]
    InexactDivision,
    #[error("Wronskian equation has no solution within the degree bound")]
    NoSolution,
    #[error("normalization does not pin a unique solution")]
    AmbiguousNormalization,
    #[error("branch undefined for scale factor on fractional support")]
    BranchUndefined,
    #[error("empty input")]
    Empty,
}
