//! Quadrature-collocation solvers for Prandtl-type hypersingular
//! integro-differential equations on `(-1, 1)`:
//!
//! ```text
//! σ(y) ζ(y) + d/dy [ a ζ(y) + (b/π) ∫ ζ(x)/(x-y) dx ] + (1/π) ∫ (k + h)(x, y) ζ(x) dx = g(y)
//! ```
//!
//! with `a = cos πα`, `b = -sin πα` and `ζ = ρ f`, `ρ = (1-x)^α (1+x)^{1-α}`.
//! The unknown `f` is represented on a weighted Lagrange basis built from
//! orthonormal Jacobi polynomials and the equation is collocated at the zeros
//! of `p_m^w`, `w = (1-x)^{1-α} (1+x)^α`.
//!
//! The polynomial and linear-algebra layers are generic over [`Real`];
//! the solver layer works in `f64`.

// `!(x < y)` is used deliberately so that NaN falls into the error branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembler;
pub mod config;
pub mod error;
pub mod funcdsl;
pub mod jacobi;
pub mod kernel;
pub mod lagrange;
pub mod linalg;
pub mod oracle;
pub mod presets;
pub mod scalar;
pub mod solver;

pub use assembler::{assemble, assemble_method1, assemble_method2, DiscreteSystem};
pub use error::{Error, Result};
pub use funcdsl::{parse, Expr};
pub use jacobi::{build_ortho_system, gauss_jacobi, gauss_rule, JacobiExponents};
pub use kernel::{h_block, k_block, modified_moments, MomentOptions, MomentTable, SmoothKernel, WeakKernel};
pub use lagrange::{validate_exponents, ExponentReport, Method, PsiBasis};
pub use linalg::{cond_inf, lu_solve, LuFactors};
pub use scalar::Real;
pub use solver::{
    convergence_study, eoc, error_metrics, evaluate_zeta, nu_estimator, solve, solve_with_cond, wing_preset,
    ApproxSolution, ConvergenceReport, ProblemSpec, Reference, ReferencePolicy, ReportRow, Sigma, WingShape,
};

pub type Matrix = linalg::Matrix<f64>;
pub type Matrix32 = linalg::Matrix<f32>;
pub type OrthoSystem = jacobi::OrthoSystem<f64>;
pub type OrthoSystem32 = jacobi::OrthoSystem<f32>;
pub type GaussRule = jacobi::GaussRule<f64>;
pub type GaussRule32 = jacobi::GaussRule<f32>;
