//! Determination of the Lagrange function of the first-order Taylor
//! remainder and enhancement of the tangent-line approximation by a natural
//! cubic spline fit of that remainder.
//!
//! The pipeline is: parse `y(x)` and differentiate it ([`bundle`]), find the
//! initial values `ξ_z` near `x0` ([`rootfind`]), integrate the
//! Lagrange-function ODE with a seventh-order Runge-Kutta method
//! ([`lagrange`], [`rk`]), then spline the remainder and compare the result
//! against the fifth-degree Taylor polynomial ([`enhance`], [`spline`]).

// `!(a < b)` comparisons deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundle;
pub mod enhance;
pub mod error;
pub mod expr;
pub mod lagrange;
pub mod parse;
pub mod remainder;
pub mod rk;
pub mod rootfind;
pub mod spline;

pub use bundle::DerivativeBundle;
pub use enhance::{
    build_enhanced, metrics, taylor_poly, CompositionMode, EnhancedApproximant, MetricsOptions,
    MetricsRow, TaylorPolynomial,
};
pub use error::{Error, Result};
pub use expr::{Expr, Func};
pub use lagrange::{
    auto_switch_points, make_rhs, remainder_samples, solve_lagrange, splice, Crossing, LagrangeRhs,
    LagrangeTrajectory, RemainderSamples,
};
pub use parse::parse;
pub use rk::{integrate, ButcherTableau, GridSolution};
pub use rootfind::{find_xi_z, xi_z_residual, InitialValueSeed};
pub use spline::{bound_bu, build_natural_spline, BoundReport, SplineModel};
