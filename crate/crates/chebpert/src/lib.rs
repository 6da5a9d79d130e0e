//! Orthogonal polynomials for smoothly perturbed Chebyshev weights.
//!
//! The measure family is rho(x) |v_i(x)| dx / sqrt(1-x^2) on [-1, 1], where
//! rho is a strictly positive density with m >= 3 continuous derivatives of
//! 1/rho and v_i is one of the four endpoint factors 1, x^2-1, x+1, x-1
//! (the four classical Chebyshev families when rho = 1). The crate computes
//!
//! * recurrence coefficients and scaled polynomial values by a discretized
//!   Stieltjes procedure ([`orthopoly`]),
//! * the explicit strong-asymptotic ingredients: the conformal map, Szego
//!   functions, and phases ([`szego`]),
//! * the error scale eps_n = (log n / n^m) omega((1/rho)^(m); 1/n)
//!   ([`weights`]),
//! * a continuous extension of 1/rho off the interval with pointwise-
//!   controlled dbar derivative ([`dbar`]), and
//! * an experiment harness that verifies the asymptotic formulas and fits
//!   empirical convergence rates ([`harness`]).

pub mod cheb;
pub mod dbar;
pub mod error;
pub mod harness;
mod numfmt;
pub mod orthopoly;
pub mod szego;
pub mod weights;

pub use error::{Error, Result};
pub use weights::{Kind, WeightSpec};
