//! Characteristic functions with a prescribed essential support, and the
//! finite families of distinct characteristic functions that share an
//! `n`-th power with them.
//!
//! The pipeline is:
//!
//! 1. [`support::SupportSpec`] describes a symmetric union of `2k + 1` open
//!    intervals and derives the kernel half-width `rho`.
//! 2. [`kernel::Kernel`] is the seed characteristic function (a triangle
//!    supported on `[-rho, rho]`) with a closed-form, nonnegative inverse
//!    transform.
//! 3. [`construct::Blueprint`] translates the kernel across every component,
//!    weights the translates so the inverse transform stays nonnegative, and
//!    evaluates the base function `f` and its phase-twisted relatives `g_omega`.
//! 4. [`family`] enumerates the `n^k` members, certifies that they are
//!    pairwise distinct and recovers `omega` from sampled values.
//! 5. [`analyze`] holds the numerical verification battery and the
//!    per-component phase extraction that bounds the family size.
//! 6. [`distribution`] treats every member as a probability law: density,
//!    CDF, sampling and empirical characteristic functions.
//!
//! ```
//! use cnroots::{construct::Blueprint, family::PhaseVector, support::SupportSpec};
//!
//! let spec = SupportSpec::validate(1.0, &[(2.0, 4.0)]).unwrap();
//! let bp = Blueprint::from_spec(&spec);
//! let omega = PhaseVector::new(vec![1], 3).unwrap();
//! let g = bp.member(&omega).unwrap();
//! let f3 = bp.eval_f(3.0).powu(3);
//! assert!((g.eval(3.0).powu(3) - f3).norm() < 1e-12);
//! ```

// `!(a < b)` is used on purpose throughout so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analyze;
pub mod config;
pub mod construct;
pub mod distribution;
pub mod error;
pub mod family;
pub mod kernel;
pub(crate) mod quadrature;
pub mod support;

pub use error::{Error, Result};
pub use num_complex::Complex64;
