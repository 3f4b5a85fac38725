//! Optimal two-layer (refract-then-reflect) dividend strategies for
//! spectrally positive Levy surplus processes with phase-type jumps.
//!
//! The crate is organised bottom-up:
//!
//! * [`levy_model`]: the surplus `Y`, the refracted `X = Y - delta t`, their
//!   Laplace exponents and the roots of `psi(s) = q`;
//! * [`scale`]: scale functions as exponential sums, and the convolution
//!   functions built from them;
//! * [`valuation`]: the value `v_{a,b}` of any two-layer strategy and the
//!   single-control benchmarks;
//! * [`optimizer`]: the optimal levels `(a*, b*)`;
//! * [`mc`]: a Monte Carlo estimator of the same values, used as an oracle.

// `!(x >= 0.0)` style guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod expsum;
pub mod levy_model;
pub mod mc;
pub mod optimizer;
pub mod scale;
pub mod valuation;

pub use error::{Error, Result};
pub use expsum::{BelowZero, ExpSum, Side, Term};
pub use levy_model::{LevyModel, PhaseType, Process, RootSet};
pub use mc::{McEstimate, SimConfig};
pub use optimizer::{Case, Solution};
pub use scale::ScaleSet;
pub use valuation::{Problem, Strategy};
