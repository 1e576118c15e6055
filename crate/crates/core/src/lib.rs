#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Complex Langevin simulation of the one-dimensional periodic SU(n)
//! Polyakov chain, with gauge cooling, the reduced SU(2) eigen-angle
//! dynamics, and quadrature reference values.
//!
//! The chain has action `S = −tr(β₁ P + β₂ P⁻¹)` with `P = U₁ ⋯ U_N`. Links
//! live in SL(n, ℂ) once the drift is complex, and gauge cooling pulls them
//! back toward SU(n) after each step.

pub mod cooling;
pub mod error;
pub mod exact;
pub mod langevin;
pub mod polyakov;
pub mod reduced;
pub mod stats;
pub mod sun_algebra;

pub use cooling::{cool, cool_optimal, CoolingOutcome, CoolingStrategy, RealTable};
pub use error::{Error, Result};
pub use exact::{su2_expectation, su3_expectation, QuadratureSpec};
pub use langevin::{euler_step, run_chain, run_chain_with, ChainReport, RunOptions, RunStatus, Schedule};
pub use polyakov::{action, drift, gauge_transform, loop_observable, ChainParams, LinkConfig};
pub use reduced::{
    drift_reduced, flow_field, is_localized, localization_f, run_reduced, run_reduced_with, ReducedParams,
};
pub use sun_algebra::{ComplexMatrix, GeneratorBasis, C64};
