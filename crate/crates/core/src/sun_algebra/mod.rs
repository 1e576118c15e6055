//! Small dense complex linear algebra and the SU(n) generator basis.

mod basis;
mod eig;
mod expm;
mod matrix;

pub use basis::GeneratorBasis;
pub use eig::{eig, Spectrum, DEGENERACY_GAP};
pub use expm::expm;
pub use matrix::{ComplexMatrix, C64, I, ONE, ZERO};

use crate::error::Result;
use crate::polyakov::LinkConfig;

/// Builds the `n² − 1` generators of SU(n).
pub fn generator_basis(n: usize) -> Result<GeneratorBasis> {
    GeneratorBasis::new(n)
}

/// ΔF = Σ_k ‖U_k‖_F² − N n.
///
/// Zero exactly when every link is unitary. Values within `1e-9` below zero
/// are rounding noise and are clamped.
pub fn unitarity_distance(config: &LinkConfig) -> f64 {
    let total: f64 = config.links().iter().map(ComplexMatrix::frobenius_sqr).sum();
    let df = total - (config.len() * config.dim()) as f64;
    if (-1e-9..0.0).contains(&df) {
        0.0
    } else {
        df
    }
}
