use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, C64, I, ONE, ZERO};
use crate::error::{Error, Result};

/// Hermitian traceless generators of SU(n), normalized so that
/// `tr(λ_a λ_b) = 2 δ_ab`.
///
/// Ordering is recursive: the embedded SU(n-1) basis `diag(λ, 0)` first,
/// then for each row `j < n-1` the symmetric/antisymmetric pair coupling
/// `j` with the last row, then the diagonal generator
/// `sqrt(2/(n(n-1))) diag(1, ..., 1, 1-n)`. For n = 2 and n = 3 this yields
/// the Pauli and Gell-Mann matrices, with the antisymmetric members carrying
/// `+i` above the diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorBasis {
    dim: usize,
    generators: Vec<ComplexMatrix>,
}

impl GeneratorBasis {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Self {
            dim: n,
            generators: build(n),
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of generators, `n² − 1`.
    #[inline]
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    #[inline]
    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    #[inline]
    pub fn get(&self, a: usize) -> &ComplexMatrix {
        &self.generators[a]
    }

    /// `Σ_a c_a λ_a`.
    pub fn combine(&self, coeffs: &[C64]) -> ComplexMatrix {
        debug_assert_eq!(coeffs.len(), self.len());
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for (c, g) in coeffs.iter().zip(&self.generators) {
            if *c == ZERO {
                continue;
            }
            for (o, e) in out.iter_mut().zip(g.as_slice()) {
                if *e != ZERO {
                    *o += c * e;
                }
            }
        }
        ComplexMatrix::from_vec(n, out).expect("square by construction")
    }

    /// `Σ_a c_a λ_a` for real coefficients.
    pub fn combine_real(&self, coeffs: &[f64]) -> ComplexMatrix {
        let c: Vec<C64> = coeffs.iter().map(|&x| C64::new(x, 0.0)).collect();
        self.combine(&c)
    }

    /// Expansion coefficients `tr(λ_a M) / 2` of the traceless part of `m`.
    pub fn components(&self, m: &ComplexMatrix) -> Vec<C64> {
        self.generators.iter().map(|g| g.trace_product(m) * 0.5).collect()
    }

    /// `Σ_a λ_a²`, which equals `(2(n²−1)/n) I`.
    pub fn casimir(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim);
        for g in &self.generators {
            acc += &(g * g);
        }
        acc
    }

    /// Whether generator `a` has any nonzero diagonal entry.
    pub fn has_diagonal(&self, a: usize) -> bool {
        self.generators[a].diagonal().iter().any(|z| z.norm() > 0.0)
    }
}

fn build(n: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(n * n - 1);
    if n > 2 {
        for g in build(n - 1) {
            let mut e = ComplexMatrix::zeros(n);
            for i in 0..n - 1 {
                for j in 0..n - 1 {
                    e[(i, j)] = g[(i, j)];
                }
            }
            out.push(e);
        }
    }
    let last = n - 1;
    for j in 0..last {
        let mut sym = ComplexMatrix::zeros(n);
        sym[(j, last)] = ONE;
        sym[(last, j)] = ONE;
        out.push(sym);

        let mut anti = ComplexMatrix::zeros(n);
        anti[(j, last)] = I;
        anti[(last, j)] = -I;
        out.push(anti);
    }
    let norm = (2.0 / (n * (n - 1)) as f64).sqrt();
    let mut diag = vec![C64::new(norm, 0.0); n];
    diag[last] = C64::new(norm * (1.0 - n as f64), 0.0);
    out.push(ComplexMatrix::from_diag(&diag));
    out
}
