//! Reference expectation values of the loop observables from Weyl's
//! integration formula, evaluated with the periodic trapezoid rule.
//!
//! For SU(3) with eigenvalues `e^{iφ₁}, e^{iφ₂}, e^{−i(φ₁+φ₂)}` the weight is
//! `|Δ(z)|² exp(β₁ tr U + β₂ tr U⁻¹)` and the observable `tr Uᵏ`. For SU(2)
//! with eigenvalues `e^{∓is}` it is `sin² s · exp(2β cos s)` and `2 cos ks`.
//! The integrands are entire and periodic, so the rule converges
//! exponentially in the number of points.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sun_algebra::C64;

pub const MIN_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub points_per_dim: usize,
}

impl QuadratureSpec {
    pub fn new(points_per_dim: usize) -> Result<Self> {
        let q = Self { points_per_dim };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points_per_dim < MIN_POINTS {
            return Err(Error::InvalidArgument(format!(
                "points_per_dim must be at least {MIN_POINTS}, got {}",
                self.points_per_dim
            )));
        }
        Ok(())
    }

    fn nodes(&self) -> Vec<(f64, f64)> {
        let h = 2.0 * PI / self.points_per_dim as f64;
        (0..self.points_per_dim)
            .map(|j| (-PI + h * j as f64).sin_cos())
            .collect()
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { points_per_dim: 512 }
    }
}

fn check_inputs(k: i32, betas: &[C64], quad: &QuadratureSpec) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("observable power k must be nonzero".into()));
    }
    if betas.iter().any(|b| !(b.re.is_finite() && b.im.is_finite())) {
        return Err(Error::InvalidArgument("couplings must be finite".into()));
    }
    quad.validate()
}

/// `⟨tr Uᵏ⟩` over SU(3) with action `−β₁ tr U − β₂ tr U⁻¹`.
pub fn su3_expectation(k: i32, beta1: C64, beta2: C64, quad: &QuadratureSpec) -> Result<C64> {
    check_inputs(k, &[beta1, beta2], quad)?;
    let nodes = quad.nodes();
    let unit: Vec<C64> = nodes.iter().map(|&(s, c)| C64::new(c, s)).collect();
    // |Re(β₁ tr U + β₂ tr U⁻¹)| ≤ 3(|β₁| + |β₂|); shift to keep exp bounded
    let shift = 3.0 * (beta1.norm() + beta2.norm());
    let mut num = C64::new(0.0, 0.0);
    let mut den = C64::new(0.0, 0.0);
    for &z1 in &unit {
        let z1k = z1.powi(k);
        for &z2 in &unit {
            let z3 = (z1 * z2).conj();
            let vdm = (z1 - z2).norm_sqr() * (z1 - z3).norm_sqr() * (z2 - z3).norm_sqr();
            let tr = z1 + z2 + z3;
            let w = (beta1 * tr + beta2 * tr.conj() - shift).exp() * vdm;
            num += w * (z1k + z2.powi(k) + z3.powi(k));
            den += w;
        }
    }
    Ok(num / den)
}

/// `⟨2 cos ks⟩` over SU(2) with action `−β tr U`, `β = β₁ + β₂`.
pub fn su2_expectation(k: i32, beta: C64, quad: &QuadratureSpec) -> Result<C64> {
    check_inputs(k, &[beta], quad)?;
    let shift = 2.0 * beta.norm();
    let mut num = C64::new(0.0, 0.0);
    let mut den = C64::new(0.0, 0.0);
    let h = 2.0 * PI / quad.points_per_dim as f64;
    for j in 0..quad.points_per_dim {
        let s = -PI + h * j as f64;
        let (sn, cs) = s.sin_cos();
        let w = (beta * (2.0 * cs) - shift).exp() * (sn * sn);
        num += w * (2.0 * (k as f64 * s).cos());
        den += w;
    }
    Ok(num / den)
}
