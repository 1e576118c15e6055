//! The periodic SU(n) Polyakov chain: action, drift, loop observables and
//! complexified gauge transforms on `[SL(n,C)]^N`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sun_algebra::{expm, ComplexMatrix, GeneratorBasis, C64, I, ONE};

/// Tolerance on `|det U − 1|` for a link to count as an SL(n,C) element.
pub const DET_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    /// Group dimension n.
    pub n: usize,
    /// Number of links N.
    pub links: usize,
    pub beta1: C64,
    pub beta2: C64,
}

impl ChainParams {
    pub fn new(n: usize, links: usize, beta1: C64, beta2: C64) -> Result<Self> {
        let p = Self { n, links, beta1, beta2 };
        p.validate()?;
        Ok(p)
    }

    /// Couplings `β₁ = β + κ e^μ`, `β₂ = β̄ + κ e^{−μ}`.
    pub fn with_chemical_potential(n: usize, links: usize, beta: C64, kappa: f64, mu: f64) -> Result<Self> {
        Self::new(n, links, beta + kappa * mu.exp(), beta.conj() + kappa * (-mu).exp())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidDimension(self.n));
        }
        if self.links < 1 {
            return Err(Error::InvalidArgument("chain needs at least one link".into()));
        }
        if !(self.beta1.is_finite() && self.beta2.is_finite()) {
            return Err(Error::InvalidArgument("couplings must be finite".into()));
        }
        Ok(())
    }

    /// `n² − 1`.
    pub fn algebra_dim(&self) -> usize {
        self.n * self.n - 1
    }
}

/// Ordered links `U_1 … U_N` with `U_{N+1} ≡ U_1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    dim: usize,
    links: Vec<ComplexMatrix>,
}

impl LinkConfig {
    /// Validates shape and the unit-determinant constraint.
    pub fn new(links: Vec<ComplexMatrix>) -> Result<Self> {
        let config = Self::from_links_unchecked(links)?;
        for (k, u) in config.links.iter().enumerate() {
            let deviation = (u.det() - ONE).norm();
            if !(deviation <= DET_TOLERANCE) {
                return Err(Error::NotUnitDeterminant { index: k, deviation });
            }
        }
        Ok(config)
    }

    /// Shape checks only; the links may lie off the SL(n,C) manifold.
    pub fn from_links_unchecked(links: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = links
            .first()
            .map(ComplexMatrix::dim)
            .ok_or_else(|| Error::InvalidArgument("empty link list".into()))?;
        for u in &links {
            if u.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: u.dim(),
                });
            }
            if !u.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        Ok(Self { dim, links })
    }

    pub fn identity(n: usize, links: usize) -> Self {
        Self {
            dim: n,
            links: vec![ComplexMatrix::identity(n); links],
        }
    }

    /// Links `exp(i Σ_a (x_a + i y_a) λ_a)` with `x_a ~ N(0, phase²)` and
    /// `y_a ~ N(0, spread²)`. `spread = 0` gives SU(n) links.
    pub fn random<R: Rng + ?Sized>(basis: &GeneratorBasis, links: usize, phase: f64, spread: f64, rng: &mut R) -> Self {
        let links = (0..links)
            .map(|_| {
                let coeffs: Vec<C64> = (0..basis.len())
                    .map(|_| {
                        let x: f64 = rng.sample(StandardNormal);
                        let y: f64 = rng.sample(StandardNormal);
                        C64::new(x * phase, y * spread)
                    })
                    .collect();
                expm(&basis.combine(&coeffs).scale(I)).expect("finite exponent")
            })
            .collect();
        Self {
            dim: basis.dim(),
            links,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of links N.
    #[inline]
    pub fn len(&self) -> usize {
        self.links.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    #[inline]
    pub fn links(&self) -> &[ComplexMatrix] {
        &self.links
    }

    pub fn into_links(self) -> Vec<ComplexMatrix> {
        self.links
    }

    /// Link `U_k` with periodic (0-based) indexing.
    pub fn link(&self, k: isize) -> &ComplexMatrix {
        let n = self.links.len() as isize;
        &self.links[k.rem_euclid(n) as usize]
    }

    pub fn is_finite(&self) -> bool {
        self.links.iter().all(ComplexMatrix::is_finite)
    }

    /// `U_1 U_2 ⋯ U_N`.
    pub fn loop_product(&self) -> ComplexMatrix {
        let mut p = self.links[0].clone();
        for u in &self.links[1..] {
            p = &p * u;
        }
        p
    }

    /// `U_N U_1 ⋯ U_{N−1}`, the product diagonalized by optimal cooling.
    pub fn shifted_loop_product(&self) -> ComplexMatrix {
        let n = self.links.len();
        let mut p = self.links[n - 1].clone();
        for u in &self.links[..n - 1] {
            p = &p * u;
        }
        p
    }

    pub fn max_det_deviation(&self) -> f64 {
        self.links.iter().map(|u| (u.det() - ONE).norm()).fold(0.0, f64::max)
    }

    /// Rescales every link whose determinant drifted beyond
    /// `DET_TOLERANCE` by the principal root `det^{−1/n}`. Returns the
    /// number of links touched.
    pub fn repair_determinants(&mut self) -> usize {
        let n = self.dim as f64;
        let mut touched = 0;
        for u in &mut self.links {
            let d = u.det();
            if (d - ONE).norm() > DET_TOLERANCE && d.norm() > 0.0 && d.is_finite() {
                *u = u.scale(d.powf(-1.0 / n));
                touched += 1;
            }
        }
        touched
    }

    fn check_against(&self, params: &ChainParams) -> Result<()> {
        if self.dim != params.n {
            return Err(Error::DimensionMismatch {
                expected: params.n,
                found: self.dim,
            });
        }
        if self.links.len() != params.links {
            return Err(Error::DimensionMismatch {
                expected: params.links,
                found: self.links.len(),
            });
        }
        Ok(())
    }
}

/// Lie derivatives `K_{ak} = D_{ak} S({U})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftTable {
    algebra_dim: usize,
    links: usize,
    entries: Vec<C64>,
}

impl DriftTable {
    pub fn zeros(algebra_dim: usize, links: usize) -> Self {
        Self {
            algebra_dim,
            links,
            entries: vec![C64::new(0.0, 0.0); algebra_dim * links],
        }
    }

    #[inline]
    pub fn get(&self, a: usize, k: usize) -> C64 {
        self.entries[k * self.algebra_dim + a]
    }

    #[inline]
    pub fn set(&mut self, a: usize, k: usize, value: C64) {
        self.entries[k * self.algebra_dim + a] = value;
    }

    /// Drift coefficients of link `k`, indexed by generator.
    #[inline]
    pub fn link(&self, k: usize) -> &[C64] {
        &self.entries[k * self.algebra_dim..(k + 1) * self.algebra_dim]
    }

    pub fn algebra_dim(&self) -> usize {
        self.algebra_dim
    }

    pub fn links(&self) -> usize {
        self.links
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// `S({U}) = −tr(β₁ U₁⋯U_N + β₂ U_N^{−1}⋯U₁^{−1})`.
pub fn action(params: &ChainParams, config: &LinkConfig) -> Result<C64> {
    config.check_against(params)?;
    let p = config.loop_product();
    let inv = p.inverse().ok_or(Error::NonFinite)?;
    Ok(-(params.beta1 * p.trace() + params.beta2 * inv.trace()))
}

/// `tr[(U₁⋯U_N)^k]` for `k ≠ 0`.
pub fn loop_observable(config: &LinkConfig, k: i32) -> Result<C64> {
    if k == 0 {
        return Err(Error::InvalidArgument("loop power k must be nonzero".into()));
    }
    let p = config.loop_product().powi(k).ok_or(Error::NonFinite)?;
    Ok(p.trace())
}

/// Cyclic products `P_k = U_k ⋯ U_N U_1 ⋯ U_{k−1}` for every k, built from
/// prefix and suffix products.
pub fn cyclic_products(config: &LinkConfig) -> Vec<ComplexMatrix> {
    let links = config.links();
    let n_links = links.len();
    let dim = config.dim();
    // prefix[k] = U_1 ⋯ U_k (prefix[0] = I); suffix[k] = U_{k+1} ⋯ U_N
    let mut prefix = Vec::with_capacity(n_links);
    prefix.push(ComplexMatrix::identity(dim));
    for k in 0..n_links - 1 {
        let next = &prefix[k] * &links[k];
        prefix.push(next);
    }
    let mut suffix = vec![ComplexMatrix::identity(dim); n_links];
    suffix[n_links - 1] = links[n_links - 1].clone();
    for k in (0..n_links - 1).rev() {
        suffix[k] = &links[k] * &suffix[k + 1];
    }
    (0..n_links).map(|k| &suffix[k] * &prefix[k]).collect()
}

/// Analytic drift
/// `K_{ak} = −i β₁ tr(λ_a P_k) + i β₂ tr(λ_a P_k^{−1})`.
pub fn drift(params: &ChainParams, basis: &GeneratorBasis, config: &LinkConfig) -> Result<DriftTable> {
    config.check_against(params)?;
    if basis.dim() != params.n {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            found: basis.dim(),
        });
    }
    let products = cyclic_products(config);
    let mut table = DriftTable::zeros(basis.len(), config.len());
    let c1 = -I * params.beta1;
    let c2 = I * params.beta2;
    for (k, p) in products.iter().enumerate() {
        let inv = p.inverse().ok_or(Error::NonFinite)?;
        for (a, g) in basis.generators().iter().enumerate() {
            table.set(a, k, c1 * g.trace_product(p) + c2 * g.trace_product(&inv));
        }
    }
    Ok(table)
}

/// Complexified gauge transform `Ũ_k = V_k^{−1} U_k V_{k+1}`, `V_{N+1} ≡ V_1`.
pub fn gauge_transform(config: &LinkConfig, gauge: &[ComplexMatrix]) -> Result<LinkConfig> {
    if gauge.len() != config.len() {
        return Err(Error::DimensionMismatch {
            expected: config.len(),
            found: gauge.len(),
        });
    }
    let mut inverses = Vec::with_capacity(gauge.len());
    for (k, v) in gauge.iter().enumerate() {
        if v.dim() != config.dim() {
            return Err(Error::DimensionMismatch {
                expected: config.dim(),
                found: v.dim(),
            });
        }
        let deviation = (v.det() - ONE).norm();
        if !(deviation <= DET_TOLERANCE) {
            return Err(Error::NotUnitDeterminant { index: k, deviation });
        }
        inverses.push(v.inverse().ok_or(Error::NotUnitDeterminant { index: k, deviation })?);
    }
    let n = config.len();
    let links = (0..n)
        .map(|k| &(&inverses[k] * &config.links()[k]) * &gauge[(k + 1) % n])
        .collect();
    LinkConfig::from_links_unchecked(links)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sun_algebra::generator_basis;

    fn su2_diag(s: f64) -> ComplexMatrix {
        ComplexMatrix::from_diag(&[C64::from_polar(1.0, -s), C64::from_polar(1.0, s)])
    }

    #[test]
    fn zero_couplings_zero_action() {
        let params = ChainParams::new(3, 4, C64::new(0.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        let cfg = LinkConfig::identity(3, 4);
        assert_eq!(action(&params, &cfg).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn identity_action_su2() {
        let params = ChainParams::new(2, 1, ONE, ONE).unwrap();
        let cfg = LinkConfig::identity(2, 1);
        assert!((action(&params, &cfg).unwrap() - C64::new(-4.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn loop_on_identity() {
        let cfg = LinkConfig::identity(3, 5);
        assert!((loop_observable(&cfg, 2).unwrap() - C64::new(3.0, 0.0)).norm() < 1e-15);
        assert!(loop_observable(&cfg, 0).is_err());
    }

    #[test]
    fn diagonal_power_trace() {
        let s = 0.7;
        let cfg = LinkConfig::new(vec![su2_diag(s)]).unwrap();
        for k in [-3, -1, 1, 2, 5] {
            let got = loop_observable(&cfg, k).unwrap();
            assert!((got - C64::new(2.0 * (k as f64 * s).cos(), 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn drift_vanishes_at_identity() {
        let params = ChainParams::new(2, 1, C64::new(1.3, 0.2), C64::new(0.4, -1.0)).unwrap();
        let basis = generator_basis(2).unwrap();
        let t = drift(&params, &basis, &LinkConfig::identity(2, 1)).unwrap();
        assert!(t.max_abs() < 1e-15);
    }

    #[test]
    fn diagonal_su2_drift() {
        let (b1, b2) = (C64::new(0.8, 0.3), C64::new(1.1, -0.6));
        let params = ChainParams::new(2, 1, b1, b2).unwrap();
        let basis = generator_basis(2).unwrap();
        for s in [0.3, 1.2, -2.0] {
            let cfg = LinkConfig::new(vec![su2_diag(s)]).unwrap();
            let t = drift(&params, &basis, &cfg).unwrap();
            let expect = -(b1 + b2) * 2.0 * s.sin();
            assert!((t.get(2, 0) - expect).norm() < 1e-13);
            assert!(t.get(0, 0).norm() < 1e-14);
            assert!(t.get(1, 0).norm() < 1e-14);
        }
    }

    #[test]
    fn chemical_potential_couplings() {
        let p = ChainParams::with_chemical_potential(3, 16, C64::new(2.0, 0.0), 0.1, 1.0).unwrap();
        assert!((p.beta1.re - (2.0 + 0.1 * std::f64::consts::E)).abs() < 1e-15);
        assert!((p.beta2.re - (2.0 + 0.1 / std::f64::consts::E)).abs() < 1e-15);
    }

    #[test]
    fn identity_gauge_is_noop() {
        use rand::SeedableRng;
        let basis = generator_basis(3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let cfg = LinkConfig::random(&basis, 4, 1.0, 0.3, &mut rng);
        let out = gauge_transform(&cfg, &vec![ComplexMatrix::identity(3); 4]).unwrap();
        for (a, b) in cfg.links().iter().zip(out.links()) {
            assert!((a - b).frobenius() < 1e-15);
        }
    }

    #[test]
    fn non_unit_gauge_rejected() {
        let cfg = LinkConfig::identity(2, 2);
        let v = ComplexMatrix::identity(2).scale_real(2.0);
        let err = gauge_transform(&cfg, &[v, ComplexMatrix::identity(2)]).unwrap_err();
        assert!(matches!(err, Error::NotUnitDeterminant { index: 0, .. }));
    }

    #[test]
    fn off_manifold_links_rejected() {
        let u = ComplexMatrix::identity(2).scale_real(1.5);
        assert!(matches!(
            LinkConfig::new(vec![u]),
            Err(Error::NotUnitDeterminant { .. })
        ));
    }

    #[test]
    fn determinant_repair() {
        let u = ComplexMatrix::from_diag(&[C64::new(2.0, 0.0), C64::new(0.5 * 1.01, 0.0)]);
        let mut cfg = LinkConfig::from_links_unchecked(vec![u]).unwrap();
        assert_eq!(cfg.repair_determinants(), 1);
        assert!(cfg.max_det_deviation() < 1e-14);
    }

    #[test]
    fn dimension_mismatch() {
        let params = ChainParams::new(3, 2, ONE, ONE).unwrap();
        assert!(matches!(
            action(&params, &LinkConfig::identity(2, 2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
