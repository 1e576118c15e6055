//! Gauge cooling: the closed-form optimal transform, the gradient-descent
//! variant, and the Frobenius-norm gradient and Hessian quadratic form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyakov::LinkConfig;
use crate::sun_algebra::{eig, expm, unitarity_distance, ComplexMatrix, GeneratorBasis, Spectrum, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoolingStrategy {
    NoCooling,
    /// Descent on purely imaginary gauge parameters with step `alpha * dt`.
    GradientDescent {
        alpha: f64,
        iters: u32,
    },
    Optimal,
}

impl CoolingStrategy {
    pub fn validate(&self) -> Result<()> {
        if let CoolingStrategy::GradientDescent { alpha, iters } = *self {
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "gradient descent step factor must be positive, got {alpha}"
                )));
            }
            if iters < 1 {
                return Err(Error::InvalidArgument(
                    "gradient descent needs at least one iteration".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self {
            CoolingStrategy::NoCooling => "none".to_string(),
            CoolingStrategy::GradientDescent { alpha, iters } => format!("gd_a{alpha}_x{iters}"),
            CoolingStrategy::Optimal => "optimal".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoolingOutcome {
    pub cooled: LinkConfig,
    /// Spectrum of `U_N U_1 ⋯ U_{N−1}`; only set by optimal cooling.
    pub spectrum: Option<Spectrum>,
    pub delta_f_before: f64,
    pub delta_f_after: f64,
}

/// Real table indexed by generator `a` and link `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealTable {
    algebra_dim: usize,
    links: usize,
    entries: Vec<f64>,
}

impl RealTable {
    pub fn zeros(algebra_dim: usize, links: usize) -> Self {
        Self {
            algebra_dim,
            links,
            entries: vec![0.0; algebra_dim * links],
        }
    }

    pub fn from_fn(algebra_dim: usize, links: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(algebra_dim, links);
        for k in 0..links {
            for a in 0..algebra_dim {
                t.set(a, k, f(a, k));
            }
        }
        t
    }

    #[inline]
    pub fn get(&self, a: usize, k: usize) -> f64 {
        self.entries[k * self.algebra_dim + a]
    }

    #[inline]
    pub fn set(&mut self, a: usize, k: usize, v: f64) {
        self.entries[k * self.algebra_dim + a] = v;
    }

    #[inline]
    pub fn link(&self, k: usize) -> &[f64] {
        &self.entries[k * self.algebra_dim..(k + 1) * self.algebra_dim]
    }

    pub fn algebra_dim(&self) -> usize {
        self.algebra_dim
    }

    pub fn links(&self) -> usize {
        self.links
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Applies `strategy` after a Langevin step of size `dt`.
pub fn cool(
    strategy: &CoolingStrategy,
    basis: &GeneratorBasis,
    config: &LinkConfig,
    dt: f64,
) -> Result<CoolingOutcome> {
    match *strategy {
        CoolingStrategy::NoCooling => {
            let df = unitarity_distance(config);
            Ok(CoolingOutcome {
                cooled: config.clone(),
                spectrum: None,
                delta_f_before: df,
                delta_f_after: df,
            })
        }
        CoolingStrategy::GradientDescent { alpha, iters } => cool_gradient(basis, config, alpha, dt, iters),
        CoolingStrategy::Optimal => cool_optimal(config),
    }
}

/// Closed-form minimizer of the Frobenius norm over complexified gauge
/// transforms.
///
/// With `U_N U_1 ⋯ U_{N−1} = Q Λ Q^{−1}` the cooled links are
/// `(ΛΛ†)^{1/(2N)}` for `k < N` and `Λ (ΛΛ†)^{−(N−1)/(2N)}` for the last
/// link, so only the moduli `|μ_j|` are rooted and the phases all sit on
/// `U_N`. Near-degenerate loop spectra use the computed eigenvalues as-is;
/// the infimum is still attained in the limit.
pub fn cool_optimal(config: &LinkConfig) -> Result<CoolingOutcome> {
    let before = unitarity_distance(config);
    let mut spectrum = eig(&config.shifted_loop_product())?;
    // project rounding in Π μ_j back onto unit determinant
    let prod: C64 = spectrum.values.iter().product();
    if prod != C64::new(1.0, 0.0) && prod.norm() > 0.0 {
        let fix = prod.powf(-1.0 / spectrum.values.len() as f64);
        for m in &mut spectrum.values {
            *m *= fix;
        }
    }
    let links = optimal_links(&spectrum.values, config.len());
    let cooled = LinkConfig::from_links_unchecked(links)?;
    let after = unitarity_distance(&cooled);
    Ok(CoolingOutcome {
        cooled,
        spectrum: Some(spectrum),
        delta_f_before: before,
        delta_f_after: after,
    })
}

/// Diagonal links carrying the loop eigenvalues `mu` spread over `n_links`.
pub fn optimal_links(mu: &[C64], n_links: usize) -> Vec<ComplexMatrix> {
    let inv_n = 1.0 / n_links as f64;
    let balanced: Vec<C64> = mu.iter().map(|m| C64::new(m.norm().powf(inv_n), 0.0)).collect();
    let last: Vec<C64> = mu
        .iter()
        .map(|m| m * m.norm().powf(-(n_links as f64 - 1.0) * inv_n))
        .collect();
    let mut links = vec![ComplexMatrix::from_diag(&balanced); n_links - 1];
    links.push(ComplexMatrix::from_diag(&last));
    links
}

/// `N Σ_j |μ_j|^{2/N}`, the minimal squared norm over the gauge orbit.
pub fn optimal_norm_sqr(mu: &[C64], n_links: usize) -> f64 {
    let p = 2.0 / n_links as f64;
    n_links as f64 * mu.iter().map(|m| m.norm().powf(p)).sum::<f64>()
}

/// `G_{ak} = 2 tr[λ_a (U_k U_k† − U_{k−1}† U_{k−1})]`, the derivative of
/// `‖{Ũ}‖²` along the imaginary gauge direction `Y_{ak}` at the identity.
pub fn gradient(basis: &GeneratorBasis, config: &LinkConfig) -> RealTable {
    let n = config.len();
    let mut out = RealTable::zeros(basis.len(), n);
    for k in 0..n {
        let u = &config.links()[k];
        let prev = config.link(k as isize - 1);
        let diff = &(u * &u.adjoint()) - &(&prev.adjoint() * prev);
        for (a, g) in basis.generators().iter().enumerate() {
            // the imaginary residue is rounding only: diff is Hermitian
            out.set(a, k, 2.0 * g.trace_product(&diff).re);
        }
    }
    out
}

/// `iters` steps of
/// `Y_{ak} ← −2 α̃ tr[λ_a (U_k U_k† − U_{k−1}† U_{k−1})]`,
/// `U_k ← exp(Σ_a Y_{ak} λ_a) U_k exp(−Σ_a Y_{a,k+1} λ_a)` with `α̃ = alpha * dt`.
pub fn cool_gradient(
    basis: &GeneratorBasis,
    config: &LinkConfig,
    alpha: f64,
    dt: f64,
    iters: u32,
) -> Result<CoolingOutcome> {
    let before = unitarity_distance(config);
    let step = alpha * dt;
    let n = config.len();
    let mut links = config.links().to_vec();
    for _ in 0..iters {
        let current = LinkConfig::from_links_unchecked(links)?;
        let grad = gradient(basis, &current);
        let mut left = Vec::with_capacity(n);
        let mut right = Vec::with_capacity(n);
        for k in 0..n {
            let h = basis.combine_real(&grad.link(k).iter().map(|g| -step * g).collect::<Vec<_>>());
            left.push(expm(&h)?);
            right.push(expm(&-&h)?);
        }
        links = current
            .into_links()
            .iter()
            .enumerate()
            .map(|(k, u)| &(&left[k] * u) * &right[(k + 1) % n])
            .collect();
    }
    let cooled = LinkConfig::from_links_unchecked(links)?;
    let after = unitarity_distance(&cooled);
    Ok(CoolingOutcome {
        cooled,
        spectrum: None,
        delta_f_before: before,
        delta_f_after: after,
    })
}

/// Hessian quadratic form of `‖{Ũ}‖²` in the imaginary gauge directions,
/// `R = 4 Σ_k ‖U_k M_{k+1} − M_k U_k‖_F²` with `M_k = Σ_a v_{ak} λ_a`.
pub fn hessian_form(basis: &GeneratorBasis, config: &LinkConfig, v: &RealTable) -> f64 {
    let n = config.len();
    let m: Vec<ComplexMatrix> = (0..n).map(|k| basis.combine_real(v.link(k))).collect();
    (0..n)
        .map(|k| {
            let u = &config.links()[k];
            (&(u * &m[(k + 1) % n]) - &(&m[k] * u)).frobenius_sqr()
        })
        .sum::<f64>()
        * 4.0
}
