//! Complex Langevin driver for the Polyakov chain.
//!
//! One step is the exponential Euler update
//! `U_k ← exp(−i Σ_a λ_a (K_{ak} dt + η_{ak} √(2 dt))) U_k`
//! followed by the configured gauge cooling. After a burn-in of
//! `burn_in_time`, the loop observables are accumulated at the times
//! `T + m ΔT`, `m = 1 … num_samples`.
//!
//! Noise comes from a ChaCha20 stream keyed by the schedule seed. Each step
//! consumes `N (n² − 1)` standard normals in link-major order
//! (`η_{0,0}, η_{1,0}, …, η_{n²−2,0}, η_{0,1}, …`), so the noise history is
//! a function of the seed alone and independent of the chain state.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::cooling::{cool, CoolingStrategy, RealTable};
use crate::error::{Error, Result};
use crate::polyakov::{drift, ChainParams, LinkConfig};
use crate::reduced::ReducedParams;
use crate::stats::ComplexAccumulator;
use crate::sun_algebra::{eig, expm, unitarity_distance, GeneratorBasis, C64, I};

/// ΔF above which a chain is declared diverged.
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;
pub const DEFAULT_DELTA_F_STRIDE: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub dt: f64,
    pub burn_in_time: f64,
    pub sample_interval: f64,
    pub num_samples: usize,
    pub seed: u64,
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.burn_in_time >= 0.0 && self.burn_in_time.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "burn_in_time must be nonnegative, got {}",
                self.burn_in_time
            )));
        }
        if !(self.sample_interval >= self.dt * (1.0 - 1e-9) && self.sample_interval.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "sample_interval must be at least dt, got {}",
                self.sample_interval
            )));
        }
        if self.num_samples == 0 {
            return Err(Error::InvalidArgument("num_samples must be positive".into()));
        }
        Ok(())
    }

    pub fn burn_in_steps(&self) -> u64 {
        (self.burn_in_time / self.dt).round() as u64
    }

    pub fn interval_steps(&self) -> u64 {
        ((self.sample_interval / self.dt).round() as u64).max(1)
    }

    pub fn total_steps(&self) -> u64 {
        self.burn_in_steps() + self.interval_steps() * self.num_samples as u64
    }

    /// Whether `step` (1-based) is a sampling step.
    pub fn is_sample_step(&self, step: u64) -> bool {
        let burn = self.burn_in_steps();
        step > burn && (step - burn).is_multiple_of(self.interval_steps())
    }
}

/// Gaussian noise for the Euler update, reproducible from a seed.
#[derive(Debug, Clone)]
pub struct NoiseSource {
    rng: ChaCha20Rng,
}

impl NoiseSource {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Refills `table` in link-major order.
    pub fn fill(&mut self, table: &mut RealTable) {
        for k in 0..table.links() {
            for a in 0..table.algebra_dim() {
                let x = self.normal();
                table.set(a, k, x);
            }
        }
    }
}

/// One exponential Euler step with explicit noise.
pub fn euler_step(
    params: &ChainParams,
    basis: &GeneratorBasis,
    config: &LinkConfig,
    dt: f64,
    noise: &RealTable,
) -> Result<LinkConfig> {
    if noise.algebra_dim() != basis.len() || noise.links() != config.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len() * config.len(),
            found: noise.algebra_dim() * noise.links(),
        });
    }
    let k = drift(params, basis, config)?;
    if !k.is_finite() {
        return Err(Error::NonFinite);
    }
    let noise_scale = (2.0 * dt).sqrt();
    let mut links = Vec::with_capacity(config.len());
    let mut coeffs = vec![C64::new(0.0, 0.0); basis.len()];
    for (l, u) in config.links().iter().enumerate() {
        for (a, c) in coeffs.iter_mut().enumerate() {
            // −i (K dt + η √(2dt))
            *c = -I * (k.get(a, l) * dt + noise.get(a, l) * noise_scale);
        }
        let step = expm(&basis.combine(&coeffs))?;
        links.push(&step * u);
    }
    LinkConfig::from_links_unchecked(links)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Log ΔF every this many steps.
    pub delta_f_stride: u64,
    /// Keep the loop eigen-angles `s_j = i ln μ_j` of every sample.
    pub record_samples: bool,
    pub divergence_threshold: f64,
    /// Starting configuration; the identity when absent.
    pub initial: Option<LinkConfig>,
    /// Stop after this Langevin time even if sampling is incomplete.
    pub max_time: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            delta_f_stride: DEFAULT_DELTA_F_STRIDE,
            record_samples: false,
            divergence_threshold: DIVERGENCE_THRESHOLD,
            initial: None,
            max_time: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub k: i32,
    pub mean: C64,
    /// Batch-means standard error, componentwise.
    pub stderr: C64,
    /// Standard error ignoring autocorrelation, componentwise.
    pub naive_stderr: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    /// Stopped early by `max_time` before all samples were drawn.
    Truncated {
        time: f64,
    },
    Diverged {
        time: f64,
    },
    Escaped {
        time: f64,
    },
}

impl RunStatus {
    pub fn is_failure(&self) -> bool {
        matches!(self, RunStatus::Diverged { .. } | RunStatus::Escaped { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelEcho {
    Chain {
        params: ChainParams,
        strategy: CoolingStrategy,
    },
    Reduced {
        params: ReducedParams,
        x0: f64,
        y0: f64,
        y_bound: f64,
        cap_factor: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub schedule: Schedule,
    pub model: ModelEcho,
    pub observable_ks: Vec<i32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub steps: u64,
    pub max_delta_f: f64,
    pub max_abs_y: f64,
    /// Links rescaled back onto unit determinant.
    pub det_repairs: u64,
    /// Steps whose loop spectrum fell below the degeneracy gap.
    pub degenerate_spectra: u64,
    /// Reduced-model steps whose drift displacement was capped.
    pub capped_steps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub estimates: Vec<Estimate>,
    pub num_samples: u64,
    /// `(t, ΔF)` pairs; empty for the reduced model.
    pub delta_f_series: Vec<(f64, f64)>,
    /// `(x, y)` per sample and eigenvalue when recording was requested.
    pub samples: Option<Vec<(f64, f64)>>,
    pub status: RunStatus,
    pub diagnostics: Diagnostics,
    pub meta: RunMeta,
}

impl ChainReport {
    pub fn estimate(&self, k: i32) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.k == k)
    }

    pub fn diverged(&self) -> bool {
        matches!(self.status, RunStatus::Diverged { .. })
    }

    pub fn escaped(&self) -> bool {
        matches!(self.status, RunStatus::Escaped { .. })
    }
}

pub(crate) fn validate_ks(ks: &[i32]) -> Result<()> {
    if ks.contains(&0) {
        return Err(Error::InvalidArgument("observable power k must be nonzero".into()));
    }
    Ok(())
}

pub(crate) fn finish_estimates(ks: &[i32], acc: &[ComplexAccumulator]) -> Vec<Estimate> {
    ks.iter()
        .zip(acc)
        .map(|(&k, a)| Estimate {
            k,
            mean: a.mean(),
            stderr: a.stderr(),
            naive_stderr: a.naive_stderr(),
        })
        .collect()
}

pub fn run_chain(
    params: &ChainParams,
    schedule: &Schedule,
    strategy: &CoolingStrategy,
    observable_ks: &[i32],
) -> Result<ChainReport> {
    run_chain_with(params, schedule, strategy, observable_ks, &RunOptions::default())
}

pub fn run_chain_with(
    params: &ChainParams,
    schedule: &Schedule,
    strategy: &CoolingStrategy,
    observable_ks: &[i32],
    options: &RunOptions,
) -> Result<ChainReport> {
    params.validate()?;
    schedule.validate()?;
    strategy.validate()?;
    validate_ks(observable_ks)?;
    let basis = GeneratorBasis::new(params.n)?;

    let mut config = match &options.initial {
        Some(c) => {
            if c.dim() != params.n || c.len() != params.links {
                return Err(Error::DimensionMismatch {
                    expected: params.links,
                    found: c.len(),
                });
            }
            c.clone()
        }
        None => LinkConfig::identity(params.n, params.links),
    };

    let mut noise = NoiseSource::new(schedule.seed);
    let mut eta = RealTable::zeros(basis.len(), params.links);
    let mut acc: Vec<ComplexAccumulator> = observable_ks
        .iter()
        .map(|_| ComplexAccumulator::new(schedule.num_samples))
        .collect();
    let mut series = Vec::new();
    let mut samples = options.record_samples.then(Vec::new);
    let mut diag = Diagnostics::default();
    let stride = options.delta_f_stride.max(1);
    let mut status = RunStatus::Completed;

    let total = schedule.total_steps();
    let max_step = options
        .max_time
        .map(|t| ((t / schedule.dt).round() as u64).min(total))
        .unwrap_or(total);

    for step in 1..=max_step {
        let t = step as f64 * schedule.dt;
        noise.fill(&mut eta);
        let stepped = match euler_step(params, &basis, &config, schedule.dt, &eta) {
            Ok(c) => c,
            Err(_) => {
                status = RunStatus::Diverged { time: t };
                break;
            }
        };
        let mut stepped = stepped;
        diag.det_repairs += stepped.repair_determinants() as u64;
        let outcome = match cool(strategy, &basis, &stepped, schedule.dt) {
            Ok(o) => o,
            Err(_) => {
                status = RunStatus::Diverged { time: t };
                break;
            }
        };
        config = outcome.cooled;
        let df = outcome.delta_f_after;
        diag.steps = step;
        if let Some(spec) = &outcome.spectrum {
            if !spec.diagonalizable {
                diag.degenerate_spectra += 1;
            }
        }
        if !df.is_finite() || !config.is_finite() {
            status = RunStatus::Diverged { time: t };
            break;
        }
        diag.max_delta_f = diag.max_delta_f.max(df);
        if step % stride == 0 {
            series.push((t, df));
        }
        if df > options.divergence_threshold {
            status = RunStatus::Diverged { time: t };
            break;
        }

        if schedule.is_sample_step(step) {
            let p = config.loop_product();
            for (&k, a) in observable_ks.iter().zip(acc.iter_mut()) {
                let v = p.powi(k).map(|m| m.trace()).unwrap_or(C64::new(f64::NAN, f64::NAN));
                a.push(v);
            }
            if let Some(s) = samples.as_mut() {
                let values = match &outcome.spectrum {
                    Some(spec) => spec.values.clone(),
                    None => eig(&p)?.values,
                };
                for mu in values {
                    // μ = e^{−is}
                    s.push((-mu.arg(), mu.norm().ln()));
                }
            }
        }
    }
    if status == RunStatus::Completed && max_step < total {
        status = RunStatus::Truncated {
            time: max_step as f64 * schedule.dt,
        };
    }

    Ok(ChainReport {
        estimates: finish_estimates(observable_ks, &acc),
        num_samples: acc.first().map(ComplexAccumulator::count).unwrap_or(0),
        delta_f_series: series,
        samples,
        status,
        diagnostics: diag,
        meta: RunMeta {
            schedule: *schedule,
            model: ModelEcho::Chain {
                params: *params,
                strategy: *strategy,
            },
            observable_ks: observable_ks.to_vec(),
        },
    })
}

/// Convenience: the current ΔF of a configuration.
pub fn delta_f(config: &LinkConfig) -> f64 {
    unitarity_distance(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sun_algebra::ComplexMatrix;

    fn schedule(dt: f64, burn: f64, interval: f64, samples: usize, seed: u64) -> Schedule {
        Schedule {
            dt,
            burn_in_time: burn,
            sample_interval: interval,
            num_samples: samples,
            seed,
        }
    }

    #[test]
    fn schedule_step_arithmetic() {
        let s = schedule(1e-5, 3.0, 0.1, 10, 0);
        assert_eq!(s.burn_in_steps(), 300_000);
        assert_eq!(s.interval_steps(), 10_000);
        assert_eq!(s.total_steps(), 400_000);
        assert!(!s.is_sample_step(300_000));
        assert!(s.is_sample_step(310_000));
        assert!(!s.is_sample_step(310_001));
    }

    #[test]
    fn schedule_validation() {
        assert!(schedule(0.0, 1.0, 1.0, 1, 0).validate().is_err());
        assert!(schedule(0.1, -1.0, 1.0, 1, 0).validate().is_err());
        assert!(schedule(0.1, 1.0, 0.01, 1, 0).validate().is_err());
        assert!(schedule(0.1, 1.0, 0.1, 0, 0).validate().is_err());
        assert!(schedule(0.1, 0.0, 0.1, 1, 0).validate().is_ok());
    }

    #[test]
    fn zero_drift_zero_noise_is_identity_map() {
        let params = ChainParams::new(3, 3, C64::new(0.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        let basis = GeneratorBasis::new(3).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let cfg = LinkConfig::random(&basis, 3, 1.0, 0.2, &mut rng);
        let out = euler_step(&params, &basis, &cfg, 1e-3, &RealTable::zeros(8, 3)).unwrap();
        for (a, b) in cfg.links().iter().zip(out.links()) {
            assert!((a - b).frobenius() < 1e-15);
        }
    }

    #[test]
    fn step_preserves_determinant() {
        let params = ChainParams::with_chemical_potential(3, 4, C64::new(2.0, 0.0), 0.1, 1.0).unwrap();
        let basis = GeneratorBasis::new(3).unwrap();
        let mut noise = NoiseSource::new(11);
        let mut eta = RealTable::zeros(8, 4);
        let mut cfg = LinkConfig::identity(3, 4);
        for _ in 0..200 {
            noise.fill(&mut eta);
            let before = cfg.max_det_deviation();
            cfg = euler_step(&params, &basis, &cfg, 1e-3, &eta).unwrap();
            assert!(cfg.max_det_deviation() - before <= 1e-12);
        }
    }

    #[test]
    fn real_action_keeps_unitarity() {
        let b = C64::new(1.5, 0.0);
        let params = ChainParams::new(2, 3, b, b).unwrap();
        let basis = GeneratorBasis::new(2).unwrap();
        let mut noise = NoiseSource::new(5);
        let mut eta = RealTable::zeros(3, 3);
        let mut cfg = LinkConfig::identity(2, 3);
        for _ in 0..100 {
            noise.fill(&mut eta);
            cfg = euler_step(&params, &basis, &cfg, 1e-3, &eta).unwrap();
            for u in cfg.links() {
                assert!(u.unitarity_defect() < 1e-10);
            }
        }
    }

    #[test]
    fn noise_shape_checked() {
        let params = ChainParams::new(2, 2, C64::new(1.0, 0.0), C64::new(1.0, 0.0)).unwrap();
        let basis = GeneratorBasis::new(2).unwrap();
        let cfg = LinkConfig::identity(2, 2);
        assert!(euler_step(&params, &basis, &cfg, 1e-3, &RealTable::zeros(3, 1)).is_err());
    }

    #[test]
    fn zero_observable_power_rejected() {
        let params = ChainParams::new(2, 1, C64::new(1.0, 0.0), C64::new(1.0, 0.0)).unwrap();
        let s = schedule(1e-3, 0.0, 1e-3, 5, 0);
        assert!(run_chain(&params, &s, &CoolingStrategy::Optimal, &[1, 0]).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let params = ChainParams::with_chemical_potential(3, 4, C64::new(2.0, 0.0), 0.1, 1.0).unwrap();
        let s = schedule(1e-4, 0.01, 1e-3, 20, 99);
        let a = run_chain(&params, &s, &CoolingStrategy::Optimal, &[1, -1]).unwrap();
        let b = run_chain(&params, &s, &CoolingStrategy::Optimal, &[1, -1]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.num_samples, 20);
        let c = run_chain(
            &params,
            &Schedule { seed: 100, ..s },
            &CoolingStrategy::Optimal,
            &[1, -1],
        )
        .unwrap();
        assert_ne!(a.estimates, c.estimates);
    }

    #[test]
    fn optimal_cooling_keeps_links_diagonal() {
        let params = ChainParams::new(2, 3, C64::new(1.0, 0.4), C64::new(0.6, -0.2)).unwrap();
        let basis = GeneratorBasis::new(2).unwrap();
        let mut noise = NoiseSource::new(1);
        let mut eta = RealTable::zeros(3, 3);
        let mut cfg = LinkConfig::identity(2, 3);
        for _ in 0..50 {
            noise.fill(&mut eta);
            let stepped = euler_step(&params, &basis, &cfg, 1e-3, &eta).unwrap();
            let out = cool(&CoolingStrategy::Optimal, &basis, &stepped, 1e-3).unwrap();
            cfg = out.cooled;
            assert!(cfg.links().iter().all(|u: &ComplexMatrix| u.is_diagonal(0.0)));
        }
    }
}
