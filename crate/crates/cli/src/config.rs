//! Experiment configuration: JSON files merged with command-line flags,
//! validated into the library's parameter types.

use std::fmt;
use std::path::Path;

use clm_core::cooling::CoolingStrategy;
use clm_core::exact::QuadratureSpec;
use clm_core::langevin::{RunOptions, Schedule};
use clm_core::polyakov::ChainParams;
use clm_core::reduced::{FlowBounds, ReducedOptions, ReducedParams};
use clm_core::C64;
use serde::{Deserialize, Serialize};

/// A rejected configuration, naming the field at fault.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: &str, message: impl Into<String>) -> Self {
        Self {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

pub type ConfigResult<T> = Result<T, ConfigError>;

/// A complex number in a config file: either a bare real or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn to_c64(self) -> C64 {
        match self {
            ComplexValue::Real(x) => C64::new(x, 0.0),
            ComplexValue::Pair([re, im]) => C64::new(re, im),
        }
    }

    pub fn from_c64(z: C64) -> Self {
        if z.im == 0.0 {
            ComplexValue::Real(z.re)
        } else {
            ComplexValue::Pair([z.re, z.im])
        }
    }
}

/// Parses `2`, `1.5,-0.3`, `1+0.2i` or `-0.5i`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t = s.trim().replace(' ', "");
    if let Some((re, im)) = t.split_once(',') {
        let re = re.parse::<f64>().map_err(|e| format!("bad real part `{re}`: {e}"))?;
        let im = im
            .parse::<f64>()
            .map_err(|e| format!("bad imaginary part `{im}`: {e}"))?;
        return Ok(C64::new(re, im));
    }
    if let Some(body) = t.strip_suffix('i') {
        // split at the last sign that is not an exponent sign
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
                split = Some(i);
                break;
            }
        }
        let (re, im) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            other => other,
        };
        let re = re.parse::<f64>().map_err(|e| format!("bad real part `{re}`: {e}"))?;
        let im = im
            .parse::<f64>()
            .map_err(|e| format!("bad imaginary part `{im}`: {e}"))?;
        return Ok(C64::new(re, im));
    }
    t.parse::<f64>()
        .map(|x| C64::new(x, 0.0))
        .map_err(|e| format!("bad number `{s}`: {e}"))
}

pub fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> ConfigResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ConfigError::new("config", format!("{}: {e}", path.display())))
}

fn positive(field: &str, v: f64) -> ConfigResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::new(
            field,
            format!("must be a positive finite number, got {v}"),
        ))
    }
}

fn nonnegative(field: &str, v: f64) -> ConfigResult<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::new(
            field,
            format!("must be nonnegative and finite, got {v}"),
        ))
    }
}

fn finite(field: &str, v: f64) -> ConfigResult<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::new(field, format!("must be finite, got {v}")))
    }
}

fn finite_complex(field: &str, v: C64) -> ConfigResult<C64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::new(field, format!("must be finite, got {v}")))
    }
}

fn nonzero_ks(field: &str, ks: &[i32]) -> ConfigResult<()> {
    if ks.is_empty() {
        return Err(ConfigError::new(field, "needs at least one observable power"));
    }
    if ks.contains(&0) {
        return Err(ConfigError::new(field, "observable powers must be nonzero"));
    }
    Ok(())
}

/// Schedule fields shared by the chain and reduced commands.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub dt: Option<f64>,
    pub burn_in: Option<f64>,
    pub interval: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

impl ScheduleConfig {
    fn overlay(&mut self, other: &ScheduleConfig) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(dt, burn_in, interval, samples, seed);
    }

    fn resolve(&self, defaults: Schedule) -> ConfigResult<Schedule> {
        let dt = positive("dt", self.dt.unwrap_or(defaults.dt))?;
        let burn_in_time = nonnegative("burn_in", self.burn_in.unwrap_or(defaults.burn_in_time))?;
        let sample_interval = positive("interval", self.interval.unwrap_or(defaults.sample_interval))?;
        if sample_interval < dt * (1.0 - 1e-9) {
            return Err(ConfigError::new(
                "interval",
                format!("must be at least dt = {dt}, got {sample_interval}"),
            ));
        }
        let num_samples = self.samples.unwrap_or(defaults.num_samples);
        if num_samples == 0 {
            return Err(ConfigError::new("samples", "must be positive"));
        }
        Ok(Schedule {
            dt,
            burn_in_time,
            sample_interval,
            num_samples,
            seed: self.seed.unwrap_or(defaults.seed),
        })
    }

    fn explicit(s: &Schedule) -> Self {
        Self {
            dt: Some(s.dt),
            burn_in: Some(s.burn_in_time),
            interval: Some(s.sample_interval),
            samples: Some(s.num_samples),
            seed: Some(s.seed),
        }
    }
}

/// Couplings given either directly or via `β + κ e^{±μ}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    pub beta1: Option<ComplexValue>,
    pub beta2: Option<ComplexValue>,
    pub beta: Option<ComplexValue>,
    pub kappa: Option<f64>,
    pub mu: Option<f64>,
}

impl CouplingConfig {
    fn overlay(&mut self, other: &CouplingConfig) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(beta1, beta2, beta, kappa, mu);
    }

    /// `(β₁, β₂)`; defaults to `β = 2, κ = 0.1, μ = 1`.
    pub fn resolve(&self) -> ConfigResult<(C64, C64)> {
        let direct = self.beta1.is_some() || self.beta2.is_some();
        let derived = self.kappa.is_some() || self.mu.is_some();
        if direct && (derived || self.beta.is_some()) {
            return Err(ConfigError::new(
                "beta1",
                "give either beta1/beta2 or beta/kappa/mu, not both",
            ));
        }
        if direct {
            let b1 = self
                .beta1
                .ok_or_else(|| ConfigError::new("beta2", "beta2 given without beta1"))?;
            let b2 = self
                .beta2
                .ok_or_else(|| ConfigError::new("beta1", "beta1 given without beta2"))?;
            return Ok((
                finite_complex("beta1", b1.to_c64())?,
                finite_complex("beta2", b2.to_c64())?,
            ));
        }
        let beta = finite_complex(
            "beta",
            self.beta.map(ComplexValue::to_c64).unwrap_or(C64::new(2.0, 0.0)),
        )?;
        let kappa = finite("kappa", self.kappa.unwrap_or(0.1))?;
        let mu = finite("mu", self.mu.unwrap_or(1.0))?;
        Ok((beta + kappa * mu.exp(), beta.conj() + kappa * (-mu).exp()))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub n: Option<usize>,
    pub links: Option<usize>,
    #[serde(flatten)]
    pub coupling: CouplingConfig,
    /// `none`, `gradient` or `optimal`.
    pub cooling: Option<String>,
    pub alpha: Option<f64>,
    pub iters: Option<u32>,
    #[serde(flatten)]
    pub schedule: ScheduleConfig,
    pub ks: Option<Vec<i32>>,
    pub record_samples: Option<bool>,
    pub delta_f_stride: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainPlan {
    pub params: ChainParams,
    pub schedule: Schedule,
    pub strategy: CoolingStrategy,
    pub ks: Vec<i32>,
    pub options: RunOptions,
}

pub fn parse_cooling(kind: &str, alpha: Option<f64>, iters: Option<u32>) -> ConfigResult<CoolingStrategy> {
    match kind {
        "none" => Ok(CoolingStrategy::NoCooling),
        "optimal" => Ok(CoolingStrategy::Optimal),
        "gradient" | "gd" => {
            let alpha = positive("alpha", alpha.unwrap_or(1.0))?;
            let iters = iters.unwrap_or(5);
            if iters == 0 {
                return Err(ConfigError::new("iters", "must be at least 1"));
            }
            Ok(CoolingStrategy::GradientDescent { alpha, iters })
        }
        other => Err(ConfigError::new(
            "cooling",
            format!("expected one of none, gradient, optimal; got `{other}`"),
        )),
    }
}

fn cooling_fields(s: &CoolingStrategy) -> (String, Option<f64>, Option<u32>) {
    match *s {
        CoolingStrategy::NoCooling => ("none".into(), None, None),
        CoolingStrategy::Optimal => ("optimal".into(), None, None),
        CoolingStrategy::GradientDescent { alpha, iters } => ("gradient".into(), Some(alpha), Some(iters)),
    }
}

fn chain_dims(n: Option<usize>, links: Option<usize>) -> ConfigResult<(usize, usize)> {
    let n = n.unwrap_or(3);
    if !(2..=4).contains(&n) {
        return Err(ConfigError::new("n", format!("must be 2, 3 or 4, got {n}")));
    }
    let links = links.unwrap_or(16);
    if links == 0 {
        return Err(ConfigError::new("links", "must be at least 1"));
    }
    Ok((n, links))
}

impl ChainConfig {
    pub fn overlay(&mut self, other: &ChainConfig) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        take!(n, links, cooling, alpha, iters, ks, record_samples, delta_f_stride);
        self.coupling.overlay(&other.coupling);
        self.schedule.overlay(&other.schedule);
    }

    pub fn resolve(&self) -> ConfigResult<ChainPlan> {
        let (n, links) = chain_dims(self.n, self.links)?;
        let (beta1, beta2) = self.coupling.resolve()?;
        let params = ChainParams::new(n, links, beta1, beta2).map_err(|e| ConfigError::new("beta1", e.to_string()))?;
        let strategy = parse_cooling(self.cooling.as_deref().unwrap_or("optimal"), self.alpha, self.iters)?;
        let schedule = self.schedule.resolve(Schedule {
            dt: 2e-5,
            burn_in_time: 0.2,
            sample_interval: 2e-4,
            num_samples: 9000,
            seed: 0,
        })?;
        let ks = self.ks.clone().unwrap_or_else(|| vec![1, -1, 2, -2, 3, -3]);
        nonzero_ks("ks", &ks)?;
        let stride = self
            .delta_f_stride
            .unwrap_or(clm_core::langevin::DEFAULT_DELTA_F_STRIDE);
        if stride == 0 {
            return Err(ConfigError::new("delta_f_stride", "must be positive"));
        }
        let options = RunOptions {
            delta_f_stride: stride,
            record_samples: self.record_samples.unwrap_or(false),
            ..Default::default()
        };
        Ok(ChainPlan {
            params,
            schedule,
            strategy,
            ks,
            options,
        })
    }

    /// The fully specified form of a plan, as echoed into reports.
    pub fn explicit(plan: &ChainPlan) -> Self {
        let (cooling, alpha, iters) = cooling_fields(&plan.strategy);
        Self {
            n: Some(plan.params.n),
            links: Some(plan.params.links),
            coupling: CouplingConfig {
                beta1: Some(ComplexValue::from_c64(plan.params.beta1)),
                beta2: Some(ComplexValue::from_c64(plan.params.beta2)),
                ..Default::default()
            },
            cooling: Some(cooling),
            alpha,
            iters,
            schedule: ScheduleConfig::explicit(&plan.schedule),
            ks: Some(plan.ks.clone()),
            record_samples: Some(plan.options.record_samples),
            delta_f_stride: Some(plan.options.delta_f_stride),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReducedConfig {
    pub a: Option<f64>,
    pub b: Option<f64>,
    #[serde(flatten)]
    pub schedule: ScheduleConfig,
    pub x0: Option<f64>,
    pub y0: Option<f64>,
    pub y_bound: Option<f64>,
    pub cap_factor: Option<f64>,
    pub ks: Option<Vec<i32>>,
    pub record_samples: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedPlan {
    pub params: ReducedParams,
    pub schedule: Schedule,
    pub options: ReducedOptions,
}

impl ReducedConfig {
    pub fn overlay(&mut self, other: &ReducedConfig) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        take!(a, b, x0, y0, y_bound, cap_factor, ks, record_samples);
        self.schedule.overlay(&other.schedule);
    }

    pub fn resolve(&self) -> ConfigResult<ReducedPlan> {
        let params = ReducedParams {
            a: finite("a", self.a.unwrap_or(1.0))?,
            b: finite("b", self.b.unwrap_or(0.2))?,
        };
        let schedule = self.schedule.resolve(Schedule {
            dt: 1e-5,
            burn_in_time: 3.0,
            sample_interval: 0.1,
            num_samples: 10_000,
            seed: 0,
        })?;
        let defaults = ReducedOptions::default();
        let y0 = finite("y0", self.y0.unwrap_or(defaults.y0))?;
        let y_bound = positive("y_bound", self.y_bound.unwrap_or(defaults.y_bound))?;
        if y0.abs() > y_bound {
            return Err(ConfigError::new(
                "y0",
                format!("|y0| must not exceed y_bound = {y_bound}"),
            ));
        }
        let ks = self.ks.clone().unwrap_or(defaults.observable_ks);
        nonzero_ks("ks", &ks)?;
        let options = ReducedOptions {
            x0: finite("x0", self.x0.unwrap_or(defaults.x0))?,
            y0,
            y_bound,
            cap_factor: positive("cap_factor", self.cap_factor.unwrap_or(defaults.cap_factor))?,
            record_samples: self.record_samples.unwrap_or(false),
            observable_ks: ks,
        };
        Ok(ReducedPlan {
            params,
            schedule,
            options,
        })
    }

    pub fn explicit(plan: &ReducedPlan) -> Self {
        Self {
            a: Some(plan.params.a),
            b: Some(plan.params.b),
            schedule: ScheduleConfig::explicit(&plan.schedule),
            x0: Some(plan.options.x0),
            y0: Some(plan.options.y0),
            y_bound: Some(plan.options.y_bound),
            cap_factor: Some(plan.options.cap_factor),
            ks: Some(plan.options.observable_ks.clone()),
            record_samples: Some(plan.options.record_samples),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoolBenchConfig {
    pub n: Option<usize>,
    pub links: Option<usize>,
    #[serde(flatten)]
    pub coupling: CouplingConfig,
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
    pub seed: Option<u64>,
    /// Gradient-descent step factors; one run per entry.
    pub alphas: Option<Vec<f64>>,
    pub iters: Option<u32>,
    pub delta_f_stride: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoolBenchPlan {
    pub params: ChainParams,
    pub schedule: Schedule,
    pub strategies: Vec<CoolingStrategy>,
    pub options: RunOptions,
}

impl CoolBenchConfig {
    pub fn overlay(&mut self, other: &CoolBenchConfig) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        take!(n, links, dt, t_max, seed, alphas, iters, delta_f_stride);
        self.coupling.overlay(&other.coupling);
    }

    pub fn resolve(&self) -> ConfigResult<CoolBenchPlan> {
        let (n, links) = chain_dims(self.n, self.links)?;
        let (beta1, beta2) = self.coupling.resolve()?;
        let params = ChainParams::new(n, links, beta1, beta2).map_err(|e| ConfigError::new("beta1", e.to_string()))?;
        let dt = positive("dt", self.dt.unwrap_or(2e-5))?;
        let t_max = positive("t_max", self.t_max.unwrap_or(1.0))?;
        if t_max < dt {
            return Err(ConfigError::new("t_max", format!("must be at least dt = {dt}")));
        }
        // a single sample at the final step
        let schedule = Schedule {
            dt,
            burn_in_time: t_max - dt,
            sample_interval: dt,
            num_samples: 1,
            seed: self.seed.unwrap_or(0),
        };
        let iters = self.iters.unwrap_or(5);
        let mut strategies = vec![CoolingStrategy::NoCooling];
        for &alpha in self.alphas.as_deref().unwrap_or(&[0.4, 1.0]) {
            strategies.push(parse_cooling("gradient", Some(alpha), Some(iters))?);
        }
        strategies.push(CoolingStrategy::Optimal);
        let stride = self
            .delta_f_stride
            .unwrap_or(clm_core::langevin::DEFAULT_DELTA_F_STRIDE);
        if stride == 0 {
            return Err(ConfigError::new("delta_f_stride", "must be positive"));
        }
        Ok(CoolBenchPlan {
            params,
            schedule,
            strategies,
            options: RunOptions {
                delta_f_stride: stride,
                ..Default::default()
            },
        })
    }

    pub fn explicit(plan: &CoolBenchPlan) -> Self {
        let alphas = plan
            .strategies
            .iter()
            .filter_map(|s| match s {
                CoolingStrategy::GradientDescent { alpha, .. } => Some(*alpha),
                _ => None,
            })
            .collect();
        let iters = plan.strategies.iter().find_map(|s| match s {
            CoolingStrategy::GradientDescent { iters, .. } => Some(*iters),
            _ => None,
        });
        Self {
            n: Some(plan.params.n),
            links: Some(plan.params.links),
            coupling: CouplingConfig {
                beta1: Some(ComplexValue::from_c64(plan.params.beta1)),
                beta2: Some(ComplexValue::from_c64(plan.params.beta2)),
                ..Default::default()
            },
            dt: Some(plan.schedule.dt),
            t_max: Some(plan.schedule.total_steps() as f64 * plan.schedule.dt),
            seed: Some(plan.schedule.seed),
            alphas: Some(alphas),
            iters: iters.or(Some(5)),
            delta_f_stride: Some(plan.options.delta_f_stride),
        }
    }
}

pub fn quadrature(points: usize) -> ConfigResult<QuadratureSpec> {
    QuadratureSpec::new(points).map_err(|e| ConfigError::new("points", e.to_string()))
}

pub fn flow_bounds(x: (f64, f64), y: (f64, f64)) -> ConfigResult<FlowBounds> {
    if !(x.1 > x.0) {
        return Err(ConfigError::new("x_max", "must exceed x_min"));
    }
    if !(y.1 > y.0) {
        return Err(ConfigError::new("y_max", "must exceed y_min"));
    }
    Ok(FlowBounds {
        x_min: x.0,
        x_max: x.1,
        y_min: y.0,
        y_max: y.1,
    })
}
