//! The cooled one-link SU(2) dynamics in the eigen-angle `s = x + iy`.
//!
//! With `U = diag(e^{−is}, e^{is})` and `β = A + iB = β₁ + β₂`, the process is
//! `ds = 2(−β sin s + cot s) dt + dw`, where `dw` has variance `2 dt` and
//! enters the real part only:
//!
//! ```text
//! K_R =  2(−A cosh y sin x + B sinh y cos x + sin 2x / D)
//! K_I = −2( A sinh y cos x + B cosh y sin x + sinh 2y / D)
//! D   = cosh 2y − cos 2x = 2(sinh² y + sin² x)
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::langevin::{
    finish_estimates, validate_ks, ChainReport, Diagnostics, ModelEcho, NoiseSource, RunMeta, RunStatus, Schedule,
};
use crate::stats::ComplexAccumulator;
use crate::sun_algebra::C64;

pub const DEFAULT_Y_BOUND: f64 = 30.0;
pub const DEFAULT_CAP_FACTOR: f64 = 10.0;
pub const DEFAULT_X0: f64 = 0.5;
/// `3√3/2`, the edge of the weak-coupling confinement interval in `A`.
pub const CONFINEMENT_A: f64 = 2.598_076_211_353_316;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedParams {
    pub a: f64,
    pub b: f64,
}

impl ReducedParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let p = Self { a, b };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "coupling must be finite, got A = {}, B = {}",
                self.a, self.b
            )));
        }
        Ok(())
    }

    pub fn beta(&self) -> C64 {
        C64::new(self.a, self.b)
    }
}

/// A point on the cylinder, `x ∈ (−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedState {
    pub x: f64,
    pub y: f64,
}

impl ReducedState {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x: wrap_angle(x), y }
    }

    pub fn s(&self) -> C64 {
        C64::new(self.x, self.y)
    }
}

/// Maps an angle onto `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    if x > -PI && x <= PI {
        x
    } else {
        PI - (PI - x).rem_euclid(2.0 * PI)
    }
}

/// `O_k = e^{iks} + e^{−iks} = 2 cos(ks)`.
pub fn observable(k: i32, x: f64, y: f64) -> C64 {
    let k = k as f64;
    let (s, c) = (k * x).sin_cos();
    C64::new(2.0 * c * (k * y).cosh(), -2.0 * s * (k * y).sinh())
}

#[inline]
fn drift_parts(x: f64, y: f64, a: f64, b: f64) -> Option<(f64, f64)> {
    let (sx, cx) = x.sin_cos();
    let (sh, ch) = (y.sinh(), y.cosh());
    let d = 2.0 * (sh * sh + sx * sx);
    // within rounding of s = kπ
    if d < 1e-30 || !d.is_finite() {
        return None;
    }
    let kr = 2.0 * (-a * ch * sx + b * sh * cx + 2.0 * sx * cx / d);
    let ki = -2.0 * (a * sh * cx + b * ch * sx + 2.0 * sh * ch / d);
    Some((kr, ki))
}

/// The drift `(K_R, K_I)` at `(x, y)`.
pub fn drift_reduced(x: f64, y: f64, a: f64, b: f64) -> Result<(f64, f64)> {
    drift_parts(x, y, a, b).ok_or(Error::Singular { x, y })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedOptions {
    pub x0: f64,
    pub y0: f64,
    /// The run is flagged escaped once `|y|` exceeds this.
    pub y_bound: f64,
    /// Per-step drift displacement is capped at `cap_factor · √(2 dt)`.
    pub cap_factor: f64,
    pub record_samples: bool,
    pub observable_ks: Vec<i32>,
}

impl Default for ReducedOptions {
    fn default() -> Self {
        Self {
            x0: DEFAULT_X0,
            y0: 0.0,
            y_bound: DEFAULT_Y_BOUND,
            cap_factor: DEFAULT_CAP_FACTOR,
            record_samples: false,
            observable_ks: vec![1, 2, 3],
        }
    }
}

impl ReducedOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.x0.is_finite() && self.y0.is_finite()) {
            return Err(Error::InvalidArgument("initial state must be finite".into()));
        }
        if !(self.y_bound > 0.0) || self.y0.abs() > self.y_bound {
            return Err(Error::InvalidArgument(format!(
                "y_bound must be positive and contain y0, got {}",
                self.y_bound
            )));
        }
        if !(self.cap_factor > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "cap_factor must be positive, got {}",
                self.cap_factor
            )));
        }
        validate_ks(&self.observable_ks)
    }
}

pub fn run_reduced(params: &ReducedParams, schedule: &Schedule) -> Result<ChainReport> {
    run_reduced_with(params, schedule, &ReducedOptions::default())
}

/// Euler–Maruyama for the `(x, y)` system. One standard normal per step.
pub fn run_reduced_with(params: &ReducedParams, schedule: &Schedule, options: &ReducedOptions) -> Result<ChainReport> {
    params.validate()?;
    schedule.validate()?;
    options.validate()?;
    let ks = &options.observable_ks;
    let (a, b) = (params.a, params.b);
    let dt = schedule.dt;
    let noise_scale = (2.0 * dt).sqrt();
    let cap = options.cap_factor * noise_scale;

    let mut noise = NoiseSource::new(schedule.seed);
    let mut acc: Vec<ComplexAccumulator> = ks
        .iter()
        .map(|_| ComplexAccumulator::new(schedule.num_samples))
        .collect();
    let mut samples = options.record_samples.then(Vec::new);
    let mut diag = Diagnostics::default();
    let mut status = RunStatus::Completed;

    let mut x = wrap_angle(options.x0);
    let mut y = options.y0;
    diag.max_abs_y = y.abs();
    let burn = schedule.burn_in_steps();
    let interval = schedule.interval_steps();
    let total = schedule.total_steps();

    for step in 1..=total {
        let (mut dx, mut dy) = match drift_parts(x, y, a, b) {
            Some((kr, ki)) => (kr * dt, ki * dt),
            None => {
                diag.capped_steps += 1;
                (0.0, 0.0)
            }
        };
        let len = dx.hypot(dy);
        if len > cap {
            let f = cap / len;
            dx *= f;
            dy *= f;
            diag.capped_steps += 1;
        }
        x = wrap_angle(x + dx + noise_scale * noise.normal());
        y += dy;
        diag.steps = step;
        let ay = y.abs();
        if ay > diag.max_abs_y {
            diag.max_abs_y = ay;
        }
        if !(ay <= options.y_bound) {
            status = RunStatus::Escaped { time: step as f64 * dt };
            break;
        }
        if step > burn && (step - burn).is_multiple_of(interval) {
            for (&k, acc) in ks.iter().zip(acc.iter_mut()) {
                acc.push(observable(k, x, y));
            }
            if let Some(s) = samples.as_mut() {
                s.push((x, y));
            }
        }
    }

    Ok(ChainReport {
        estimates: finish_estimates(ks, &acc),
        num_samples: acc.first().map(ComplexAccumulator::count).unwrap_or(0),
        delta_f_series: Vec::new(),
        samples,
        status,
        diagnostics: diag,
        meta: RunMeta {
            schedule: *schedule,
            model: ModelEcho::Reduced {
                params: *params,
                x0: options.x0,
                y0: options.y0,
                y_bound: options.y_bound,
                cap_factor: options.cap_factor,
            },
            observable_ks: ks.clone(),
        },
    })
}

/// `max_{ξ∈[−1,1]} g(ξ, η)` for the localization cubic, in closed form.
fn inner_max(a: f64, b: f64, eta: f64) -> f64 {
    let c = 1.0 - eta * eta;
    let r = b / (a * eta);
    let offset = r - c.sqrt() / a;
    let g = |xi: f64| ((c * xi - r * c) * xi - 1.0) * xi + offset;
    let mut best = g(-1.0).max(g(1.0));
    // g' = 3c ξ² − 2rc ξ − 1; discriminant is positive since c > 0
    let disc = (r * c).powi(2) + 3.0 * c;
    let sq = disc.sqrt();
    for root in [(r * c - sq) / (3.0 * c), (r * c + sq) / (3.0 * c)] {
        if (-1.0..=1.0).contains(&root) {
            best = best.max(g(root));
        }
    }
    best
}

/// The localization function: negative inside the confined region.
///
/// Evaluated at `(|A|, |B|)`, which leaves the sign unchanged. The outer
/// infimum over `η ∈ (0, 1)` is taken on a uniform grid of `eta_samples`
/// midpoints, then refined by golden-section search around the best cell.
/// `A = 0` is not covered; see [`is_localized`].
pub fn localization_f(a: f64, b: f64, eta_samples: usize) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument("A and B must be finite".into()));
    }
    if a == 0.0 {
        return Err(Error::InvalidArgument(
            "localization function is undefined at A = 0; use the closed-form criterion |B| < 1/2".into(),
        ));
    }
    if eta_samples < 1000 {
        return Err(Error::InvalidArgument(format!(
            "eta_samples must be at least 1000, got {eta_samples}"
        )));
    }
    let (a, b) = (a.abs(), b.abs());
    let h = 1.0 / eta_samples as f64;
    let phi = |eta: f64| inner_max(a, b, eta);
    let (mut best_i, mut best) = (0, f64::INFINITY);
    for i in 0..eta_samples {
        let v = phi((i as f64 + 0.5) * h);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let centre = (best_i as f64 + 0.5) * h;
    let mut lo = (centre - h).max(f64::EPSILON);
    let mut hi = (centre + h).min(1.0 - f64::EPSILON);
    let inv_gold = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - inv_gold * (hi - lo);
    let mut x2 = lo + inv_gold * (hi - lo);
    let (mut f1, mut f2) = (phi(x1), phi(x2));
    for _ in 0..80 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_gold * (hi - lo);
            f1 = phi(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_gold * (hi - lo);
            f2 = phi(x2);
        }
    }
    Ok(best.min(f1).min(f2))
}

pub const DEFAULT_ETA_SAMPLES: usize = 4000;

/// Whether `(A, B)` lies in the region where `y` provably stays in a strip.
pub fn is_localized(a: f64, b: f64) -> Result<bool> {
    if a == 0.0 {
        if !b.is_finite() {
            return Err(Error::InvalidArgument("B must be finite".into()));
        }
        return Ok(b.abs() < 0.5);
    }
    Ok(localization_f(a, b, DEFAULT_ETA_SAMPLES)? < 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub a: f64,
    /// Largest `|B|` still localized, to the bisection tolerance.
    pub b: f64,
}

pub const BOUNDARY_TOLERANCE: f64 = 1e-4;

/// The region edge `ε_A` at one value of `A`, by bisection on `B ≥ 0`.
///
/// Returns `None` when `(A, 0)` itself is outside the region.
pub fn boundary_at(a: f64, tol: f64) -> Result<Option<f64>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if !is_localized(a, 0.0)? {
        return Ok(None);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while is_localized(a, hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::InvalidArgument(format!("no region boundary found at A = {a}")));
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if is_localized(a, mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Boundary points on `a_count` evenly spaced interior values of
/// `A ∈ (−3√3/2, 3√3/2)`.
pub fn trace_boundary(a_count: usize, tol: f64) -> Result<Vec<BoundaryPoint>> {
    if a_count == 0 {
        return Err(Error::InvalidArgument("a_count must be positive".into()));
    }
    let width = 2.0 * CONFINEMENT_A / (a_count + 1) as f64;
    let mut out = Vec::with_capacity(a_count);
    for i in 1..=a_count {
        let a = -CONFINEMENT_A + width * i as f64;
        if let Some(b) = boundary_at(a, tol)? {
            out.push(BoundaryPoint { a, b });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowBounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Default for FlowBounds {
    fn default() -> Self {
        Self {
            x_min: -PI,
            x_max: PI,
            y_min: -2.0,
            y_max: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowCell {
    pub x: f64,
    pub y: f64,
    pub kr: f64,
    pub ki: f64,
    pub norm: f64,
    /// The drift is singular here and the other entries are zero.
    pub singular: bool,
}

impl FlowCell {
    /// Unit direction of the drift, `(0, 0)` where it vanishes.
    pub fn direction(&self) -> (f64, f64) {
        if self.norm > 0.0 {
            (self.kr / self.norm, self.ki / self.norm)
        } else {
            (0.0, 0.0)
        }
    }
}

/// The drift sampled at cell centres of an `nx × ny` grid, row by row in `y`.
pub fn flow_field(a: f64, b: f64, nx: usize, ny: usize, bounds: &FlowBounds) -> Result<Vec<FlowCell>> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidArgument(
            "flow grid needs at least one cell per axis".into(),
        ));
    }
    if !(bounds.x_max > bounds.x_min && bounds.y_max > bounds.y_min) {
        return Err(Error::InvalidArgument("flow bounds must be increasing".into()));
    }
    let hx = (bounds.x_max - bounds.x_min) / nx as f64;
    let hy = (bounds.y_max - bounds.y_min) / ny as f64;
    let mut cells = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = bounds.y_min + (j as f64 + 0.5) * hy;
        for i in 0..nx {
            let x = bounds.x_min + (i as f64 + 0.5) * hx;
            cells.push(match drift_parts(x, y, a, b) {
                Some((kr, ki)) => FlowCell {
                    x,
                    y,
                    kr,
                    ki,
                    norm: kr.hypot(ki),
                    singular: false,
                },
                None => FlowCell {
                    x,
                    y,
                    kr: 0.0,
                    ki: 0.0,
                    norm: 0.0,
                    singular: true,
                },
            });
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_field_vanishes_at_half_pi() {
        let (kr, ki) = drift_reduced(PI / 2.0, 0.0, 0.0, 0.0).unwrap();
        assert!(kr.abs() < 1e-15 && ki.abs() < 1e-15);
    }

    #[test]
    fn real_axis_imaginary_drift() {
        for &(x, a, b) in &[(0.3, 1.0, 0.2), (-2.0, 5.0, 10.0), (1.7, -0.4, 3.0)] {
            let (_, ki) = drift_reduced(x, 0.0, a, b).unwrap();
            assert!((ki + 2.0 * b * f64::sin(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn matches_complex_formula() {
        let (x, y, a, b) = (0.7, -0.3, 1.3, 0.6);
        let s = C64::new(x, y);
        let beta = C64::new(a, b);
        let k = (-beta * s.sin() + s.cos() / s.sin()) * 2.0;
        let (kr, ki) = drift_reduced(x, y, a, b).unwrap();
        assert!((kr - k.re).abs() < 1e-12 && (ki - k.im).abs() < 1e-12);
    }

    #[test]
    fn singular_points_rejected() {
        assert!(matches!(drift_reduced(0.0, 0.0, 1.0, 1.0), Err(Error::Singular { .. })));
        assert!(drift_reduced(PI, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn wrap_range() {
        for &x in &[PI, -PI, 3.5, -3.5, 10.0 * PI + 0.1, 0.0] {
            let w = wrap_angle(x);
            assert!(w > -PI && w <= PI, "{x} -> {w}");
            assert!(((x - w) / (2.0 * PI)).fract().abs() < 1e-9 || ((x - w) / (2.0 * PI)).fract().abs() > 1.0 - 1e-9);
        }
    }

    #[test]
    fn observable_is_two_cos() {
        let (x, y) = (0.4, 0.25);
        let z = C64::new(x, y);
        for k in [-3, -1, 1, 2] {
            let expect = (z * k as f64).cos() * 2.0;
            assert!((observable(k, x, y) - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn zero_a_closed_form() {
        assert!(is_localized(0.0, 0.49).unwrap());
        assert!(!is_localized(0.0, 0.51).unwrap());
        assert!(localization_f(0.0, 0.3, 2000).is_err());
        assert!(localization_f(1.0, 0.3, 10).is_err());
    }

    #[test]
    fn weak_coupling_localized() {
        for &a in &[0.1, 1.0, 2.0, 2.5, -2.5] {
            assert!(localization_f(a, 1e-6, 2000).unwrap() < 0.0, "A = {a}");
        }
        assert!(localization_f(1.0, 0.2, 2000).unwrap() < 0.0);
        assert!(localization_f(3.0, 1e-6, 2000).unwrap() >= 0.0);
        assert!(!is_localized(1.0, 2.0).unwrap());
    }

    #[test]
    fn zero_b_matches_closed_inner_max() {
        // max (cξ³ − ξ) = (2/3)/√(3c) when c ≥ 1/3
        let eta: f64 = 0.5;
        let c = 1.0 - eta * eta;
        let expect = 2.0 / 3.0 / (3.0 * c).sqrt() - c.sqrt() / 1.5;
        assert!((inner_max(1.5, 0.0, eta) - expect).abs() < 1e-14);
    }

    #[test]
    fn boundary_near_half_for_small_a() {
        let b = boundary_at(1e-6, 1e-5).unwrap().unwrap();
        assert!((b - 0.5).abs() < 1e-3, "{b}");
        assert!(boundary_at(3.0, 1e-4).unwrap().is_none());
    }

    #[test]
    fn flow_cells_avoid_singularities_and_match_drift() {
        let cells = flow_field(1.0, 0.2, 8, 6, &FlowBounds::default()).unwrap();
        assert_eq!(cells.len(), 48);
        for c in &cells {
            assert!(!c.singular);
            let (kr, ki) = drift_reduced(c.x, c.y, 1.0, 0.2).unwrap();
            assert_eq!((kr, ki), (c.kr, c.ki));
        }
    }

    #[test]
    fn real_coupling_stays_on_axis() {
        let p = ReducedParams::new(2.0, 0.0).unwrap();
        let s = Schedule {
            dt: 1e-4,
            burn_in_time: 1.0,
            sample_interval: 0.01,
            num_samples: 200,
            seed: 3,
        };
        let r = run_reduced(&p, &s).unwrap();
        assert_eq!(r.diagnostics.max_abs_y, 0.0);
        assert_eq!(r.num_samples, 200);
        for e in &r.estimates {
            assert_eq!(e.mean.im, 0.0);
        }
    }

    #[test]
    fn escape_flagged() {
        let p = ReducedParams::new(1.0, 2.0).unwrap();
        let s = Schedule {
            dt: 1e-3,
            burn_in_time: 0.0,
            sample_interval: 0.01,
            num_samples: 100_000,
            seed: 1,
        };
        let opts = ReducedOptions {
            y_bound: 0.5,
            ..Default::default()
        };
        let r = run_reduced_with(&p, &s, &opts).unwrap();
        assert!(r.escaped());
        assert!(r.num_samples < 100_000);
    }
}
