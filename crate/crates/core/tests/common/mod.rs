#![allow(dead_code)]

use clm_core::cooling::RealTable;
use clm_core::sun_algebra::{expm, ComplexMatrix, GeneratorBasis, C64, I};
use clm_core::LinkConfig;
use rand::Rng;
use rand_distr::StandardNormal;

/// `exp(i Σ (x_a + i y_a) λ_a)` with `x ~ N(0, phase²)`, `y ~ N(0, spread²)`.
pub fn random_sl<R: Rng>(basis: &GeneratorBasis, phase: f64, spread: f64, rng: &mut R) -> ComplexMatrix {
    let coeffs: Vec<C64> = (0..basis.len())
        .map(|_| {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            C64::new(x * phase, y * spread)
        })
        .collect();
    expm(&basis.combine(&coeffs).scale(I)).unwrap()
}

pub fn random_config<R: Rng>(basis: &GeneratorBasis, links: usize, spread: f64, rng: &mut R) -> LinkConfig {
    LinkConfig::random(basis, links, 1.0, spread, rng)
}

pub fn random_gauge<R: Rng>(basis: &GeneratorBasis, links: usize, spread: f64, rng: &mut R) -> Vec<ComplexMatrix> {
    (0..links).map(|_| random_sl(basis, 1.0, spread, rng)).collect()
}

pub fn random_table<R: Rng>(algebra_dim: usize, links: usize, rng: &mut R) -> RealTable {
    RealTable::from_fn(algebra_dim, links, |_, _| rng.sample(StandardNormal))
}

/// Replaces link `k` by `exp(i ε λ_a) U_k`.
pub fn perturb_link(config: &LinkConfig, basis: &GeneratorBasis, a: usize, k: usize, eps: f64) -> LinkConfig {
    let mut links = config.links().to_vec();
    let step = expm(&basis.get(a).scale(I * eps)).unwrap();
    links[k] = &step * &links[k];
    LinkConfig::from_links_unchecked(links).unwrap()
}

/// Central difference of `f(ε)` at zero.
pub fn central_diff(f: impl Fn(f64) -> C64, h: f64) -> C64 {
    (f(h) - f(-h)) / (2.0 * h)
}

/// Second central difference of `f(t)` at zero.
pub fn second_diff(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h)
}

pub fn frobenius_sqr(config: &LinkConfig) -> f64 {
    config.links().iter().map(ComplexMatrix::frobenius_sqr).sum()
}
