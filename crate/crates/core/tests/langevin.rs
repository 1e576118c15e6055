use clm_core::cooling::{cool, optimal_norm_sqr, CoolingStrategy, RealTable};
use clm_core::langevin::{euler_step, run_chain, run_chain_with, NoiseSource, RunOptions, Schedule};
use clm_core::polyakov::{ChainParams, LinkConfig};
use clm_core::sun_algebra::{unitarity_distance, GeneratorBasis, C64};
use proptest::prelude::*;

fn schedule(dt: f64, burn: f64, interval: f64, samples: usize, seed: u64) -> Schedule {
    Schedule {
        dt,
        burn_in_time: burn,
        sample_interval: interval,
        num_samples: samples,
        seed,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn chain_deterministic(seed in any::<u64>(), links in 1usize..=4) {
        let p = ChainParams::with_chemical_potential(3, links, C64::new(2.0, 0.0), 0.1, 1.0).unwrap();
        let s = schedule(1e-4, 0.01, 1e-3, 10, seed);
        for strategy in [CoolingStrategy::Optimal, CoolingStrategy::GradientDescent { alpha: 1.0, iters: 2 }] {
            let a = run_chain(&p, &s, &strategy, &[1, -1]).unwrap();
            let b = run_chain(&p, &s, &strategy, &[1, -1]).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(a.num_samples, 10);
        }
    }
}

#[test]
fn optimal_cooling_invariant_along_trajectory() {
    let p = ChainParams::with_chemical_potential(3, 8, C64::new(2.0, 0.0), 0.1, 1.0).unwrap();
    let basis = GeneratorBasis::new(3).unwrap();
    let mut noise = NoiseSource::new(17);
    let mut eta = RealTable::zeros(8, 8);
    let mut cfg = LinkConfig::identity(3, 8);
    for _ in 0..2000 {
        noise.fill(&mut eta);
        let stepped = euler_step(&p, &basis, &cfg, 1e-3, &eta).unwrap();
        let out = cool(&CoolingStrategy::Optimal, &basis, &stepped, 1e-3).unwrap();
        let mu = &out.spectrum.as_ref().unwrap().values;
        assert!(out.cooled.links().iter().all(|u| u.is_diagonal(0.0)));
        let expect = optimal_norm_sqr(mu, 8) - 24.0;
        assert!((out.delta_f_after - expect).abs() < 1e-9);
        cfg = out.cooled;
    }
}

#[test]
fn real_action_stays_unitary_without_cooling() {
    let b1 = C64::new(1.2, 0.5);
    let p = ChainParams::new(3, 4, b1, b1.conj()).unwrap();
    let s = schedule(1e-4, 10.0 - 1e-4, 1e-4, 1, 5);
    assert_eq!(s.total_steps(), 100_000);
    let opts = RunOptions {
        delta_f_stride: 1,
        ..Default::default()
    };
    let r = run_chain_with(&p, &s, &CoolingStrategy::NoCooling, &[1], &opts).unwrap();
    assert!(!r.status.is_failure());
    assert!(r.diagnostics.max_delta_f <= 1e-6, "{}", r.diagnostics.max_delta_f);
}

#[test]
fn zero_coupling_loop_averages_to_zero() {
    let z = C64::new(0.0, 0.0);
    let p = ChainParams::new(2, 1, z, z).unwrap();
    let s = schedule(1e-3, 1.0, 0.05, 4000, 12);
    let r = run_chain(&p, &s, &CoolingStrategy::Optimal, &[1]).unwrap();
    let e = r.estimate(1).unwrap();
    assert!(e.mean.re.abs() < 3.0 * e.stderr.re, "{} ± {}", e.mean.re, e.stderr.re);
    assert!(e.mean.im.abs() < 1e-12);
}

#[test]
fn no_cooling_blows_up_eventually() {
    let p = ChainParams::with_chemical_potential(3, 16, C64::new(2.0, 0.0), 0.1, 1.0).unwrap();
    let s = schedule(2e-5, 6.0, 2e-5, 1, 3);
    let r = run_chain(&p, &s, &CoolingStrategy::NoCooling, &[1]).unwrap();
    assert!(r.diverged());
    assert!(r.num_samples == 0);
    assert!(!r.delta_f_series.is_empty());
}

#[test]
fn series_logged_at_stride() {
    let p = ChainParams::new(2, 3, C64::new(1.0, 0.2), C64::new(0.5, 0.0)).unwrap();
    let s = schedule(1e-3, 0.5, 0.01, 10, 1);
    let r = run_chain(&p, &s, &CoolingStrategy::Optimal, &[1]).unwrap();
    assert_eq!(r.delta_f_series.len() as u64, s.total_steps() / 100);
    let (t, _) = r.delta_f_series[0];
    assert!((t - 0.1).abs() < 1e-12);
}

#[test]
fn truncation_and_initial_state() {
    let p = ChainParams::new(2, 2, C64::new(1.0, 0.0), C64::new(1.0, 0.0)).unwrap();
    let s = schedule(1e-3, 0.0, 1e-3, 1000, 1);
    let opts = RunOptions {
        max_time: Some(0.5),
        initial: Some(LinkConfig::identity(2, 2)),
        ..Default::default()
    };
    let r = run_chain_with(&p, &s, &CoolingStrategy::NoCooling, &[1], &opts).unwrap();
    assert!(matches!(r.status, clm_core::RunStatus::Truncated { .. }));
    assert_eq!(r.num_samples, 500);
    let bad = RunOptions {
        initial: Some(LinkConfig::identity(3, 2)),
        ..Default::default()
    };
    assert!(run_chain_with(&p, &s, &CoolingStrategy::NoCooling, &[1], &bad).is_err());
    assert_eq!(unitarity_distance(&LinkConfig::identity(2, 2)), 0.0);
}
