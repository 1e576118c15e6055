use std::f64::consts::PI;

use clm_core::langevin::Schedule;
use clm_core::polyakov::{drift, ChainParams, LinkConfig};
use clm_core::reduced::{
    drift_reduced, flow_field, is_localized, run_reduced, run_reduced_with, FlowBounds, ReducedOptions, ReducedParams,
};
use clm_core::sun_algebra::{ComplexMatrix, GeneratorBasis, C64};
use proptest::prelude::*;

fn one_link_k3(s: C64, beta1: C64, beta2: C64) -> C64 {
    let basis = GeneratorBasis::new(2).unwrap();
    let p = ChainParams::new(2, 1, beta1, beta2).unwrap();
    let u = ComplexMatrix::from_diag(&[(-C64::i() * s).exp(), (C64::i() * s).exp()]);
    let cfg = LinkConfig::from_links_unchecked(vec![u]).unwrap();
    // the diagonal generator is the last one
    drift(&p, &basis, &cfg).unwrap().get(2, 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn reduced_drift_matches_one_link_chain(
        x in -3.0f64..3.0,
        y in -1.5f64..1.5,
        a in -4.0f64..4.0,
        b in -4.0f64..4.0,
        split in 0.0f64..1.0,
    ) {
        prop_assume!(y.abs() > 1e-3 || x.sin().abs() > 1e-3);
        let s = C64::new(x, y);
        let beta = C64::new(a, b);
        let k3 = one_link_k3(s, beta * split, beta * (1.0 - split));
        let full = k3 + s.cos() / s.sin() * 2.0;
        let (kr, ki) = drift_reduced(x, y, a, b).unwrap();
        let scale = full.norm().max(1.0);
        prop_assert!((kr - full.re).abs() < 1e-10 * scale);
        prop_assert!((ki - full.im).abs() < 1e-10 * scale);
    }

    #[test]
    fn imaginary_drift_symmetries(x in -3.0f64..3.0, y in 0.01f64..2.0, a in -4.0f64..4.0, b in -4.0f64..4.0) {
        let ki = drift_reduced(x, y, a, b).unwrap().1;
        let scale = ki.abs().max(1.0);
        prop_assert!((drift_reduced(-x, -y, a, b).unwrap().1 + ki).abs() < 1e-12 * scale);
        prop_assert!((drift_reduced(x + PI, -y, -a, b).unwrap().1 + ki).abs() < 1e-12 * scale);
        prop_assert!((drift_reduced(x, -y, a, -b).unwrap().1 + ki).abs() < 1e-12 * scale);
        prop_assert!((drift_reduced(-x, y, a, -b).unwrap().1 - ki).abs() < 1e-12 * scale);
    }

    #[test]
    fn localization_sign_symmetric(a in -3.0f64..3.0, b in 0.0f64..1.0) {
        prop_assume!(a != 0.0);
        let base = is_localized(a, b).unwrap();
        prop_assert_eq!(is_localized(-a, b).unwrap(), base);
        prop_assert_eq!(is_localized(a, -b).unwrap(), base);
        prop_assert_eq!(is_localized(-a, -b).unwrap(), base);
    }
}

#[test]
fn confined_region_examples() {
    assert!(is_localized(1.0, 0.2).unwrap());
    for &a in &[0.5, 1.5, 2.5, -2.5] {
        assert!(is_localized(a, 1e-4).unwrap(), "A = {a}");
    }
    assert!(!is_localized(5.0, 1e-4).unwrap());
}

#[test]
fn free_flow_is_mirror_symmetric() {
    let b = FlowBounds::default();
    let cells = flow_field(0.0, 0.0, 16, 10, &b).unwrap();
    // rows are ordered by y, so row j mirrors row ny − 1 − j
    for j in 0..10 {
        for i in 0..16 {
            let c = cells[j * 16 + i];
            let m = cells[(9 - j) * 16 + i];
            assert!((c.y + m.y).abs() < 1e-12);
            assert!((c.kr - m.kr).abs() < 1e-12);
            assert!((c.ki + m.ki).abs() < 1e-12);
        }
    }
}

#[test]
fn confining_band_pushes_down() {
    // with η = tanh y = 1/2 the localization inequality holds at (1, 0.2)
    let y0 = 0.5f64.atanh();
    let band = FlowBounds {
        x_min: -PI,
        x_max: PI,
        y_min: y0 - 0.05,
        y_max: y0 + 0.05,
    };
    let cells = flow_field(1.0, 0.2, 64, 5, &band).unwrap();
    assert!(cells.iter().all(|c| !c.singular && c.ki < 0.0));
    let mirrored = FlowBounds {
        y_min: -y0 - 0.05,
        y_max: -y0 + 0.05,
        ..band
    };
    assert!(flow_field(1.0, 0.2, 64, 5, &mirrored)
        .unwrap()
        .iter()
        .all(|c| c.ki > 0.0));
}

fn schedule(dt: f64, steps: u64, every: u64, seed: u64) -> Schedule {
    Schedule {
        dt,
        burn_in_time: 0.0,
        sample_interval: every as f64 * dt,
        num_samples: (steps / every) as usize,
        seed,
    }
}

#[test]
fn confined_run_stays_in_band() {
    let p = ReducedParams::new(1.0, 0.2).unwrap();
    let r = run_reduced(&p, &schedule(1e-5, 10_000_000, 1000, 8)).unwrap();
    assert!(!r.escaped());
    assert_eq!(r.diagnostics.steps, 10_000_000);
    assert!(r.diagnostics.max_abs_y < 5.0, "{}", r.diagnostics.max_abs_y);
}

#[test]
fn unconfined_coupling_can_escape_band() {
    let p = ReducedParams::new(1.0, 2.0).unwrap();
    let best = (0..10)
        .map(|seed| {
            run_reduced(&p, &schedule(1e-4, 1_000_000, 100, 20 + seed))
                .unwrap()
                .diagnostics
                .max_abs_y
        })
        .fold(0.0, f64::max);
    assert!(best > 2.0, "max |y| over seeds {best}");
}

#[test]
fn samples_are_wrapped_and_recorded() {
    let p = ReducedParams::new(5.0, 10.0).unwrap();
    let opts = ReducedOptions {
        record_samples: true,
        ..Default::default()
    };
    let r = run_reduced_with(&p, &schedule(1e-4, 200_000, 100, 3), &opts).unwrap();
    let samples = r.samples.as_ref().unwrap();
    assert_eq!(samples.len(), 2000);
    assert!(samples.iter().all(|&(x, _)| x > -PI && x <= PI));
    assert_eq!(r.num_samples, 2000);
}

#[test]
fn reduced_run_is_deterministic() {
    let p = ReducedParams::new(1.0, 2.0).unwrap();
    let s = schedule(1e-4, 50_000, 10, 4);
    assert_eq!(run_reduced(&p, &s).unwrap(), run_reduced(&p, &s).unwrap());
}
