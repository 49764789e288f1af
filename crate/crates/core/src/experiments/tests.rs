use super::*;
use crate::dynamics::EvolutionParams;

fn small(t: f64) -> ExperimentConfig {
    let mut p = EvolutionParams::quintic(1e-2, t);
    p.snapshot_stride = 10;
    let mut c = ExperimentConfig::new(p);
    c.n = 512;
    c.length = 100.0;
    c
}

#[test]
fn perturbation_is_seeded_band_limited_and_normalized() {
    let g = Grid::new(512, 100.0).unwrap();
    let a = perturbation_field(&g, 5, (0.5, 2.0)).unwrap();
    let b = perturbation_field(&g, 5, (0.5, 2.0)).unwrap();
    assert_eq!(a.coefficients(), b.coefficients());
    assert!((a.h1_norm() - 1.0).abs() < 1e-14);
    assert_eq!(a.max_negative_mode(), 0.0);
    for (j, c) in a.coefficients().iter().enumerate() {
        let k = g.wavenumber(j);
        if !(0.5..=2.0).contains(&k) {
            assert_eq!(c.norm(), 0.0);
        }
    }
    let other = perturbation_field(&g, 6, (0.5, 2.0)).unwrap();
    assert_ne!(other.coefficients(), a.coefficients());
    // strictly between the modes 8·dk and 9·dk
    assert!(perturbation_field(&g, 5, (0.52, 0.55)).is_err());
}

#[test]
fn config_is_validated() {
    let mut c = small(1.0);
    assert!(c.validate().is_ok());
    c.perturbation.delta = -1.0;
    assert!(c.validate().is_err());
    c.perturbation.delta = 0.01;
    c.perturbation.band = (0.0, 100.0);
    assert!(c.validate().is_err());
    c.perturbation.band = (2.0, 1.0);
    assert!(c.validate().is_err());
    let mut c = small(1.0);
    c.mass = Some(f64::NAN);
    assert!(c.validate().is_err());
    let mut c = small(1.0);
    c.n = 100;
    assert!(c.validate().is_err());
}

#[test]
fn verdict_thresholds() {
    assert_eq!(classify_l6_ratio(0.25), Verdict::ScatteringLike);
    assert_eq!(classify_l6_ratio(0.3), Verdict::Indeterminate);
    assert_eq!(classify_l6_ratio(0.5), Verdict::NonScatteringLike);
}

#[test]
fn zero_field_scatters_trivially() {
    let mut c = small(1.0);
    c.profile = InitialProfile::Zero;
    let r = scattering_run(&c).unwrap();
    assert_eq!(r.summary.l6_ratio, 1.0);
    assert_eq!(r.summary.residual_l2, Some(0.0));
    assert_eq!(r.summary.residual_h1, Some(0.0));
    assert_eq!(r.summary.backward.unwrap().l6_ratio, 1.0);
    assert!(r.pass);
    assert!(stability_run(&c).is_err());
}

#[test]
fn scattering_respects_the_wrap_horizon() {
    let mut c = small(100.0);
    c.profile = InitialProfile::Reference(ReferenceProfileKind::GaussianHardy { sigma: 0.5 });
    c.mass = Some(0.1);
    let err = scattering_run(&c).unwrap_err();
    assert!(format!("{err}").contains("wrap"), "{err}");
}

#[test]
fn scattering_run_is_reproducible() {
    let mut c = small(4.0);
    c.profile = InitialProfile::Reference(ReferenceProfileKind::GaussianHardy { sigma: 1.0 });
    c.mass = Some(0.5);
    c.perturbation = Perturbation {
        delta: 0.01,
        seed: 3,
        band: (0.0, 2.0),
    };
    c.evolution.snapshot_stride = 1000;
    let a = scattering_run(&c).unwrap();
    let b = scattering_run(&c).unwrap();
    assert_eq!(a.summary, b.summary);
    // the quadrature spacing was capped at 0.1 and echoed
    assert_eq!(a.config.evolution.snapshot_stride, 10);
    assert!(a.summary.residual_l2.unwrap() < 1e-4);
    assert!(a.summary.drifts.mass < 1e-12);
}

#[test]
fn stability_distance_grows_with_delta() {
    let mut c = small(2.0);
    c.profile = InitialProfile::Reference(ReferenceProfileKind::TravelingQc { c: 1.0 });
    c.perturbation.seed = 11;
    c.perturbation.band = (0.0, 2.0);
    let mut last = 0.0;
    for delta in [0.005, 0.01, 0.02] {
        c.perturbation.delta = delta;
        let r = stability_run(&c).unwrap();
        let d = r.summary.max_orbit_dist.unwrap();
        assert!(d + 1e-4 >= last, "{delta}: {d} < {last}");
        assert_eq!(r.orbit.len(), r.trajectory.len());
        last = d;
    }
}

#[test]
fn scaling_search_in_stability_runs() {
    let mut c = small(0.5);
    c.profile = InitialProfile::Reference(ReferenceProfileKind::QPlus);
    c.search_scaling = true;
    let r = stability_run(&c).unwrap();
    c.search_scaling = false;
    let plain = stability_run(&c).unwrap();
    // Q₊ alone is not a traveling wave; the larger orbit can only be closer
    assert!(r.orbit[0] < 1e-12);
    for (a, b) in r.orbit.iter().zip(&plain.orbit) {
        assert!(*a <= b + 1e-12, "{a} > {b}");
    }
}

#[test]
fn threshold_scan_rejects_bad_brackets() {
    let mut c = small(1.0);
    c.evolution.dt = 5e-3;
    let fam = ThresholdFamily::Reference(ReferenceProfileKind::GaussianHardy { sigma: 1.0 });
    assert!(threshold_scan(fam, (0.1, 0.1), &c, 12).is_err());
    assert!(threshold_scan(fam, (0.2, 0.1), &c, 12).is_err());
    // two small masses: neither end is non-scattering-like
    let err = format!("{}", threshold_scan(fam, (0.01, 0.02), &c, 12).unwrap_err());
    assert!(err.contains("0.01 is") && err.contains("0.02 is"), "{err}");
}

#[test]
fn sweep_matches_direct_calls() {
    let mut c = small(0.5);
    c.profile = InitialProfile::Reference(ReferenceProfileKind::TravelingQc { c: 1.0 });
    c.perturbation.delta = 0.01;
    c.perturbation.seed = 2;
    c.perturbation.band = (0.0, 2.0);
    let direct = stability_run(&c).unwrap();
    let mut bad = c.clone();
    bad.n = 3;
    let runs = vec![
        (Experiment::Stability, c.clone()),
        (Experiment::Stability, c.clone()),
        (Experiment::Stability, bad),
    ];
    let out = sweep(&runs).unwrap();
    let a = out[0].as_ref().unwrap();
    let b = out[1].as_ref().unwrap();
    assert_eq!(a.summary, direct.summary);
    assert_eq!(a.orbit, direct.orbit);
    assert_eq!(a.summary, b.summary);
    assert!(out[2].is_err());
    assert!(sweep(&[]).is_err());
}
