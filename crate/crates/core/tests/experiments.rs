use std::f64::consts::PI;

use szego_core::dynamics::{evolve, EvolutionParams};
use szego_core::experiments::{
    initial_data, orbit_distance, sweep, Experiment, ExperimentConfig, InitialProfile, Perturbation,
};
use szego_core::groundstate::{periodic_traveling_wave, reference_hardy, ReferenceProfileKind};
use szego_core::spectral::{phase_rotate_hardy, translate_hardy, Grid};
use szego_core::FftKernel;

fn small(t: f64) -> ExperimentConfig {
    let mut p = EvolutionParams::quintic(1e-3, t);
    p.snapshot_stride = 50;
    let mut c = ExperimentConfig::new(p);
    c.n = 1 << 11;
    c.length = 100.0;
    c
}

#[test]
fn wave_energy_scales_with_the_square_of_the_speed() {
    let runs: Vec<_> = [0.75, 1.0, 1.5]
        .into_iter()
        .map(|c| (Experiment::TravelingWave { c }, small(0.1)))
        .collect();
    let reports = sweep(&runs).unwrap();
    for (r, c) in reports.iter().zip([0.75, 1.0, 1.5]) {
        let r = r.as_ref().unwrap();
        let e = r.summary.energy_line_estimate.unwrap() / (c * c);
        let line = -PI / (4.0 * 2f64.sqrt());
        assert!((e - line).abs() < 1e-2 * line.abs(), "c = {c}: {e}");
        assert!(r.summary.max_wave_error.unwrap() < 1e-6);
    }
}

#[test]
fn the_periodic_wave_is_a_fixed_point_of_its_orbit() {
    let g = Grid::new(1 << 11, 100.0).unwrap();
    let w = periodic_traveling_wave(&g, 1.0).unwrap();
    let mut p = EvolutionParams::quintic(1e-3, 2.0);
    p.snapshot_stride = 2000;
    let u = evolve(&w.profile, &p).unwrap().final_field;
    let d = orbit_distance(&u, &w.profile, None).unwrap();
    assert!(d.distance < 1e-6 * w.profile.h1_norm(), "{}", d.distance);
    // the fitted symmetry is the exact one: phase ωT, shift cT
    let back = phase_rotate_hardy(&translate_hardy(&w.profile, d.y), d.theta);
    let direct = (u.as_field() - back.as_field()).h1_norm();
    assert!((direct - d.distance).abs() < 1e-9, "{direct} vs {}", d.distance);
}

#[test]
fn stability_distance_tracks_the_perturbation_size() {
    let mut runs = Vec::new();
    for delta in [0.0, 0.005, 0.02] {
        let mut c = small(1.0);
        c.profile = InitialProfile::TravelingWave { c: 1.0 };
        c.perturbation = Perturbation {
            delta,
            seed: 9,
            band: (0.0, 3.0),
        };
        runs.push((Experiment::Stability, c));
    }
    let d: Vec<f64> = sweep(&runs)
        .unwrap()
        .into_iter()
        .map(|r| r.unwrap().summary.max_orbit_dist.unwrap())
        .collect();
    assert!(d[0] < 1e-6, "{d:?}");
    assert!(d[0] < d[1] && d[1] < d[2], "{d:?}");
    // a perturbation of H¹ size δ starts at distance at most δ
    assert!(d[1] < 4.0 * 0.005 && d[2] < 4.0 * 0.02, "{d:?}");
}

#[test]
fn built_in_fft_matches_the_default_kernel() {
    let fast = Grid::new(1 << 10, 60.0).unwrap();
    let plain = Grid::with_kernel(1 << 10, 60.0, FftKernel::Radix2).unwrap();
    let mut p = EvolutionParams::quintic(1e-3, 0.5);
    p.snapshot_stride = 100;
    let kind = ReferenceProfileKind::GaussianHardy { sigma: 1.0 };
    let a = evolve(&reference_hardy(kind, &fast).unwrap(), &p).unwrap();
    let b = evolve(&reference_hardy(kind, &plain).unwrap(), &p).unwrap();
    let d = (a.final_field.as_field().coefficients().iter())
        .zip(b.final_field.as_field().coefficients())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    assert!(d < 1e-11, "{d:e}");
    for (x, y) in a.conserved.iter().zip(&b.conserved) {
        assert!((x.energy - y.energy).abs() < 1e-11 * x.energy.abs());
    }
}

#[test]
fn initial_data_is_rescaled_before_perturbing() {
    let mut c = small(1.0);
    c.profile = InitialProfile::Reference(ReferenceProfileKind::QPlus);
    c.mass = Some(0.7);
    let g = c.grid().unwrap();
    let u = initial_data(&c, &g).unwrap();
    assert!((u.l2_norm() - 0.7).abs() < 1e-14);
    c.perturbation.delta = 0.1;
    let v = initial_data(&c, &g).unwrap();
    let diff = (v.as_field() - u.as_field()).h1_norm();
    assert!((diff - 0.1).abs() < 1e-14, "{diff}");
    c.profile = InitialProfile::Zero;
    assert!(initial_data(&c, &g).is_err());
}
