use super::*;
use crate::groundstate::{
    evaluate_functional, periodic_traveling_wave, reference_hardy, FunctionalParams,
    ReferenceProfileKind,
};
use crate::spectral::{lp_norm, phase_rotate_hardy, szego_project, translate_hardy, Grid};

fn gaussian(grid: &Grid, amp: f64, sigma: f64) -> HardyField {
    szego_project(&SpectralField::from_fn(grid, |x| {
        Complex64::new(amp * (-(x / sigma).powi(2)).exp(), 0.0)
    }))
}

fn h1_dist(a: &HardyField, b: &HardyField) -> f64 {
    (a.as_field() - b.as_field()).h1_norm()
}

#[test]
fn free_gaussian_matches_closed_form() {
    let g = Grid::new(1024, 80.0).unwrap();
    let f = SpectralField::from_fn(&g, |x| Complex64::new((-x * x).exp(), 0.0));
    assert_eq!(free_propagate(&f, 0.0).coefficients(), f.coefficients());
    let t = 0.7;
    let u = free_propagate(&f, t).samples();
    let z = Complex64::new(1.0, 4.0 * t);
    for (j, v) in u.iter().enumerate() {
        let x = g.x(j);
        if x.abs() > 20.0 {
            continue;
        }
        let exact = (-(x * x) / z).exp() / z.sqrt();
        assert!((v - exact).norm() < 1e-10, "x = {x}: {v} vs {exact}");
    }
    let h = free_propagate(&f, 5.3).h1_norm();
    assert!((h - f.h1_norm()).abs() < 1e-12 * f.h1_norm());
}

#[test]
fn disabled_nonlinearity_is_the_free_flow() {
    let g = Grid::new(256, 40.0).unwrap();
    let u = gaussian(&g, 1.0, 1.5);
    let mut p = EvolutionParams::quintic(1e-2, 1.0);
    p.nonlinearity = Nonlinearity::Disabled;
    let s = step_strang(&u, 1e-2, &p).unwrap();
    let f = free_propagate_hardy(&u, 1e-2);
    for (a, b) in s.coefficients().iter().zip(f.coefficients()) {
        assert!((a - b).norm() < 1e-14);
    }
}

#[test]
fn one_strang_step_follows_the_traveling_wave() {
    let g = Grid::new(1 << 13, 400.0).unwrap();
    let w = periodic_traveling_wave(&g, 1.0).unwrap();
    let q = &w.profile;
    let dt = 1e-3;
    let p = EvolutionParams::quintic(dt, dt);
    let u = step_strang(q, dt, &p).unwrap();
    let exact = phase_rotate_hardy(&translate_hardy(q, dt), 0.375 * dt);
    let err = h1_dist(&u, &exact);
    assert!(err < 5e-9, "{err:e}");
    let drift = (u.mass() - q.mass()).abs() / q.mass();
    assert!(drift < 1e-12, "{drift:e}");
}

#[test]
fn strang_and_rk4_agree() {
    let g = Grid::new(1024, 200.0).unwrap();
    let u0 = gaussian(&g, 0.5, 2.0);
    let mut p = EvolutionParams::quintic(1e-4, 1.0);
    p.snapshot_stride = 100_000;
    let a = evolve(&u0, &p).unwrap().final_field;
    p.scheme = Scheme::Rk4;
    let b = evolve(&u0, &p).unwrap().final_field;
    let d = h1_dist(&a, &b);
    assert!(d < 1e-7, "{d:e}");
}

#[test]
fn rk4_rejects_stiff_steps_and_keeps_zero() {
    let g = Grid::new(1024, 200.0).unwrap();
    let p = EvolutionParams::quintic(0.1, 0.1);
    let z = HardyField::zeros(&g);
    assert!(matches!(step_rk4(&z, 0.1, &p), Err(Error::InvalidArgument(_))));
    let out = step_rk4(&z, 1e-4, &p).unwrap();
    assert_eq!(out.mass(), 0.0);
}

#[test]
fn zero_horizon_records_one_row() {
    let g = Grid::new(128, 20.0).unwrap();
    let u = gaussian(&g, 1.0, 1.0);
    let rec = evolve(&u, &EvolutionParams::quintic(1e-3, 0.0)).unwrap();
    assert_eq!(rec.len(), 1);
    assert_eq!(rec.times, vec![0.0]);
    assert_eq!(rec.final_field.coefficients(), u.coefficients());
}

#[test]
fn params_are_validated() {
    let mut p = EvolutionParams::quintic(0.0, 1.0);
    assert!(p.validate().is_err());
    p.dt = 1e-3;
    p.m = 0;
    assert!(p.validate().is_err());
    p.m = 2;
    p.t_final = 1e7;
    assert!(p.validate().is_err());
    p.t_final = 1.0;
    p.snapshot_stride = 0;
    assert!(p.validate().is_err());
    let p = EvolutionParams::quintic(0.3, 1.0);
    assert_eq!(p.step_count(), (4, 0.25));
}

#[test]
fn steps_stay_in_hardy_space_and_conserve_mass_and_momentum() {
    let g = Grid::new(256, 40.0).unwrap();
    let u0 = gaussian(&g, 1.2, 1.0);
    let mut p = EvolutionParams::quintic(1e-3, 0.2);
    p.snapshot_stride = 1;
    p.keep_snapshots = true;
    let rec = evolve(&u0, &p).unwrap();
    assert_eq!(rec.len(), 201);
    for s in &rec.snapshots {
        assert_eq!(s.max_negative_mode(), 0.0);
    }
    assert!(rec.drift(|c| c.mass) < 1e-12);
    assert!(rec.drift(|c| c.momentum) < 1e-12);
    assert!(rec.times.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn backward_then_forward_returns() {
    let g = Grid::new(256, 40.0).unwrap();
    let u0 = gaussian(&g, 0.8, 1.5);
    let p = EvolutionParams::quintic(1e-3, 1.0);
    let fwd = evolve(&u0, &p).unwrap().final_field;
    let back = evolve(&fwd, &EvolutionParams::quintic(1e-3, -1.0)).unwrap();
    assert!(back.times.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(*back.times.last().unwrap(), 0.0);
    let d = h1_dist(&back.final_field, &u0);
    assert!(d < 1e-6, "{d:e}");
}

#[test]
fn backward_observer_sees_descending_times() {
    let g = Grid::new(64, 20.0).unwrap();
    let u0 = gaussian(&g, 0.5, 1.5);
    let mut p = EvolutionParams::quintic(1e-2, -0.1);
    p.snapshot_stride = 2;
    let mut seen = Vec::new();
    evolve_observed(&u0, &p, |t, _| {
        seen.push(t);
        Ok(())
    })
    .unwrap();
    assert_eq!(seen.len(), 6);
    assert!(seen.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn runaway_steps_report_blowup_with_partial_record() {
    let g = Grid::new(64, 20.0).unwrap();
    let u0 = gaussian(&g, 50.0, 1.0);
    let mut p = EvolutionParams::quintic(0.5, 20.0);
    p.snapshot_stride = 1;
    match evolve(&u0, &p) {
        Err(Error::NumericalBlowup { time, partial }) => {
            let partial = partial.expect("partial record");
            assert!(!partial.is_empty());
            assert!((0.0..20.0).contains(&time));
            assert_eq!(*partial.times.last().unwrap(), time);
        }
        other => panic!("expected blow-up, got {other:?}"),
    }
}

#[test]
fn k_gamma_identity_and_reference_energy() {
    let g = Grid::new(1 << 13, 400.0).unwrap();
    let q = reference_hardy(ReferenceProfileKind::TravelingQc { c: 1.0 }, &g).unwrap();
    let set = conserved_set(&q, 2.0).unwrap();
    let exact = -PI / (4.0 * 2f64.sqrt());
    assert!((set.energy - exact).abs() < 1e-3 * exact.abs(), "{}", set.energy);
    let via = k_gamma_via_functional(&q, 2.0).unwrap();
    assert!((via - set.k_gamma).abs() < 1e-10 * set.k_gamma.abs().max(set.energy.abs()));

    // rescaled so that ‖Q‖⁴ = 3I, the identity vanishes
    let params = FunctionalParams::new(2, 2.0).unwrap();
    let i = evaluate_functional(&q, &params).unwrap();
    let r = q.scale_real(((3.0 * i).sqrt() / q.mass()).sqrt());
    let k = conserved_set(&r, 2.0).unwrap().k_gamma;
    assert!(k.abs() < 1e-10 * conserved_set(&r, 2.0).unwrap().energy.abs().max(1.0), "{k:e}");
}

#[test]
fn single_mode_arithmetic() {
    let l = 2.0 * PI;
    let g = Grid::new(16, l).unwrap();
    let u = HardyField::from_spectrum(&g, |k| {
        if k == 1.0 {
            Complex64::new(l.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let set = conserved_set(&u, 0.0).unwrap();
    assert!((set.mass - 1.0).abs() < 1e-14);
    assert!((set.momentum - 1.0).abs() < 1e-14);
    let e = 0.5 - l / (6.0 * l.powi(3));
    assert!((set.energy - e).abs() < 1e-14);
    assert_eq!(set.k_gamma, set.energy);
    let z = conserved_set(&HardyField::zeros(&g), 2.0).unwrap();
    assert_eq!(z.k_gamma, z.energy);
}

#[test]
fn free_trajectory_has_trivial_duhamel_state() {
    let g = Grid::new(128, 40.0).unwrap();
    let u0 = gaussian(&g, 1.0, 2.0);
    let mut p = EvolutionParams::quintic(1e-2, 1.0);
    p.nonlinearity = Nonlinearity::Disabled;
    p.snapshot_stride = 5;
    p.keep_snapshots = true;
    let rec = evolve(&u0, &p).unwrap();
    let up = duhamel_scattering_state(&rec, Direction::Forward).unwrap();
    assert_eq!(up.coefficients(), u0.coefficients());
    let um = duhamel_scattering_state(&rec, Direction::Backward);
    assert!(um.is_err(), "backward state needs a backward run");
}

#[test]
fn duhamel_needs_dense_snapshots() {
    let g = Grid::new(64, 20.0).unwrap();
    let u0 = gaussian(&g, 0.3, 2.0);
    let mut p = EvolutionParams::quintic(1e-2, 1.0);
    p.snapshot_stride = 20;
    p.keep_snapshots = true;
    let rec = evolve(&u0, &p).unwrap();
    assert!(duhamel_scattering_state(&rec, Direction::Forward).is_err());
    p.keep_snapshots = false;
    let rec = evolve(&u0, &p).unwrap();
    assert!(duhamel_scattering_state(&rec, Direction::Forward).is_err());
}

#[test]
fn free_decay_of_a_gaussian() {
    let g = Grid::new(1 << 13, 800.0).unwrap();
    let f = SpectralField::from_fn(&g, |x| Complex64::new((-x * x).exp(), 0.0));
    let times = [0.0, 1.0, 5.0, 40.0];
    let sup = free_decay_profile(&f, &times, f64::INFINITY).unwrap();
    for (&t, &v) in times.iter().zip(&sup) {
        let exact = (1.0 + 16.0 * t * t).powf(-0.25);
        assert!((v - exact).abs() < 1e-6, "t = {t}: {v} vs {exact}");
    }
    assert!(sup[3] <= 0.25 * sup[0]);
    let l6 = free_decay_profile(&f, &[0.0], 6.0).unwrap();
    assert!((l6[0] - lp_norm(&f, 6.0).unwrap()).abs() < 1e-15);
    assert!(free_decay_profile(&f, &[f64::NAN], 6.0).is_err());
}
