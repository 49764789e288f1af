use super::*;
use crate::dynamics::{
    conserved_set, evolve_observed, free_propagate_hardy, Direction, DuhamelAccumulator, EvolutionParams,
};
use crate::spectral::{phase_rotate_hardy, translate_hardy};

/// Which experiment a report belongs to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Experiment {
    Stability,
    TravelingWave { c: f64 },
    Scattering,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Stability => "stability",
            Experiment::TravelingWave { .. } => "travelingwave",
            Experiment::Scattering => "scatter",
        }
    }
}

fn perturbed(config: &ExperimentConfig, q: &HardyField) -> Result<HardyField> {
    let p = &config.perturbation;
    if p.delta == 0.0 {
        return Ok(q.clone());
    }
    let g = perturbation_field(q.grid(), p.seed, p.band)?;
    q.axpy(Complex64::new(p.delta, 0.0), &g)
}

/// Evolves `Q + δg` and records the orbit distance to `Q` at every recorded time.
///
/// The orbit contains every translation and phase, so a traveling wave is compared
/// without tracking its frame. With `search_scaling` the scaling window is searched
/// too. Also reports the range of `‖u(t)‖_{L⁶}/‖u(0)‖_{L⁶}`.
pub fn stability_run(config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    let grid = config.grid()?;
    if config.profile == InitialProfile::Zero {
        return Err(Error::invalid("stability runs need a nonzero profile"));
    }
    let profile = resolve_profile(config.profile, &grid)?;
    let q = &profile.field;
    let u0 = perturbed(config, q)?;
    let scaling = config.search_scaling.then_some(ScalingSearch {
        window: config.scaling_window,
        reference: profile.reference,
    });
    let mut orbit = Vec::new();
    let rec = evolve_observed(&u0, &config.evolution, |_, u| {
        orbit.push(orbit_distance(u, q, scaling)?.distance);
        Ok(())
    })?;
    let (l6_ratio, l6_range) = l6_stats(&rec);
    let max_orbit = orbit.iter().copied().fold(0.0, f64::max);
    let th = &config.thresholds;
    let checks = vec![
        Check::at_most("max_orbit_dist", max_orbit, th.orbit),
        Check::at_least("l6_min_ratio", l6_range.0, th.l6_bracket.0),
        Check::at_most("l6_max_ratio", l6_range.1, th.l6_bracket.1),
    ];
    let summary = Summary {
        max_orbit_dist: Some(max_orbit),
        drifts: Drifts::of(&rec),
        l6_ratio,
        l6_range,
        energy: rec.conserved[0].energy,
        ..Summary::default()
    };
    let mut report = RunReport::finish(Experiment::Stability, config.clone(), rec, summary, checks);
    report.orbit = orbit;
    Ok(report)
}

/// Line value of the traveling-wave energy, `-πc²/(4√2)`.
pub(crate) fn wave_energy(c: f64) -> f64 {
    -PI * c * c / (4.0 * 2f64.sqrt())
}

/// Evolves the traveling wave of speed `c` to `t_final` and compares `u(t)` with the
/// exact solution `e^{iωt}Q(x + ct)`, `ω = 3c²/8`, in relative `H¹`.
///
/// The wave is the exact solution on the circle (see
/// [`periodic_traveling_wave`](crate::groundstate::periodic_traveling_wave)). Its
/// energy differs from the line value by the periodization error, so the energy check
/// uses the doubling pair `2E(2L) - E(L)`.
pub fn traveling_wave_run(c: f64, t_final: f64, config: &ExperimentConfig) -> Result<RunReport> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::invalid(format!("traveling wave speed must be > 0, got {c}")));
    }
    let mut config = config.clone();
    config.profile = InitialProfile::TravelingWave { c };
    config.evolution.t_final = t_final;
    config.validate()?;
    let grid = config.grid()?;
    let w = periodic_traveling_wave(&grid, c)?;
    let q = &w.profile;
    let scale = q.h1_norm();
    let mut errors = Vec::new();
    let rec = evolve_observed(q, &config.evolution, |t, u| {
        let exact = phase_rotate_hardy(&translate_hardy(q, c * t), w.omega * t);
        errors.push((u.as_field() - exact.as_field()).h1_norm() / scale);
        Ok(())
    })?;
    let energy = rec.conserved[0].energy;
    let doubled = Grid::new(2 * config.n, 2.0 * config.length)?;
    let e2 = conserved_set(&periodic_traveling_wave(&doubled, c)?.profile, config.evolution.gamma)?.energy;
    let estimate = 2.0 * e2 - energy;
    let exact = wave_energy(c);
    let drifts = Drifts::of(&rec);
    let (l6_ratio, l6_range) = l6_stats(&rec);
    let max_err = errors.iter().copied().fold(0.0, f64::max);
    let th = &config.thresholds;
    let checks = vec![
        Check::at_most("max_wave_error", max_err, th.wave_error),
        Check::at_most("mass_drift", drifts.mass, th.conservation),
        Check::at_most("momentum_drift", drifts.momentum, th.conservation),
        Check::at_most("k_gamma_drift", drifts.k_gamma, th.k_gamma_drift),
        Check::at_most("energy_error", (estimate - exact).abs() / exact.abs(), th.energy),
    ];
    let summary = Summary {
        drifts,
        l6_ratio,
        l6_range,
        max_wave_error: Some(max_err),
        energy,
        energy_line_estimate: Some(estimate),
        ..Summary::default()
    };
    let mut report = RunReport::finish(Experiment::TravelingWave { c }, config, rec, summary, checks);
    report.wave_error = errors;
    Ok(report)
}

/// Duhamel half of a scattering run in one direction. Returns the record, the relative
/// residuals and the `L⁶` ratio at the far end.
fn scatter_half(u0: &HardyField, params: &EvolutionParams, direction: Direction) -> Result<(TrajectoryRecord, f64, f64, f64)> {
    let mut acc = DuhamelAccumulator::new(params.m, params.nonlinearity.lambda(), direction);
    let rec = evolve_observed(u0, params, |t, u| acc.push(t, u))?;
    let up = acc.state()?;
    let t = params.t_final;
    let r = rec.final_field.as_field() - free_propagate_hardy(&up, t).as_field();
    let (l2, h1) = (u0.l2_norm(), u0.h1_norm());
    let rel = |a: f64, b: f64| if b > 0.0 { a / b } else { a };
    let l6 = match direction {
        Direction::Forward => l6_stats(&rec).0,
        Direction::Backward => {
            let last = *rec.l6.last().expect("nonempty");
            if last > 0.0 {
                rec.l6[0] / last
            } else {
                1.0
            }
        }
    };
    Ok((rec, rel(r.l2_norm(), l2), rel(r.h1_norm(), h1), l6))
}

/// `L / (4 k_rms)`: the time for a packet at the rms group velocity `2k_rms` to cross
/// half the circle.
pub(crate) fn wrap_horizon(u: &HardyField) -> f64 {
    let b = u.mass();
    if !(b > 0.0) {
        return f64::INFINITY;
    }
    let k_rms = (u.hdot_norm_sq(1.0) / b).sqrt();
    u.grid().length() / (4.0 * k_rms)
}

/// Initial data of a run: the profile, rescaled to the configured `L²`
/// norm, plus the perturbation.
pub fn initial_data(config: &ExperimentConfig, grid: &Grid) -> Result<HardyField> {
    let q = resolve_profile(config.profile, grid)?.field;
    let q = match config.mass {
        Some(m) if q.l2_norm() > 0.0 => q.scale_real(m / q.l2_norm()),
        Some(m) if m > 0.0 => return Err(Error::invalid("cannot rescale the zero field to a positive mass")),
        _ => q,
    };
    perturbed(config, &q)
}

/// Diagnostics stride for the Duhamel quadrature: at most [`DUHAMEL_MAX_SPACING`]
/// apart.
///
/// [`DUHAMEL_MAX_SPACING`]: crate::dynamics::DUHAMEL_MAX_SPACING
pub(crate) fn duhamel_params(config: &ExperimentConfig, t_final: f64) -> EvolutionParams {
    let mut p = config.evolution.clone();
    p.t_final = t_final;
    p.keep_snapshots = false;
    let (_, dt) = p.step_count();
    let max_stride = ((0.1 / dt) * (1.0 + 1e-9)).floor().max(1.0) as usize;
    p.snapshot_stride = p.snapshot_stride.min(max_stride);
    p
}

pub(crate) fn check_horizon(u0: &HardyField, t: f64) -> Result<()> {
    let h = wrap_horizon(u0);
    if t.abs() > h {
        return Err(Error::invalid(format!(
            "horizon {} exceeds L/(4 k_rms) = {h}: the data would wrap around the circle",
            t.abs()
        )));
    }
    Ok(())
}

/// Evolves forward and backward to `±T`, extracts the Duhamel scattering states `u_±`
/// and reports `‖u(±T) - e^{±iT∂²}u_±‖` (relative, `L²` and `H¹`) together with the
/// `L⁶` decay ratio, classified by [`classify_l6_ratio`].
///
/// Diagnostics are recorded at spacing at most 0.1 for the quadrature. The horizon
/// must not exceed `L/(4k_rms)`, past which the data wraps around the circle.
pub fn scattering_run(config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    let grid = config.grid()?;
    let u0 = initial_data(config, &grid)?;
    let t = config.evolution.t_final.abs();
    check_horizon(&u0, t)?;
    let (rec, res_l2, res_h1, ratio) = scatter_half(&u0, &duhamel_params(config, t), Direction::Forward)?;
    let (_, back_l2, back_h1, back_ratio) = scatter_half(&u0, &duhamel_params(config, -t), Direction::Backward)?;
    let verdict = classify_l6_ratio(ratio);
    let th = &config.thresholds;
    let checks = vec![
        Check::at_most("residual_l2", res_l2, th.residual),
        Check::at_most("backward_residual_l2", back_l2, th.residual),
    ];
    let (_, l6_range) = l6_stats(&rec);
    let summary = Summary {
        drifts: Drifts::of(&rec),
        l6_ratio: ratio,
        l6_range,
        energy: rec.conserved[0].energy,
        residual_l2: Some(res_l2),
        residual_h1: Some(res_h1),
        backward: Some(BackwardSummary {
            l6_ratio: back_ratio,
            residual_l2: back_l2,
            residual_h1: back_h1,
            verdict: classify_l6_ratio(back_ratio),
        }),
        verdict: Some(verdict),
        ..Summary::default()
    };
    let mut config = config.clone();
    config.evolution.snapshot_stride = rec.params.snapshot_stride;
    Ok(RunReport::finish(Experiment::Scattering, config, rec, summary, checks))
}

/// Runs one experiment; traveling-wave runs use the configured horizon.
pub fn run_experiment(experiment: Experiment, config: &ExperimentConfig) -> Result<RunReport> {
    match experiment {
        Experiment::Stability => stability_run(config),
        Experiment::TravelingWave { c } => traveling_wave_run(c, config.evolution.t_final, config),
        Experiment::Scattering => scattering_run(config),
    }
}

/// Runs independent experiments in order; a failure is recorded for its own entry
/// only.
pub fn sweep(runs: &[(Experiment, ExperimentConfig)]) -> Result<Vec<Result<RunReport>>> {
    if runs.is_empty() {
        return Err(Error::invalid("sweep needs at least one run"));
    }
    Ok(runs.iter().map(|(e, c)| run_experiment(*e, c)).collect())
}
