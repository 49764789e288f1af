//! Composite experiments tying the dynamics to the variational objects: orbit
//! distances, orbital stability, traveling-wave validation, scattering diagnostics and
//! the mass-threshold scan.

mod orbit;
mod runs;
mod threshold;

pub use orbit::{orbit_distance, OrbitDistance, ScalingSearch, DEFAULT_SCALING_WINDOW};
pub use runs::{
    initial_data, run_experiment, scattering_run, stability_run, sweep, traveling_wave_run, Experiment,
};
pub use threshold::{classify_l6_ratio, classify_mass, threshold_scan, ScanStep, ThresholdFamily, ThresholdReport, Verdict};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{EvolutionParams, TrajectoryRecord};
use crate::groundstate::{
    minimize_functional, periodic_traveling_wave, reference_hardy, DescentOptions, FunctionalParams,
    Gauge, ReferenceProfileKind,
};
use crate::prelude::*;
use crate::spectral::{Grid, HardyField};

/// Initial profile of an experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialProfile {
    /// A closed-form profile sampled on the grid.
    Reference(ReferenceProfileKind),
    /// The exact traveling wave of speed `c` on the circle.
    TravelingWave { c: f64 },
    /// The computed Hardy ground state of `I₂^{(γ)}`, scaled to `‖Q‖⁴ = 3J`, at
    /// dilation gauge `P/M = 1/(2·width)` (the `P/M` of `a/(x + i·width)`).
    GroundState { gamma: f64, width: f64 },
    Zero,
}

/// Random Hardy perturbation `δ·g`, `g` band-limited with unit `H¹` norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Perturbation {
    /// `H¹` amplitude `δ ≥ 0`.
    pub delta: f64,
    pub seed: u64,
    /// Wavenumber band `[lo, hi]`, `0 ≤ lo < hi ≤ k_max`.
    pub band: (f64, f64),
}

impl Default for Perturbation {
    fn default() -> Self {
        Perturbation {
            delta: 0.0,
            seed: 0,
            band: (0.0, 4.0),
        }
    }
}

/// Pass/fail thresholds of the runs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    /// Largest orbit distance of a stability run (absolute, `H¹`).
    pub orbit: f64,
    /// Allowed range of `‖u(t)‖_{L⁶}/‖u(0)‖_{L⁶}` in a stability run.
    pub l6_bracket: (f64, f64),
    /// Largest relative `H¹` error of a traveling-wave run.
    pub wave_error: f64,
    /// Mass and momentum drift.
    pub conservation: f64,
    /// `K_γ` drift.
    pub k_gamma_drift: f64,
    /// Relative error of the traveling-wave energy against its line value.
    pub energy: f64,
    /// Relative `L²` Duhamel residual of a scattering run.
    pub residual: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            orbit: 0.05,
            l6_bracket: (0.8, 1.25),
            wave_error: 1e-3,
            conservation: 1e-10,
            k_gamma_drift: 1e-6,
            energy: 1e-3,
            residual: 1e-2,
        }
    }
}

/// Everything an experiment needs; echoed into its report.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub length: f64,
    /// Diagnostics (and orbit distances) are taken at `evolution.snapshot_stride`.
    pub evolution: EvolutionParams,
    pub profile: InitialProfile,
    /// Rescale the initial profile to this `L²` norm.
    pub mass: Option<f64>,
    pub perturbation: Perturbation,
    /// Search the scaling window in orbit distances.
    pub search_scaling: bool,
    pub scaling_window: f64,
    pub thresholds: Thresholds,
}

impl ExperimentConfig {
    /// The periodic traveling wave of speed 1, `L = 400`, `n = 2^13`, `dt = 1e-3`.
    pub fn new(evolution: EvolutionParams) -> Self {
        ExperimentConfig {
            n: 1 << 13,
            length: 400.0,
            evolution,
            profile: InitialProfile::TravelingWave { c: 1.0 },
            mass: None,
            perturbation: Perturbation::default(),
            search_scaling: false,
            scaling_window: DEFAULT_SCALING_WINDOW,
            thresholds: Thresholds::default(),
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.length)
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        self.evolution.validate()?;
        let p = &self.perturbation;
        if !(p.delta >= 0.0) || !p.delta.is_finite() {
            return Err(Error::invalid(format!("perturbation amplitude must be >= 0, got {}", p.delta)));
        }
        if !(p.band.0 >= 0.0 && p.band.0 < p.band.1 && p.band.1 <= grid.k_max()) {
            return Err(Error::invalid(format!(
                "perturbation band [{}, {}] must lie in [0, {}]",
                p.band.0,
                p.band.1,
                grid.k_max()
            )));
        }
        if let Some(m) = self.mass {
            if !(m >= 0.0) || !m.is_finite() {
                return Err(Error::invalid(format!("mass must be >= 0, got {m}")));
            }
        }
        if !(self.scaling_window >= 1.0) || !self.scaling_window.is_finite() {
            return Err(Error::invalid("scaling window must be >= 1"));
        }
        Ok(())
    }
}

/// A profile resolved on a grid.
#[derive(Clone, Debug)]
pub struct ResolvedProfile {
    pub field: HardyField,
    /// Closed form for analytic resampling in scaling searches.
    pub reference: Option<ReferenceProfileKind>,
    /// `(ω, c)` of the profile equation, when known.
    pub multipliers: Option<(f64, f64)>,
    /// Functional value of a computed ground state.
    pub value: Option<f64>,
}

/// Builds `profile` on `grid`.
pub fn resolve_profile(profile: InitialProfile, grid: &Grid) -> Result<ResolvedProfile> {
    Ok(match profile {
        InitialProfile::Reference(kind) => ResolvedProfile {
            field: reference_hardy(kind, grid)?,
            reference: Some(kind),
            multipliers: match kind {
                ReferenceProfileKind::TravelingQc { c } => Some((3.0 * c * c / 8.0, c)),
                _ => None,
            },
            value: None,
        },
        InitialProfile::TravelingWave { c } => {
            let w = periodic_traveling_wave(grid, c)?;
            ResolvedProfile {
                field: w.profile,
                reference: None,
                multipliers: Some((w.omega, w.c)),
                value: None,
            }
        }
        InitialProfile::GroundState { gamma, width } => {
            if !(width > 0.0) || !width.is_finite() {
                return Err(Error::invalid(format!("ground-state width must be > 0, got {width}")));
            }
            let params = FunctionalParams::new(2, gamma)?;
            let init = reference_hardy(ReferenceProfileKind::GaussianHardy { sigma: 2.0 * width }, grid)?;
            let opts = DescentOptions {
                gauge: Gauge::Fixed(0.5 / width),
                ..DescentOptions::default()
            };
            let r = minimize_functional(&init, &params, &opts)?;
            ResolvedProfile {
                field: r.ground_state(),
                reference: None,
                multipliers: Some((r.multipliers.omega, r.multipliers.c)),
                value: Some(r.value),
            }
        }
        InitialProfile::Zero => ResolvedProfile {
            field: HardyField::zeros(grid),
            reference: None,
            multipliers: None,
            value: None,
        },
    })
}

/// Seeded random Hardy field supported on `band`, normalized to `‖g‖_{H¹} = 1`.
pub fn perturbation_field(grid: &Grid, seed: u64, band: (f64, f64)) -> Result<HardyField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut any = false;
    let g = HardyField::from_spectrum(grid, |k| {
        // draw for every mode so the field does not depend on the band edges' rounding
        let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if k >= band.0 && k <= band.1 {
            any = true;
            z
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let norm = g.h1_norm();
    if !any || !(norm > 0.0) {
        return Err(Error::invalid(format!(
            "perturbation band [{}, {}] holds no grid modes",
            band.0, band.1
        )));
    }
    Ok(g.scale_real(1.0 / norm))
}

/// One named pass/fail check.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    /// `value ≤ bound` when true, `value ≥ bound` otherwise.
    pub upper: bool,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            value,
            bound,
            upper: true,
            pass: value <= bound,
        }
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            value,
            bound,
            upper: false,
            pass: value >= bound,
        }
    }
}

/// Relative drifts of the conserved quantities over a run.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Drifts {
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
    pub k_gamma: f64,
}

impl Drifts {
    pub fn of(rec: &TrajectoryRecord) -> Self {
        Drifts {
            mass: rec.drift(|c| c.mass),
            momentum: rec.drift(|c| c.momentum),
            energy: rec.drift(|c| c.energy),
            k_gamma: rec.drift(|c| c.k_gamma),
        }
    }
}

/// Summary scalars of a run; unused entries stay `None`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Summary {
    pub max_orbit_dist: Option<f64>,
    pub drifts: Drifts,
    /// `‖u(T)‖_{L⁶}/‖u(0)‖_{L⁶}` (1 for the zero field).
    pub l6_ratio: f64,
    /// Smallest and largest `‖u(t)‖_{L⁶}/‖u(0)‖_{L⁶}` along the run.
    pub l6_range: (f64, f64),
    /// Largest relative `H¹` distance to the exact traveling wave.
    pub max_wave_error: Option<f64>,
    pub energy: f64,
    /// Line value of the energy from the doubling pair `2E(2L) - E(L)`.
    pub energy_line_estimate: Option<f64>,
    /// Relative Duhamel residuals `‖u(T) - e^{iT∂²}u₊‖/‖u(0)‖` in `L²` and `H¹`.
    pub residual_l2: Option<f64>,
    pub residual_h1: Option<f64>,
    pub backward: Option<BackwardSummary>,
    pub verdict: Option<Verdict>,
}

/// The backward half of a scattering run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BackwardSummary {
    pub l6_ratio: f64,
    pub residual_l2: f64,
    pub residual_h1: f64,
    pub verdict: Verdict,
}

/// Outcome of one experiment.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub experiment: Experiment,
    pub config: ExperimentConfig,
    pub trajectory: TrajectoryRecord,
    /// Orbit distance at each recorded time (stability runs).
    pub orbit: Vec<f64>,
    /// Relative `H¹` distance to the exact wave at each recorded time (traveling-wave runs).
    pub wave_error: Vec<f64>,
    pub summary: Summary,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl RunReport {
    fn finish(experiment: Experiment, config: ExperimentConfig, trajectory: TrajectoryRecord, summary: Summary, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        RunReport {
            experiment,
            config,
            trajectory,
            orbit: Vec::new(),
            wave_error: Vec::new(),
            summary,
            checks,
            pass,
        }
    }
}

pub(crate) fn l6_stats(rec: &TrajectoryRecord) -> (f64, (f64, f64)) {
    let l0 = rec.l6.first().copied().unwrap_or(0.0);
    if !(l0 > 0.0) {
        return (1.0, (1.0, 1.0));
    }
    let ratios: Vec<f64> = rec.l6.iter().map(|v| v / l0).collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (*ratios.last().expect("nonempty"), (lo, hi))
}

#[cfg(test)]
mod tests;
