//! Time integration of `i∂_t u + ∂²_x u = λΠ(|u|^{2m}u)`, conservation tracking and
//! scattering-state extraction.

mod conserved;
mod stepper;

use core::fmt;

pub use conserved::{conserved_set, k_gamma_via_functional, ConservedSet};
pub use stepper::{BLOWUP_SUP_NORM, RK4_STIFFNESS_LIMIT};

use crate::prelude::*;
use crate::spectral::{
    lp_norm_pow_with, mass_center, HardyField, SpectralField, Workspace,
};
use stepper::Stepper;

/// Time stepping scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Strang splitting: exact half linear steps around an RK4 pass of the
    /// projected nonlinear flow.
    Strang,
    /// Classical RK4 on the full right-hand side; a reference integrator.
    Rk4,
}

/// Sign of the nonlinear term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Nonlinearity {
    /// `λ = -1`
    Focusing,
    /// `λ = +1`
    Defocusing,
    /// `λ = 0`: the free Schrödinger flow (a test hook).
    Disabled,
}

impl Nonlinearity {
    pub fn lambda(self) -> f64 {
        match self {
            Nonlinearity::Focusing => -1.0,
            Nonlinearity::Defocusing => 1.0,
            Nonlinearity::Disabled => 0.0,
        }
    }
}

/// Parameters of one evolution.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionParams {
    /// Nonlinearity degree; the quintic equation is `m = 2`.
    pub m: u32,
    pub nonlinearity: Nonlinearity,
    /// Largest step; the horizon is split into `ceil(|t_final|/dt)` equal steps.
    pub dt: f64,
    /// Negative horizons run backward in time.
    pub t_final: f64,
    pub scheme: Scheme,
    /// Diagnostics are recorded every `snapshot_stride` steps and at the end.
    pub snapshot_stride: usize,
    /// Only used for the `K_γ` column.
    pub gamma: f64,
    /// Keep a copy of the field at every recorded time.
    pub keep_snapshots: bool,
}

impl EvolutionParams {
    /// Focusing quintic Strang run with `γ = 2` reporting.
    pub fn quintic(dt: f64, t_final: f64) -> Self {
        EvolutionParams {
            m: 2,
            nonlinearity: Nonlinearity::Focusing,
            dt,
            t_final,
            scheme: Scheme::Strang,
            snapshot_stride: 100,
            gamma: 2.0,
            keep_snapshots: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::invalid("m must be >= 1"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !self.t_final.is_finite() || self.t_final.abs() / self.dt > 1e9 {
            return Err(Error::invalid(format!(
                "horizon {} needs more than 1e9 steps of {}",
                self.t_final, self.dt
            )));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::invalid("snapshot stride must be >= 1"));
        }
        if !(self.gamma >= 0.0) {
            return Err(Error::invalid(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        Ok(())
    }

    /// Number of steps and the step actually used.
    pub fn step_count(&self) -> (usize, f64) {
        let span = self.t_final.abs();
        if span == 0.0 {
            return (0, self.dt);
        }
        let steps = (span / self.dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        (steps, span / steps as f64)
    }
}

/// Time series recorded along an evolution, in increasing time.
#[derive(Clone)]
pub struct TrajectoryRecord {
    pub params: EvolutionParams,
    pub times: Vec<f64>,
    pub conserved: Vec<ConservedSet>,
    pub l6: Vec<f64>,
    pub linf: Vec<f64>,
    pub h1: Vec<f64>,
    pub center: Vec<f64>,
    /// Fields at the recorded times, if requested.
    pub snapshots: Vec<HardyField>,
    /// The field at `t_final`.
    pub final_field: HardyField,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest relative deviation of a conserved quantity from its value at `t = 0`.
    pub fn drift(&self, pick: impl Fn(&ConservedSet) -> f64) -> f64 {
        let Some(i0) = self.times.iter().position(|&t| t == 0.0) else {
            return 0.0;
        };
        let v0 = pick(&self.conserved[i0]);
        let scale = if v0.abs() > 0.0 { v0.abs() } else { 1.0 };
        self.conserved
            .iter()
            .map(|c| (pick(c) - v0).abs() / scale)
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for TrajectoryRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TrajectoryRecord")
            .field("rows", &self.times.len())
            .field("t_first", &self.times.first())
            .field("t_last", &self.times.last())
            .field("snapshots", &self.snapshots.len())
            .finish()
    }
}

struct Row {
    t: f64,
    conserved: ConservedSet,
    l6: f64,
    linf: f64,
    h1: f64,
    center: f64,
}

fn diagnostics(u: &HardyField, t: f64, p: &EvolutionParams, ws: &mut Workspace) -> Result<Row> {
    let l6_pow = lp_norm_pow_with(u, 6.0, ws)?;
    let s = if p.m == 2 {
        l6_pow
    } else {
        lp_norm_pow_with(u, f64::from(2 * p.m + 2), ws)?
    };
    let lambda = match p.nonlinearity {
        // keep the focusing energy as the reported quantity for the free flow
        Nonlinearity::Disabled => -1.0,
        other => other.lambda(),
    };
    Ok(Row {
        t,
        conserved: ConservedSet::from_parts(u, p.m, lambda, p.gamma, s),
        l6: l6_pow.powf(1.0 / 6.0),
        linf: lp_norm_pow_with(u, f64::INFINITY, ws)?,
        h1: u.h1_norm(),
        center: mass_center(u),
    })
}

fn assemble(params: &EvolutionParams, mut rows: Vec<Row>, mut snaps: Vec<HardyField>, last: HardyField, backward: bool) -> TrajectoryRecord {
    if backward {
        rows.reverse();
        snaps.reverse();
    }
    TrajectoryRecord {
        params: params.clone(),
        times: rows.iter().map(|r| r.t).collect(),
        conserved: rows.iter().map(|r| r.conserved).collect(),
        l6: rows.iter().map(|r| r.l6).collect(),
        linf: rows.iter().map(|r| r.linf).collect(),
        h1: rows.iter().map(|r| r.h1).collect(),
        center: rows.iter().map(|r| r.center).collect(),
        snapshots: snaps,
        final_field: last,
    }
}

/// `e^{it∂²_x} f`: multiplies the spectrum by `e^{-ik²t}`.
pub fn free_propagate(f: &SpectralField, t: f64) -> SpectralField {
    f.map_spectrum(|k, c| c * Complex64::from_polar(1.0, -k * k * t))
}

/// Hardy-typed [`free_propagate`].
pub fn free_propagate_hardy(f: &HardyField, t: f64) -> HardyField {
    f.map_spectrum(|k, c| c * Complex64::from_polar(1.0, -k * k * t))
}

fn single_step(u: &HardyField, dt: f64, params: &EvolutionParams, scheme: Scheme) -> Result<HardyField> {
    if !(dt > 0.0) {
        return Err(Error::invalid(format!("dt must be positive, got {dt}")));
    }
    let p = EvolutionParams {
        scheme,
        ..params.clone()
    };
    let mut stepper = Stepper::new(u.grid(), &p, dt)?;
    let mut out = u.clone();
    stepper.step(out.coeffs_mut())?;
    if !stepper.healthy(out.coefficients()) {
        return Err(Error::NumericalBlowup {
            time: 0.0,
            partial: None,
        });
    }
    Ok(out)
}

/// One Strang step of size `dt`; the scheme field of `params` is ignored.
pub fn step_strang(u: &HardyField, dt: f64, params: &EvolutionParams) -> Result<HardyField> {
    single_step(u, dt, params, Scheme::Strang)
}

/// One full RK4 step of size `dt`; rejects steps beyond the stiffness limit.
pub fn step_rk4(u: &HardyField, dt: f64, params: &EvolutionParams) -> Result<HardyField> {
    single_step(u, dt, params, Scheme::Rk4)
}

/// Integrates from `t = 0` to `params.t_final` and records diagnostics.
pub fn evolve(u0: &HardyField, params: &EvolutionParams) -> Result<TrajectoryRecord> {
    evolve_observed(u0, params, |_, _| Ok(()))
}

/// [`evolve`], calling `observer(t, u(t))` at every recorded time.
///
/// Backward runs are computed as forward runs of `conj(u(-t, -x))`, which solves the
/// same equation and stays in the Hardy space; the observer then sees times
/// `0, -s, -2s, ...` in that order, while the returned record is in increasing time.
pub fn evolve_observed<F>(u0: &HardyField, params: &EvolutionParams, mut observer: F) -> Result<TrajectoryRecord>
where
    F: FnMut(f64, &HardyField) -> Result<()>,
{
    params.validate()?;
    let backward = params.t_final < 0.0;
    let sign = if backward { -1.0 } else { 1.0 };
    let (steps, dt) = params.step_count();
    let mut stepper = Stepper::new(u0.grid(), params, dt)?;
    let mut ws = Workspace::new();

    // state of the forward-running representative
    let mut v = if backward { u0.reflect_conj() } else { u0.clone() };
    let physical = |v: &HardyField| if backward { v.reflect_conj() } else { v.clone() };

    let mut rows = Vec::new();
    let mut snaps = Vec::new();
    let mut record = |t: f64, u: &HardyField, rows: &mut Vec<Row>, snaps: &mut Vec<HardyField>, ws: &mut Workspace| -> Result<()> {
        rows.push(diagnostics(u, t, params, ws)?);
        if params.keep_snapshots {
            snaps.push(u.clone());
        }
        observer(t, u)
    };

    record(0.0, u0, &mut rows, &mut snaps, &mut ws)?;
    let mut last_good = u0.clone();
    for s in 1..=steps {
        stepper.step(v.coeffs_mut())?;
        let t = sign * s as f64 * dt;
        if !stepper.healthy(v.coefficients()) {
            let t_valid = sign * (s - 1) as f64 * dt;
            let partial = assemble(params, rows, snaps, last_good, backward);
            return Err(Error::NumericalBlowup {
                time: t_valid,
                partial: Some(Box::new(partial)),
            });
        }
        if s % params.snapshot_stride == 0 || s == steps {
            let u = physical(&v);
            record(t, &u, &mut rows, &mut snaps, &mut ws)?;
            last_good = u;
        }
    }
    let last = physical(&v);
    Ok(assemble(params, rows, snaps, last, backward))
}

/// Direction of a scattering state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Largest snapshot spacing accepted by the Duhamel quadrature.
pub const DUHAMEL_MAX_SPACING: f64 = 0.1 + 1e-12;

/// Trapezoidal accumulator for `∫ e^{ik²τ} Π(|u(τ)|^{2m}u(τ)) dτ`, fed one field at a
/// time in the order they are produced.
pub struct DuhamelAccumulator {
    m: u32,
    lambda: f64,
    direction: Direction,
    u0: Option<HardyField>,
    integral: Option<SpectralField>,
    prev: Option<(f64, SpectralField)>,
    ws: Workspace,
    max_gap: f64,
}

impl DuhamelAccumulator {
    pub fn new(m: u32, lambda: f64, direction: Direction) -> Self {
        DuhamelAccumulator {
            m,
            lambda,
            direction,
            u0: None,
            integral: None,
            prev: None,
            ws: Workspace::new(),
            max_gap: 0.0,
        }
    }

    /// Adds the sample at time `t`; the first call must be at `t = 0`.
    pub fn push(&mut self, t: f64, u: &HardyField) -> Result<()> {
        let mut nl = SpectralField::zeros(u.grid());
        if self.lambda != 0.0 {
            crate::spectral::nonlinearity_into(
                u.grid(),
                u.coefficients(),
                self.m,
                crate::spectral::NonlinearKind::Projected,
                &mut self.ws,
                nl.coeffs_mut(),
            )?;
        }
        let integrand = nl.map_spectrum(|k, c| c * Complex64::from_polar(1.0, k * k * t));
        match self.prev.take() {
            None => {
                if t != 0.0 {
                    return Err(Error::invalid("Duhamel quadrature must start at t = 0"));
                }
                self.u0 = Some(u.clone());
                self.integral = Some(SpectralField::zeros(u.grid()));
            }
            Some((tp, fp)) => {
                let h = t - tp;
                let ok = match self.direction {
                    Direction::Forward => h > 0.0,
                    Direction::Backward => h < 0.0,
                };
                if !ok {
                    return Err(Error::invalid("Duhamel samples must move away from t = 0"));
                }
                self.max_gap = self.max_gap.max(h.abs());
                let acc = self.integral.take().expect("started");
                let acc = acc.axpy(Complex64::new(0.5 * h, 0.0), &fp)?;
                self.integral = Some(acc.axpy(Complex64::new(0.5 * h, 0.0), &integrand)?);
            }
        }
        self.prev = Some((t, integrand));
        Ok(())
    }

    /// `u₀ - iλ ∫₀^{t_last} e^{ik²τ} N(u(τ)) dτ`.
    pub fn state(&self) -> Result<HardyField> {
        let (Some(u0), Some(integral)) = (&self.u0, &self.integral) else {
            return Err(Error::invalid("Duhamel quadrature has no samples"));
        };
        if self.max_gap > DUHAMEL_MAX_SPACING {
            return Err(Error::invalid(format!(
                "snapshot spacing {} exceeds {} for the Duhamel quadrature",
                self.max_gap, DUHAMEL_MAX_SPACING
            )));
        }
        let out = u0.axpy(Complex64::new(0.0, -self.lambda), &crate::spectral::szego_project(integral))?;
        Ok(out)
    }
}

/// Candidate scattering state `u₊` (or `u₋`) from the snapshots of a run:
/// `u_± = u₀ - iλ ∫₀^{±T} e^{ik²τ} Π(|u|^{2m}u) dτ`, trapezoidal in `τ`.
pub fn duhamel_scattering_state(traj: &TrajectoryRecord, direction: Direction) -> Result<HardyField> {
    if traj.snapshots.len() != traj.times.len() || traj.snapshots.len() < 2 {
        return Err(Error::invalid(
            "Duhamel quadrature needs a run with snapshots kept at every recorded time",
        ));
    }
    let mut acc = DuhamelAccumulator::new(traj.params.m, traj.params.nonlinearity.lambda(), direction);
    let idx: Vec<usize> = match direction {
        Direction::Forward => (0..traj.times.len()).collect(),
        Direction::Backward => (0..traj.times.len()).rev().collect(),
    };
    for i in idx {
        acc.push(traj.times[i], &traj.snapshots[i])?;
    }
    acc.state()
}

/// `‖e^{it∂²}f‖_{L^p}` for each `t`; `p` even or infinite.
pub fn free_decay_profile(f: &SpectralField, times: &[f64], p: f64) -> Result<Vec<f64>> {
    let mut ws = Workspace::new();
    times
        .iter()
        .map(|&t| {
            if !t.is_finite() {
                return Err(Error::invalid("times must be finite"));
            }
            let v = lp_norm_pow_with(&free_propagate(f, t), p, &mut ws)?;
            Ok(if p.is_infinite() { v } else { v.powf(1.0 / p) })
        })
        .collect()
}

#[cfg(test)]
mod tests;
