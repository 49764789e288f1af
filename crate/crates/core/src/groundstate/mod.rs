//! Gagliardo–Nirenberg type functionals, their minimization, Euler–Lagrange residuals,
//! multiplier extraction, reference profiles and Fourier-side rearrangement tools.

mod descent;
mod functional;
mod profiles;
mod rearrange;
mod traveling;

pub use descent::{DescentOptions, Gauge};
pub use functional::{
    evaluate_functional, first_variation, first_variation_general, functional_parts,
    FunctionalParams, FunctionalParts, MIN_L2_NORM,
};
pub use profiles::{
    rational_profile, reference_hardy, reference_hardy_scaled, reference_profile,
    reference_profile_scaled, ReferenceProfileKind, RATIONAL_ZERO_MODE_WEIGHT,
};
pub use rearrange::{canonicalize, linear_phase_fit, positive_rearrangement, PhaseFit, PHASE_FLOOR};
pub use traveling::{periodic_traveling_wave, refine_traveling_wave, RefineOptions, TravelingWave};

use core::cmp::Ordering;

use crate::prelude::*;
use crate::spectral::{
    d_op, inner_product, lp_norm_pow, momentum, projected_nonlinearity, Grid, HardyField,
    SpectralField, Workspace,
};
use descent::{descend, Objective, Space};

struct Functional {
    params: FunctionalParams,
    hardy: bool,
}

impl Objective for Functional {
    fn value(&self, f: &SpectralField, ws: &mut Workspace) -> Result<f64> {
        Ok(functional::parts_with(f, &self.params, ws)?.value)
    }

    fn gradient(&self, f: &SpectralField, ws: &mut Workspace) -> Result<(f64, SpectralField)> {
        let (p, g) = functional::gradient_with(f, &self.params, self.hardy, ws)?;
        Ok((p.value, g))
    }
}

/// Gauge `P/M` suited to a grid: the pole offset `b` of a matching `a/(x + ib)` profile
/// is `8/k_max`. The periodization lowers the γ = 2 value by about `3πb/L`, so `b` is
/// kept small, while the spectrum `e^{-bk}` still decays to `e^{-8}` at the band edge.
pub fn default_gauge(grid: &Grid) -> f64 {
    grid.k_max() / 16.0
}

/// Norms of the ground state in the normalization `‖Q‖⁴_{L²} = 3J`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroundStateNorms {
    /// `‖Q‖_{L²}`
    pub l2: f64,
    /// `‖Q‖_{L^{2m+2}}`
    pub l2m2: f64,
    /// `‖|D|^{1/2} Q‖_{L²}`
    pub hhalf: f64,
    /// `‖∂_x Q‖_{L²}`
    pub h1: f64,
}

/// Lagrange multipliers of the ground state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Multipliers {
    pub omega: f64,
    pub c: f64,
    /// Relative mismatch of the `L^{2m+2}` relation.
    pub consistency: f64,
    /// `c² ≤ 4γ²ω/(γ + 2)`
    pub constraint_ok: bool,
    /// Set for `γ = 0` when the momentum fraction `P/(‖Q‖‖∂Q‖)` exceeds `1e-6`.
    pub momentum_warning: bool,
}

/// Output of [`minimize_functional`].
#[derive(Clone, Debug)]
pub struct GroundStateResult {
    pub params: FunctionalParams,
    /// Canonicalized minimizer with unit `L²` norm.
    pub minimizer: HardyField,
    /// Last iterate before canonicalization (unit `L²` norm).
    pub raw: HardyField,
    pub value: f64,
    /// Stationarity at the unit-mass iterate: dual norm of the first variation restricted
    /// to the tangent space of the constraints (the unit sphere and, if set, the dilation
    /// gauge), relative to `I·‖f‖`. See [`DescentOptions::tol`].
    pub gradient_residual: f64,
    /// `‖g_t‖_{H¹}/‖f‖_{H¹}` for the same tangent gradient.
    pub h1_gradient_residual: f64,
    /// `‖g‖_{H¹}/‖f‖_{H¹}` for the full first variation.
    pub raw_gradient_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub norms: GroundStateNorms,
    pub multipliers: Multipliers,
    /// Functional value after every accepted step.
    pub history: Vec<f64>,
}

impl GroundStateResult {
    /// The canonical minimizer rescaled to `‖Q‖⁴_{L²} = 3J`.
    pub fn ground_state(&self) -> HardyField {
        ground_state_scaling(&self.minimizer, self.value)
    }
}

fn ground_state_scaling(f: &HardyField, value: f64) -> HardyField {
    let target = (3.0 * value).sqrt();
    f.scale_real((target / f.mass()).sqrt())
}

/// Minimizes `I_m^{(γ)}` over Hardy fields by normalized gradient descent with Armijo
/// backtracking (sufficient-decrease factor 0.5, shrink 0.5, each search starting at
/// twice the previous step). The result is canonicalized and its multipliers extracted.
pub fn minimize_functional(
    init: &HardyField,
    params: &FunctionalParams,
    opts: &DescentOptions,
) -> Result<GroundStateResult> {
    if !(init.l2_norm() > MIN_L2_NORM) {
        return Err(Error::invalid("minimization needs a nonzero initial field"));
    }
    let obj = Functional {
        params: *params,
        hardy: true,
    };
    let space = Space {
        hardy: true,
        ..Space::default()
    };
    let gauge = match opts.gauge {
        Gauge::Auto => Some(default_gauge(init.grid())),
        Gauge::Fixed(p) => Some(p),
        Gauge::Off => None,
    };
    let d = descend(&obj, init, space, opts, gauge)?;
    let raw = HardyField::new(d.field)?;
    let minimizer = canonicalize(&raw)?;
    let gs = ground_state_scaling(&minimizer, d.value);
    let norms = GroundStateNorms {
        l2: gs.l2_norm(),
        l2m2: lp_norm_pow(&gs, f64::from(2 * params.m + 2))?.powf(1.0 / f64::from(2 * params.m + 2)),
        hhalf: momentum(&gs).sqrt(),
        h1: gs.hdot_norm_sq(1.0).sqrt(),
    };
    let multipliers = multipliers_for(&gs, d.value, params)?;
    Ok(GroundStateResult {
        params: *params,
        minimizer,
        raw,
        value: d.value,
        gradient_residual: d.gradient_residual,
        h1_gradient_residual: d.h1_gradient_residual,
        raw_gradient_residual: d.raw_gradient_residual,
        iterations: d.iterations,
        converged: d.converged,
        norms,
        multipliers,
        history: d.history,
    })
}

/// Minimizer of `I_m^{(γ)}` over general (not necessarily Hardy) fields.
#[derive(Clone, Debug)]
pub struct GeneralMinimum {
    /// Unit `L²` norm, mass center at 0.
    pub field: SpectralField,
    pub value: f64,
    pub gradient_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<f64>,
}

/// [`minimize_functional`] over general fields (no gauge, no canonicalization beyond
/// centering). Used for the comparison with the Weinstein problem.
pub fn minimize_functional_general(
    init: &SpectralField,
    params: &FunctionalParams,
    opts: &DescentOptions,
) -> Result<GeneralMinimum> {
    if !(init.l2_norm() > MIN_L2_NORM) {
        return Err(Error::invalid("minimization needs a nonzero initial field"));
    }
    if let Gauge::Fixed(_) = opts.gauge {
        return Err(Error::invalid("the dilation gauge is only available for Hardy problems"));
    }
    let obj = Functional {
        params: *params,
        hardy: false,
    };
    let d = descend(&obj, init, Space::default(), opts, None)?;
    let field = crate::spectral::translate(&d.field, crate::spectral::mass_center(&d.field));
    Ok(GeneralMinimum {
        field,
        value: d.value,
        gradient_residual: d.gradient_residual,
        iterations: d.iterations,
        converged: d.converged,
        history: d.history,
    })
}

fn lexicographic(a: &HardyField, b: &HardyField) -> Ordering {
    for (x, y) in a.coefficients().iter().zip(b.coefficients()) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Reduces multi-start results: smallest value wins, ties broken lexicographically on
/// the canonicalized coefficients.
pub fn select_best(results: Vec<GroundStateResult>) -> Result<GroundStateResult> {
    results
        .into_iter()
        .min_by(|a, b| {
            a.value
                .total_cmp(&b.value)
                .then_with(|| lexicographic(&a.minimizer, &b.minimizer))
        })
        .ok_or_else(|| Error::invalid("no results to reduce"))
}

/// Sequential multi-start: runs [`minimize_functional`] from each init and reduces
/// with [`select_best`].
pub fn minimize_multistart(
    inits: &[HardyField],
    params: &FunctionalParams,
    opts: &DescentOptions,
) -> Result<GroundStateResult> {
    let results = inits
        .iter()
        .map(|f| minimize_functional(f, params, opts))
        .collect::<Result<Vec<_>>>()?;
    select_best(results)
}

fn multipliers_for(gs: &HardyField, value: f64, params: &FunctionalParams) -> Result<Multipliers> {
    if params.m != 2 {
        return Err(Error::invalid(
            "multiplier relations are only available for the quintic case m = 2",
        ));
    }
    let a = gs.hdot_norm_sq(1.0);
    let b = gs.mass();
    let cm = momentum(gs);
    let s = lp_norm_pow(gs, 6.0)?;
    let root = (3.0 * value).sqrt();
    let gamma = params.gamma;
    let (omega, c, predicted_s) = if gamma > 0.0 {
        let c = 2.0 * gamma * cm / root;
        let omega = (8.0 * gamma * a / root + c * c) / (4.0 * gamma);
        (omega, c, 3.0 * root * (0.5 * omega + c * c / (8.0 * gamma)))
    } else {
        let omega = 2.0 * a / root;
        (omega, 0.0, 1.5 * omega * root)
    };
    let fraction = cm / (b.sqrt() * a.sqrt()).max(f64::MIN_POSITIVE);
    Ok(Multipliers {
        omega,
        c,
        consistency: (s - predicted_s).abs() / s,
        constraint_ok: gamma == 0.0 || c * c <= 4.0 * gamma * gamma * omega / (gamma + 2.0) * (1.0 + 1e-12),
        momentum_warning: gamma == 0.0 && fraction > 1e-6,
    })
}

/// Multipliers `(ω, c)` from the norms of the result's minimizer, rescaled to the
/// ground-state normalization `‖Q‖⁴ = 3J`.
pub fn multipliers_from_norms(result: &GroundStateResult, params: &FunctionalParams) -> Result<Multipliers> {
    multipliers_for(&result.ground_state(), result.value, params)
}

/// Multipliers for an explicit ground-state candidate `q` (already normalized) and value `j`.
pub fn multipliers_of(q: &HardyField, j: f64, params: &FunctionalParams) -> Result<Multipliers> {
    multipliers_for(q, j, params)
}

fn elliptic_parts(q: &HardyField) -> Result<(SpectralField, SpectralField, f64)> {
    if !(q.l2_norm() > MIN_L2_NORM) {
        return Err(Error::invalid("elliptic residual of the zero field"));
    }
    let nl = projected_nonlinearity(q, 2)?;
    let base = q.map_spectrum(|k, c| -c * (k * k)).axpy(Complex64::new(1.0, 0.0), &nl)?;
    Ok((base.into_field(), d_op(q), q.h1_norm()))
}

/// `‖∂²Q + Π(|Q|⁴Q) - ωQ - cDQ‖_{L²} / ‖Q‖_{H¹}`.
pub fn elliptic_residual(q: &HardyField, omega: f64, c: f64) -> Result<f64> {
    let (base, dq, h1) = elliptic_parts(q)?;
    let r = base
        .axpy(Complex64::new(-omega, 0.0), q)?
        .axpy(Complex64::new(-c, 0.0), &dq)?;
    Ok(r.l2_norm() / h1)
}

/// Least-squares `(ω, c)` over the span of `{Q, DQ}` and the resulting residual.
pub fn fit_elliptic_multipliers(q: &HardyField) -> Result<(f64, f64, f64)> {
    let (base, dq, _) = elliptic_parts(q)?;
    let re = |a: &SpectralField, b: &SpectralField| -> Result<f64> { Ok(inner_product(a, b)?.re) };
    let qq = re(q, q)?;
    let qd = re(q, &dq)?;
    let dd = re(&dq, &dq)?;
    let rq = re(&base, q)?;
    let rd = re(&base, &dq)?;
    let det = qq * dd - qd * qd;
    if !(det.abs() > 0.0) {
        return Err(Error::invalid("degenerate least-squares system for the multipliers"));
    }
    let omega = (rq * dd - rd * qd) / det;
    let c = (qq * rd - qd * rq) / det;
    Ok((omega, c, elliptic_residual(q, omega, c)?))
}

/// Options for [`sobolev_ratio_min`].
#[derive(Clone, Debug)]
pub struct SobolevOptions {
    pub descent: DescentOptions,
    /// Starting field; defaults to `Π e^{-(x/2)²}`.
    pub init: Option<HardyField>,
    /// Restrict to fields with even mode indices only.
    pub even_only: bool,
}

impl Default for SobolevOptions {
    fn default() -> Self {
        SobolevOptions {
            descent: DescentOptions {
                max_iter: 5_000,
                tol: 1e-9,
                ..DescentOptions::default()
            },
            init: None,
            even_only: false,
        }
    }
}

/// Estimate of `inf ‖|D|^{1/3}f‖²/‖f‖²_{L⁶}`.
#[derive(Clone, Debug)]
pub struct SobolevEstimate {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    pub field: HardyField,
}

struct SobolevRatio;

impl SobolevRatio {
    fn parts(f: &SpectralField, ws: &mut Workspace) -> Result<(f64, f64)> {
        let c = f.weighted_norm_sq(|k| k.abs().powf(2.0 / 3.0));
        let s = crate::spectral::lp_norm_pow_exact(f, 6.0, ws)?;
        if !(s > 0.0) {
            return Err(Error::invalid("Sobolev ratio of the zero field"));
        }
        Ok((c, s))
    }
}

impl Objective for SobolevRatio {
    fn value(&self, f: &SpectralField, ws: &mut Workspace) -> Result<f64> {
        let (c, s) = Self::parts(f, ws)?;
        Ok(c / s.cbrt())
    }

    fn gradient(&self, f: &SpectralField, ws: &mut Workspace) -> Result<(f64, SpectralField)> {
        let (c, s) = Self::parts(f, ws)?;
        let mut nl = vec![Complex64::new(0.0, 0.0); f.grid().n()];
        crate::spectral::nonlinearity_into(
            f.grid(),
            f.coefficients(),
            2,
            crate::spectral::NonlinearKind::Projected,
            ws,
            &mut nl,
        )?;
        let s13 = s.cbrt();
        let w_nl = 2.0 * c / (s * s13);
        let grid = f.grid();
        let g: Vec<Complex64> = f
            .coefficients()
            .iter()
            .enumerate()
            .map(|(j, &x)| {
                let k = grid.wavenumber(j);
                x * (2.0 * k.abs().powf(2.0 / 3.0) / s13) - nl[j] * w_nl
            })
            .collect();
        Ok((c / s13, SpectralField::from_coefficients(grid, g)?))
    }
}

/// Ratio `‖|D|^{1/3}f‖²/‖f‖²_{L⁶}` of one field.
pub fn sobolev_ratio(f: &SpectralField) -> Result<f64> {
    SobolevRatio.value(f, &mut Workspace::new())
}

/// Minimizes the `Ḣ^{1/3} → L⁶` ratio over Hardy fields by the same descent.
///
/// The constant mode is excluded: on the periodic domain it has zero `Ḣ^{1/3}` norm
/// and would drive the ratio to zero, an artifact with no counterpart on the line. The
/// dilation gauge defaults to the starting field's `P/M`.
pub fn sobolev_ratio_min(grid: &Grid, opts: &SobolevOptions) -> Result<SobolevEstimate> {
    let init = match &opts.init {
        Some(f) => {
            grid.ensure_same(f.grid())?;
            f.clone()
        }
        None => reference_hardy(ReferenceProfileKind::GaussianHardy { sigma: 2.0 }, grid)?,
    };
    let space = Space {
        hardy: true,
        drop_zero: true,
        even_only: opts.even_only,
    };
    let mut start = init.into_field();
    space.project(&mut start);
    let gauge = match opts.descent.gauge {
        Gauge::Auto => Some(start.weighted_norm_sq(|k| k) / start.mass()),
        Gauge::Fixed(p) => Some(p),
        Gauge::Off => None,
    };
    let d = descend(&SobolevRatio, &start, space, &opts.descent, gauge)?;
    Ok(SobolevEstimate {
        value: d.value,
        converged: d.converged,
        iterations: d.iterations,
        field: HardyField::new(d.field)?,
    })
}

#[cfg(test)]
mod tests;
