//! Normalized, preconditioned gradient descent on the unit `L²` sphere.

use crate::prelude::*;
use crate::spectral::{dilate, SpectralField, Workspace};

/// Admissible coefficients.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub(crate) struct Space {
    pub hardy: bool,
    pub drop_zero: bool,
    pub even_only: bool,
}

impl Space {
    pub(crate) fn project(&self, f: &mut SpectralField) {
        let grid = f.grid().clone();
        for (j, c) in f.coeffs_mut().iter_mut().enumerate() {
            let s = grid.signed_index(j);
            if (self.hardy && s < 0) || (self.drop_zero && s == 0) || (self.even_only && s % 2 != 0) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }
}

pub(crate) trait Objective {
    fn value(&self, f: &SpectralField, ws: &mut Workspace) -> Result<f64>;
    /// Value and real `L²` gradient.
    fn gradient(&self, f: &SpectralField, ws: &mut Workspace) -> Result<(f64, SpectralField)>;
}

/// Stopping and step controls of the descent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DescentOptions {
    pub max_iter: usize,
    /// Converged once the relative decrease of one step is below `tol` and the
    /// gradient residual below `100·tol`.
    pub tol: f64,
    /// First trial step; later trials start at twice the last accepted step.
    pub step0: f64,
    /// Dilation gauge `P(f)/M(f)` for Hardy problems.
    pub gauge: Gauge,
}

/// How the dilation direction is handled.
///
/// On a periodic domain the dilation symmetry of the line is broken at order
/// `width/L`. Without a gauge, Hardy iterates slowly spread out towards the constant
/// mode, where the functionals vanish.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Gauge {
    /// A problem-specific default: [`default_gauge`](super::default_gauge) for the
    /// ground-state functional, the starting field's ratio for the Sobolev quotient,
    /// none for general fields.
    #[default]
    Auto,
    /// Hold `P/M` at this value.
    Fixed(f64),
    /// No gauge.
    Off,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions {
            max_iter: 20_000,
            tol: 1e-8,
            step0: 1.0,
            gauge: Gauge::Auto,
        }
    }
}

pub(crate) struct Descent {
    pub field: SpectralField,
    pub value: f64,
    /// Stationarity measure: the dual norm of the tangent gradient `g_t`,
    /// `(Σ|ĝ_t|²/(1 + k²/κ²))^{1/2}` with `κ² = ‖∂f‖²/‖f‖²`, divided by `|I|·‖f‖`.
    /// Scale invariant, and insensitive to band-edge content that moves `I` only at
    /// second order.
    pub gradient_residual: f64,
    /// `‖g_t‖_{H¹}/‖f‖_{H¹}`.
    pub h1_gradient_residual: f64,
    /// Same for the full gradient.
    pub raw_gradient_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after every accepted step, starting with the initial value.
    pub history: Vec<f64>,
}

fn re_inner(a: &SpectralField, b: &SpectralField) -> f64 {
    a.coefficients()
        .iter()
        .zip(b.coefficients())
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum::<f64>()
        / a.grid().length()
}

fn momentum_ratio(f: &SpectralField) -> f64 {
    f.weighted_norm_sq(|k| k) / f.mass()
}

/// Orthonormal (real `L²`) normals of the constraint set at `f`.
fn normals(f: &SpectralField, gauge: bool) -> Vec<SpectralField> {
    let e1 = f.scale_real(1.0 / f.l2_norm());
    let mut out = vec![e1];
    if gauge {
        let r = momentum_ratio(f);
        let mut n2 = f.map_spectrum(|k, c| c * (k - r));
        let p = re_inner(&n2, &out[0]);
        n2 = n2.axpy(Complex64::new(-p, 0.0), &out[0]).expect("same grid");
        let nn = n2.l2_norm();
        if nn > 0.0 {
            out.push(n2.scale_real(1.0 / nn));
        }
    }
    out
}

fn tangent(v: &SpectralField, normals: &[SpectralField]) -> SpectralField {
    let mut out = v.clone();
    for e in normals {
        let p = re_inner(&out, e);
        out = out.axpy(Complex64::new(-p, 0.0), e).expect("same grid");
    }
    out
}

fn h1_ratio(g: &SpectralField, f: &SpectralField) -> f64 {
    g.h1_norm() / f.h1_norm()
}

fn kappa2(f: &SpectralField) -> f64 {
    (f.hdot_norm_sq(1.0) / f.mass()).max(1e-12)
}

fn dual_ratio(g: &SpectralField, f: &SpectralField, value: f64) -> f64 {
    let k2 = kappa2(f);
    let dual = g.weighted_norm_sq(|k| 1.0 / (1.0 + k * k / k2)).sqrt();
    dual / (value.abs().max(f64::MIN_POSITIVE) * f.l2_norm())
}

/// Moves `f` onto `P/M = target` by the Hardy shift `f̂(k) ↦ e^{-τk}f̂(k)`
/// (`f(x) ↦ f(x + iτ)`), after a coarse dilation when far off. Returns a unit-mass field.
pub(crate) fn fix_gauge(f: &SpectralField, target: f64) -> Result<SpectralField> {
    let mut f = f.scale_real(1.0 / f.l2_norm());
    let r0 = momentum_ratio(&f);
    if !(r0 > 0.0) {
        return Err(Error::invalid("gauge needs a field with positive momentum"));
    }
    if (r0 / target - 1.0).abs() > 0.02 {
        f = dilate(&f, target / r0)?;
        f = f.scale_real(1.0 / f.l2_norm());
    }
    let grid = f.grid().clone();
    let base: Vec<(f64, f64)> = f
        .coefficients()
        .iter()
        .enumerate()
        .map(|(j, c)| (grid.wavenumber(j), c.norm_sqr()))
        .collect();
    let moments = |tau: f64| {
        let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for &(k, w) in &base {
            let e = w * (-2.0 * tau * k).exp();
            m0 += e;
            m1 += e * k;
            m2 += e * k * k;
        }
        let mean = m1 / m0;
        (mean, m2 / m0 - mean * mean)
    };
    let mut tau = 0.0;
    for _ in 0..60 {
        let (r, var) = moments(tau);
        let err = r - target;
        if err.abs() <= 1e-14 * target {
            break;
        }
        if !(var > 0.0) {
            return Err(Error::invalid("gauge fixing failed: degenerate spectrum"));
        }
        let step = (err / (2.0 * var)).clamp(-0.05, 0.05);
        tau += step;
    }
    let shifted = f.map_spectrum(|k, c| c * (-tau * k).exp());
    Ok(shifted.scale_real(1.0 / shifted.l2_norm()))
}

pub(crate) fn descend<O: Objective>(
    obj: &O,
    init: &SpectralField,
    space: Space,
    opts: &DescentOptions,
    gauge: Option<f64>,
) -> Result<Descent> {
    if !(opts.tol > 0.0) || !(opts.step0 > 0.0) {
        return Err(Error::invalid("descent needs tol > 0 and step0 > 0"));
    }
    if let Some(p) = gauge {
        if !space.hardy || !(p > 0.0) {
            return Err(Error::invalid("the dilation gauge needs a Hardy problem and a positive target"));
        }
    }
    let mut ws = Workspace::new();
    let retract = |mut f: SpectralField| -> Result<SpectralField> {
        space.project(&mut f);
        let norm = f.l2_norm();
        if !(norm > super::functional::MIN_L2_NORM) || !norm.is_finite() {
            return Err(Error::invalid("descent iterate collapsed to zero"));
        }
        match gauge {
            Some(p) => {
                let mut g = fix_gauge(&f, p)?;
                space.project(&mut g);
                Ok(g)
            }
            None => Ok(f.scale_real(1.0 / norm)),
        }
    };

    let mut f = retract(init.clone())?;
    let (mut value, mut grad) = obj.gradient(&f, &mut ws)?;
    space.project(&mut grad);
    let mut history = vec![value];
    let mut eta = opts.step0;
    let mut converged = false;
    let mut iterations = 0;
    let mut resid;

    loop {
        let ns = normals(&f, gauge.is_some());
        let gt = tangent(&grad, &ns);
        resid = dual_ratio(&gt, &f, value);
        if iterations >= opts.max_iter {
            break;
        }
        // H¹-type preconditioner scaled to the field's own wavenumber
        let k2 = kappa2(&f);
        let mut d = gt.map_spectrum(|k, c| c / (1.0 + k * k / k2));
        d = tangent(&d, &ns);
        let slope = re_inner(&grad, &d);
        if !(slope > 0.0) {
            converged = resid < 100.0 * opts.tol;
            break;
        }
        let mut accepted = None;
        for _ in 0..80 {
            let trial = retract(f.axpy(Complex64::new(-eta, 0.0), &d)?)?;
            let v = obj.value(&trial, &mut ws)?;
            if v.is_finite() && v <= value - 0.5 * eta * slope {
                accepted = Some((trial, v));
                break;
            }
            eta *= 0.5;
        }
        let Some((next, v)) = accepted else {
            converged = resid < 100.0 * opts.tol;
            break;
        };
        iterations += 1;
        let rel = (value - v) / value.abs();
        debug_assert!(v <= value);
        f = next;
        let (nv, ng) = obj.gradient(&f, &mut ws)?;
        value = nv;
        grad = ng;
        space.project(&mut grad);
        history.push(value);
        eta *= 2.0;
        if rel < opts.tol {
            let ns = normals(&f, gauge.is_some());
            let r = dual_ratio(&tangent(&grad, &ns), &f, value);
            if r < 100.0 * opts.tol {
                resid = r;
                converged = true;
                break;
            }
        }
    }
    let raw = h1_ratio(&grad, &f);
    let h1 = h1_ratio(&tangent(&grad, &normals(&f, gauge.is_some())), &f);
    Ok(Descent {
        field: f,
        value,
        gradient_residual: resid,
        h1_gradient_residual: h1,
        raw_gradient_residual: raw,
        iterations,
        converged,
        history,
    })
}

