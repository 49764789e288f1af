//! Distance from a field to the orbit of a profile under phase rotation, translation
//! and (optionally) scaling.

use crate::groundstate::{reference_hardy_scaled, ReferenceProfileKind};
use crate::prelude::*;
use crate::spectral::{dilate, HardyField, SpectralField};

/// Scaling window `[1/C, C]` used when none is given.
pub const DEFAULT_SCALING_WINDOW: f64 = 2.0;

/// Result of [`orbit_distance`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitDistance {
    /// `min ‖u - e^{iθ}Q(· + y)‖_{H¹}` over the searched symmetries.
    pub distance: f64,
    pub theta: f64,
    /// Optimal shift: `u ≈ e^{iθ}Q(x + y)`, with `y` in `[-L/2, L/2)`.
    pub y: f64,
    /// Optimal `(λ, μ)` for `λQ(μx)`, when scaling was searched.
    pub scale: Option<(f64, f64)>,
}

/// Scaling search controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingSearch {
    /// `C` in the window `[1/C, C]` for both `λ` and `μ`.
    pub window: f64,
    /// Resample `Q(μx)` analytically from this closed form instead of a spectral zoom.
    pub reference: Option<ReferenceProfileKind>,
}

impl Default for ScalingSearch {
    fn default() -> Self {
        ScalingSearch {
            window: DEFAULT_SCALING_WINDOW,
            reference: None,
        }
    }
}

/// `H¹` weighted correlation coefficients `(1+k²) conj(û) q̂`.
fn correlation(u: &HardyField, q: &HardyField) -> Vec<Complex64> {
    u.coefficients()
        .iter()
        .zip(q.coefficients())
        .enumerate()
        .map(|(j, (a, b))| {
            let k = u.grid().wavenumber(j);
            a.conj() * b * (1.0 + k * k)
        })
        .collect()
}

/// `C(y) = ⟨u, Q(· + y)⟩_{H¹}` and its first two derivatives, from the conjugated
/// correlation coefficients.
fn corr_at(grid: &crate::spectral::Grid, w: &[Complex64], y: f64) -> [Complex64; 3] {
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    for (j, c) in w.iter().enumerate() {
        let k = grid.wavenumber(j);
        let v = c.conj() * Complex64::from_polar(1.0, -k * y);
        acc[0] += v;
        acc[1] += v * Complex64::new(0.0, -k);
        acc[2] -= v * (k * k);
    }
    let inv = 1.0 / grid.length();
    acc.map(|a| a * inv)
}

fn wrap(y: f64, l: f64) -> f64 {
    let s = y + 0.5 * l;
    let mut y = s - l * (s / l).floor() - 0.5 * l;
    if y >= 0.5 * l {
        y -= l;
    }
    y
}

/// Best shift and phase: the grid maximum of `|C|`, a parabolic refinement, then
/// Newton on `d|C|²/dy`. Returns `(|C|, θ, y)`.
fn best_shift(u: &HardyField, q: &HardyField) -> Result<(f64, f64, f64)> {
    let grid = u.grid();
    let w = correlation(u, q);
    // samples of Σ w e^{ikx}/L are conj(C(x))
    let s = SpectralField::from_coefficients(grid, w.clone())?.samples();
    let n = s.len();
    let (j, _) = s
        .iter()
        .enumerate()
        .map(|(j, z)| (j, z.norm()))
        .fold((0, -1.0), |a, b| if b.1 > a.1 { b } else { a });
    let (am, a0, ap) = (s[(j + n - 1) % n].norm(), s[j].norm(), s[(j + 1) % n].norm());
    let den = am - 2.0 * a0 + ap;
    let frac = if den < 0.0 { (0.5 * (am - ap) / den).clamp(-0.5, 0.5) } else { 0.0 };
    let l = grid.length();
    let mut best_y = grid.x(j);
    let mut best = corr_at(grid, &w, best_y)[0];
    let mut y = best_y + frac * grid.dx();
    for _ in 0..6 {
        let [c, c1, c2] = corr_at(grid, &w, y);
        if c.norm() > best.norm() {
            best = c;
            best_y = y;
        }
        // g(y) = |C|², g' = 2Re(conj C C'), g'' = 2(|C'|² + Re(conj C C''))
        let g1 = (c.conj() * c1).re;
        let g2 = c1.norm_sqr() + (c.conj() * c2).re;
        if !(g2 < 0.0) {
            break;
        }
        let step = -g1 / g2;
        if step.abs() > grid.dx() {
            break;
        }
        y += step;
        if step.abs() < 1e-15 * l {
            break;
        }
    }
    let [c, ..] = corr_at(grid, &w, y);
    if c.norm() > best.norm() {
        best = c;
        best_y = y;
    }
    Ok((best.norm(), best.arg(), wrap(best_y, l)))
}

fn direct(u: &HardyField, q: &HardyField, theta: f64, y: f64) -> f64 {
    let g = u.grid();
    let rot = Complex64::from_polar(1.0, theta);
    let sq: f64 = u
        .coefficients()
        .iter()
        .zip(q.coefficients())
        .enumerate()
        .map(|(j, (a, b))| {
            let k = g.wavenumber(j);
            (a - rot * b * Complex64::from_polar(1.0, k * y)).norm_sqr() * (1.0 + k * k)
        })
        .sum();
    (sq / g.length()).sqrt()
}

/// `min over θ, y of ‖u - e^{iθ}Q(· + y)‖_{H¹}`, optionally also over `λQ(μx)` with
/// `λ, μ ∈ [1/C, C]`.
///
/// Every shift on the grid is scored at once by an FFT correlation in the `H¹` inner
/// product; the best one is refined to sub-grid accuracy. The optimal phase is the
/// argument of the correlation. With scaling, `λ` is optimal in closed form (then
/// clamped) and `μ` is found by golden-section search on `log μ`.
pub fn orbit_distance(u: &HardyField, q: &HardyField, scaling: Option<ScalingSearch>) -> Result<OrbitDistance> {
    u.grid().ensure_same(q.grid())?;
    let Some(search) = scaling else {
        let (_, theta, y) = best_shift(u, q)?;
        return Ok(OrbitDistance {
            distance: direct(u, q, theta, y),
            theta,
            y,
            scale: None,
        });
    };
    let c = search.window;
    if !(c >= 1.0) || !c.is_finite() {
        return Err(Error::invalid(format!("scaling window must be >= 1, got {c}")));
    }
    let resample = |mu: f64| -> Result<HardyField> {
        match search.reference {
            Some(kind) => reference_hardy_scaled(kind, q.grid(), 1.0, mu),
            None => HardyField::new(dilate(q, mu)?),
        }
    };
    let u2 = u.h1_norm_sq();
    // (distance², λ, θ, y) for one μ
    let at = |mu: f64| -> Result<(f64, f64, f64, f64)> {
        let qm = resample(mu)?;
        let (corr, theta, y) = best_shift(u, &qm)?;
        let q2 = qm.h1_norm_sq();
        let lam = if q2 > 0.0 { (corr / q2).clamp(1.0 / c, c) } else { 1.0 };
        Ok((u2 - 2.0 * lam * corr + lam * lam * q2, lam, theta, y))
    };
    let (mut a, mut b) = (-c.ln(), c.ln());
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = at(x1.exp())?.0;
    let mut f2 = at(x2.exp())?.0;
    for _ in 0..40 {
        if (b - a).abs() < 1e-7 {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = at(x1.exp())?.0;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = at(x2.exp())?.0;
        }
    }
    // the unit scaling and the window edges compete with the interior optimum; the
    // expanded form of the distance cancels badly near zero, so rank them directly
    let mut best: Option<OrbitDistance> = None;
    for lm in [0.5 * (a + b), 0.0, -c.ln(), c.ln()] {
        let mu = lm.exp();
        let (_, lam, theta, y) = at(mu)?;
        let distance = direct(u, &resample(mu)?.scale_real(lam), theta, y);
        if best.is_none_or(|b| distance < b.distance) {
            best = Some(OrbitDistance {
                distance,
                theta,
                y,
                scale: Some((lam, mu)),
            });
        }
    }
    Ok(best.expect("candidates"))
}
