use crate::prelude::*;
use crate::spectral::{mass_center, translate_hardy, HardyField};

use super::functional::MIN_L2_NORM;

/// Relative floor below which a coefficient takes no part in phase fits.
pub const PHASE_FLOOR: f64 = 1e-12;

/// `P(f)`: every coefficient replaced by its modulus.
pub fn positive_rearrangement(f: &HardyField) -> HardyField {
    f.map_spectrum(|_, c| Complex64::new(c.norm(), 0.0))
}

/// Weighted least-squares fit of the coefficient phase, `arg f̂(k) ≈ a·k + b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseFit {
    /// Slope; `translate(g, y)` of a positive-coefficient `g` has `a = y`.
    pub a: f64,
    /// Offset in `(-π, π]`.
    pub b: f64,
    /// `|f̂|²`-weighted RMS deviation from the fitted line, in radians.
    pub residual: f64,
}

/// Fits `arg f̂(k) = a k + b` with weights `|f̂(k)|²` over the non-negative modes whose
/// modulus exceeds `1e-12·max|f̂|`. The phase is unwrapped along increasing `k`.
pub fn linear_phase_fit(f: &HardyField) -> Result<PhaseFit> {
    let grid = f.grid();
    let n = grid.n();
    let c = f.coefficients();
    let peak = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::invalid("phase fit of the zero field"));
    }
    let floor = PHASE_FLOOR * peak;
    let mut pts: Vec<(f64, f64, f64)> = Vec::new();
    let mut prev: Option<f64> = None;
    for (j, z) in c.iter().enumerate().take(n / 2) {
        if z.norm() <= floor {
            continue;
        }
        let raw = z.arg();
        let phase = match prev {
            None => raw,
            Some(p) => {
                let mut d = raw - p;
                d -= 2.0 * PI * (d / (2.0 * PI)).round();
                p + d
            }
        };
        prev = Some(phase);
        pts.push((grid.wavenumber(j), phase, z.norm_sqr()));
    }
    if pts.len() < 3 {
        return Err(Error::invalid(format!(
            "phase fit needs at least 3 participating modes, found {}",
            pts.len()
        )));
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let mk = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let mp = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let skk: f64 = pts.iter().map(|p| p.2 * (p.0 - mk) * (p.0 - mk)).sum();
    let skp: f64 = pts.iter().map(|p| p.2 * (p.0 - mk) * (p.1 - mp)).sum();
    let a = if skk > 0.0 { skp / skk } else { 0.0 };
    let b0 = mp - a * mk;
    let res = pts
        .iter()
        .map(|p| p.2 * (p.1 - a * p.0 - b0).powi(2))
        .sum::<f64>()
        / sw;
    let mut b = b0 - 2.0 * PI * (b0 / (2.0 * PI)).round();
    if b <= -PI {
        b += 2.0 * PI;
    }
    Ok(PhaseFit {
        a,
        b,
        residual: res.sqrt(),
    })
}

/// Representative of the symmetry orbit: positive rearrangement, translation of the
/// mass center to 0, then a phase rotation making the lowest positive participating
/// coefficient real and positive.
pub fn canonicalize(f: &HardyField) -> Result<HardyField> {
    if !(f.l2_norm() > MIN_L2_NORM) {
        return Err(Error::invalid("cannot canonicalize the zero field"));
    }
    let p = positive_rearrangement(f);
    let centered = translate_hardy(&p, mass_center(&p));
    let grid = centered.grid();
    let c = centered.coefficients();
    let peak = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let anchor = (1..grid.n() / 2).find(|&j| c[j].norm() > PHASE_FLOOR * peak);
    Ok(match anchor {
        Some(j) => {
            let rot = c[j].conj() / c[j].norm();
            centered.scale(rot)
        }
        None => centered,
    })
}
