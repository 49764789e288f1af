//! Exact traveling waves of the periodized problem.
//!
//! The closed-form profile `a/(x + ib)` solves the profile equation on the line only;
//! its periodization misses the equation in the constant mode by `O(L^{-1/2})` in
//! `L²`, and that mode then rotates at the wrong frequency. The solution of the same
//! equation on the circle, at the same `(ω, c)`, is found by Petviashvili iteration
//! started from the sampled profile.

use crate::prelude::*;
use crate::spectral::{inner_product, projected_nonlinearity, Grid, HardyField};

use super::{elliptic_residual, reference_hardy, ReferenceProfileKind};

/// A solution of `∂²Q + Π(|Q|⁴Q) = ωQ + cDQ` on the grid.
#[derive(Clone, Debug)]
pub struct TravelingWave {
    pub profile: HardyField,
    pub omega: f64,
    pub c: f64,
    /// [`elliptic_residual`] of `profile` at `(ω, c)`.
    pub residual: f64,
    pub iterations: usize,
}

/// Iteration controls for [`refine_traveling_wave`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefineOptions {
    pub max_iter: usize,
    /// Stop once one update changes the profile by less than this, relative in `H¹`.
    pub tol: f64,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions {
            max_iter: 500,
            tol: 1e-13,
        }
    }
}

/// Petviashvili iteration for the quintic profile equation at fixed `(ω, c)`:
/// `Q̂ ← s^{5/4} N̂(Q)/(k² + ck + ω)` with the stabilizing factor
/// `s = ⟨(k² + ck + ω)Q, Q⟩/⟨N(Q), Q⟩`.
///
/// Needs `k² + ck + ω > 0` on the non-negative modes, which holds for `ω > 0` and
/// `c ≥ 0`, or more generally `c² < 4ω`.
pub fn refine_traveling_wave(
    init: &HardyField,
    omega: f64,
    c: f64,
    opts: &RefineOptions,
) -> Result<TravelingWave> {
    if !(omega > 0.0) || !(c >= 0.0 || c * c < 4.0 * omega) || !c.is_finite() {
        return Err(Error::invalid(format!(
            "the profile operator must be positive: got omega = {omega}, c = {c}"
        )));
    }
    let symbol = |k: f64| k * k + c * k + omega;
    let mut q = init.clone();
    let mut iterations = 0;
    while iterations < opts.max_iter {
        let nl = projected_nonlinearity(&q, 2)?;
        let lq = q.map_spectrum(|k, z| z * symbol(k));
        let den = inner_product(&nl, &q)?.re;
        if !(den > 0.0) {
            return Err(Error::invalid("Petviashvili iteration lost the nonlinear term"));
        }
        let s = inner_product(&lq, &q)?.re / den;
        let w = s.powf(1.25);
        let next = nl.map_spectrum(|k, z| z * (w / symbol(k)));
        let change = (next.as_field() - q.as_field()).h1_norm() / next.h1_norm();
        q = next;
        iterations += 1;
        if !change.is_finite() {
            return Err(Error::invalid("Petviashvili iteration diverged"));
        }
        if change < opts.tol {
            break;
        }
    }
    Ok(TravelingWave {
        residual: elliptic_residual(&q, omega, c)?,
        profile: q,
        omega,
        c,
        iterations,
    })
}

/// The traveling wave of speed `c > 0` on `grid`: the sampled profile `Q_c`
/// refined to the circle at `ω = 3c²/8`.
pub fn periodic_traveling_wave(grid: &Grid, c: f64) -> Result<TravelingWave> {
    let init = reference_hardy(ReferenceProfileKind::TravelingQc { c }, grid)?;
    refine_traveling_wave(&init, 3.0 * c * c / 8.0, c, &RefineOptions::default())
}
