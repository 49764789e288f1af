//! Grids, fields, the Szegő projector, norms and dealiased nonlinearities.

mod field;
mod grid;
mod nonlinear;

pub use field::{HardyField, SpectralField, Workspace};
pub use grid::Grid;
pub use nonlinear::{dealias_pad_log2, power_nonlinearity, projected_nonlinearity};

pub(crate) use field::{coefficients_from_refined, refined_samples, zero_negative_modes};
pub(crate) use grid::MAX_PAD_LOG2;
pub(crate) use nonlinear::{nonlinearity_into, NonlinearKind};

use crate::prelude::*;

/// Drops every negative-wavenumber mode. The `k = 0` mode is kept in full, so the
/// discrete projector is an exact orthogonal projection.
pub fn szego_project(f: &SpectralField) -> HardyField {
    let mut out = f.clone();
    zero_negative_modes(&mut out);
    HardyField::from_projected(out)
}

/// Multiplies the spectrum by `k` (`signed`, only for `s = 1`, the operator `D = -i∂_x`)
/// or by `|k|^s`.
pub fn spectral_derivative(f: &SpectralField, s: f64, signed: bool) -> Result<SpectralField> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::invalid(format!("derivative order must be >= 0, got {s}")));
    }
    if signed {
        if s != 1.0 {
            return Err(Error::invalid(format!(
                "signed derivative only defined for s = 1, got {s}"
            )));
        }
        return Ok(f.map_spectrum(|k, c| c * k));
    }
    if s == 0.0 {
        return Ok(f.clone());
    }
    Ok(f.map_spectrum(|k, c| c * k.abs().powf(s)))
}

/// `D f = -i ∂_x f`.
pub fn d_op(f: &SpectralField) -> SpectralField {
    f.map_spectrum(|k, c| c * k)
}

/// `-∂²_x f`.
pub fn neg_laplacian(f: &SpectralField) -> SpectralField {
    f.map_spectrum(|k, c| c * (k * k))
}

/// `x ↦ f(x + y)`, exact for any real `y`.
pub fn translate(f: &SpectralField, y: f64) -> SpectralField {
    f.map_spectrum(|k, c| c * Complex64::from_polar(1.0, k * y))
}

/// `e^{iθ} f`.
pub fn phase_rotate(f: &SpectralField, theta: f64) -> SpectralField {
    f.scale(Complex64::from_polar(1.0, theta))
}

/// Approximates `x ↦ f(μx)` by sampling the spectrum at `k/μ`: `f̂_μ(k) = f̂(k/μ)/μ`.
///
/// Grid coefficients are interpolated with four-point Lagrange stencils. Hardy fields
/// are treated one-sidedly: stencils never straddle `k = 0`, and the `k = 0` coefficient
/// (which may carry a jump) is only used at `k = 0` itself. Wavenumbers mapping outside
/// the grid band get zero. Meant for smooth, decaying spectra.
pub fn dilate(f: &SpectralField, mu: f64) -> Result<SpectralField> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::invalid(format!("dilation factor must be > 0, got {mu}")));
    }
    let g = f.grid();
    let n = g.n() as i64;
    let c = f.coefficients();
    let hardy = is_hardy(f);
    let at = |s: i64| -> Complex64 {
        if s < -n / 2 || s >= n / 2 {
            Complex64::new(0.0, 0.0)
        } else {
            c[if s >= 0 { s as usize } else { (n + s) as usize }]
        }
    };
    let lagrange = |pos: f64, first: i64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            let xi = (first + i) as f64;
            let mut w = 1.0;
            for j in 0..4 {
                if i != j {
                    let xj = (first + j) as f64;
                    w *= (pos - xj) / (xi - xj);
                }
            }
            acc += at(first + i) * w;
        }
        acc
    };
    let out = f.map_spectrum(|k, _| {
        let pos = k / g.dk() / mu;
        if pos == 0.0 {
            return at(0) / mu;
        }
        if pos >= (n / 2) as f64 || pos < -(n / 2) as f64 {
            return Complex64::new(0.0, 0.0);
        }
        let mut first = pos.floor() as i64 - 1;
        if hardy {
            if pos < 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            first = first.max(1);
        }
        lagrange(pos, first) / mu
    });
    Ok(out)
}

/// Hardy-typed convenience for [`translate`].
pub fn translate_hardy(f: &HardyField, y: f64) -> HardyField {
    f.map_spectrum(|k, c| c * Complex64::from_polar(1.0, k * y))
}

/// Hardy-typed convenience for [`phase_rotate`].
pub fn phase_rotate_hardy(f: &HardyField, theta: f64) -> HardyField {
    f.scale(Complex64::from_polar(1.0, theta))
}

/// Discrete `L²` pairing `Σ f ḡ dx`, evaluated through Parseval.
pub fn inner_product(f: &SpectralField, g: &SpectralField) -> Result<Complex64> {
    f.grid().ensure_same(g.grid())?;
    let s: Complex64 = f
        .coefficients()
        .iter()
        .zip(g.coefficients())
        .map(|(a, b)| a * b.conj())
        .sum();
    Ok(s / f.grid().length())
}

/// `P(u) = ⟨Du, u⟩ = ‖|D|^{1/2}u‖²`.
pub fn momentum(f: &HardyField) -> f64 {
    f.weighted_norm_sq(|k| k)
}

/// Mass-weighted circular mean position `(L/2π)·arg ∫|f|² e^{2πix/L} dx`.
///
/// The integral is evaluated exactly from the spectrum, so translating by `y` moves the
/// center by exactly `-y` (mod `L`).
pub fn mass_center(f: &SpectralField) -> f64 {
    let g = f.grid();
    let n = g.n();
    let c = f.coefficients();
    // ∫|f|² e^{iκx} = (1/L) Σ_k f̂(k-κ) conj(f̂(k)), κ = 2π/L
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let s = g.signed_index(j);
        if s == -(n as i64) / 2 {
            continue;
        }
        let prev = if j == 0 { n - 1 } else { j - 1 };
        acc += c[prev] * c[j].conj();
    }
    if acc.norm() == 0.0 {
        return 0.0;
    }
    acc.arg() / g.dk()
}

/// Zero-padding (as a power of two) used for `L^p` quadrature, `p` even.
///
/// The rectangle rule on the refined grid integrates `|u|^p` exactly once the
/// refinement exceeds the band of `|u|^p`; at least `2^min_log2` is used.
fn quadrature_pad_log2(hardy: bool, p: u32, min_log2: usize) -> usize {
    // mode width of u, in units of n/2
    let width = if hardy { 1 } else { 2 };
    // |u|^p lives on |j| <= (p/2)·width·n/2; need refinement·n > that
    let mut log2 = min_log2;
    while (1usize << log2) * 2 <= (p as usize / 2) * width {
        log2 += 1;
    }
    log2
}

fn is_hardy(f: &SpectralField) -> bool {
    f.max_negative_mode() == 0.0
}

/// `‖f‖_{L^p}` for `p = 2`, even integer `p`, or `p = ∞`.
///
/// `p = 2` uses Parseval. Larger even `p` use the rectangle rule on a zero-padded
/// refinement, exact for the trigonometric polynomial the coefficients describe. The
/// sup norm is the largest sample on a 4× refinement.
pub fn lp_norm(f: &SpectralField, p: f64) -> Result<f64> {
    Ok(lp_norm_pow(f, p)?.powf(if p.is_infinite() { 1.0 } else { 1.0 / p }))
}

/// `‖f‖^p_{L^p}` (for `p = ∞`, the sup norm itself).
pub fn lp_norm_pow(f: &SpectralField, p: f64) -> Result<f64> {
    let mut ws = Workspace::new();
    lp_norm_pow_with(f, p, &mut ws)
}

pub(crate) fn lp_norm_pow_with(f: &SpectralField, p: f64, ws: &mut Workspace) -> Result<f64> {
    lp_norm_pow_padded(f, p, 2, ws)
}

/// Same value as [`lp_norm_pow`] (to rounding) on the smallest exact refinement; for
/// inner loops.
pub(crate) fn lp_norm_pow_exact(f: &SpectralField, p: f64, ws: &mut Workspace) -> Result<f64> {
    lp_norm_pow_padded(f, p, 0, ws)
}

fn lp_norm_pow_padded(f: &SpectralField, p: f64, min_log2: usize, ws: &mut Workspace) -> Result<f64> {
    if p == 2.0 {
        return Ok(f.mass());
    }
    let grid = f.grid();
    if p == f64::INFINITY {
        refined_samples(grid, f.coefficients(), 2, ws)?;
        return Ok(ws.buf.iter().map(|c| c.norm_sqr()).fold(0.0, f64::max).sqrt());
    }
    if !(p >= 2.0) || p.fract() != 0.0 || !(p as u64).is_multiple_of(2) || p > 64.0 {
        return Err(Error::invalid(format!(
            "unsupported Lebesgue exponent {p}; use 2, an even integer or infinity"
        )));
    }
    let half = (p as i32) / 2;
    let pad = quadrature_pad_log2(is_hardy(f), p as u32, min_log2);
    if pad > MAX_PAD_LOG2 {
        return Err(Error::invalid(format!(
            "L^{p} quadrature needs a refined grid of {} points, more than the supported {}",
            grid.n() << pad,
            grid.n() << MAX_PAD_LOG2
        )));
    }
    refined_samples(grid, f.coefficients(), pad, ws)?;
    let h = grid.dx() / (1usize << pad) as f64;
    Ok(ws.buf.iter().map(|c| c.norm_sqr().powi(half)).sum::<f64>() * h)
}
