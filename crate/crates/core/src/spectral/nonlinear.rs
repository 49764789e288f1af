use super::{
    coefficients_from_refined, refined_samples, zero_negative_modes, Grid, HardyField,
    SpectralField, Workspace, MAX_PAD_LOG2,
};
use crate::prelude::*;

/// Which power nonlinearity to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum NonlinearKind {
    /// Hardy input, Szegő-projected output: `Π(|u|^{2m}u)`.
    Projected,
    /// General input, unprojected output: `|u|^{2m}u` truncated to the grid.
    Full,
}

/// Smallest zero-padding (power of two) that renders `|u|^{2m}u` alias-free on the
/// retained modes.
///
/// With input support `[a, b]` the product lives on `[(m+1)a - mb, (m+1)b - ma]`; an
/// alias `r ± M` of a retained mode `r` must fall outside that interval. For Hardy
/// input and projected output this needs `M ≥ (m+1)n/2`, for general fields
/// `M ≥ (m+1)n`.
pub fn dealias_pad_log2(n: usize, m: u32, hardy: bool) -> usize {
    let half = n as i64 / 2;
    let (a, b) = if hardy { (0, half - 1) } else { (-half, half - 1) };
    let (r0, r1) = (a, b);
    let m = m as i64;
    let lo = (m + 1) * a - m * b;
    let hi = (m + 1) * b - m * a;
    let need = (hi - r0).max(r1 - lo) + 1;
    let mut log2 = 0;
    while ((n as i64) << log2) < need {
        log2 += 1;
    }
    log2
}

/// Evaluates the nonlinearity of `coeffs` into `out` (both line-normalized spectra).
pub(crate) fn nonlinearity_into(
    grid: &Grid,
    coeffs: &[Complex64],
    m: u32,
    kind: NonlinearKind,
    ws: &mut Workspace,
    out: &mut [Complex64],
) -> Result<()> {
    let hardy = kind == NonlinearKind::Projected;
    let pad = dealias_pad_log2(grid.n(), m, hardy);
    if pad > MAX_PAD_LOG2 {
        return Err(Error::invalid(format!(
            "dealiased nonlinearity of degree {} needs {} points, more than the supported {}",
            2 * m + 1,
            grid.n() << pad,
            grid.n() << MAX_PAD_LOG2
        )));
    }
    refined_samples(grid, coeffs, pad, ws)?;
    for u in ws.buf.iter_mut() {
        let a = u.norm_sqr();
        *u *= a.powi(m as i32);
    }
    coefficients_from_refined(grid, pad, ws, out)?;
    if hardy {
        let n = grid.n();
        for c in &mut out[n / 2..] {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    Ok(())
}

/// `Π(|f|^{2m} f)` computed alias-free on a zero-padded grid.
pub fn projected_nonlinearity(f: &HardyField, m: u32) -> Result<HardyField> {
    if m == 0 {
        return Err(Error::invalid("nonlinearity degree m must be >= 1"));
    }
    let mut out = SpectralField::zeros(f.grid());
    let mut ws = Workspace::new();
    nonlinearity_into(
        f.grid(),
        f.coefficients(),
        m,
        NonlinearKind::Projected,
        &mut ws,
        out.coeffs_mut(),
    )?;
    zero_negative_modes(&mut out);
    Ok(HardyField::from_projected(out))
}

/// `|f|^{2m} f` for a general field, alias-free on the retained modes.
pub fn power_nonlinearity(f: &SpectralField, m: u32) -> Result<SpectralField> {
    if m == 0 {
        return Err(Error::invalid("nonlinearity degree m must be >= 1"));
    }
    let mut out = SpectralField::zeros(f.grid());
    let mut ws = Workspace::new();
    nonlinearity_into(
        f.grid(),
        f.coefficients(),
        m,
        NonlinearKind::Full,
        &mut ws,
        out.coeffs_mut(),
    )?;
    Ok(out)
}
