use crate::prelude::*;
use crate::spectral::{
    lp_norm_pow_exact, nonlinearity_into, NonlinearKind, SpectralField, Workspace,
};

/// Smallest `L²` norm accepted by the functional.
pub const MIN_L2_NORM: f64 = 1e-12;

/// Degree `m` and momentum weight `γ` of the functional
/// `I(f) = (‖∂f‖^m‖f‖^{m+2} + γ‖|D|^{1/2}f‖^{2m}‖f‖²) / ‖f‖^{2m+2}_{L^{2m+2}}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FunctionalParams {
    pub m: u32,
    pub gamma: f64,
}

impl FunctionalParams {
    pub fn new(m: u32, gamma: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid(format!("functional degree m must be >= 2, got {m}")));
        }
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::invalid(format!("gamma must be >= 0, got {gamma}")));
        }
        Ok(FunctionalParams { m, gamma })
    }
}

/// The norms entering the functional and its value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FunctionalParts {
    /// `‖∂_x f‖²`
    pub a: f64,
    /// `‖f‖²`
    pub b: f64,
    /// `‖|D|^{1/2} f‖²`
    pub c: f64,
    /// `‖f‖^{2m+2}_{L^{2m+2}}`
    pub s: f64,
    pub value: f64,
}

pub(crate) fn parts_with(
    f: &SpectralField,
    params: &FunctionalParams,
    ws: &mut Workspace,
) -> Result<FunctionalParts> {
    let b = f.mass();
    if !(b.sqrt() > MIN_L2_NORM) {
        return Err(Error::invalid("the functional is undefined for the zero field"));
    }
    let a = f.hdot_norm_sq(1.0);
    let c = f.weighted_norm_sq(|k| k.abs());
    let m = params.m as i32;
    let s = lp_norm_pow_exact(f, f64::from(2 * params.m + 2), ws)?;
    let num = a.powf(0.5 * m as f64) * b.powf(0.5 * (m + 2) as f64)
        + params.gamma * c.powi(m) * b;
    Ok(FunctionalParts {
        a,
        b,
        c,
        s,
        value: num / s,
    })
}

/// Norms and value of the functional.
pub fn functional_parts(f: &SpectralField, params: &FunctionalParams) -> Result<FunctionalParts> {
    parts_with(f, params, &mut Workspace::new())
}

/// `I_m^{(γ)}(f)`. For non-Hardy fields the momentum factor uses `|k|`.
pub fn evaluate_functional(f: &SpectralField, params: &FunctionalParams) -> Result<f64> {
    Ok(functional_parts(f, params)?.value)
}

/// Real `L²` gradient of the functional: `dI(f)[h] = Re⟨g, h⟩`.
///
/// `hardy` selects the Hardy-space version (projected nonlinearity); otherwise the
/// plain power is used and the momentum term acts through `|D|`.
pub(crate) fn gradient_with(
    f: &SpectralField,
    params: &FunctionalParams,
    hardy: bool,
    ws: &mut Workspace,
) -> Result<(FunctionalParts, SpectralField)> {
    let p = parts_with(f, params, ws)?;
    let m = params.m;
    let mf = f64::from(m);
    let (a, b, c, s) = (p.a, p.b, p.c, p.s);
    let w_lap = mf * a.powf(0.5 * mf - 1.0) * b.powf(0.5 * (mf + 2.0)) / s;
    let w_id = ((mf + 2.0) * a.powf(0.5 * mf) * b.powf(0.5 * mf)
        + 2.0 * params.gamma * c.powi(m as i32))
        / s;
    let w_d = 2.0 * params.gamma * mf * c.powi(m as i32 - 1) * b / s;
    let w_nl = (2.0 * mf + 2.0) * p.value / s;

    let mut nl = vec![Complex64::new(0.0, 0.0); f.grid().n()];
    let kind = if hardy {
        NonlinearKind::Projected
    } else {
        NonlinearKind::Full
    };
    nonlinearity_into(f.grid(), f.coefficients(), m, kind, ws, &mut nl)?;
    let grid = f.grid();
    let coeffs = f
        .coefficients()
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let k = grid.wavenumber(j);
            x * (w_lap * k * k + w_id + w_d * k.abs()) - nl[j] * w_nl
        })
        .collect();
    let mut g = SpectralField::from_coefficients(grid, coeffs)?;
    if hardy {
        crate::spectral::zero_negative_modes(&mut g);
    }
    Ok((p, g))
}

/// Szegő-projected first variation of the functional at a Hardy field.
///
/// `g = (1/S)(mA^{m/2-1}B^{(m+2)/2}(-∂²f) + (m+2)A^{m/2}B^{m/2}f + 2γmC^{m-1}B·Df + 2γC^m f)
///      - ((2m+2)I/S) Π(|f|^{2m}f)`
///
/// with `A = ‖∂f‖²`, `B = ‖f‖²`, `C = ‖|D|^{1/2}f‖²`, `S = ‖f‖^{2m+2}_{L^{2m+2}}`. It is
/// the gradient for the real pairing: `dI(f)[h] = Re⟨g, h⟩` for Hardy `h`.
pub fn first_variation(
    f: &crate::spectral::HardyField,
    params: &FunctionalParams,
) -> Result<crate::spectral::HardyField> {
    let (_, g) = gradient_with(f, params, true, &mut Workspace::new())?;
    Ok(crate::spectral::szego_project(&g))
}

/// First variation over general (non-Hardy) fields, without the projector.
pub fn first_variation_general(f: &SpectralField, params: &FunctionalParams) -> Result<SpectralField> {
    Ok(gradient_with(f, params, false, &mut Workspace::new())?.1)
}
