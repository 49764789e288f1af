use crate::prelude::*;
use crate::spectral::{szego_project, Grid, HardyField, SpectralField};

/// Weight given to the `k = 0` coefficient of a rational profile relative to its
/// `k → 0⁺` limit. One half is the symmetric (principal value) Fourier integral at
/// `ξ = 0`, and makes the sampled spectrum the exact periodization
/// `(π/L)·cot(π(x + ib)/L)` of `1/(x + ib)`.
pub const RATIONAL_ZERO_MODE_WEIGHT: f64 = 0.5;

/// Closed-form profiles used as references.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ReferenceProfileKind {
    /// `x ↦ 1/(x + i)`
    QPlus,
    /// `x ↦ 3^{1/4}/√cosh(2x)`, real and even; not a Hardy field.
    WeinsteinR,
    /// `x ↦ 2(2c²)^{1/4}/(cx + 2i)`, `c > 0`.
    TravelingQc { c: f64 },
    /// `Π e^{-(x/σ)²}`, `σ > 0`.
    GaussianHardy { sigma: f64 },
}

impl ReferenceProfileKind {
    fn validate(&self) -> Result<()> {
        match *self {
            ReferenceProfileKind::TravelingQc { c } if !(c > 0.0) || !c.is_finite() => {
                Err(Error::invalid(format!("traveling wave speed must be > 0, got {c}")))
            }
            ReferenceProfileKind::GaussianHardy { sigma } if !(sigma > 0.0) || !sigma.is_finite() => {
                Err(Error::invalid(format!("gaussian width must be > 0, got {sigma}")))
            }
            _ => Ok(()),
        }
    }

    /// True for the profiles built from a line Fourier transform.
    pub fn is_rational(&self) -> bool {
        matches!(
            self,
            ReferenceProfileKind::QPlus | ReferenceProfileKind::TravelingQc { .. }
        )
    }
}

/// `x ↦ a/(x + ib)` (`b > 0`), built from its line transform `-2πi a e^{-bξ}` (`ξ > 0`)
/// sampled at the grid wavenumbers.
pub fn rational_profile(grid: &Grid, a: Complex64, b: f64) -> Result<HardyField> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::invalid(format!("pole offset must be > 0, got {b}")));
    }
    let base = Complex64::new(0.0, -2.0 * PI) * a;
    Ok(HardyField::from_spectrum(grid, |k| {
        if k > 0.0 {
            base * (-b * k).exp()
        } else if k == 0.0 {
            base * RATIONAL_ZERO_MODE_WEIGHT
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// The profile `kind` on `grid`.
pub fn reference_profile(kind: ReferenceProfileKind, grid: &Grid) -> Result<SpectralField> {
    reference_profile_scaled(kind, grid, 1.0, 1.0)
}

/// `x ↦ amplitude·Q(μx)` for the profile `Q` of `kind`, resampled analytically.
pub fn reference_profile_scaled(
    kind: ReferenceProfileKind,
    grid: &Grid,
    amplitude: f64,
    mu: f64,
) -> Result<SpectralField> {
    kind.validate()?;
    if !(mu > 0.0) || !mu.is_finite() || !amplitude.is_finite() {
        return Err(Error::invalid(format!(
            "scaling needs finite amplitude and mu > 0, got ({amplitude}, {mu})"
        )));
    }
    let lam = amplitude;
    Ok(match kind {
        ReferenceProfileKind::QPlus => {
            rational_profile(grid, Complex64::new(lam / mu, 0.0), 1.0 / mu)?.into_field()
        }
        ReferenceProfileKind::TravelingQc { c } => {
            let a = 2.0 * (2.0 * c * c).powf(0.25) / c;
            rational_profile(grid, Complex64::new(lam * a / mu, 0.0), 2.0 / (c * mu))?.into_field()
        }
        ReferenceProfileKind::WeinsteinR => SpectralField::from_fn(grid, |x| {
            Complex64::new(lam * 3f64.powf(0.25) / (2.0 * mu * x).cosh().sqrt(), 0.0)
        }),
        ReferenceProfileKind::GaussianHardy { sigma } => {
            let g = SpectralField::from_fn(grid, |x| {
                let y = mu * x / sigma;
                Complex64::new(lam * (-y * y).exp(), 0.0)
            });
            szego_project(&g).into_field()
        }
    })
}

/// [`reference_profile`] as a Hardy field; fails for [`ReferenceProfileKind::WeinsteinR`].
pub fn reference_hardy(kind: ReferenceProfileKind, grid: &Grid) -> Result<HardyField> {
    HardyField::new(reference_profile(kind, grid)?)
}

/// Hardy version of [`reference_profile_scaled`].
pub fn reference_hardy_scaled(
    kind: ReferenceProfileKind,
    grid: &Grid,
    amplitude: f64,
    mu: f64,
) -> Result<HardyField> {
    HardyField::new(reference_profile_scaled(kind, grid, amplitude, mu)?)
}
