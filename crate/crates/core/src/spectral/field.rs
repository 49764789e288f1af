use core::ops::{Add, Deref, Mul, Neg, Sub};

use super::Grid;
use crate::prelude::*;

/// Reusable transform buffers. One per worker; never shared.
#[derive(Default)]
pub struct Workspace {
    pub(crate) buf: Vec<Complex64>,
    pub(crate) scratch: Vec<Complex64>,
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn buffer(&mut self, len: usize) -> &mut Vec<Complex64> {
        self.buf.clear();
        self.buf.resize(len, Complex64::new(0.0, 0.0));
        &mut self.buf
    }
}

#[inline]
fn parity_sign(j: usize) -> f64 {
    if j & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Evaluates the trigonometric polynomial with line-normalized coefficients `coeffs`
/// on the `n·2^pad_log2`-point refinement of `grid`. The result is left in `ws.buf`.
///
/// `(-1)^{j̃}` accounts for the grid starting at `-L/2`; the slot index parity equals
/// the signed index parity because every padded length is even.
pub(crate) fn refined_samples(
    grid: &Grid,
    coeffs: &[Complex64],
    pad_log2: usize,
    ws: &mut Workspace,
) -> Result<()> {
    let plan = grid.plan(pad_log2)?;
    let n = grid.n();
    let len = plan.len();
    let inv_l = 1.0 / grid.length();
    let Workspace { buf, scratch } = ws;
    buf.clear();
    buf.resize(len, Complex64::new(0.0, 0.0));
    for (j, &c) in coeffs.iter().enumerate() {
        if c.re == 0.0 && c.im == 0.0 {
            continue;
        }
        let s = grid.signed_index(j);
        let slot = if s >= 0 { s as usize } else { (len as i64 + s) as usize };
        buf[slot] = c * (parity_sign(j) * inv_l);
    }
    debug_assert_eq!(coeffs.len(), n);
    plan.inverse(buf, scratch);
    Ok(())
}

/// Transforms samples held in `ws.buf` on the `n·2^pad_log2` refinement back to
/// line-normalized coefficients, keeping only the `n` grid modes.
pub(crate) fn coefficients_from_refined(
    grid: &Grid,
    pad_log2: usize,
    ws: &mut Workspace,
    out: &mut [Complex64],
) -> Result<()> {
    let plan = grid.plan(pad_log2)?;
    let len = plan.len();
    let Workspace { buf, scratch } = ws;
    assert_eq!(buf.len(), len);
    plan.forward(buf, scratch);
    let w = grid.length() / len as f64;
    for (j, o) in out.iter_mut().enumerate() {
        let s = grid.signed_index(j);
        let slot = if s >= 0 { s as usize } else { (len as i64 + s) as usize };
        *o = buf[slot] * (parity_sign(j) * w);
    }
    Ok(())
}

/// A complex field on a [`Grid`].
///
/// The Fourier coefficients are the stored representation, normalized like the line
/// transform: `û(k) = Σ_j u(x_j) e^{-ikx_j} dx`, with inverse
/// `u(x_j) = (1/L) Σ_k û(k) e^{ikx_j}`. Samples are derived on demand.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &Grid) -> Self {
        SpectralField {
            grid: grid.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.n()],
        }
    }

    pub fn from_coefficients(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n() {
            return Err(Error::invalid(format!(
                "expected {} coefficients, got {}",
                grid.n(),
                coeffs.len()
            )));
        }
        Ok(SpectralField {
            grid: grid.clone(),
            coeffs,
        })
    }

    pub fn from_samples(grid: &Grid, samples: &[Complex64]) -> Result<Self> {
        if samples.len() != grid.n() {
            return Err(Error::invalid(format!(
                "expected {} samples, got {}",
                grid.n(),
                samples.len()
            )));
        }
        let mut ws = Workspace::new();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.n()];
        ws.buffer(grid.n()).copy_from_slice(samples);
        coefficients_from_refined(grid, 0, &mut ws, &mut coeffs)?;
        Ok(SpectralField {
            grid: grid.clone(),
            coeffs,
        })
    }

    /// Samples `f(x_j)` at every grid point.
    pub fn from_fn(grid: &Grid, mut f: impl FnMut(f64) -> Complex64) -> Self {
        let samples: Vec<Complex64> = (0..grid.n()).map(|j| f(grid.x(j))).collect();
        Self::from_samples(grid, &samples).expect("length matches grid")
    }

    /// Builds coefficients from a function of the wavenumber.
    pub fn from_spectrum(grid: &Grid, mut f: impl FnMut(f64) -> Complex64) -> Self {
        let coeffs = (0..grid.n()).map(|j| f(grid.wavenumber(j))).collect();
        SpectralField {
            grid: grid.clone(),
            coeffs,
        }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn samples(&self) -> Vec<Complex64> {
        let mut ws = Workspace::new();
        self.samples_with(&mut ws)
    }

    pub(crate) fn samples_with(&self, ws: &mut Workspace) -> Vec<Complex64> {
        refined_samples(&self.grid, &self.coeffs, 0, ws).expect("unpadded plan");
        ws.buf.clone()
    }

    /// Samples on the `factor`-times refined grid (`factor` a power of two).
    pub fn refined_samples(&self, factor: usize) -> Result<Vec<Complex64>> {
        if !factor.is_power_of_two() {
            return Err(Error::invalid("refinement factor must be a power of two"));
        }
        let mut ws = Workspace::new();
        refined_samples(
            &self.grid,
            &self.coeffs,
            factor.trailing_zeros() as usize,
            &mut ws,
        )?;
        Ok(ws.buf)
    }

    /// Applies `f(k, û(k))` to every coefficient.
    pub fn map_spectrum(&self, f: impl Fn(f64, Complex64) -> Complex64) -> SpectralField {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| f(self.grid.wavenumber(j), c))
            .collect();
        SpectralField {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    pub fn scale(&self, a: Complex64) -> SpectralField {
        self.map_spectrum(|_, c| c * a)
    }

    pub fn scale_real(&self, a: f64) -> SpectralField {
        self.map_spectrum(|_, c| c * a)
    }

    pub fn conj_coefficients(&self) -> SpectralField {
        self.map_spectrum(|_, c| c.conj())
    }

    /// `self + a·other`.
    pub fn axpy(&self, a: Complex64, other: &SpectralField) -> Result<SpectralField> {
        self.grid.ensure_same(&other.grid)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&x, &y)| x + a * y)
            .collect();
        Ok(SpectralField {
            grid: self.grid.clone(),
            coeffs,
        })
    }

    /// `Σ_k w(k) |û(k)|² / L`, the weighted Parseval sum.
    pub fn weighted_norm_sq(&self, w: impl Fn(f64) -> f64) -> f64 {
        let inv_l = 1.0 / self.grid.length();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| w(self.grid.wavenumber(j)) * c.norm_sqr())
            .sum::<f64>()
            * inv_l
    }

    /// `‖u‖²_{L²}` computed spectrally.
    pub fn mass(&self) -> f64 {
        self.weighted_norm_sq(|_| 1.0)
    }

    pub fn l2_norm(&self) -> f64 {
        self.mass().sqrt()
    }

    /// `‖|D|^s u‖²_{L²}`.
    pub fn hdot_norm_sq(&self, s: f64) -> f64 {
        if s == 0.0 {
            return self.mass();
        }
        self.weighted_norm_sq(|k| k.abs().powf(2.0 * s))
    }

    /// `‖u‖²_{H¹} = ‖u‖² + ‖∂_x u‖²`.
    pub fn h1_norm_sq(&self) -> f64 {
        self.weighted_norm_sq(|k| 1.0 + k * k)
    }

    pub fn h1_norm(&self) -> f64 {
        self.h1_norm_sq().sqrt()
    }

    /// Sobolev norm `‖(1 + k²)^{s/2} û‖`.
    pub fn hs_norm(&self, s: f64) -> f64 {
        self.weighted_norm_sq(|k| (1.0 + k * k).powf(s)).sqrt()
    }

    /// H¹ inner product `Σ (1+k²) û v̂* / L`.
    pub fn h1_inner(&self, other: &SpectralField) -> Result<Complex64> {
        self.grid.ensure_same(&other.grid)?;
        let inv_l = 1.0 / self.grid.length();
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .enumerate()
            .map(|(j, (a, b))| {
                let k = self.grid.wavenumber(j);
                a * b.conj() * (1.0 + k * k)
            })
            .sum::<Complex64>()
            * inv_l)
    }

    /// Largest `|û(k)|` over `k < 0` (zero for Hardy-space fields).
    pub fn max_negative_mode(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(j, _)| self.grid.signed_index(*j) < 0)
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;

    /// Panics if the grids differ.
    fn add(self, rhs: &SpectralField) -> SpectralField {
        self.axpy(Complex64::new(1.0, 0.0), rhs).expect("grid mismatch in +")
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;

    /// Panics if the grids differ.
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        self.axpy(Complex64::new(-1.0, 0.0), rhs).expect("grid mismatch in -")
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;

    fn neg(self) -> SpectralField {
        self.scale_real(-1.0)
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;

    fn mul(self, a: f64) -> SpectralField {
        self.scale_real(a)
    }
}

/// A field with no negative-wavenumber content: a discrete element of `L²₊`.
#[derive(Clone, Debug)]
pub struct HardyField(SpectralField);

impl HardyField {
    /// Accepts `f` only if every negative mode is exactly zero.
    pub fn new(f: SpectralField) -> Result<Self> {
        let max_negative = f.max_negative_mode();
        if max_negative == 0.0 {
            Ok(HardyField(f))
        } else {
            Err(Error::NotHardy { max_negative })
        }
    }

    pub fn zeros(grid: &Grid) -> Self {
        HardyField(SpectralField::zeros(grid))
    }

    /// Builds a Hardy field from the non-negative part of a spectrum function.
    pub fn from_spectrum(grid: &Grid, f: impl FnMut(f64) -> Complex64) -> Self {
        let mut field = SpectralField::from_spectrum(grid, f);
        zero_negative_modes(&mut field);
        HardyField(field)
    }

    pub(crate) fn from_projected(field: SpectralField) -> Self {
        debug_assert_eq!(field.max_negative_mode(), 0.0);
        HardyField(field)
    }

    pub fn as_field(&self) -> &SpectralField {
        &self.0
    }

    pub fn into_field(self) -> SpectralField {
        self.0
    }

    pub fn scale(&self, a: Complex64) -> HardyField {
        HardyField(self.0.scale(a))
    }

    pub fn scale_real(&self, a: f64) -> HardyField {
        HardyField(self.0.scale_real(a))
    }

    pub fn axpy(&self, a: Complex64, other: &HardyField) -> Result<HardyField> {
        Ok(HardyField(self.0.axpy(a, &other.0)?))
    }

    /// Applies `f(k, û(k))` to the non-negative modes; negative modes stay zero.
    pub fn map_spectrum(&self, f: impl Fn(f64, Complex64) -> Complex64) -> HardyField {
        let mut out = self.0.map_spectrum(f);
        zero_negative_modes(&mut out);
        HardyField(out)
    }

    /// Coefficient-wise conjugation, i.e. `x ↦ conj(u(-x))`; stays in the Hardy space.
    pub fn reflect_conj(&self) -> HardyField {
        HardyField(self.0.conj_coefficients())
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        self.0.coeffs_mut()
    }
}

impl Deref for HardyField {
    type Target = SpectralField;

    fn deref(&self) -> &SpectralField {
        &self.0
    }
}

impl From<HardyField> for SpectralField {
    fn from(h: HardyField) -> Self {
        h.0
    }
}

impl TryFrom<SpectralField> for HardyField {
    type Error = Error;

    fn try_from(f: SpectralField) -> Result<Self> {
        HardyField::new(f)
    }
}

impl Add for &HardyField {
    type Output = HardyField;

    fn add(self, rhs: &HardyField) -> HardyField {
        HardyField(&self.0 + &rhs.0)
    }
}

impl Sub for &HardyField {
    type Output = HardyField;

    fn sub(self, rhs: &HardyField) -> HardyField {
        HardyField(&self.0 - &rhs.0)
    }
}

pub(crate) fn zero_negative_modes(f: &mut SpectralField) {
    let n = f.grid.n();
    for c in &mut f.coeffs[n / 2..] {
        *c = Complex64::new(0.0, 0.0);
    }
}
