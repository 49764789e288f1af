use crate::prelude::*;
use crate::spectral::{lp_norm_pow_with, momentum, HardyField, Workspace};

/// Conserved quantities of one field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConservedSet {
    /// `‖u‖²_{L²}`
    pub mass: f64,
    /// `⟨Du, u⟩`
    pub momentum: f64,
    /// `‖∂_x u‖²/2 + λ‖u‖^{2m+2}_{L^{2m+2}}/(2m+2)`
    pub energy: f64,
    /// `E + γP²/(2M)`; equals the energy when the mass vanishes.
    pub k_gamma: f64,
}

impl ConservedSet {
    /// General degree `m` and sign `lambda` (`-1` focusing).
    pub fn compute(u: &HardyField, m: u32, lambda: f64, gamma: f64) -> Result<Self> {
        let mut ws = Workspace::new();
        let s = lp_norm_pow_with(u, f64::from(2 * m + 2), &mut ws)?;
        Ok(Self::from_parts(u, m, lambda, gamma, s))
    }

    pub(crate) fn from_parts(u: &HardyField, m: u32, lambda: f64, gamma: f64, s: f64) -> Self {
        let mass = u.mass();
        let momentum = momentum(u);
        let grad = u.hdot_norm_sq(1.0);
        let energy = 0.5 * grad + lambda * s / f64::from(2 * m + 2);
        let k_gamma = if mass > 0.0 {
            energy + gamma * momentum * momentum / (2.0 * mass)
        } else {
            energy
        };
        ConservedSet {
            mass,
            momentum,
            energy,
            k_gamma,
        }
    }
}

/// Conserved quantities of the quintic focusing flow.
pub fn conserved_set(u: &HardyField, gamma: f64) -> Result<ConservedSet> {
    ConservedSet::compute(u, 2, -1.0, gamma)
}

/// `K_γ` written through the functional: `(‖u‖⁶_{L⁶}/(6M²))·(3I₂^{(γ)}(u) - M²)`.
///
/// Agrees with [`ConservedSet::k_gamma`] for the quintic focusing flow; used as an
/// independent cross-check.
pub fn k_gamma_via_functional(u: &HardyField, gamma: f64) -> Result<f64> {
    let mass = u.mass();
    if mass <= 1e-24 {
        return Err(Error::invalid("K_gamma identity needs a nonzero field"));
    }
    let params = crate::groundstate::FunctionalParams::new(2, gamma)?;
    let i2 = crate::groundstate::evaluate_functional(u, &params)?;
    let s = crate::spectral::lp_norm_pow(u, 6.0)?;
    Ok(s / (6.0 * mass * mass) * (3.0 * i2 - mass * mass))
}
