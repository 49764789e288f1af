//! Single-step integrators on raw coefficient slices.

use crate::prelude::*;
use crate::spectral::{nonlinearity_into, Grid, NonlinearKind, Workspace};

use super::{EvolutionParams, Scheme};

/// Largest `dt·k_max²` the explicit RK4 stepper accepts. The RK4 stability region
/// reaches about `2.83` on the imaginary axis.
pub const RK4_STIFFNESS_LIMIT: f64 = 2.8;

/// Fields whose sup norm exceeds this are treated as a numerical blow-up.
pub const BLOWUP_SUP_NORM: f64 = 1e12;

struct Rhs {
    grid: Grid,
    m: u32,
    lambda: f64,
    ksq: Vec<f64>,
}

impl Rhs {
    /// `out = -iλ Π(|u|^{2m}u)`, plus `-ik²u` when `linear`.
    fn eval(
        &self,
        ws: &mut Workspace,
        linear: bool,
        u: &[Complex64],
        out: &mut [Complex64],
    ) -> Result<()> {
        if self.lambda != 0.0 {
            nonlinearity_into(&self.grid, u, self.m, NonlinearKind::Projected, ws, out)?;
            let f = Complex64::new(0.0, -self.lambda);
            for o in out.iter_mut() {
                *o *= f;
            }
        } else {
            out.fill(Complex64::new(0.0, 0.0));
        }
        if linear {
            for ((o, &x), &k2) in out.iter_mut().zip(u).zip(&self.ksq) {
                *o += Complex64::new(0.0, -k2) * x;
            }
        }
        Ok(())
    }
}

/// Owns the buffers needed to advance one field; never shared between workers.
pub(crate) struct Stepper {
    rhs: Rhs,
    dt: f64,
    scheme: Scheme,
    half_phase: Vec<Complex64>,
    ws: Workspace,
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Stepper {
    pub(crate) fn new(grid: &Grid, params: &EvolutionParams, dt: f64) -> Result<Self> {
        let ksq: Vec<f64> = grid.wavenumbers().iter().map(|k| k * k).collect();
        if params.scheme == Scheme::Rk4 {
            let k_max = grid.k_max();
            if dt * k_max * k_max > RK4_STIFFNESS_LIMIT {
                return Err(Error::invalid(format!(
                    "rk4 step dt = {dt} violates the stiffness limit dt·k_max² <= {RK4_STIFFNESS_LIMIT} (k_max = {k_max})"
                )));
            }
        }
        let half_phase = ksq
            .iter()
            .map(|&k2| Complex64::from_polar(1.0, -0.5 * k2 * dt))
            .collect();
        let n = grid.n();
        let zero = || vec![Complex64::new(0.0, 0.0); n];
        Ok(Stepper {
            rhs: Rhs {
                grid: grid.clone(),
                m: params.m,
                lambda: params.nonlinearity.lambda(),
                ksq,
            },
            dt,
            scheme: params.scheme,
            half_phase,
            ws: Workspace::new(),
            k1: zero(),
            k2: zero(),
            k3: zero(),
            k4: zero(),
            tmp: zero(),
        })
    }

    /// One classical RK4 pass over `dt` for the nonlinear part (or the whole equation).
    fn rk4(&mut self, u: &mut [Complex64], linear: bool) -> Result<()> {
        let dt = self.dt;
        self.rhs.eval(&mut self.ws, linear, u, &mut self.k1)?;
        for ((t, &x), &k) in self.tmp.iter_mut().zip(u.iter()).zip(&self.k1) {
            *t = x + k * (0.5 * dt);
        }
        self.rhs.eval(&mut self.ws, linear, &self.tmp, &mut self.k2)?;
        for ((t, &x), &k) in self.tmp.iter_mut().zip(u.iter()).zip(&self.k2) {
            *t = x + k * (0.5 * dt);
        }
        self.rhs.eval(&mut self.ws, linear, &self.tmp, &mut self.k3)?;
        for ((t, &x), &k) in self.tmp.iter_mut().zip(u.iter()).zip(&self.k3) {
            *t = x + k * dt;
        }
        self.rhs.eval(&mut self.ws, linear, &self.tmp, &mut self.k4)?;
        let w = dt / 6.0;
        for (j, x) in u.iter_mut().enumerate() {
            *x += (self.k1[j] + (self.k2[j] + self.k3[j]) * 2.0 + self.k4[j]) * w;
        }
        Ok(())
    }

    fn half_linear(&self, u: &mut [Complex64]) {
        for (x, &p) in u.iter_mut().zip(&self.half_phase) {
            *x *= p;
        }
    }

    pub(crate) fn step(&mut self, u: &mut [Complex64]) -> Result<()> {
        match self.scheme {
            Scheme::Strang => {
                self.half_linear(u);
                if self.rhs.lambda != 0.0 {
                    self.rk4(u, false)?;
                }
                self.half_linear(u);
            }
            Scheme::Rk4 => self.rk4(u, true)?,
        }
        Ok(())
    }

    /// False when the field is non-finite or its sup norm passed [`BLOWUP_SUP_NORM`].
    pub(crate) fn healthy(&mut self, u: &[Complex64]) -> bool {
        let grid = &self.rhs.grid;
        let mut wiener = 0.0;
        for c in u {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return false;
            }
            wiener += c.norm();
        }
        // Σ|û|/L bounds the sup norm; only sample when the cheap bound is inconclusive
        if wiener / grid.length() <= BLOWUP_SUP_NORM {
            return true;
        }
        if crate::spectral::refined_samples(grid, u, 0, &mut self.ws).is_err() {
            return false;
        }
        self.ws
            .buf
            .iter()
            .all(|s| s.norm() <= BLOWUP_SUP_NORM)
    }
}
