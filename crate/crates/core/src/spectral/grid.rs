use alloc::sync::Arc;
use core::fmt;

use once_cell::race::OnceBox;

use crate::fft::{FftKernel, Plan};
use crate::prelude::*;

/// Largest zero-padding factor a grid will plan transforms for, as a power of two.
pub(crate) const MAX_PAD_LOG2: usize = 4;

/// Periodic discretization of the line on `[-L/2, L/2)`.
///
/// Sample points are `x_j = -L/2 + j·dx`; wavenumbers `k = 2π j̃ / L` with the signed
/// index `j̃ ∈ [-n/2, n/2)` stored in FFT order (non-negative indices first). Cloning
/// is cheap; clones share their FFT plans.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    n: usize,
    length: f64,
    kernel: FftKernel,
    plans: [OnceBox<Plan>; MAX_PAD_LOG2 + 1],
}

impl Grid {
    /// Builds a grid with the default FFT kernel.
    pub fn new(n: usize, length: f64) -> Result<Self> {
        Self::with_kernel(n, length, FftKernel::default())
    }

    pub fn with_kernel(n: usize, length: f64, kernel: FftKernel) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::invalid(format!(
                "grid size must be a power of two >= 16, got {n}"
            )));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::invalid(format!(
                "grid length must be positive and finite, got {length}"
            )));
        }
        Ok(Grid {
            inner: Arc::new(GridInner {
                n,
                length,
                kernel,
                plans: Default::default(),
            }),
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.inner.n
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.inner.length
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.inner.length / self.inner.n as f64
    }

    /// Wavenumber spacing `2π/L`.
    #[inline]
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.inner.length
    }

    pub fn kernel(&self) -> FftKernel {
        self.inner.kernel
    }

    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        -0.5 * self.length() + j as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n()).map(|j| self.x(j)).collect()
    }

    /// Signed mode index of storage slot `j`.
    #[inline]
    pub fn signed_index(&self, j: usize) -> i64 {
        let n = self.n();
        if j < n / 2 {
            j as i64
        } else {
            j as i64 - n as i64
        }
    }

    #[inline]
    pub fn wavenumber(&self, j: usize) -> f64 {
        self.signed_index(j) as f64 * self.dk()
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n()).map(|j| self.wavenumber(j)).collect()
    }

    /// Largest `|k|` on the grid (the unpaired Nyquist mode).
    pub fn k_max(&self) -> f64 {
        PI * self.n() as f64 / self.length()
    }

    /// True when both grids describe the same discretization.
    pub fn same_as(&self, other: &Grid) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.n() == other.n() && self.length().to_bits() == other.length().to_bits())
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// FFT plan of length `n · 2^pad_log2`.
    pub(crate) fn plan(&self, pad_log2: usize) -> Result<&Plan> {
        if pad_log2 > MAX_PAD_LOG2 {
            return Err(Error::PaddingOverflow {
                required: self.n() << pad_log2,
                supported: self.n() << MAX_PAD_LOG2,
            });
        }
        let len = self.n() << pad_log2;
        let kernel = self.inner.kernel;
        Ok(self.inner.plans[pad_log2].get_or_init(|| Box::new(Plan::new(kernel, len))))
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n())
            .field("length", &self.length())
            .field("kernel", &self.kernel())
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}
