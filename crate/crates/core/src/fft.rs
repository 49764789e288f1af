//! Power-of-two complex FFT plans.
//!
//! Both directions are unnormalized: `forward` applies `e^{-2πi jk/N}` and `inverse`
//! applies `e^{+2πi jk/N}`. The caller owns all scaling.

use crate::prelude::*;

#[cfg(feature = "std")]
use alloc::sync::Arc;

/// Which transform implementation a grid uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum FftKernel {
    /// Built-in iterative radix-2 Cooley–Tukey; available without `std`.
    #[cfg_attr(not(feature = "std"), default)]
    Radix2,
    /// `rustfft` planner (SIMD accelerated).
    #[cfg(feature = "std")]
    #[default]
    RustFft,
}


pub(crate) struct Plan {
    len: usize,
    imp: PlanImpl,
}

enum PlanImpl {
    Radix2(Radix2),
    #[cfg(feature = "std")]
    Rust {
        forward: Arc<dyn rustfft::Fft<f64>>,
        inverse: Arc<dyn rustfft::Fft<f64>>,
    },
}

impl Plan {
    pub(crate) fn new(kernel: FftKernel, len: usize) -> Self {
        debug_assert!(len.is_power_of_two());
        let imp = match kernel {
            FftKernel::Radix2 => PlanImpl::Radix2(Radix2::new(len)),
            #[cfg(feature = "std")]
            FftKernel::RustFft => {
                let mut planner = rustfft::FftPlanner::new();
                PlanImpl::Rust {
                    forward: planner.plan_fft_forward(len),
                    inverse: planner.plan_fft_inverse(len),
                }
            }
        };
        Plan { len, imp }
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }

    pub(crate) fn forward(&self, buf: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        assert_eq!(buf.len(), self.len);
        match &self.imp {
            PlanImpl::Radix2(r) => r.run(buf, false),
            #[cfg(feature = "std")]
            PlanImpl::Rust { forward, .. } => run_rustfft(forward.as_ref(), buf, scratch),
        }
        let _ = scratch;
    }

    pub(crate) fn inverse(&self, buf: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        assert_eq!(buf.len(), self.len);
        match &self.imp {
            PlanImpl::Radix2(r) => r.run(buf, true),
            #[cfg(feature = "std")]
            PlanImpl::Rust { inverse, .. } => run_rustfft(inverse.as_ref(), buf, scratch),
        }
        let _ = scratch;
    }
}

#[cfg(feature = "std")]
fn run_rustfft(fft: &dyn rustfft::Fft<f64>, buf: &mut [Complex64], scratch: &mut Vec<Complex64>) {
    let need = fft.get_inplace_scratch_len();
    if scratch.len() < need {
        scratch.resize(need, Complex64::new(0.0, 0.0));
    }
    fft.process_with_scratch(buf, &mut scratch[..need]);
}

struct Radix2 {
    len: usize,
    // e^{-2πi j/N}, j < N/2
    twiddles: Vec<Complex64>,
    bitrev: Vec<u32>,
}

impl Radix2 {
    fn new(len: usize) -> Self {
        let bits = len.trailing_zeros();
        let twiddles = (0..len / 2)
            .map(|j| {
                let theta = -2.0 * PI * (j as f64) / (len as f64);
                Complex64::new(theta.cos(), theta.sin())
            })
            .collect();
        let bitrev = (0..len as u32)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (32 - bits) })
            .collect();
        Radix2 {
            len,
            twiddles,
            bitrev,
        }
    }

    fn run(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.len;
        for i in 0..n {
            let j = self.bitrev[i] as usize;
            if j > i {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for j in 0..half {
                    let mut w = self.twiddles[j * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = buf[start + j];
                    let b = buf[start + j + half] * w;
                    buf[start + j] = a + b;
                    buf[start + j + half] = a - b;
                }
            }
            half *= 2;
        }
    }
}
