//! Pseudospectral toolkit for the focusing NLS-Szegő equation on a periodized line
//!
//! ```text
//! i ∂_t u + ∂²_x u = λ Π(|u|^{2m} u)
//! ```
//!
//! where `Π` is the Szegő projector that removes negative Fourier modes. The crate
//! is organized in four layers:
//!
//! * [`spectral`]: grids, fields, the Szegő projector, norms and dealiased nonlinearities;
//! * [`dynamics`]: the free propagator, Strang / RK4 time stepping, conservation
//!   tracking and Duhamel scattering-state extraction;
//! * [`groundstate`]: Gagliardo–Nirenberg type functionals, their gradients, a normalized
//!   descent minimizer, closed-form reference profiles and Fourier-side rearrangement tools;
//! * [`experiments`]: orbit distances and composite stability / traveling-wave /
//!   scattering / threshold experiments.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std` feature.
//! With `std` the FFT kernel is backed by `rustfft`; otherwise a built-in radix-2
//! kernel is used.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod fft;
mod prelude;

pub mod dynamics;
pub mod experiments;
pub mod groundstate;
pub mod spectral;

pub use error::{Error, Result};
pub use fft::FftKernel;
pub use num_complex::Complex64;
