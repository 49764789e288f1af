//! Crate-internal imports shared by every module.

// In `no_std` builds the float methods come from `libm` through `Float`; with
// `std` the inherent methods shadow them and the import goes unused.
#[allow(unused_imports)]
pub(crate) use num_traits::Float as _;

#[allow(unused_imports)]
pub(crate) use alloc::{boxed::Box, format, string::String, vec, vec::Vec};

pub(crate) use core::f64::consts::PI;

pub(crate) use num_complex::Complex64;

pub(crate) use crate::error::{Error, Result};
