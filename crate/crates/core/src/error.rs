use alloc::boxed::Box;
use alloc::string::String;

use crate::dynamics::TrajectoryRecord;

/// Errors produced by the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid mismatch: fields live on different grids")]
    GridMismatch,

    #[error("field has nonzero negative-wavenumber content (max |û(k<0)| = {max_negative:e})")]
    NotHardy { max_negative: f64 },

    #[error("padded transform of size {required} exceeds the supported maximum {supported}")]
    PaddingOverflow { required: usize, supported: usize },

    /// The integration produced a non-finite or runaway field. `time` is the last time
    /// at which the field was valid; `partial` carries whatever was recorded up to then.
    #[error("numerical blow-up after t = {time}")]
    NumericalBlowup {
        time: f64,
        partial: Option<Box<TrajectoryRecord>>,
    },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
