use thiserror::Error;

/// Errors raised by the transforms, channel simulator and modem.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OtfsError {
    #[error("invalid grid shape: K = {k}, L = {l} (both must be at least 1)")]
    InvalidShape { k: usize, l: usize },

    #[error("{what}: expected length {expected}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("shape mismatch: (K, L) = ({}, {}) vs ({}, {})", .left.0, .left.1, .right.0, .right.1)]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("index ({n}, {k}) lies outside the fundamental rectangle {l}x{k_bins}")]
    OutsideRectangle {
        n: i64,
        k: i64,
        l: usize,
        k_bins: usize,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("delay {delay_samples} T cannot be represented in a frame of {period} samples")]
    DelayOutOfWindow { delay_samples: f64, period: usize },

    #[error(
        "cyclic prefix too short: path needs {required} samples of prefix, frame has {available}"
    )]
    CyclicPrefixTooShort { required: usize, available: usize },

    #[error("pulse has no Zak-domain dual: min |Z_g| = {min_magnitude:e} is below {threshold:e}")]
    NoDual { min_magnitude: f64, threshold: f64 },
}

pub type Result<T> = std::result::Result<T, OtfsError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> OtfsError {
    OtfsError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
