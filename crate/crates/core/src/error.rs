use alloc::string::String;

/// Errors raised by the numeric core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A caller supplied an argument outside the documented domain.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// Inputs that must agree (shapes, lengths, detector state) do not.
    #[error("contract violation: {0}")]
    Contract(String),
    /// A NaN or infinity appeared; `stage` names where.
    #[error("non-finite value in {stage}")]
    Numeric { stage: String },
    /// A dataset failed one of its structural invariants.
    #[error("dataset validation failed: {0}")]
    Validation(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn numeric(stage: &str) -> Error {
    Error::Numeric { stage: stage.into() }
}

pub(crate) fn ensure_finite(values: &[f64], stage: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(numeric(stage))
    }
}
