//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by environments, learners, solvers, and the harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An action was looked up that is not a member of the finite action set.
    #[error("unknown action")]
    UnknownAction,

    /// A per-action fit was requested for an action with zero records.
    #[error("unexplored action")]
    UnexploredAction,

    /// The normal equations are rank-deficient and no ridge was requested.
    #[error("singular design")]
    SingularDesign,

    /// A finite action set does not span the action dimension.
    #[error("degenerate action set")]
    DegenerateActionSet,

    /// Vector or matrix dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A configuration value is out of range or inconsistent.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// A preset name did not resolve.
    #[error("unknown preset '{name}'; valid presets: {valid}")]
    UnknownPreset { name: String, valid: String },

    /// A NaN or infinity appeared in policy state; the replication aborts.
    #[error("non-finite value in {what} at round {t}")]
    NonFinite { what: &'static str, t: usize },

    /// An aggregate CSV had a header but no rows.
    #[error("no data rows")]
    NoDataRows,

    /// An aggregate CSV is missing required columns.
    #[error("aggregate file missing columns: {0}")]
    MissingColumns(String),

    /// Policies within a replication consumed different environment streams.
    #[error("environment stream checksum mismatch between policies")]
    ChecksumMismatch,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    /// The plotting backend reported a failure.
    #[error("plot rendering failed: {0}")]
    Plot(String),
}

impl Error {
    /// True for errors caused by user-supplied configuration rather than by
    /// runtime failures; the CLI maps these to exit code 1.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig(_)
                | Error::UnknownPreset { .. }
                | Error::Json(_)
                | Error::DimensionMismatch(_)
                | Error::DegenerateActionSet
                | Error::MissingColumns(_)
                | Error::NoDataRows
                | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
