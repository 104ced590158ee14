//! Error type shared across the pipeline.

use thiserror::Error;

/// Errors produced by ingestion, training, and evaluation.
#[derive(Debug, Error)]
pub enum PebgError {
    /// Malformed input row; carries the 1-based line number of the offender.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },

    /// Ingestion filtered every record away.
    #[error("dataset is empty after filtering")]
    EmptyDataset,

    /// Invalid split request (bad fraction, too few students).
    #[error("split error: {0}")]
    Split(String),

    /// Invalid configuration value or unknown key/feature name.
    #[error("configuration error: {0}")]
    Config(String),

    /// A loss or parameter became NaN/Inf; names the offending term.
    #[error("numerical failure in {term}")]
    Numerical { term: String },

    /// Inputs violate a structural precondition (e.g. isolated question).
    #[error("structural error: {0}")]
    Structural(String),

    /// Metric is undefined for the given inputs (e.g. single-class AUC).
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    /// Pair sampling was asked for a relation with no positive pairs.
    #[error("relation has no positive pairs")]
    EmptyRelation,

    /// A serialized artifact does not match its documented format.
    #[error("format error in {path}: {msg}")]
    Format { path: String, msg: String },

    /// A pipeline stage failed; names the stage.
    #[error("stage '{stage}' failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<PebgError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl PebgError {
    /// Wrap an error with the name of the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Self {
        PebgError::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, PebgError>;
