//! Error types shared across the crate.

use crate::soc::ResourceKind;

/// Errors produced by profile ingestion, scaling and report rendering.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The document is not syntactically valid JSON.
    #[error("syntax error: {message}")]
    Syntax { message: String },

    /// A field violates one of the schema invariants.
    #[error("validation error in {context}: field `{field}` violates `{invariant}`")]
    Validation {
        context: String,
        field: String,
        invariant: String,
    },

    /// A profile name collides with an existing registry entry and the
    /// document did not set the override flag.
    #[error("duplicate profile name `{name}` (set \"override\": true to replace)")]
    DuplicateName { name: String },

    /// The benchmark field required for a performance ratio is absent.
    #[error("missing benchmark for `{soc}`: {kind} score is not available")]
    MissingBenchmark { soc: String, kind: ResourceKind },

    /// A SoC name did not resolve in the registry.
    #[error("unknown SoC `{name}`")]
    UnknownSoc { name: String },

    /// An overhead stage is present while mode-capacity multipliers were
    /// explicitly requested; the two model the same phenomenon and must
    /// never be applied together.
    #[error("overhead stage `{stage}` conflicts with explicit mode-capacity accounting")]
    ConflictingOverheadModel { stage: String },

    /// Requested output format is not supported.
    #[error("unsupported format `{name}` (expected text-table, csv, json or svg-bars)")]
    UnsupportedFormat { name: String },
}

pub type Result<T> = std::result::Result<T, Error>;
