use thiserror::Error;

use crate::model::Diagnostic;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),

    #[error("config serialize error: {0}")]
    Serialize(#[from] toml::ser::Error),

    #[error("invalid override `{path}`: {reason}")]
    Override { path: String, reason: String },

    #[error("invalid config: {}", format_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),

    #[error("unknown scenario `{name}`; valid names: {}", .valid.join(", "))]
    UnknownScenario { name: String, valid: Vec<String> },

    #[error("check inapplicable: {0}")]
    Inapplicable(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed results file: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
