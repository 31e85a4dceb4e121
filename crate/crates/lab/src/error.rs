use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] mminf_core::Error),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("unknown {registry} tag(s) {unknown:?}; valid tags: {valid:?}")]
    UnknownTags { registry: &'static str, unknown: Vec<String>, valid: Vec<String> },
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("serialisation failed: {0}")]
    Serialise(String),
}
