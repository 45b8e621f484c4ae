use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config file or environment.
    #[error("{0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },
    #[error("cannot encode the report: {0}")]
    Encode(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        2
    }
}
