use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("code distance must be odd and at least 3, got {0}")]
    InvalidDistance(usize),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate basis setting: {0}")]
    DegenerateSetting(String),
    #[error("unmapped fault: {0}")]
    Taxonomy(String),
    #[error("decoder inconsistency: {0}")]
    Decoder(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
