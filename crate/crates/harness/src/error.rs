use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("parameter out of guard: {0}")]
    Guard(String),
    #[error("bad configuration: {0}")]
    Config(String),
    #[error("empty scenario list")]
    EmptySuite,
    #[error("malformed witness: {0}")]
    Witness(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Algebra(#[from] wittquant::Error),
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
