use thiserror::Error;

/// Errors surfaced by the simulator and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// Dimension or length mismatch between interacting objects.
    #[error("size error: {0}")]
    Size(String),

    /// Qubit index out of range or clashing with another index.
    #[error("index error: {0}")]
    Index(String),

    /// Parameter outside its admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Requested problem exceeds a hard resource ceiling.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// A model fit could not be carried out.
    #[error("fit error: {0}")]
    Fit(String),

    /// Bad configuration file or CLI parameters.
    #[error("config error: {0}")]
    Config(String),

    /// An ensemble finished only partially; `completed` lists the
    /// (epsilon index, realization index) cells that did finish.
    #[error("partial ensemble: {message} ({} cells completed)", completed.len())]
    Partial {
        completed: Vec<(usize, usize)>,
        message: String,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
