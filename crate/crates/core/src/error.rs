use thiserror::Error;

/// Errors raised by the exact formulas and the simulator.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series or product did not converge within the term cap.
    #[error("truncation exceeded: {what} needs more than {max_terms} terms")]
    TruncationExceeded {
        what: &'static str,
        max_terms: usize,
    },

    /// An exact integer coefficient is beyond the supported width.
    #[error("coefficient A_{s}({n_c}) is beyond the supported range (n_c + s <= {limit})")]
    Overflow { n_c: u32, s: u32, limit: u32 },

    /// The simulator could not allocate its lattice buffers.
    #[error("resource error: {0}")]
    Resource(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
