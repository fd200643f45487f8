use thiserror::Error;

/// Failure outcome of a facet, container, routing or crypto operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Error)]
pub enum Error {
    #[error("facet is disabled")]
    Disabled,
    #[error("buffer full")]
    BufferFull,
    #[error("no route to destination")]
    NoRoute,
    #[error("payload exceeds the maximum transmission unit")]
    PayloadTooLarge,
    #[error("handle or key not registered")]
    NotRegistered,
    #[error("registry capacity exceeded")]
    CapacityExceeded,
    #[error("no key set up for peer")]
    NoKey,
    #[error("key has the wrong length")]
    InvalidKey,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
