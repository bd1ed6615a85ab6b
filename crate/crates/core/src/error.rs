use alloc::string::String;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// An argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A geometry or experiment configuration cannot be built.
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    /// An exhaustive oracle was asked to enumerate too much.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! invalid_argument {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidArgument(alloc::format!($($arg)*))
    };
}

macro_rules! invalid_config {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidConfiguration(alloc::format!($($arg)*))
    };
}

pub(crate) use invalid_argument;
pub(crate) use invalid_config;
