use thiserror::Error;

/// Errors raised by net construction, map evaluation and the graph analyses.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Points or nets of incompatible kinds or depths were combined.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A point lies outside the space a map or net is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configured size cap was exceeded.
    #[error("resource cap `{cap}` exceeded: {needed} > {limit}")]
    Resource {
        cap: &'static str,
        needed: usize,
        limit: usize,
    },

    /// A documented precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An operation-level contract failed (e.g. a set that should be forward invariant is not).
    #[error("contract violated: {0}")]
    Contract(String),

    /// The operation does not support this kind of system.
    #[error("unsupported system: {0}")]
    Unsupported(String),

    /// Text could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. })
    }
}

/// Size caps shared by every operation that enumerates something potentially large.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Caps {
    pub net_size: usize,
    pub edges: usize,
    pub chains: usize,
    pub iterates: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            net_size: 500_000,
            edges: 20_000_000,
            chains: 2_000_000,
            iterates: 1 << 20,
        }
    }
}

impl Caps {
    pub(crate) fn check(cap: &'static str, needed: usize, limit: usize) -> Result<()> {
        if needed > limit {
            Err(Error::Resource { cap, needed, limit })
        } else {
            Ok(())
        }
    }
}
