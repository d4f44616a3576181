use thiserror::Error;

/// Default cap on the number of objects an exhaustive enumeration may visit.
pub const ENUMERATION_BUDGET: u128 = 10_000_000;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter violates a documented precondition.
    /// The message names the violated inequality.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("budget exceeded: {what} requires {needed} steps, limit is {limit}")]
    Budget {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("inversion of zero")]
    ZeroInverse,

    /// Something that cannot happen for a correct implementation did.
    #[error("internal invariant breached: {0}")]
    Invariant(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Precondition(_) | Error::ZeroInverse | Error::Io(_) => 2,
            Error::Budget { .. } => 3,
            Error::Invariant(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_budget(what: &'static str, needed: u128, limit: u128) -> Result<()> {
    if needed > limit {
        Err(Error::Budget {
            what,
            needed,
            limit,
        })
    } else {
        Ok(())
    }
}
