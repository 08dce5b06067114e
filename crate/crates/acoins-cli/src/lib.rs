//! Instance and plan file formats, and the variant dispatch behind the
//! `acoins` command-line tool.
//!
//! Instances are UTF-8 JSON. Numbers may be written as decimal literals or
//! as exact `"p/q"` strings (hardness instances need `ℓ = h²` exact):
//!
//! ```json
//! {
//!   "penalty": 37,
//!   "mode": { "reusable": false, "max_tosses": null, "order_given": false },
//!   "coins": [
//!     { "type": "discrete", "id": "A1",
//!       "entries": [ { "p": "1/2", "fee": 0 }, { "p": "3/4", "fee": "3/4" } ] }
//!   ]
//! }
//! ```
//!
//! Every combination of coin kinds and mode flags maps to exactly one
//! solver, or is rejected with a message naming the nearest supported
//! variant. Exit codes: 0 ok, 2 input error, 3 resource or cap refusal.

pub mod dispatch;
pub mod gen;
pub mod instance;
pub mod plan;

use thiserror::Error;

/// Errors surfaced to the command line.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or invalid input (exit 2).
    #[error("{0}")]
    Input(String),
    /// A deliberate resource refusal (exit 3).
    #[error("{0}")]
    Refusal(String),
    /// An error bubbled up from the solver library.
    #[error(transparent)]
    Game(#[from] acoins::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// The process exit code this error maps to.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Refusal(_) => 3,
            CliError::Game(
                acoins::Error::EnumerationTooLarge { .. } | acoins::Error::TooManyCoins { .. },
            ) => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
