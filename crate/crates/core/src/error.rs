use thiserror::Error;

/// Errors surfaced by the library.
///
/// Internal invariant failures carry enough context to debug the offending
/// run; they indicate a bug (or a corrupted oracle), not a user error.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed instance descriptions: out-of-range ids, inconsistent
    /// ground-set sizes, bad partition blocks, and the like.
    #[error("instance format error: {0}")]
    InstanceFormat(String),

    /// A caller violated an operation contract (e.g. a pool element outside
    /// the candidate set of an exchange query).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A basis that should be weight-maximum admits an improving exchange;
    /// detected through a negative exchange-graph edge or a failed greedy
    /// comparison.
    #[error("maximality violated: {0}")]
    MaximalityViolated(String),

    /// The exchange graph of a partial solution with `S1 != S2` has no
    /// source-to-sink path. This cannot happen for valid inputs.
    #[error("no st-path in exchange graph: {0}")]
    NoStPath(String),

    /// An internal invariant failed mid-run.
    #[error("internal invariant failure: {0}")]
    Invariant(String),

    /// Guard against brute-force blowups.
    #[error("instance too large for {op}: n = {n}, limit {limit}")]
    TooLarge {
        op: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
