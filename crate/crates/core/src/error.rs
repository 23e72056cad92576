use thiserror::Error;

/// Errors raised by the library. Every variant maps to a distinct process
/// exit code in the command-line front end (see [`Error::exit_code`]).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("conditioning on a null event: history {history:?} has probability 0 under {opinion}")]
    ConditioningOnNullEvent { opinion: String, history: String },

    #[error("enumeration too large: {what} needs {needed} items, limit is {limit}")]
    EnumerationTooLarge { what: String, needed: u128, limit: u128 },

    #[error("atom detected for {opinion}: cylinder {history:?} still has probability > {epsilon} at depth {depth}")]
    AtomDetected { opinion: String, history: String, epsilon: String, depth: usize },

    #[error("no convergence after {iterations} iterations: {detail}")]
    NonConvergence { iterations: usize, detail: String },

    #[error("membership of history {history:?} in the rejection region of {opinion} is undecided")]
    UndecidedMembership { opinion: String, history: String },

    #[error("rejection region of {opinion} has cylinder {cylinder:?} deeper than horizon {horizon}")]
    RegionDeeperThanHorizon { opinion: String, cylinder: String, horizon: usize },

    #[error("invalid opinion {label}: {reason}")]
    InvalidOpinion { label: String, reason: String },

    #[error("invalid history: {0}")]
    InvalidHistory(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    /// Exit code used by the CLI. Codes 2 and 3 are reserved for
    /// configuration and I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConditioningOnNullEvent { .. } => 10,
            Error::EnumerationTooLarge { .. } => 11,
            Error::AtomDetected { .. } => 12,
            Error::NonConvergence { .. } => 13,
            Error::UndecidedMembership { .. } => 14,
            Error::RegionDeeperThanHorizon { .. } => 15,
            Error::InvalidOpinion { .. } => 16,
            Error::InvalidHistory(_) => 17,
            Error::Precondition(_) => 18,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Upper bound on the number of leaves any exhaustive enumeration may visit.
pub const ENUMERATION_LIMIT: u128 = 1 << 22;

/// Returns `m^depth` or `EnumerationTooLarge` when it exceeds the limit.
pub(crate) fn check_enumerable(what: &str, alphabet: usize, depth: usize) -> Result<usize> {
    let mut needed: u128 = 1;
    for _ in 0..depth {
        needed = needed.saturating_mul(alphabet as u128);
        if needed > ENUMERATION_LIMIT {
            return Err(Error::EnumerationTooLarge {
                what: what.to_string(),
                needed: (alphabet as u128).checked_pow(depth as u32).unwrap_or(u128::MAX),
                limit: ENUMERATION_LIMIT,
            });
        }
    }
    Ok(needed as usize)
}
