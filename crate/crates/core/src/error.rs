use thiserror::Error;

use crate::calib::Side;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("direction mismatch: plan is {plan}, slopes are {slopes}")]
    DirectionMismatch {
        plan: crate::raman::Direction,
        slopes: crate::raman::Direction,
    },

    #[error("QBER undefined: overall gain is zero")]
    UndefinedQber,

    #[error("{missing} slope is not identifiable from the records: {reason}")]
    Unidentifiable { missing: Side, reason: String },

    #[error("rank-deficient design: {0}")]
    RankDeficient(String),

    #[error("ambiguous root: key rate changes sign {sign_changes} times on the coarse grid (first at {first_km} km)")]
    AmbiguousRoot { sign_changes: usize, first_km: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
