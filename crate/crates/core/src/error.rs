use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Inputs disagree on dimensions or violate a documented invariant.
    #[error("configuration error: {0}")]
    Config(String),

    /// Reservations cannot be met. `scale` is the largest uniform factor
    /// `s < 1` such that `s` times the reservations is still feasible.
    #[error("infeasible reservations (max uniform scaling {scale:.4})")]
    Infeasible { scale: f64 },

    #[error("instance too large for exhaustive oracle: {0}")]
    OracleSize(String),

    #[error("fairness undefined: all throughputs are zero")]
    UndefinedFairness,

    #[error("empty sample")]
    EmptySample,

    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),

    #[error("cell-edge classification needs at least two base stations")]
    SingleStation,

    /// An SLA or allocation of one RAN kind was routed to the other kind.
    #[error("RAN {ran_id}: {detail}")]
    KindMismatch { ran_id: usize, detail: String },

    #[error("no current measurement report for RAN {ran_id}")]
    MissingReport { ran_id: usize },

    /// Out-of-order control message.
    #[error("RAN {ran_id}: epoch {epoch} is not newer than applied epoch {applied}")]
    StaleEpoch { ran_id: usize, epoch: u64, applied: u64 },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
