use thiserror::Error;

use crate::value_group::Exponent;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("coefficient field mismatch: {left} vs {right}")]
    FieldMismatch { left: String, right: String },

    #[error("convex subgroup index {j} out of range for rank {rank}")]
    SubgroupOutOfRange { j: usize, rank: usize },

    #[error("empty sample")]
    EmptySample,

    #[error("element has no known leading term (zero up to {precision})")]
    ZeroLeadingTerm { precision: Exponent },

    #[error("requested {requested} beyond known precision {precision}")]
    BeyondPrecision {
        requested: Exponent,
        precision: Exponent,
    },

    #[error("precision {target} cannot be reached from increments of value {step}")]
    PrecisionUnreachable { step: Exponent, target: Exponent },

    #[error("negative coarse value {value}")]
    NegativeCoarseValue { value: Exponent },

    #[error("not a simple root: v f'(c) = {value}, expected 0")]
    NotSimpleRoot { value: String },

    #[error("not an approximate root: v f(c) = {value}, expected > 0")]
    NotApproximateRoot { value: String },

    #[error("no convergence after {iterations} iterations")]
    NonTermination { iterations: usize },

    #[error("residue factors are not coprime")]
    NotCoprime,

    #[error("residue of f does not equal the product of the residue factors")]
    ResidueMismatch,

    #[error("polynomial is not monic")]
    NotMonic,

    #[error("polynomial is not integral: coefficient of degree {degree} has value {value}")]
    NotIntegral { degree: usize, value: String },

    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    #[error("convex subgroup must be non-trivial")]
    TrivialSubgroup,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("invalid session: {0}")]
    Session(String),
}

impl Error {
    /// Stable identifier for structured error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::RankMismatch { .. } => "RankMismatch",
            Error::FieldMismatch { .. } => "FieldMismatch",
            Error::SubgroupOutOfRange { .. } => "SubgroupOutOfRange",
            Error::EmptySample => "EmptySample",
            Error::ZeroLeadingTerm { .. } => "ZeroLeadingTerm",
            Error::BeyondPrecision { .. } => "BeyondPrecision",
            Error::PrecisionUnreachable { .. } => "PrecisionUnreachable",
            Error::NegativeCoarseValue { .. } => "NegativeCoarseValue",
            Error::NotSimpleRoot { .. } => "NotSimpleRoot",
            Error::NotApproximateRoot { .. } => "NotApproximateRoot",
            Error::NonTermination { .. } => "NonTermination",
            Error::NotCoprime => "NotCoprime",
            Error::ResidueMismatch => "ResidueMismatch",
            Error::NotMonic => "NotMonic",
            Error::NotIntegral { .. } => "NotIntegral",
            Error::HypothesisNotMet(_) => "HypothesisNotMet",
            Error::TrivialSubgroup => "TrivialSubgroup",
            Error::Precondition(_) => "Precondition",
            Error::Invariant(_) => "Invariant",
            Error::Parse { .. } => "Parse",
            Error::UnknownVariable(_) => "UnknownVariable",
            Error::Session(_) => "Session",
        }
    }
}
