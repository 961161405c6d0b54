//! Error type shared by the whole crate.

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval ({lo}, {hi})")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("degenerate point quadruple")]
    DegenerateQuadruple,
    #[error("point {x} outside ({lo}, {hi})")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },
    #[error("vanishing derivative at {x}")]
    CriticalPoint { x: f64 },
    #[error("stage {stage}: domain does not match the previous image")]
    DomainMismatch { stage: usize },
    #[error("stage {stage}: negative Schwarzian {value} at {x}")]
    SchwarzianViolation { stage: usize, x: f64, value: f64 },
    #[error("invalid map parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("inverse evaluation did not converge at {y}")]
    InverseFailed { y: f64 },
    #[error("stage {stage}: linear-fractional surrogate leaves its domain")]
    SurrogateOverflow { stage: usize },
    #[error("periodic orbit of period {period}")]
    Periodic { period: u64, numerator: i64 },
    #[error("continued fraction depth {available} is short of the needed {needed}")]
    DepthExhausted { needed: usize, available: usize },
    #[error("partition tiling defect {defect}")]
    TilingDefect { defect: f64 },
    #[error("chain hits the critical point at step {step}")]
    CriticalCollision { step: usize },
    #[error("chain intervals {first} and {second} overlap")]
    ChainOverlap { first: usize, second: usize },
    #[error("neighborhood is not symmetric")]
    NotSymmetric,
    #[error("fineness {lambda} is not reachable inside the close arc")]
    FinenessUnreachable { lambda: usize },
    #[error("return time exceeds {limit}")]
    ReturnTimeOverflow { limit: u64 },
    #[error("target continued fraction not reachable in the parameter range")]
    PrefixUnreachable,
    #[error("fineness of the chain must exceed lambda")]
    KappaNotAboveLambda,
    #[error("partition order {j} outside ({lambda}, {kappa})")]
    DensityOrder { j: usize, lambda: usize, kappa: usize },
    #[error("not enough points for a fit")]
    FitUnderdetermined,
}
