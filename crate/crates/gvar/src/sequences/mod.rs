//! Weight sequences, exponent sequences, and the ratio/condition machinery
//! built on their partial reciprocal sums.

mod conditions;
mod exponent;
mod lambda;
mod ratio;

pub use conditions::{
    check_gamma_conditions, check_lambda_admissible, check_lambda_log_ratio, check_ratio_limsup,
    sum_trend, table_trend, AdmissibilityReport, ConditionReport, ConditionRow,
    GammaConditionsReport, Verdict, BOUNDED_PLATEAU_FACTOR, DIVERGENT_GROWTH_FACTOR,
    SUM_DIVERGENT_INC_RATIO, SUM_PLATEAU_REL_DELTA,
};
pub use exponent::{ExponentKind, ExponentSequence};
pub use lambda::{GammaForm, LambdaKind, LambdaSequence, TableExtend};
pub use ratio::{ratio, ratio_argmax, ratio_count, RatioValue};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SequenceError {
    #[error("index {index} is out of range for a reject-rule table of length {len}")]
    TableIndexOutOfRange { index: u128, len: usize },
    #[error("sequence is not nondecreasing at n = {at}: {prev} > {next}")]
    NotMonotone { at: u64, prev: f64, next: f64 },
    #[error("first weight must be at least 1 (got {lambda1}); construct with a shift")]
    FirstWeightTooSmall { lambda1: f64 },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("m = {m} exceeds 2^{n}")]
    RatioRangeExceeded { m: String, n: u32 },
    #[error("n must be at least {min} (got {got})")]
    RangeTooSmall { min: u64, got: u64 },
    #[error("argmax search over table weights requires n <= {max} (got {got})")]
    TableScanTooLarge { max: u32, got: u32 },
}
