use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("coefficient of slot {slot} is zero")]
    ZeroCoefficient { slot: usize },
    #[error("variable slot {slot} appears more than once")]
    DuplicateSlot { slot: usize },
    #[error("variable slots must be exactly 1..={arity}; slot {missing} is missing")]
    MissingSlot { arity: usize, missing: usize },
    #[error("{side} side of the equation has no variable terms")]
    EmptySide { side: &'static str },
    #[error("parameter k={k} is below the family's validity threshold {validity}")]
    ParameterBelowValidity { k: i64, validity: i64 },
    #[error("arithmetic overflow while {context}")]
    Overflow { context: &'static str },
    #[error("value {value} lies outside the coloring of [1,{len}]")]
    OutOfRange { value: u64, len: usize },
    #[error("tuple has {got} entries but the equation has {expected} slots")]
    ArityMismatch { expected: usize, got: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("enumeration of {count} items exceeds the limit {limit}")]
    EnumerationLimitExceeded { count: u128, limit: u128 },
    #[error("color {color} is not below the color count {colors}")]
    InvalidColor { color: u8, colors: u8 },
    #[error("invalid color system: {0}")]
    InvalidSystem(String),
    #[error("family shape not supported for symbolic analysis: {0}")]
    UnsupportedFamilyShape(String),
    #[error("no n <= {cap} forces a monochromatic solution")]
    CapExceeded { cap: u32 },
    #[error("formula not covered: {0}")]
    NotCovered(String),
    #[error("conditions of more than one table row hold: {0}")]
    AmbiguousRow(String),
    #[error("pair (k+m-2, l) = ({0}, {1}) is on the excluded list")]
    ExcludedPair(i64, i64),
    #[error("formula does not divide exactly for k={k}: {numerator}/{denominator}")]
    NonIntegralFormula { k: i64, numerator: i64, denominator: i64 },
    #[error("time budget exhausted before a verdict")]
    BudgetExceeded,
    #[error("arity {m} is below 3")]
    ArityTooSmall { m: u32 },
    #[error("invalid event system: {0}")]
    InvalidEventSystem(String),
    #[error("domain error: {0}")]
    Domain(String),
}
