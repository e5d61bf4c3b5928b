//! One error type for the whole crate. Variants are structured so the CLI
//! can triage them (flag errors vs table-format errors vs budget exhaustion)
//! without string matching.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("conductor mismatch: {left} vs {right}; lift operands to a common multiple first")]
    ConductorMismatch { left: u64, right: u64 },

    #[error("cannot lift from conductor {from} to {target}: {from} does not divide {target}")]
    BadLift { from: u64, target: u64 },

    #[error("division by zero in Q(zeta_{conductor})")]
    DivisionByZero { conductor: u64 },

    #[error("gcd of two zero polynomials is undefined")]
    GcdOfZero,

    #[error("unsupported characteristic p = {p}: {context}")]
    UnsupportedCharacteristic { p: u64, context: &'static str },

    #[error("{n} is not prime")]
    NotPrime { n: u64 },

    #[error("invalid parameter --{name}: {reason}")]
    Param { name: &'static str, reason: String },

    #[error("odd half-integral valuation check needs p | conductor (p = {p}, conductor = {conductor})")]
    OddValuationConductor { p: u64, conductor: u64 },

    #[error("character order {m} does not divide the multiplicative group order {group_order}")]
    CharOrder { m: u64, group_order: String },

    #[error("budget exceeded: {what} is {have}, cap is {cap}")]
    Budget {
        what: &'static str,
        have: String,
        cap: String,
    },

    #[error("trace table is missing the entry (degree {degree}, point {point})")]
    IncompleteTable { degree: u64, point: u64 },

    #[error("trace table line {line}: {reason}")]
    TableFormat { line: usize, reason: String },

    #[error("cannot guarantee {requested} digits in complex embeddings (at most {available} available here)")]
    Precision { requested: u32, available: i64 },

    #[error("field levels are unrelated: level {level} is not built over level {base}")]
    UnrelatedLevels { level: usize, base: usize },
}
