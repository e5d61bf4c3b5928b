//! Exact arithmetic for effective finiteness-of-monodromy bounds, and scan
//! engines that verify the corresponding Frobenius trace/eigenvalue criteria
//! on concrete exponential-sum families at desk scale.
//!
//! The library is organized bottom-up:
//!
//! * [`arith`] — big-integer/rational kernels (exact floor-logs, binomials,
//!   totients, cyclotomic polynomials, primes);
//! * [`cyclotomic`] — the field ℚ(ζ_c) in the power basis, p-integrality at
//!   all places over p, quadratic Gauss sums, polynomials over ℚ(ζ_c);
//! * [`finitefield`] — explicit towers of finite-field extensions with
//!   enumeration, traces, discrete logs and character evaluation;
//! * [`bounds`] — every effective constant (M, R, A_n, the N's) computed
//!   exactly, plus the worked example families;
//! * [`sheaftrace`] — trace-function engines (Artin–Schreier–Fourier,
//!   hypergeometric, user trace tables) emitting exact normalized values;
//! * [`frobcheck`] — Newton-identity reconstruction of Frobenius
//!   characteristic polynomials and the two verification predicates;
//! * [`pipeline`] — deterministic, optionally parallel scans over all points
//!   of all extension degrees up to a bound or budget, with JSON reports.
//!
//! Nothing on the decision path uses floating point: verdicts, bounds and
//! integrality checks are exact. Complex embeddings exist only as sanity
//! checks with guaranteed error bounds.

pub mod arith;
pub mod bounds;
pub mod cyclotomic;
pub mod error;
pub mod finitefield;
pub mod frobcheck;
pub mod pipeline;
pub mod sheaftrace;

pub use error::{Error, Result};
