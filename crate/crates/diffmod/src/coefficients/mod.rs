//! Exact arithmetic in the differential field K = ℚ(params)(x₁…xₙ) with
//! commuting derivations, plus the assumption context used for pivots.

mod context;
mod field;
pub mod poly;
mod ratfunc;

pub use context::{Budget, Session};
pub use field::{deriv_prefix, fmt_rational, DiffField, Symbol};
pub use poly::{gcd, Mono, Poly};
pub use ratfunc::RatFunc;
