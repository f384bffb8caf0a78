//! Exponent statistics of prime factorizations.
//!
//! For `n = p_1^a_1 ... p_r^a_r` the crate studies `M(n) = max a_i` and
//! `m(n) = min a_i` (both 1 at `n = 1`), the counts `ω_k(n)` of primes
//! dividing `n` exactly `k` times, and the discrete laws these functions
//! follow in the limit.
//!
//! The pieces:
//!
//! * [`exponents`]: per-integer statistics, by trial division and by a
//!   segmented factorization scan that folds into exact integer accumulators.
//! * [`counting`]: exact counts of k-free and k-full integers, each by two
//!   independent methods.
//! * [`constants`]: zeta values, Euler products and the moment constants,
//!   every one carried with a certified absolute error bound.
//! * [`distribution`]: the arithmetic-f random variable `P(X = k) = f(k+1) - f(k)`
//!   and its built-in instances.
//! * [`verify`]: convergence tables that confront the asymptotic main terms
//!   with exact scan data.

pub mod constants;
pub mod counting;
pub mod distribution;
mod error;
pub mod exponents;
pub mod primes;
pub mod verify;

pub use constants::{ConstantEstimate, Method};
pub use counting::{CountKind, CountMethod, CountReport};
pub use distribution::{ArithmeticF, ArithmeticFDistribution, Builtin, TailBound};
pub use error::{Error, Result};
pub use exponents::{ExponentSequence, ExponentSummary, MomentAccumulator, PrimeSignature, ScanConfig};
