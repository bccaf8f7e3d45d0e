//! Exact arithmetic for Siegel Eisenstein series and their congruences modulo
//! primes: Fourier coefficients, Siegel-series local polynomials, quadratic
//! form invariants and the number-theoretic values they depend on.

pub mod eisenstein;
pub mod error;
pub mod exactnt;
pub mod hermitian;
pub mod poly;
pub mod quadform;
pub mod siegelseries;
pub mod witness;

pub use error::{Error, Result};
pub use num_bigint::BigInt;
pub use num_rational::BigRational;

/// Embedded in every JSON payload.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
