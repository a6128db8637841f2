//! Hermite subdivision operators over exponential-polynomial spaces.
//!
//! The crate covers the whole chain from symbols to schemes:
//!
//! * [`laurent`]: Laurent polynomials and Laurent polynomial matrices with
//!   complex coefficients, determinants and exact right division.
//! * [`seqs`]: finitely supported matrix masks, windowed vector sequences,
//!   convolution, the subdivision operator and the `D`-rescaling.
//! * [`space`]: the spaces `V_{d,Λ}` spanned by `1, x, …, x^p, e^{±λ_j x}`,
//!   their Hermite samples and the spectral / annihilation checks.
//! * [`annihilator`]: Taylor operators and the cancellation operators that
//!   annihilate `V_{d,Λ}` at every level.
//! * [`factor`]: factorization of annihilating masks through the
//!   cancellation operator.
//! * [`schemes`]: the two interpolatory example schemes, their closed form
//!   symbols, determinant identities, limits and iteration.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

pub mod annihilator;
pub mod error;
pub mod factor;
pub mod laurent;
pub mod numeric;
pub mod schemes;
pub mod seqs;
pub mod space;

pub use error::{Error, Result};
pub use numeric::{CMatrix, C64};

/// Default pass tolerance for residual checks and exact division.
pub const DEFAULT_TOL: f64 = 1e-9;
