//! Non-stationary discrete-time quantum walks on the N-cycle.
//!
//! The crate is organised bottom-up:
//!
//! * [`circulant`]: circulant matrices stored by coefficients, Fourier
//!   diagonalization and exponentials.
//! * [`dense`]: small dense helpers (Kronecker products, the conditional
//!   shift) shared by the algebra checks and test oracles.
//! * [`liealg`]: the 3N-dimensional Lie algebra of reachable walk
//!   generators, bracket closure and structural certificates.
//! * [`walk`]: state evolution under `S (C_t ⊗ 1)`, position
//!   distributions and Cesàro averages.
//! * [`transfer`]: the explicit transfer of `|e_1>` to a state with uniform
//!   position distribution.
//! * [`synth`]: numerical search for coin schedules realising a target
//!   state transfer.
//! * [`cli`]: the `cyclewalk` command-line front end.

pub mod circulant;
pub mod cli;
pub mod dense;
pub mod error;
pub mod liealg;
pub mod output;
pub mod synth;
pub mod transfer;
pub mod walk;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Default tolerance for structural predicates.
pub const DEFAULT_TOL: f64 = 1e-10;
