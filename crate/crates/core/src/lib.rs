//! Squeezing-based quantum metrology on finite Hilbert spaces.
//!
//! The crate builds intelligent (squeezed and coherent) states for an
//! arbitrary pair of observables `(A, H)` as eigenstates of the
//! non-Hermitian operator `L(λ) = λA + iH`, simulates the estimation of a
//! phase `φ` encoded by `U_φ = exp(iHφ)` through projective measurements of
//! `A`, and compares squeezed probes against classical coherent probes of
//! equal energy.
//!
//! Modules, bottom-up:
//!
//! - [`hilbert`]: operators and states on truncated Fock spaces and spin-j
//!   spaces, moments, uncertainty-relation checks.
//! - [`intelligent`]: the `L(λ)` eigensolver and analytic state constructors.
//! - [`estimation`]: unitary encoding, response curves, Born-rule sampling and
//!   method-of-moments inversion.
//! - [`resources`]: ground energy, strategy classification, probe counting and
//!   gain reports.
//! - [`scenarios`]: the four example families and the protocol designer.
//! - [`cli`]: the `squeezelab` command-line front end.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod estimation;
pub mod hilbert;
pub mod intelligent;
pub mod linalg;
pub mod resources;
pub mod scenarios;

pub use error::{Error, Result};
pub use faer::c64;
