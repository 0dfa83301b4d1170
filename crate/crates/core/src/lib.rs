//! Asymmetric universal cloning machines for qudits.
//!
//! The crate builds the extremal 1→3 machines `U±` and the 1→N family `U_α`,
//! reads their output fidelities off the Choi state, generates the analytic
//! fidelity trade-off boundaries, and certifies those boundaries with an
//! independent extremal-eigenvalue and Gram-matrix oracle.
//!
//! Everything here is `no_std` (with `alloc`). IO, file formats and the
//! command-line front end live in the `aucm` crate.
//!
//! Conventions used throughout:
//!
//! * amplitudes are indexed big-endian by register order (the first label is
//!   the most significant base-`d` digit);
//! * the maximally entangled vector `|Φ⟩ = Σ_n |nn⟩` is kept subnormalized,
//!   `⟨Φ|Φ⟩ = d`;
//! * `f` is the stored fidelity quantity, `F = (d + f) / (d (d + 1))` is
//!   derived from it.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod banaszek;
pub mod boundary;
pub mod error;
pub mod fidelity;
pub mod linalg;
pub mod machines;
mod optimize;
pub mod oracle;
pub mod qudit;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use qudit::{Dim, Label, Operator, Register, StateVector};
