//! Dense multi-qudit linear algebra over labeled registers.

mod haar;
mod operator;
mod perm;
mod register;
mod state;
mod symmetric;

pub use haar::{haar_in_span, haar_sample, haar_state, haar_state_with};
pub use operator::{Operator, MAX_OPERATOR_DIM};
pub use perm::{cyclic_perm, projector_p, QuditPermutation};
pub use register::{Dim, Label, Register};
pub use state::{max_entangled, StateVector, MAX_AMPLITUDES};
pub use symmetric::{binomial, symmetric_basis, symmetric_dimension};
