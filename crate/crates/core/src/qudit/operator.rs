use alloc::vec;
use alloc::vec::Vec;

use super::register::{Register, Split};
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ZERO};

/// Largest dense operator dimension (729 = six qutrits fits).
pub const MAX_OPERATOR_DIM: usize = 1024;

/// Dense operator on a labeled register.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    register: Register,
    matrix: CMatrix,
    hermitian_hint: bool,
}

impl Operator {
    /// Wraps a matrix; with `hermitian_hint` the matrix must be Hermitian to
    /// within `1e-12` (entrywise, relative to its largest entry).
    pub fn new(register: Register, matrix: CMatrix, hermitian_hint: bool) -> Result<Self> {
        let dim = register.dim();
        if dim > MAX_OPERATOR_DIM {
            return Err(Error::TooLarge(dim));
        }
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(Error::DimMismatch {
                expected: dim,
                found: if matrix.rows() != dim {
                    matrix.rows()
                } else {
                    matrix.cols()
                },
            });
        }
        if hermitian_hint && matrix.hermitian_defect() > 1e-12 * matrix.max_abs().max(1.0) {
            return Err(Error::InvalidParameter("matrix flagged Hermitian is not"));
        }
        Ok(Self {
            register,
            matrix,
            hermitian_hint,
        })
    }

    pub fn identity(register: Register) -> Result<Self> {
        let n = register.dim();
        if n > MAX_OPERATOR_DIM {
            return Err(Error::TooLarge(n));
        }
        Self::new(register, CMatrix::identity(n), true)
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn is_hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            register: self.register.clone(),
            matrix: self.matrix.adjoint(),
            hermitian_hint: self.hermitian_hint,
        }
    }

    pub fn scaled(&self, s: f64) -> Operator {
        Operator {
            register: self.register.clone(),
            matrix: self.matrix.scale_re(s),
            hermitian_hint: self.hermitian_hint,
        }
    }

    /// `self + s * other`, both on the same register.
    pub fn plus_scaled(&self, s: f64, other: &Operator) -> Result<Operator> {
        self.check_same(other)?;
        let mut m = self.matrix.clone();
        m.add_scaled(C64::new(s, 0.0), &other.matrix);
        Ok(Operator {
            register: self.register.clone(),
            matrix: m,
            hermitian_hint: self.hermitian_hint && other.hermitian_hint,
        })
    }

    /// Operator product `self · other` on the same register.
    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        self.check_same(other)?;
        Ok(Operator {
            register: self.register.clone(),
            matrix: self.matrix.matmul(&other.matrix),
            hermitian_hint: false,
        })
    }

    /// `self ⊗ other` on the concatenated register.
    pub fn tensor(&self, other: &Operator) -> Result<Operator> {
        let register = self.register.concat(&other.register)?;
        Operator::new(
            register,
            self.matrix.kron(&other.matrix),
            self.hermitian_hint && other.hermitian_hint,
        )
    }

    /// Lifts `self` to a larger register, acting as identity on the other labels.
    pub fn embed(&self, target: &Register) -> Result<Operator> {
        if target.d() != self.register.d() {
            return Err(Error::DimMismatch {
                expected: target.d().get(),
                found: self.register.d().get(),
            });
        }
        let dim = target.dim();
        if dim > MAX_OPERATOR_DIM {
            return Err(Error::TooLarge(dim));
        }
        let positions = target.positions(self.register.labels())?;
        let split = Split::new(target, &positions);
        let k = split.kept.len();
        let mut m = CMatrix::zeros(dim, dim);
        for &r in &split.rest {
            for i in 0..k {
                for j in 0..k {
                    let z = self.matrix[(i, j)];
                    if z != ZERO {
                        m[(split.kept[i] + r, split.kept[j] + r)] = z;
                    }
                }
            }
        }
        Ok(Operator {
            register: target.clone(),
            matrix: m,
            hermitian_hint: self.hermitian_hint,
        })
    }

    /// Applies the operator to the matching labels of `state`, identity
    /// on the rest.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        let reg = state.register();
        if reg.d() != self.register.d() {
            return Err(Error::DimMismatch {
                expected: reg.d().get(),
                found: self.register.d().get(),
            });
        }
        let amps = state.amplitudes();
        if reg == &self.register {
            return StateVector::new(reg.clone(), self.matrix.mul_vec(amps));
        }
        let positions = reg.positions(self.register.labels())?;
        let split = Split::new(reg, &positions);
        let k = split.kept.len();
        let mut out = vec![ZERO; amps.len()];
        let mut local = vec![ZERO; k];
        for &r in &split.rest {
            for (i, slot) in local.iter_mut().enumerate() {
                *slot = amps[split.kept[i] + r];
            }
            for i in 0..k {
                out[split.kept[i] + r] = self
                    .matrix
                    .row(i)
                    .iter()
                    .zip(&local)
                    .map(|(&a, &b)| a * b)
                    .sum();
            }
        }
        StateVector::new(reg.clone(), out)
    }

    /// Partial trace onto `keep` (result labels in the given order).
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<Operator> {
        let positions = self.register.positions(keep)?;
        let register = self.register.select(keep)?;
        let split = Split::new(&self.register, &positions);
        let k = split.kept.len();
        let mut m = CMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                let mut acc = ZERO;
                for &r in &split.rest {
                    acc += self.matrix[(split.kept[i] + r, split.kept[j] + r)];
                }
                m[(i, j)] = acc;
            }
        }
        Ok(Operator {
            register,
            matrix: m,
            hermitian_hint: self.hermitian_hint,
        })
    }

    /// `⟨ψ|O|ψ⟩`.
    pub fn expectation(&self, state: &StateVector) -> Result<C64> {
        state.expectation(self)
    }

    /// Eigenvalues (ascending) of the Hermitian part.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.first().copied().unwrap_or(0.0))
    }

    /// Largest entry of `|U†U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        self.matrix.isometry_defect()
    }

    fn check_same(&self, other: &Operator) -> Result<()> {
        if self.register != other.register {
            return Err(Error::DimMismatch {
                expected: self.register.dim(),
                found: other.register.dim(),
            });
        }
        Ok(())
    }
}
