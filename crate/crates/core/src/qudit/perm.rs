use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::operator::Operator;
use super::register::Register;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ONE};

/// Permutation of the qudits of a register: the output digit at position
/// `i` is the input digit at position `source[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuditPermutation {
    register: Register,
    source: Vec<usize>,
}

impl QuditPermutation {
    pub fn identity(register: &Register) -> Self {
        Self {
            register: register.clone(),
            source: (0..register.len()).collect(),
        }
    }

    /// `|n₁, n₂, …, n_k⟩ → |n₂, …, n_k, n₁⟩` on `acting` (in that order),
    /// identity on the remaining labels.
    pub fn cyclic<S: AsRef<str>>(register: &Register, acting: &[S]) -> Result<Self> {
        let pos = register.positions(acting)?;
        let mut source: Vec<usize> = (0..register.len()).collect();
        let k = pos.len();
        for i in 0..k {
            source[pos[i]] = pos[(i + 1) % k];
        }
        Ok(Self {
            register: register.clone(),
            source,
        })
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    /// `self` applied after `first`.
    pub fn after(&self, first: &QuditPermutation) -> QuditPermutation {
        QuditPermutation {
            register: self.register.clone(),
            source: self.source.iter().map(|&s| first.source[s]).collect(),
        }
    }

    pub fn inverse(&self) -> QuditPermutation {
        let mut source = vec![0; self.source.len()];
        for (i, &s) in self.source.iter().enumerate() {
            source[s] = i;
        }
        QuditPermutation {
            register: self.register.clone(),
            source,
        }
    }

    pub fn pow(&self, k: usize) -> QuditPermutation {
        let mut out = QuditPermutation::identity(&self.register);
        for _ in 0..k {
            out = self.after(&out);
        }
        out
    }

    /// Image of basis index `input` under the permutation.
    pub fn map_index(&self, input: usize) -> usize {
        let digits = self.register.digits(input);
        let out: Vec<usize> = self.source.iter().map(|&s| digits[s]).collect();
        self.register.index_of(&out)
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.register() != &self.register {
            return Err(Error::DimMismatch {
                expected: self.register.dim(),
                found: state.register().dim(),
            });
        }
        let amps = state.amplitudes();
        let mut out = vec![C64::new(0.0, 0.0); amps.len()];
        for (i, &a) in amps.iter().enumerate() {
            out[self.map_index(i)] = a;
        }
        StateVector::new(self.register.clone(), out)
    }

    pub fn to_operator(&self) -> Result<Operator> {
        let n = self.register.dim();
        let mut m = CMatrix::zeros(n, n);
        for j in 0..n {
            m[(self.map_index(j), j)] = ONE;
        }
        Operator::new(self.register.clone(), m, false)
    }
}

/// Cyclic permutation operator on `acting`, identity elsewhere in `register`.
pub fn cyclic_perm<S: AsRef<str>>(register: &Register, acting: &[S]) -> Result<Operator> {
    QuditPermutation::cyclic(register, acting)?.to_operator()
}

/// `P_a = (1/N) Σ_k ω^{ka} X^k` with `ω = exp(2πi/N)` and `X` the cyclic
/// permutation of all `N` qudits of `register`.
pub fn projector_p(register: &Register, a: usize) -> Result<Operator> {
    let n = register.len();
    if a >= n {
        return Err(Error::OutOfRange { index: a, bound: n });
    }
    let labels: Vec<&str> = register.labels().iter().map(|l| l.as_str()).collect();
    let x = QuditPermutation::cyclic(register, &labels)?;
    let dim = register.dim();
    let mut m = CMatrix::zeros(dim, dim);
    let mut xk = QuditPermutation::identity(register);
    for k in 0..n {
        let angle = 2.0 * PI * ((k * a) % n) as f64 / n as f64;
        let w = C64::new(libm::cos(angle), libm::sin(angle)) / n as f64;
        for j in 0..dim {
            m[(xk.map_index(j), j)] += w;
        }
        xk = x.after(&xk);
    }
    Operator::new(register.clone(), m, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::Dim;

    fn reg(d: usize, labels: &[&str]) -> Register {
        Register::new(Dim::new(d).unwrap(), labels.iter().copied()).unwrap()
    }

    #[test]
    fn cyclic_shifts_digits_left() {
        let r = reg(3, &["1", "2", "3"]);
        let x = QuditPermutation::cyclic(&r, &["1", "2", "3"]).unwrap();
        let s = StateVector::basis(r.clone(), &[0, 1, 2]).unwrap();
        assert_eq!(
            x.apply(&s).unwrap(),
            StateVector::basis(r, &[1, 2, 0]).unwrap()
        );
    }

    #[test]
    fn cube_of_three_cycle_is_identity() {
        let r = reg(2, &["R", "A", "B", "C"]);
        let y = cyclic_perm(&r, &["A", "B", "C"]).unwrap();
        let y3 = y.compose(&y).unwrap().compose(&y).unwrap();
        assert!(y3.matrix().max_abs_diff(&CMatrix::identity(16)) < 1e-15);
        assert!(y.unitarity_defect() < 1e-15);
    }

    #[test]
    fn cycle_on_abc_leaves_reference_fixed() {
        let r = reg(3, &["R", "A", "B", "C"]);
        let y = QuditPermutation::cyclic(&r, &["A", "B", "C"]).unwrap();
        for i in 0..r.dim() {
            assert_eq!(r.digits(y.map_index(i))[0], r.digits(i)[0]);
        }
    }

    #[test]
    fn inverse_and_pow() {
        let r = reg(2, &["a", "b", "c", "e"]);
        let x = QuditPermutation::cyclic(&r, &["a", "b", "c", "e"]).unwrap();
        assert_eq!(x.pow(3), x.inverse());
        assert_eq!(x.pow(4), QuditPermutation::identity(&r));
        assert_eq!(x.after(&x.inverse()), QuditPermutation::identity(&r));
    }

    #[test]
    fn projectors_resolve_identity() {
        for (d, n) in [(2, 3), (3, 3), (2, 4), (3, 2)] {
            let labels: Vec<alloc::string::String> =
                (1..=n).map(|i| alloc::format!("{i}")).collect();
            let r = Register::new(Dim::new(d).unwrap(), labels.iter().map(|s| s.as_str())).unwrap();
            let ps: Vec<Operator> = (0..n).map(|a| projector_p(&r, a).unwrap()).collect();
            let mut sum = CMatrix::zeros(r.dim(), r.dim());
            for (a, pa) in ps.iter().enumerate() {
                sum.add_scaled(ONE, pa.matrix());
                for (b, pb) in ps.iter().enumerate() {
                    let prod = pa.compose(pb).unwrap();
                    let expect = if a == b {
                        pa.matrix().clone()
                    } else {
                        CMatrix::zeros(r.dim(), r.dim())
                    };
                    assert!(prod.matrix().max_abs_diff(&expect) < 1e-12);
                }
            }
            assert!(sum.max_abs_diff(&CMatrix::identity(r.dim())) < 1e-12);
        }
    }

    #[test]
    fn projector_index_out_of_range() {
        let r = reg(2, &["1", "2"]);
        assert!(matches!(
            projector_p(&r, 2),
            Err(Error::OutOfRange { index: 2, bound: 2 })
        ));
    }
}
