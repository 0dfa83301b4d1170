use alloc::vec;
use alloc::vec::Vec;

use super::operator::Operator;
use super::register::{Dim, Label, Register, Split};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ONE, ZERO};

/// Largest amplitude vector the dense representation accepts.
pub const MAX_AMPLITUDES: usize = 1 << 17;

/// Amplitudes over a labeled register; not necessarily normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    register: Register,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(register: Register, amps: Vec<C64>) -> Result<Self> {
        let dim = register.dim();
        if dim > MAX_AMPLITUDES {
            return Err(Error::TooLarge(dim));
        }
        if amps.len() != dim {
            return Err(Error::DimMismatch {
                expected: dim,
                found: amps.len(),
            });
        }
        Ok(Self { register, amps })
    }

    pub fn zeros(register: Register) -> Result<Self> {
        let dim = register.dim();
        Self::new(register, vec![ZERO; dim])
    }

    /// Computational basis state with the given digits.
    pub fn basis(register: Register, digits: &[usize]) -> Result<Self> {
        if digits.len() != register.len() {
            return Err(Error::DimMismatch {
                expected: register.len(),
                found: digits.len(),
            });
        }
        let d = register.d().get();
        if let Some(&bad) = digits.iter().find(|&&x| x >= d) {
            return Err(Error::OutOfRange {
                index: bad,
                bound: d,
            });
        }
        let idx = register.index_of(digits);
        let mut s = Self::zeros(register)?;
        s.amps[idx] = ONE;
        Ok(s)
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn d(&self) -> Dim {
        self.register.d()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        linalg::norm_sqr(&self.amps)
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sqr())
    }

    /// `⟨self|other⟩`; both states must live on the same register.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_same(other)?;
        Ok(linalg::inner(&self.amps, &other.amps))
    }

    pub fn scaled(&self, s: C64) -> StateVector {
        StateVector {
            register: self.register.clone(),
            amps: self.amps.iter().map(|&z| z * s).collect(),
        }
    }

    /// Copy rescaled to unit norm; the zero vector is returned unchanged.
    pub fn normalized(&self) -> StateVector {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        self.scaled(C64::new(1.0 / n, 0.0))
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: C64, other: &StateVector) -> Result<()> {
        self.check_same(other)?;
        for (a, &b) in self.amps.iter_mut().zip(&other.amps) {
            *a += s * b;
        }
        Ok(())
    }

    /// `self ⊗ other` on the concatenated register.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let register = self.register.concat(&other.register)?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for &a in &self.amps {
            for &b in &other.amps {
                amps.push(a * b);
            }
        }
        StateVector::new(register, amps)
    }

    /// The same amplitudes re-expressed with the labels in a new order.
    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<StateVector> {
        if order.len() != self.register.len() {
            return Err(Error::DimMismatch {
                expected: self.register.len(),
                found: order.len(),
            });
        }
        let positions = self.register.positions(order)?;
        let target = self.register.select(order)?;
        let split = Split::new(&self.register, &positions);
        let amps = split.kept.iter().map(|&k| self.amps[k]).collect();
        StateVector::new(target, amps)
    }

    /// Rank-one operator `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> Result<Operator> {
        let n = self.amps.len();
        let m = CMatrix::from_fn(n, n, |i, j| self.amps[i] * self.amps[j].conj());
        Operator::new(self.register.clone(), m, true)
    }

    /// Reduced density operator `Tr_rest |ψ⟩⟨ψ|` on `keep` (in the given order).
    pub fn reduced<S: AsRef<str>>(&self, keep: &[S]) -> Result<Operator> {
        let positions = self.register.positions(keep)?;
        let register = self.register.select(keep)?;
        let split = Split::new(&self.register, &positions);
        let k = split.kept.len();
        let mut m = CMatrix::zeros(k, k);
        for &r in &split.rest {
            for i in 0..k {
                let a = self.amps[split.kept[i] + r];
                if a == ZERO {
                    continue;
                }
                for j in 0..k {
                    m[(i, j)] += a * self.amps[split.kept[j] + r].conj();
                }
            }
        }
        Operator::new(register, m, true)
    }

    /// `⟨ψ|O|ψ⟩` with `O` acting on any subset of the labels.
    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        let image = op.apply(self)?;
        Ok(linalg::inner(&self.amps, image.amplitudes()))
    }

    fn check_same(&self, other: &StateVector) -> Result<()> {
        if self.register != other.register {
            return Err(Error::DimMismatch {
                expected: self.amps.len(),
                found: other.amps.len(),
            });
        }
        Ok(())
    }
}

/// Subnormalized maximally entangled vector `Σ_n |nn⟩` on two labels.
pub fn max_entangled<L: Into<Label>>(d: Dim, labels: (L, L)) -> Result<StateVector> {
    let register = Register::new(d, [labels.0.into(), labels.1.into()])?;
    let mut s = StateVector::zeros(register)?;
    let dd = d.get();
    for n in 0..dd {
        s.amps[n * dd + n] = ONE;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(d: usize) -> Dim {
        Dim::new(d).unwrap()
    }

    #[test]
    fn max_entangled_is_subnormalized() {
        let phi = max_entangled(dim(2), ("R", "A")).unwrap();
        let a: Vec<f64> = phi.amplitudes().iter().map(|z| z.re).collect();
        assert_eq!(a, vec![1.0, 0.0, 0.0, 1.0]);
        assert_eq!(phi.norm_sqr(), 2.0);
        let phi3 = max_entangled(dim(3), ("R", "A")).unwrap();
        assert_eq!(phi3.norm_sqr(), 3.0);
        assert_eq!(phi3.inner(&phi3).unwrap(), C64::new(3.0, 0.0));
    }

    #[test]
    fn phi_projector_has_top_eigenvalue_d() {
        let phi = max_entangled(dim(3), ("R", "A")).unwrap();
        let p = phi.projector().unwrap();
        assert!((p.trace().re - 3.0).abs() < 1e-14);
        let image = p.apply(&phi).unwrap();
        for (x, y) in image.amplitudes().iter().zip(phi.amplitudes()) {
            assert!((x - y * 3.0).norm() < 1e-14);
        }
        let ev = p.eigenvalues().unwrap();
        assert!((ev[ev.len() - 1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn reduced_of_phi_is_identity() {
        let phi = max_entangled(dim(3), ("A", "B")).unwrap();
        let r = phi.reduced(&["A"]).unwrap();
        assert!(r.matrix().max_abs_diff(&CMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn reorder_round_trips() {
        let r = Register::new(dim(2), ["a", "b", "c"]).unwrap();
        let s = StateVector::basis(r, &[1, 0, 1]).unwrap();
        let t = s.reorder(&["c", "a", "b"]).unwrap();
        assert_eq!(
            t,
            StateVector::basis(t.register().clone(), &[1, 1, 0]).unwrap()
        );
        assert_eq!(t.reorder(&["a", "b", "c"]).unwrap(), s);
    }

    #[test]
    fn oversized_register_rejected() {
        let r = Register::new(dim(2), (0..20).map(|i| alloc::format!("q{i}"))).unwrap();
        assert!(matches!(StateVector::zeros(r), Err(Error::TooLarge(_))));
    }
}
