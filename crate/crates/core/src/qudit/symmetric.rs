use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::register::Register;
use super::state::StateVector;
use crate::linalg::C64;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Dimension of the symmetric subspace of `m` qudits: `C(d+m-1, m)`.
pub fn symmetric_dimension(d: usize, m: usize) -> usize {
    binomial(d + m - 1, m)
}

/// Orthonormal basis of the symmetric subspace of `register`.
///
/// One state per occupation pattern, equal-weight superposition of all its
/// orderings; states are sorted by their non-decreasing digit string.
pub fn symmetric_basis(register: &Register) -> Vec<StateVector> {
    let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for idx in 0..register.dim() {
        let mut key = register.digits(idx);
        key.sort_unstable();
        groups.entry(key).or_default().push(idx);
    }
    groups
        .into_values()
        .map(|members| {
            let amp = C64::new(1.0 / libm::sqrt(members.len() as f64), 0.0);
            let mut s = StateVector::zeros(register.clone()).expect("register within cap");
            for i in members {
                s.amplitudes_mut()[i] = amp;
            }
            s
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gram, CMatrix};
    use crate::qudit::{Dim, QuditPermutation};

    fn reg(d: usize, m: usize) -> Register {
        let labels: Vec<alloc::string::String> = (0..m).map(|i| alloc::format!("q{i}")).collect();
        Register::new(Dim::new(d).unwrap(), labels.iter().map(|s| s.as_str())).unwrap()
    }

    #[test]
    fn qubit_pair_basis() {
        let b = symmetric_basis(&reg(2, 2));
        assert_eq!(b.len(), 3);
        let h = 1.0 / 2f64.sqrt();
        let amps: Vec<Vec<f64>> = b
            .iter()
            .map(|s| s.amplitudes().iter().map(|z| z.re).collect())
            .collect();
        assert_eq!(amps[0], std::vec![1.0, 0.0, 0.0, 0.0]);
        assert!((amps[1][1] - h).abs() < 1e-15 && (amps[1][2] - h).abs() < 1e-15);
        assert_eq!(amps[2], std::vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn qutrit_pair_basis_is_orthonormal() {
        let b = symmetric_basis(&reg(3, 2));
        assert_eq!(b.len(), 6);
        let vs: Vec<&[C64]> = b.iter().map(|s| s.amplitudes()).collect();
        assert!(gram(&vs).max_abs_diff(&CMatrix::identity(6)) < 1e-12);
    }

    #[test]
    fn invariant_under_transpositions() {
        let r = reg(2, 3);
        let b = symmetric_basis(&r);
        assert_eq!(b.len(), 4);
        for pair in [["q0", "q1"], ["q1", "q2"], ["q0", "q2"]] {
            let t = QuditPermutation::cyclic(&r, &pair).unwrap();
            for s in &b {
                assert_eq!(&t.apply(s).unwrap(), s);
            }
        }
    }

    #[test]
    fn counts_match_binomial() {
        for d in 2..=4 {
            for m in 1..=4 {
                assert_eq!(symmetric_basis(&reg(d, m)).len(), binomial(d + m - 1, m));
            }
        }
        assert_eq!(symmetric_dimension(3, 4), 15);
    }
}
