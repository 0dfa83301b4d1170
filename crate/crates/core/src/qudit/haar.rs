use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

use super::register::Register;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::linalg::C64;

/// Haar-random unit vector drawn from `rng` by normalizing i.i.d. complex
/// Gaussian amplitudes.
pub fn haar_state_with<R: RngCore>(register: &Register, rng: &mut R) -> StateVector {
    let dim = register.dim();
    let amps: Vec<C64> = (0..dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re, im)
        })
        .collect();
    StateVector::new(register.clone(), amps)
        .expect("register within cap")
        .normalized()
}

/// Haar-random state, deterministic in `seed`.
pub fn haar_state(register: &Register, seed: u64) -> StateVector {
    haar_sample(register, seed, 0)
}

/// The `index`-th sample of the stream keyed by `seed`. Each index uses its
/// own ChaCha8 stream, so results do not depend on how samples are sharded.
pub fn haar_sample(register: &Register, seed: u64, index: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    haar_state_with(register, &mut rng)
}

/// Haar-random unit vector inside the span of an orthonormal `basis`,
/// drawn from stream `index` of `seed` like [`haar_sample`].
pub fn haar_in_span(basis: &[StateVector], seed: u64, index: u64) -> Result<StateVector> {
    let first = basis
        .first()
        .ok_or(Error::InvalidParameter("empty basis"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut out = StateVector::zeros(first.register().clone())?;
    for b in basis {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        out.add_scaled(C64::new(re, im), b)?;
    }
    Ok(out.normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::Dim;

    #[test]
    fn unit_norm_and_deterministic() {
        let r = Register::new(Dim::new(3).unwrap(), ["A", "B"]).unwrap();
        let a = haar_state(&r, 42);
        assert!((a.norm() - 1.0).abs() < 1e-12);
        assert_eq!(a, haar_state(&r, 42));
        assert_ne!(a, haar_state(&r, 43));
        assert_ne!(haar_sample(&r, 42, 1), haar_sample(&r, 42, 2));
    }

    #[test]
    fn first_moment_matches_haar() {
        // E|⟨0|ψ⟩|² = 1/d; per-sample variance (d-1)/(d²(d+1))
        for d in [2usize, 3] {
            let r = Register::new(Dim::new(d).unwrap(), ["A"]).unwrap();
            let n = 10_000;
            let mean: f64 = (0..n)
                .map(|i| haar_sample(&r, 7, i).amplitudes()[0].norm_sqr())
                .sum::<f64>()
                / n as f64;
            let df = d as f64;
            let sigma = libm::sqrt((df - 1.0) / (df * df * (df + 1.0)) / n as f64);
            assert!((mean - 1.0 / df).abs() < 3.0 * sigma, "d={d} mean={mean}");
        }
    }
}
