//! The 1→(1+N) two-fidelity family: one kept output and `N−1` equal ones.
//!
//! With `α_0 = α + β/(d+N−1)` and `α_a = β/(d+N−1)` for `a ≥ 1` the machine
//! `U_α` has only two output fidelities, `f = (dα+β)²` on output 1 and
//! `g = (α+β)²` on the rest, related by
//!
//! ```text
//! (√f − √g)² = (d − g)(d − 1) + (d√g − √f)²/(d+N−1)
//! ```
//!
//! whose `N → ∞` limit is the optimal disturbance/information trade-off.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::machines::{quadratic_form_n, CoeffsN};
use crate::qudit::Dim;

/// Shape `(α, β)` of a two-fidelity machine with `n` outputs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoFidelityParams {
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub d: Dim,
}

impl TwoFidelityParams {
    /// Rescales `(α, β)` so the induced coefficients are normalized.
    pub fn new(alpha: f64, beta: f64, n: usize, d: Dim) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter("N must be at least 2"));
        }
        if !(alpha >= 0.0 && beta >= 0.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParameter(
                "alpha and beta must be finite and non-negative",
            ));
        }
        if alpha == 0.0 && beta == 0.0 {
            return Err(Error::InvalidParameter("alpha and beta are both zero"));
        }
        let raw = Self { alpha, beta, n, d };
        let q = quadratic_form_n(&raw.alphas(), d);
        if !(q > 0.0) {
            return Err(Error::NotNormalizable(q));
        }
        let s = 1.0 / libm::sqrt(q);
        Ok(Self {
            alpha: alpha * s,
            beta: beta * s,
            n,
            d,
        })
    }

    /// `d + N − 1`.
    pub fn denominator(&self) -> f64 {
        self.d.as_f64() + self.n as f64 - 1.0
    }

    fn alphas(&self) -> Vec<f64> {
        let tail = self.beta / self.denominator();
        let mut v = alloc::vec![tail; self.n];
        v[0] = self.alpha + tail;
        v
    }

    /// `(f, g)` for output 1 and outputs `2…N`.
    pub fn fg(&self) -> (f64, f64) {
        let d = self.d.as_f64();
        let f = d * self.alpha + self.beta;
        let g = self.alpha + self.beta;
        (f * f, g * g)
    }
}

/// The induced `U_α` coefficients.
pub fn two_fidelity_coeffs(p: &TwoFidelityParams) -> Result<CoeffsN> {
    CoeffsN::new(p.alphas(), p.d)
}

/// `LHS − RHS` of the two-fidelity trade-off.
pub fn tradeoff_residual(f: f64, g: f64, d: Dim, n: usize) -> f64 {
    let (sf, sg) = (libm::sqrt(f), libm::sqrt(g));
    let d = d.as_f64();
    let lhs = (sf - sg) * (sf - sg);
    let rhs = (d - g) * (d - 1.0) + correction_term(f, g, d, n);
    lhs - rhs
}

/// `(d√g − √f)²/(d+N−1)`, the finite-`N` excess over the limit curve.
pub fn correction(f: f64, g: f64, d: Dim, n: usize) -> f64 {
    correction_term(f, g, d.as_f64(), n)
}

fn correction_term(f: f64, g: f64, d: f64, n: usize) -> f64 {
    let c = d * libm::sqrt(g) - libm::sqrt(f);
    c * c / (d + n as f64 - 1.0)
}

/// `f(g)` on the `N → ∞` curve `(√f − √g)² = (d−g)(d−1)`, branch `√f ≥ √g`.
pub fn asymptotic_f(g: f64, d: Dim) -> Result<f64> {
    let d = d.as_f64();
    let disc = (d - g) * (d - 1.0);
    if !(g >= 0.0) || disc < 0.0 {
        return Err(Error::InvalidParameter("g outside the attainable range"));
    }
    let s = libm::sqrt(g) + libm::sqrt(disc);
    Ok(s * s)
}

/// `f(g)` on the trade-off curve for finite `N`: the larger root in `√f` of
/// the two-fidelity relation.
pub fn finite_n_f(g: f64, d: Dim, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter("N must be at least 2"));
    }
    if !(g >= 0.0) {
        return Err(Error::InvalidParameter("g outside the attainable range"));
    }
    let dd = d.as_f64();
    let den = dd + n as f64 - 1.0;
    let r = libm::sqrt(g);
    // s²(1 − 1/D) − 2 s √g (1 − d/D) + g − d²g/D − (d−g)(d−1) = 0
    let a = 1.0 - 1.0 / den;
    let b = -2.0 * r * (1.0 - dd / den);
    let c = g - dd * dd * g / den - (dd - g) * (dd - 1.0);
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Err(Error::InvalidParameter("g outside the attainable range"));
    }
    let s = (-b + libm::sqrt(disc)) / (2.0 * a);
    Ok(s * s)
}

/// One row of the trade-off curves.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub g: f64,
    pub f_asymptotic: f64,
    /// `f` for each requested `N`, in order.
    pub f_n: Vec<f64>,
}

/// Curves over `points` evenly spaced values of `g ∈ [1, d]`.
pub fn asymptotic_curve(d: Dim, points: usize, ns: &[usize]) -> Result<Vec<CurvePoint>> {
    if points < 2 {
        return Err(Error::InvalidParameter("need at least two curve points"));
    }
    let dd = d.as_f64();
    (0..points)
        .map(|k| {
            let g = 1.0 + (dd - 1.0) * k as f64 / (points - 1) as f64;
            Ok(CurvePoint {
                g,
                f_asymptotic: asymptotic_f(g, d)?,
                f_n: ns
                    .iter()
                    .map(|&n| finite_n_f(g, d, n))
                    .collect::<Result<_>>()?,
            })
        })
        .collect()
}
