//! Independent certification of the trade-off bounds.
//!
//! Explicit subspace bases, incompleteness deficits, Gram matrices and the
//! extremal-eigenvalue support function `h(w) = d·λ_max(Σ_α w_α Φ_{Rα})` of
//! the set of fidelity vectors reachable by states with `⟨ψ|ψ⟩ = d`.
//! Nothing here uses the closed-form machines or boundaries except as the
//! object under test.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::boundary::{bound_1n, ellipse_residual, symmetric_ellipsoid_residual, Hull};
use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eigen, CMatrix, C64, ONE, ZERO};
use crate::machines::Sign;
use crate::qudit::{
    haar_in_span, haar_sample, max_entangled, projector_p, symmetric_basis, Dim, Operator,
    QuditPermutation, Register, StateVector, MAX_OPERATOR_DIM,
};

/// Which construction a basis family comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyTag {
    /// `|φ^±_k⟩` on `R, A, B`.
    Phi12,
    /// `|φ^a_{kl+}⟩` on `R, A, B, C`, spanning `V_+`.
    Phi13Plus,
    /// `|φ^a_{kl−}⟩` on `R, A, B, C`, spanning `V_−`.
    Phi13Minus,
    /// Orthonormal basis of the sector spanned by `P_a|Φ⟩_{01}|n⟩` with `n`
    /// symmetric, on `0, 1, …, N`.
    Sym1N,
}

/// A declared-orthonormal family of states.
#[derive(Clone, Debug)]
pub struct BasisFamily {
    pub tag: FamilyTag,
    pub d: Dim,
    /// Number of output qudits.
    pub n: usize,
    pub states: Vec<StateVector>,
}

impl BasisFamily {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn gram(&self) -> CMatrix {
        let v: Vec<&[C64]> = self.states.iter().map(|s| s.amplitudes()).collect();
        linalg::gram(&v)
    }

    /// `max |G − I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        self.gram().max_abs_diff(&CMatrix::identity(self.len()))
    }

    /// `Σ |φ⟩⟨φ|` as a dense matrix.
    pub fn projector_sum(&self) -> CMatrix {
        let dim = self.states.first().map_or(0, |s| s.amplitudes().len());
        let mut m = CMatrix::zeros(dim, dim);
        for s in &self.states {
            let a = s.amplitudes();
            for i in 0..dim {
                if a[i] == ZERO {
                    continue;
                }
                for j in 0..dim {
                    m[(i, j)] += a[i] * a[j].conj();
                }
            }
        }
        m
    }
}

fn push_normalized(out: &mut Vec<StateVector>, v: StateVector) {
    let n = v.norm();
    if n > 1e-10 {
        out.push(v.scaled(C64::new(1.0 / n, 0.0)));
    }
}

/// `|φ^±_k⟩ = (|Φ⟩_RA|k⟩_B ± |Φ⟩_RB|k⟩_A) / √(2(d±1))`, `2d` states.
pub fn phi_basis_12(d: Dim) -> Result<BasisFamily> {
    let reg = Register::new(d, ["R", "A", "B"])?;
    let dd = d.get();
    let mut states = Vec::with_capacity(2 * dd);
    for sign in [Sign::Plus, Sign::Minus] {
        let s = sign.value();
        let norm = 1.0 / libm::sqrt(2.0 * (d.as_f64() + s));
        for k in 0..dd {
            let mut v = StateVector::zeros(reg.clone())?;
            let amps = v.amplitudes_mut();
            for n in 0..dd {
                amps[reg.index_of(&[n, n, k])] += C64::new(norm, 0.0);
                amps[reg.index_of(&[n, k, n])] += C64::new(s * norm, 0.0);
            }
            states.push(v);
        }
    }
    Ok(BasisFamily {
        tag: FamilyTag::Phi12,
        d,
        n: 2,
        states,
    })
}

fn register13(d: Dim) -> Result<Register> {
    Register::new(d, ["R", "A", "B", "C"])
}

/// `|Φ⟩_RA|{kl}±⟩_BC` with `|{kk}+⟩ = |kk⟩`.
fn phi_pair(reg: &Register, sign: Sign, k: usize, l: usize) -> Result<StateVector> {
    let dd = reg.d().get();
    let mut v = StateVector::zeros(reg.clone())?;
    let amps = v.amplitudes_mut();
    if k == l {
        for n in 0..dd {
            amps[reg.index_of(&[n, n, k, k])] = ONE;
        }
    } else {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        for n in 0..dd {
            amps[reg.index_of(&[n, n, k, l])] += C64::new(h, 0.0);
            amps[reg.index_of(&[n, n, l, k])] += C64::new(sign.value() * h, 0.0);
        }
    }
    Ok(v)
}

fn pairs(d: usize, sign: Sign) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for k in 0..d {
        let start = if sign == Sign::Plus { k } else { k + 1 };
        for l in start..d {
            out.push((k, l));
        }
    }
    out
}

/// `Y` on `R, A, B, C`: moves the content of `A` to `B`, `B` to `C`, `C` to `A`.
fn y_perm(reg: &Register) -> Result<QuditPermutation> {
    Ok(QuditPermutation::cyclic(reg, &["A", "B", "C"])?.inverse())
}

/// `|φ^a_{kl±}⟩ ∝ (I + ω^a Y + ω^{2a} Y²)|Φ⟩_RA|{kl}±⟩_BC`, normalized.
///
/// Vectors that vanish identically are dropped; at `d = 2` this removes the
/// `a = 0` members of the minus family.
pub fn phi_basis_13(d: Dim, sign: Sign) -> Result<BasisFamily> {
    let reg = register13(d)?;
    let y = y_perm(&reg)?;
    let y2 = y.after(&y);
    let mut states = Vec::new();
    for a in 0..3 {
        let ang = 2.0 * PI * a as f64 / 3.0;
        let w1 = C64::new(libm::cos(ang), libm::sin(ang));
        let w2 = w1 * w1;
        for (k, l) in pairs(d.get(), sign) {
            let base = phi_pair(&reg, sign, k, l)?;
            let mut v = base.clone();
            v.add_scaled(w1, &y.apply(&base)?)?;
            v.add_scaled(w2, &y2.apply(&base)?)?;
            push_normalized(&mut states, v);
        }
    }
    let tag = match sign {
        Sign::Plus => FamilyTag::Phi13Plus,
        Sign::Minus => FamilyTag::Phi13Minus,
    };
    Ok(BasisFamily {
        tag,
        d,
        n: 3,
        states,
    })
}

/// Largest `|⟨φ_+|Φ_{Rα}|φ_−⟩|` over both 1→3 families and `α = A, B, C`.
pub fn cross_elements(d: Dim) -> Result<f64> {
    let plus = phi_basis_13(d, Sign::Plus)?;
    let minus = phi_basis_13(d, Sign::Minus)?;
    let mut worst: f64 = 0.0;
    for out in ["A", "B", "C"] {
        let phi = max_entangled(d, ("R", out))?.projector()?;
        for m in &minus.states {
            let image = phi.apply(m)?;
            for p in &plus.states {
                worst = worst.max(p.inner(&image)?.norm());
            }
        }
    }
    Ok(worst)
}

/// Spectrum of `I − Σ|φ⟩⟨φ|` over the union of the given families.
#[derive(Clone, Debug, PartialEq)]
pub struct Deficit {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvalues within `1e-10` of zero.
    pub zero_count: usize,
}

impl Deficit {
    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Rank of the deficit operator, i.e. the dimension of the complement.
    pub fn rank(&self) -> usize {
        self.eigenvalues.len() - self.zero_count
    }
}

pub fn incompleteness_deficit(families: &[&BasisFamily]) -> Result<Deficit> {
    let first = families
        .first()
        .ok_or(Error::InvalidParameter("no families given"))?;
    let dim = first.states.first().map_or(0, |s| s.amplitudes().len());
    if dim > MAX_OPERATOR_DIM {
        return Err(Error::TooLarge(dim));
    }
    let mut m = CMatrix::identity(dim);
    for f in families {
        m = &m - &f.projector_sum();
    }
    let eigenvalues = linalg::eigenvalues(&m)?;
    let zero_count = eigenvalues.iter().filter(|v| v.abs() < 1e-10).count();
    Ok(Deficit {
        eigenvalues,
        zero_count,
    })
}

fn labels_1n(n: usize) -> Vec<String> {
    (0..=n).map(|k| format!("{k}")).collect()
}

/// `Σ_α w_α Φ_{0α}` on qudits `0, 1, …, N` with `N = w.len()`.
pub fn weighted_observable(w: &[f64], d: Dim) -> Result<CMatrix> {
    let n = w.len();
    if n == 0 {
        return Err(Error::InvalidParameter("no weights given"));
    }
    let labels = labels_1n(n);
    let reg = Register::new(d, labels.iter().map(|s| s.as_str()))?;
    let dim = reg.dim();
    if dim > MAX_OPERATOR_DIM {
        return Err(Error::TooLarge(dim));
    }
    let dd = d.get();
    let mut m = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        let digits = reg.digits(j);
        for (a, &wa) in w.iter().enumerate() {
            if wa == 0.0 || digits[0] != digits[a + 1] {
                continue;
            }
            let mut di = digits.clone();
            for v in 0..dd {
                di[0] = v;
                di[a + 1] = v;
                m[(reg.index_of(&di), j)] += C64::new(wa, 0.0);
            }
        }
    }
    Ok(m)
}

/// `h(w) = d·λ_max(Σ_α w_α Φ_{0α})`: the maximum of `Σ_α w_α f_α` over
/// states with `⟨ψ|ψ⟩ = d`.
pub fn support_function(w: &[f64], d: Dim) -> Result<f64> {
    let m = weighted_observable(w, d)?;
    Ok(d.as_f64() * linalg::eigenvalues(&m)?.last().copied().unwrap_or(0.0))
}

/// The support value together with a maximizing state (`⟨ψ|ψ⟩ = d`).
pub fn support_state(w: &[f64], d: Dim) -> Result<(f64, StateVector)> {
    let m = weighted_observable(w, d)?;
    let eig = hermitian_eigen(&m)?;
    let top = eig.values.len() - 1;
    let labels = labels_1n(w.len());
    let reg = Register::new(d, labels.iter().map(|s| s.as_str()))?;
    let psi = StateVector::new(reg, eig.vector(top))?.scaled(C64::new(libm::sqrt(d.as_f64()), 0.0));
    Ok((d.as_f64() * eig.max(), psi))
}

/// `f_α = ⟨ψ|Φ_{Rα}|ψ⟩` for every label `α` after the first, which is the
/// reference.
pub fn observable_f(psi: &StateVector) -> Result<Vec<f64>> {
    let labels = psi.register().labels();
    let reference = labels
        .first()
        .ok_or(Error::InvalidParameter("empty register"))?;
    let dd = psi.d().get();
    let mut out = Vec::with_capacity(labels.len() - 1);
    for l in &labels[1..] {
        let rho = psi.reduced(&[reference.as_str(), l.as_str()])?;
        let mut f = 0.0;
        for a in 0..dd {
            for b in 0..dd {
                f += rho.matrix()[(a * dd + a, b * dd + b)].re;
            }
        }
        out.push(f);
    }
    Ok(out)
}

/// The spanning states `P_a|Φ⟩_{01}|λ⟩_{2…N}`, `a < N`, `λ` over the
/// computational basis, on qudits `0, …, N`.
pub fn psi_1n(d: Dim, n: usize) -> Result<Vec<StateVector>> {
    psi_1n_over(d, n, false)
}

fn psi_1n_over(d: Dim, n: usize, symmetric_tail: bool) -> Result<Vec<StateVector>> {
    if n < 2 {
        return Err(Error::InvalidParameter("N must be at least 2"));
    }
    let labels = labels_1n(n);
    let outputs = Register::new(d, labels[1..].iter().map(|s| s.as_str()))?;
    let tail = Register::new(d, labels[2..].iter().map(|s| s.as_str()))?;
    let head = max_entangled(d, (labels[0].as_str(), labels[1].as_str()))?;
    let tails: Vec<StateVector> = if symmetric_tail {
        symmetric_basis(&tail)
    } else {
        (0..tail.dim())
            .map(|i| StateVector::basis(tail.clone(), &tail.digits(i)))
            .collect::<Result<_>>()?
    };
    let projectors: Vec<Operator> = (0..n)
        .map(|a| projector_p(&outputs, a))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(n * tails.len());
    for p in &projectors {
        for t in &tails {
            out.push(p.apply(&head.tensor(t)?)?);
        }
    }
    Ok(out)
}

/// Orthonormal basis of the sector spanned by `P_a|Φ⟩_{01}|n⟩` with `n`
/// running over the symmetric states of qudits `2, …, N`.
pub fn sym_sector_1n(d: Dim, n: usize) -> Result<BasisFamily> {
    let span = psi_1n_over(d, n, true)?;
    let reg = span[0].register().clone();
    let raw: Vec<Vec<C64>> = span.into_iter().map(|s| s.into_amplitudes()).collect();
    let states = linalg::orthonormalize(&raw, 1e-10)
        .into_iter()
        .map(|v| StateVector::new(reg.clone(), v))
        .collect::<Result<_>>()?;
    Ok(BasisFamily {
        tag: FamilyTag::Sym1N,
        d,
        n,
        states,
    })
}

/// Gram matrix of `{ψ} ∪ {P_a|Φ⟩_{01}|λ⟩}` with the fidelities of `ψ`.
#[derive(Clone, Debug)]
pub struct GramReport {
    pub matrix: CMatrix,
    pub min_eigenvalue: f64,
    /// `f_k = ⟨ψ|Φ_{0k}|ψ⟩`.
    pub f: Vec<f64>,
    /// `Σ f_k − (Σ √f_k)²/(d+N−1) − d(d−1)`.
    pub bound_residual: f64,
}

/// `psi` lives on qudits `0, …, N` with `⟨ψ|ψ⟩ = d`.
pub fn gram_1n(psi: &StateVector) -> Result<GramReport> {
    let n = psi.register().len() - 1;
    let d = psi.d();
    let labels = labels_1n(n);
    let expect = Register::new(d, labels.iter().map(|s| s.as_str()))?;
    if psi.register() != &expect {
        return Err(Error::InvalidParameter("state must live on qudits 0..N"));
    }
    let mut vecs = alloc::vec![psi.clone()];
    vecs.extend(psi_1n(d, n)?);
    let refs: Vec<&[C64]> = vecs.iter().map(|s| s.amplitudes()).collect();
    let matrix = linalg::gram(&refs);
    let min_eigenvalue = linalg::eigenvalues(&matrix)?
        .first()
        .copied()
        .unwrap_or(0.0);
    let f = observable_f(psi)?;
    let bound_residual = bound_1n(&f, d);
    Ok(GramReport {
        matrix,
        min_eigenvalue,
        f,
        bound_residual,
    })
}

/// The vectors `**f**_α` with components `⟨Y^α|Φ⟩_RA|{kl}±⟩_BC | ψ⟩`, for
/// `α = A, B, C`.
pub fn pure_state_vectors(psi: &StateVector, sign: Sign) -> Result<[Vec<C64>; 3]> {
    let reg = psi.register().clone();
    let y = y_perm(&reg)?;
    let mut out: [Vec<C64>; 3] = Default::default();
    for (k, l) in pairs(reg.d().get(), sign) {
        let mut b = phi_pair(&reg, sign, k, l)?;
        for slot in out.iter_mut() {
            slot.push(b.inner(psi)?);
            b = y.apply(&b)?;
        }
    }
    Ok(out)
}

/// `f_A+f_B+f_C ∓ |**f**_A+**f**_B+**f**_C|²/(d±2) − d(d∓1)` for a state in
/// `V_±` on `R, A, B, C`.
pub fn pure_state_residual(psi: &StateVector, sign: Sign) -> Result<f64> {
    let d = psi.d().as_f64();
    let s = sign.value();
    let f: f64 = observable_f(psi)?.iter().sum();
    let v = pure_state_vectors(psi, sign)?;
    let total: f64 = (0..v[0].len())
        .map(|i| (v[0][i] + v[1][i] + v[2][i]).norm_sqr())
        .sum();
    let denom = d + 2.0 * s;
    let term = if denom.abs() < 1e-12 {
        // d = 2, minus: the summed vector lies in the a = 0 sector, which is
        // empty there
        if total > 1e-18 {
            return Ok(f64::INFINITY);
        }
        0.0
    } else {
        s * total / denom
    };
    Ok(f - term - d * (d - s))
}

/// Which bound a sampling run checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundTag {
    /// 1→2 ellipse on random states of `R, A, B`.
    Ellipse12,
    /// Pure-state bound on random states of `V_±`.
    PureState(Sign),
    /// Symmetric-subspace ellipsoid on random states of `V_+`.
    SymmetricEllipsoid,
    /// 1→N bound on random states of the symmetric sector.
    Bound1N,
    /// Hull membership of random states of `R, A, B, C`.
    Hull13,
}

impl BoundTag {
    pub fn name(self) -> &'static str {
        match self {
            BoundTag::Ellipse12 => "ellipse_1to2",
            BoundTag::PureState(Sign::Plus) => "pure_state_bound_plus",
            BoundTag::PureState(Sign::Minus) => "pure_state_bound_minus",
            BoundTag::SymmetricEllipsoid => "symmetric_ellipsoid",
            BoundTag::Bound1N => "bound_1n",
            BoundTag::Hull13 => "hull_membership_1to3",
        }
    }
}

/// Outcome of a sampling run.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub name: String,
    pub d: Dim,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// Largest residual seen (positive means violation). For hull
    /// membership this is the relative radial excess.
    pub max_residual: f64,
    pub violations: usize,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Samples `trials` random states for the bound `tag` (states normalized to
/// `⟨ψ|ψ⟩ = d`) and counts residuals above `tol`. `n` is only used by
/// [`BoundTag::Bound1N`].
pub fn verify_bound(
    tag: BoundTag,
    d: Dim,
    n: usize,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<VerifyReport> {
    let scale = C64::new(libm::sqrt(d.as_f64()), 0.0);
    let (n_out, sampler): (usize, alloc::boxed::Box<dyn Fn(u64) -> Result<StateVector>>) = match tag
    {
        BoundTag::Ellipse12 => {
            let reg = Register::new(d, ["R", "A", "B"])?;
            (
                2,
                alloc::boxed::Box::new(move |k| Ok(haar_sample(&reg, seed, k).scaled(scale))),
            )
        }
        BoundTag::Hull13 => {
            let reg = register13(d)?;
            (
                3,
                alloc::boxed::Box::new(move |k| Ok(haar_sample(&reg, seed, k).scaled(scale))),
            )
        }
        BoundTag::PureState(sign) => {
            let fam = phi_basis_13(d, sign)?;
            (
                3,
                alloc::boxed::Box::new(move |k| {
                    Ok(haar_in_span(&fam.states, seed, k)?.scaled(scale))
                }),
            )
        }
        BoundTag::SymmetricEllipsoid => {
            let fam = phi_basis_13(d, Sign::Plus)?;
            (
                3,
                alloc::boxed::Box::new(move |k| {
                    Ok(haar_in_span(&fam.states, seed, k)?.scaled(scale))
                }),
            )
        }
        BoundTag::Bound1N => {
            let fam = sym_sector_1n(d, n)?;
            (
                n,
                alloc::boxed::Box::new(move |k| {
                    Ok(haar_in_span(&fam.states, seed, k)?.scaled(scale))
                }),
            )
        }
    };
    let hull = matches!(tag, BoundTag::Hull13).then(|| Hull::new(d));
    let mut max_residual = f64::NEG_INFINITY;
    let mut violations = 0;
    for k in 0..trials {
        let psi = sampler(k as u64)?;
        let r = match tag {
            BoundTag::Ellipse12 => {
                let f = observable_f(&psi)?;
                ellipse_residual(libm::sqrt(f[0]), libm::sqrt(f[1]), d)
            }
            BoundTag::PureState(sign) => pure_state_residual(&psi, sign)?,
            BoundTag::SymmetricEllipsoid => {
                let f = observable_f(&psi)?;
                symmetric_ellipsoid_residual([f[0], f[1], f[2]].map(libm::sqrt), d)
            }
            BoundTag::Bound1N => bound_1n(&observable_f(&psi)?, d),
            BoundTag::Hull13 => {
                let f = observable_f(&psi)?;
                let h = hull.as_ref().expect("hull built for this tag");
                h.excess([f[0], f[1], f[2]])
            }
        };
        max_residual = max_residual.max(r);
        if !(r <= tol) {
            violations += 1;
        }
    }
    Ok(VerifyReport {
        name: String::from(tag.name()),
        d,
        n: n_out,
        trials,
        seed,
        tolerance: tol,
        max_residual,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(d: usize) -> Dim {
        Dim::new(d).unwrap()
    }

    #[test]
    fn phi12_family() {
        for d in [2, 3] {
            let fam = phi_basis_12(dim(d)).unwrap();
            assert_eq!(fam.len(), 2 * d);
            assert!(fam.orthonormality_defect() < 1e-12);
            let def = incompleteness_deficit(&[&fam]).unwrap();
            assert!(def.min() > -1e-10);
            assert_eq!(def.rank(), d * d * d - 2 * d);
            // Φ_RA is supported inside the span
            let pi = fam.projector_sum();
            let phi = max_entangled(dim(d), ("R", "A")).unwrap();
            let reg = fam.states[0].register().clone();
            let op = phi.projector().unwrap().embed(&reg).unwrap();
            let id = CMatrix::identity(reg.dim());
            let q = &id - &pi;
            let sand = q.matmul(op.matrix()).matmul(&q);
            assert!(sand.max_abs() < 1e-10);
        }
    }

    #[test]
    fn phi13_families() {
        for d in [2, 3] {
            let plus = phi_basis_13(dim(d), Sign::Plus).unwrap();
            let minus = phi_basis_13(dim(d), Sign::Minus).unwrap();
            assert_eq!(plus.len(), 3 * d * (d + 1) / 2);
            let expect_minus = if d == 2 { 2 } else { 3 * d * (d - 1) / 2 };
            assert_eq!(minus.len(), expect_minus);
            assert!(plus.orthonormality_defect() < 1e-10);
            assert!(minus.orthonormality_defect() < 1e-10);
            for m in &minus.states {
                for p in &plus.states {
                    assert!(p.inner(m).unwrap().norm() < 1e-12);
                }
            }
            assert!(cross_elements(dim(d)).unwrap() < 1e-10);
            let def = incompleteness_deficit(&[&plus, &minus]).unwrap();
            assert!(def.min() > -1e-10 && def.max() < 1.0 + 1e-10);
            assert_eq!(def.zero_count, plus.len() + minus.len());
        }
    }

    #[test]
    fn support_function_examples() {
        assert!((support_function(&[1.0, 0.0, 0.0], dim(2)).unwrap() - 4.0).abs() < 1e-10);
        assert!((support_function(&[1.0, 1.0, 1.0], dim(2)).unwrap() - 8.0).abs() < 1e-10);
        assert!((support_function(&[0.0, 1.0, 0.0], dim(3)).unwrap() - 9.0).abs() < 1e-10);
    }

    #[test]
    fn support_state_attains_value() {
        let w = [0.6, 0.3, 0.1];
        let (h, psi) = support_state(&w, dim(2)).unwrap();
        let f = observable_f(&psi).unwrap();
        let val: f64 = w.iter().zip(&f).map(|(a, b)| a * b).sum();
        assert!((val - h).abs() < 1e-10);
        assert!((psi.norm_sqr() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sym_sector_at_three_outputs_matches_plus_family_size() {
        for d in [2, 3] {
            let s = sym_sector_1n(dim(d), 3).unwrap();
            assert_eq!(s.len(), phi_basis_13(dim(d), Sign::Plus).unwrap().len());
        }
    }

    #[test]
    fn gram_1n_is_psd() {
        let reg = Register::new(dim(2), ["0", "1", "2", "3"]).unwrap();
        let psi = haar_sample(&reg, 5, 0).scaled(C64::new(2f64.sqrt(), 0.0));
        let g = gram_1n(&psi).unwrap();
        assert_eq!(g.matrix.rows(), 3 * 4 + 1);
        assert!(g.min_eigenvalue > -1e-8);
    }

    #[test]
    fn sampled_bounds_hold() {
        for d in [2, 3] {
            for tag in [
                BoundTag::Ellipse12,
                BoundTag::PureState(Sign::Plus),
                BoundTag::PureState(Sign::Minus),
                BoundTag::SymmetricEllipsoid,
            ] {
                let r = verify_bound(tag, dim(d), 3, 100, 3, 1e-9).unwrap();
                assert!(r.passed(), "{tag:?} d={d}: {r:?}");
            }
            let r = verify_bound(BoundTag::Bound1N, dim(d), 3, 50, 3, 1e-9).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }
}
