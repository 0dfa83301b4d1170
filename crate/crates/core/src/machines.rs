//! Extremal cloning machines: the 1→3 pair `U±`, the 1→N family `U_α`,
//! and probabilistic mixtures of machines.
//!
//! Machines are isometries defined on the physical input `|m⟩⊗|0…0⟩`
//! only. No unitary completion is built; none of the observables need it.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ONE};
use crate::qudit::{
    binomial, symmetric_basis, Dim, Label, Operator, QuditPermutation, Register, StateVector,
};

/// Tolerance on the coefficient normalization constraints.
pub const COEFF_TOL: f64 = 1e-12;

/// Which of the two 1→3 machines: symmetric (`+`) or antisymmetric (`−`)
/// ancilla pairing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// `α² + β² + γ² ± (2/d)(αβ + βγ + γα)`.
pub fn quadratic_form3(raw: [f64; 3], sign: Sign, d: Dim) -> f64 {
    let [a, b, c] = raw;
    a * a + b * b + c * c + sign.value() * 2.0 / d.as_f64() * (a * b + b * c + c * a)
}

/// `Σ α_a² + (2/d) Σ_{a>b} α_a α_b`.
pub fn quadratic_form_n(raw: &[f64], d: Dim) -> f64 {
    let sum: f64 = raw.iter().sum();
    let sq: f64 = raw.iter().map(|a| a * a).sum();
    sq + (sum * sum - sq) / d.as_f64()
}

/// Coefficients `(α, β, γ)` of `U±`, normalized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coeffs3 {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub sign: Sign,
    pub d: Dim,
}

impl Coeffs3 {
    pub fn new(alpha: f64, beta: f64, gamma: f64, sign: Sign, d: Dim) -> Result<Self> {
        let c = Self {
            alpha,
            beta,
            gamma,
            sign,
            d,
        };
        let r = c.constraint_residual();
        if r.abs() > COEFF_TOL {
            return Err(Error::Unnormalized(r));
        }
        Ok(c)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    pub fn constraint_residual(&self) -> f64 {
        quadratic_form3(self.as_array(), self.sign, self.d) - 1.0
    }

    /// `x± = dα ± (β+γ)`, `y± = dβ ± (α+γ)`, `z± = dγ ± (α+β)`; signed.
    pub fn targets(&self) -> RootTargets {
        let d = self.d.as_f64();
        let s = self.sign.value();
        let [a, b, c] = self.as_array();
        RootTargets(alloc::vec![
            d * a + s * (b + c),
            d * b + s * (a + c),
            d * c + s * (a + b)
        ])
    }
}

/// Rescales `raw` onto the normalization ellipsoid of the chosen sign.
pub fn normalize_coeffs3(raw: [f64; 3], sign: Sign, d: Dim) -> Result<Coeffs3> {
    let q = quadratic_form3(raw, sign, d);
    if !(q > 1e-14) || !q.is_finite() {
        return Err(Error::NotNormalizable(q));
    }
    let s = 1.0 / libm::sqrt(q);
    Ok(Coeffs3 {
        alpha: raw[0] * s,
        beta: raw[1] * s,
        gamma: raw[2] * s,
        sign,
        d,
    })
}

/// Inverts `targets_from_coeffs`: solves `(d ∓ 1) c + (±1)(Σc) 1 = t`, then
/// renormalizes.
///
/// For the `−` machine at `d = 2` the system is singular along `(1,1,1)`,
/// which is a gauge direction there: targets with zero sum get the
/// minimum-norm solution, any other targets are rejected.
pub fn coeffs_from_targets(targets: [f64; 3], sign: Sign, d: Dim) -> Result<Coeffs3> {
    let df = d.as_f64();
    let s = sign.value();
    let sum: f64 = targets.iter().sum();
    let scale = targets.iter().map(|t| t.abs()).fold(0.0, f64::max).max(1.0);
    let lam_perp = df - s;
    let lam_par = df + 2.0 * s;
    let par = if lam_par.abs() < 1e-12 {
        if sum.abs() > 1e-9 * scale {
            return Err(Error::Singular);
        }
        0.0
    } else {
        sum / 3.0 / lam_par
    };
    let mean = sum / 3.0;
    let raw = [
        (targets[0] - mean) / lam_perp + par,
        (targets[1] - mean) / lam_perp + par,
        (targets[2] - mean) / lam_perp + par,
    ];
    normalize_coeffs3(raw, sign, d)
}

/// Coefficients `α_0 … α_{N-1}` of `U_α`, normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffsN {
    alphas: Vec<f64>,
    d: Dim,
}

impl CoeffsN {
    pub fn new(alphas: Vec<f64>, d: Dim) -> Result<Self> {
        if alphas.len() < 2 {
            return Err(Error::InvalidParameter("U_α needs at least two outputs"));
        }
        let c = Self { alphas, d };
        let r = c.constraint_residual();
        if r.abs() > COEFF_TOL {
            return Err(Error::Unnormalized(r));
        }
        Ok(c)
    }

    pub fn normalized(raw: &[f64], d: Dim) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::InvalidParameter("U_α needs at least two outputs"));
        }
        let q = quadratic_form_n(raw, d);
        if !(q > 1e-14) || !q.is_finite() {
            return Err(Error::NotNormalizable(q));
        }
        let s = 1.0 / libm::sqrt(q);
        Ok(Self {
            alphas: raw.iter().map(|a| a * s).collect(),
            d,
        })
    }

    /// The symmetric 1→N machine (all `α_a` equal).
    pub fn symmetric(n: usize, d: Dim) -> Result<Self> {
        Self::normalized(&alloc::vec![1.0; n], d)
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn n(&self) -> usize {
        self.alphas.len()
    }

    pub fn d(&self) -> Dim {
        self.d
    }

    pub fn constraint_residual(&self) -> f64 {
        quadratic_form_n(&self.alphas, self.d) - 1.0
    }

    /// `x_{a+1} = (d-1) α_a + Σ_b α_b`.
    pub fn targets(&self) -> RootTargets {
        let d = self.d.as_f64();
        let sum: f64 = self.alphas.iter().sum();
        RootTargets(self.alphas.iter().map(|a| (d - 1.0) * a + sum).collect())
    }
}

/// Signed root-fidelity targets `x_k`; the predicted `f_k` is `x_k²`.
#[derive(Clone, Debug, PartialEq)]
pub struct RootTargets(pub Vec<f64>);

impl RootTargets {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn squares(&self) -> Vec<f64> {
        self.0.iter().map(|x| x * x).collect()
    }
}

/// How a machine was built.
#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    Identity,
    U3(Coeffs3),
    UN(CoeffsN),
}

/// Isometry from one input qudit into outputs followed by ancillas.
#[derive(Clone, Debug)]
pub struct CloningMachine {
    isometry: CMatrix,
    register: Register,
    outputs: usize,
    provenance: Provenance,
}

impl CloningMachine {
    /// The 1→1 identity channel on a qudit labeled `A`.
    pub fn identity(d: Dim) -> Self {
        Self {
            isometry: CMatrix::identity(d.get()),
            register: Register::new(d, ["A"]).expect("single label"),
            outputs: 1,
            provenance: Provenance::Identity,
        }
    }

    pub fn d(&self) -> Dim {
        self.register.d()
    }

    pub fn isometry(&self) -> &CMatrix {
        &self.isometry
    }

    /// Outputs followed by ancillas.
    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn output_labels(&self) -> &[Label] {
        &self.register.labels()[..self.outputs]
    }

    pub fn ancilla_labels(&self) -> &[Label] {
        &self.register.labels()[self.outputs..]
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Largest entry of `|V†V - I|`.
    pub fn isometry_defect(&self) -> f64 {
        self.isometry.isometry_defect()
    }

    /// `V|ψ⟩` on outputs and ancillas.
    pub fn image(&self, input: &StateVector) -> Result<StateVector> {
        self.check_input(input)?;
        StateVector::new(
            self.register.clone(),
            self.isometry.mul_vec(input.amplitudes()),
        )
    }

    /// `Tr_anc V|ψ⟩⟨ψ|V†` on the outputs.
    pub fn output_state(&self, input: &StateVector) -> Result<Operator> {
        self.image(input)?.reduced(self.output_labels())
    }

    /// Reduced output state of a single output qudit.
    pub fn marginal(&self, input: &StateVector, output: usize) -> Result<Operator> {
        let label = self
            .output_labels()
            .get(output)
            .ok_or(Error::OutOfRange {
                index: output,
                bound: self.outputs,
            })?
            .clone();
        self.image(input)?.reduced(&[label])
    }

    fn check_input(&self, input: &StateVector) -> Result<()> {
        let d = self.d().get();
        if input.register().len() != 1 || input.d() != self.d() {
            return Err(Error::DimMismatch {
                expected: d,
                found: input.amplitudes().len(),
            });
        }
        Ok(())
    }
}

/// `U±|m⟩_A|0⟩_BCEF = (α + βY + γY²)|m⟩_A(|Φ⟩_BE|Φ⟩_CF ± |Φ⟩_CE|Φ⟩_BF) / √(2d(d±1))`
/// with `Y` moving the content of `A` to `B`, `B` to `C`, `C` to `A`.
pub fn build_u3(coeffs: &Coeffs3) -> Result<CloningMachine> {
    let r = coeffs.constraint_residual();
    if r.abs() > COEFF_TOL {
        return Err(Error::Unnormalized(r));
    }
    let d = coeffs.d;
    let dd = d.get();
    let s = coeffs.sign.value();
    let register = Register::new(d, ["A", "B", "C", "E", "F"])?;
    let y = QuditPermutation::cyclic(&register, &["A", "B", "C"])?.inverse();
    let y2 = y.after(&y);
    let norm = 1.0 / libm::sqrt(2.0 * d.as_f64() * (d.as_f64() + s));
    let mut columns = Vec::with_capacity(dd);
    for m in 0..dd {
        let mut base = StateVector::zeros(register.clone())?;
        {
            let amps = base.amplitudes_mut();
            for n in 0..dd {
                for k in 0..dd {
                    amps[register.index_of(&[m, n, k, n, k])] += ONE;
                    amps[register.index_of(&[m, k, n, n, k])] += C64::new(s, 0.0);
                }
            }
        }
        let mut col = base.scaled(C64::new(coeffs.alpha * norm, 0.0));
        col.add_scaled(C64::new(coeffs.beta * norm, 0.0), &y.apply(&base)?)?;
        col.add_scaled(C64::new(coeffs.gamma * norm, 0.0), &y2.apply(&base)?)?;
        columns.push(col.into_amplitudes());
    }
    let cols: Vec<&[C64]> = columns.iter().map(|c| c.as_slice()).collect();
    let isometry = CMatrix::from_columns(register.dim(), &cols)?;
    let machine = CloningMachine {
        isometry,
        register,
        outputs: 3,
        provenance: Provenance::U3(*coeffs),
    };
    if machine.isometry_defect() > 1e-8 {
        return Err(Error::Degenerate(
            "U± image is not an isometry for these coefficients",
        ));
    }
    Ok(machine)
}

fn un_labels(n: usize) -> Vec<String> {
    let mut labels: Vec<String> = (1..=n).map(|k| format!("{k}")).collect();
    labels.extend((2..=n).map(|k| format!("{k}'")));
    labels
}

/// `U_α|m⟩_1|0…0⟩ = Σ_a α_a X^a |m⟩_1 Σ_n |n⟩_{2…N}|n⟩_{2'…N'} / √C(d+N-2, N-1)`
/// with `n` running over the orthonormal symmetric basis of `N-1` qudits and
/// `X^a` moving the content of output 1 to output `1+a`.
pub fn build_un(coeffs: &CoeffsN) -> Result<CloningMachine> {
    let r = coeffs.constraint_residual();
    if r.abs() > COEFF_TOL {
        return Err(Error::Unnormalized(r));
    }
    let n = coeffs.n();
    let d = coeffs.d;
    let dd = d.get();
    let labels = un_labels(n);
    let register = Register::new(d, labels.iter().map(|s| s.as_str()))?;
    let outputs: Vec<&str> = labels[..n].iter().map(|s| s.as_str()).collect();
    let shift = QuditPermutation::cyclic(&register, &outputs)?.inverse();

    let sym_reg = Register::new(d, labels[1..n].iter().map(|s| s.as_str()))?;
    let anc_reg = Register::new(d, labels[n..].iter().map(|s| s.as_str()))?;
    let mut pairs = StateVector::zeros(sym_reg.concat(&anc_reg)?)?;
    for s in symmetric_basis(&sym_reg) {
        let anc = StateVector::new(anc_reg.clone(), s.amplitudes().to_vec())?;
        pairs.add_scaled(ONE, &s.tensor(&anc)?)?;
    }
    let norm = 1.0 / libm::sqrt(binomial(dd + n - 2, n - 1) as f64);
    let head = Register::new(d, [labels[0].as_str()])?;

    let mut columns = Vec::with_capacity(dd);
    for m in 0..dd {
        let base = StateVector::basis(head.clone(), &[m])?.tensor(&pairs)?;
        let mut col = StateVector::zeros(register.clone())?;
        let mut shifted = base;
        for &alpha in coeffs.alphas() {
            if alpha != 0.0 {
                col.add_scaled(C64::new(alpha * norm, 0.0), &shifted)?;
            }
            shifted = shift.apply(&shifted)?;
        }
        columns.push(col.into_amplitudes());
    }
    let cols: Vec<&[C64]> = columns.iter().map(|c| c.as_slice()).collect();
    let isometry = CMatrix::from_columns(register.dim(), &cols)?;
    let machine = CloningMachine {
        isometry,
        register,
        outputs: n,
        provenance: Provenance::UN(coeffs.clone()),
    };
    if machine.isometry_defect() > 1e-8 {
        return Err(Error::Degenerate("U_α image is not an isometry"));
    }
    Ok(machine)
}

/// Anything that acts as a weighted set of cloning isometries.
pub trait Channel {
    fn branches(&self) -> Vec<(f64, &CloningMachine)>;

    fn output_labels(&self) -> &[Label];

    fn d(&self) -> Dim;
}

impl Channel for CloningMachine {
    fn branches(&self) -> Vec<(f64, &CloningMachine)> {
        alloc::vec![(1.0, self)]
    }

    fn output_labels(&self) -> &[Label] {
        CloningMachine::output_labels(self)
    }

    fn d(&self) -> Dim {
        CloningMachine::d(self)
    }
}

/// Applies `machine_1` with probability `w_1`, `machine_2` with `w_2`, ...
#[derive(Clone, Debug)]
pub struct MachineMixture {
    components: Vec<(f64, CloningMachine)>,
}

impl MachineMixture {
    pub fn new(components: Vec<(f64, CloningMachine)>) -> Result<Self> {
        let first = components.first().ok_or(Error::InvalidParameter(
            "mixture needs at least one machine",
        ))?;
        let (d, outs) = (first.1.d(), first.1.output_labels().to_vec());
        let mut total = 0.0;
        for (w, m) in &components {
            if !(*w >= 0.0) {
                return Err(Error::InvalidParameter(
                    "mixture weights must be non-negative",
                ));
            }
            if m.d() != d || m.output_labels() != outs.as_slice() {
                return Err(Error::InvalidParameter(
                    "mixture components must share dimension and output labels",
                ));
            }
            total += w;
        }
        if (total - 1.0).abs() > COEFF_TOL {
            return Err(Error::InvalidParameter("mixture weights must sum to 1"));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[(f64, CloningMachine)] {
        &self.components
    }

    pub fn weights(&self) -> Vec<f64> {
        self.components.iter().map(|(w, _)| *w).collect()
    }
}

impl Channel for MachineMixture {
    fn branches(&self) -> Vec<(f64, &CloningMachine)> {
        self.components.iter().map(|(w, m)| (*w, m)).collect()
    }

    fn output_labels(&self) -> &[Label] {
        self.components[0].1.output_labels()
    }

    fn d(&self) -> Dim {
        self.components[0].1.d()
    }
}

/// Output density operator of `channel` on `input` (ancillas traced out).
pub fn apply<C: Channel + ?Sized>(channel: &C, input: &StateVector) -> Result<Operator> {
    let mut acc: Option<Operator> = None;
    for (w, m) in channel.branches() {
        let rho = m.output_state(input)?;
        acc = Some(match acc {
            None => rho.scaled(w),
            Some(a) => a.plus_scaled(w, &rho)?,
        });
    }
    acc.ok_or(Error::InvalidParameter("empty channel"))
}

/// Root-coordinate position `q` of an f-space mixture: the solution of
/// `(q r_g + (1-q) r_b)² = p r_g² + (1-p) r_b²` with `r ≥ 0`.
///
/// Returns `p` itself when `r_g = r_b` (every `q` works there).
pub fn root_position(p: f64, r_g: f64, r_b: f64) -> Option<f64> {
    if (r_g - r_b).abs() < 1e-12 {
        return Some(p);
    }
    let target = p * r_g * r_g + (1.0 - p) * r_b * r_b;
    if target < 0.0 {
        return None;
    }
    let q = (libm::sqrt(target) - r_b) / (r_g - r_b);
    if !(-1e-12..=1.0 + 1e-12).contains(&q) {
        return None;
    }
    Some(q.clamp(0.0, 1.0))
}

/// A two-machine mixture hitting a target f-point on the segment between
/// the endpoints' f-points.
#[derive(Clone, Debug)]
pub struct MixtureSolution {
    pub mixture: MachineMixture,
    /// Probability of the first endpoint machine (the f-space weight).
    pub p: f64,
    /// Per output: root-coordinate position `q` of the target between the
    /// endpoints, `None` where the endpoints agree.
    pub q: Vec<Option<f64>>,
    pub target: Vec<f64>,
}

/// Mixture of `g` (probability `p`) and `b` (probability `1-p`) reaching
/// `p f_g + (1-p) f_b`.
pub fn mixture_for_parameter(
    p: f64,
    g: (&CloningMachine, &[f64]),
    b: (&CloningMachine, &[f64]),
) -> Result<MixtureSolution> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InfeasibleMixture(
            "convexity parameter outside [0, 1]",
        ));
    }
    let (fg, fb) = (g.1, b.1);
    if fg.len() != fb.len() || fg.len() != g.0.output_labels().len() {
        return Err(Error::DimMismatch {
            expected: g.0.output_labels().len(),
            found: fb.len(),
        });
    }
    let target: Vec<f64> = fg
        .iter()
        .zip(fb)
        .map(|(x, y)| p * x + (1.0 - p) * y)
        .collect();
    let mut q = Vec::with_capacity(fg.len());
    for (&x, &y) in fg.iter().zip(fb) {
        let (rg, rb) = (libm::sqrt(x.max(0.0)), libm::sqrt(y.max(0.0)));
        if (rg - rb).abs() < 1e-12 {
            q.push(None);
        } else {
            let v = root_position(p, rg, rb)
                .ok_or(Error::InfeasibleMixture("no root position in [0, 1]"))?;
            q.push(Some(v));
        }
    }
    let mixture = MachineMixture::new(alloc::vec![(p, g.0.clone()), (1.0 - p, b.0.clone())])?;
    Ok(MixtureSolution {
        mixture,
        p,
        q,
        target,
    })
}

/// Like [`mixture_for_parameter`], recovering `p` from a target f-point.
/// The target must lie on the segment between the endpoint f-points.
pub fn mixture_for_target(
    target: &[f64],
    g: (&CloningMachine, &[f64]),
    b: (&CloningMachine, &[f64]),
) -> Result<MixtureSolution> {
    let (fg, fb) = (g.1, b.1);
    if target.len() != fg.len() || fg.len() != fb.len() {
        return Err(Error::DimMismatch {
            expected: fg.len(),
            found: target.len(),
        });
    }
    let span: Vec<f64> = fg.iter().zip(fb).map(|(x, y)| x - y).collect();
    let len2: f64 = span.iter().map(|s| s * s).sum();
    let scale = fg.iter().chain(fb).map(|v| v.abs()).fold(1.0, f64::max);
    let p = if len2 < 1e-24 {
        1.0
    } else {
        target
            .iter()
            .zip(fb)
            .zip(&span)
            .map(|((t, y), s)| (t - y) * s)
            .sum::<f64>()
            / len2
    };
    if !(-1e-12..=1.0 + 1e-12).contains(&p) {
        return Err(Error::InfeasibleMixture(
            "target outside the endpoint segment",
        ));
    }
    let p = p.clamp(0.0, 1.0);
    let off: f64 = target
        .iter()
        .zip(fg.iter().zip(fb))
        .map(|(t, (x, y))| (t - (p * x + (1.0 - p) * y)).abs())
        .fold(0.0, f64::max);
    if off > 1e-9 * scale {
        return Err(Error::InfeasibleMixture(
            "target is not on the endpoint segment",
        ));
    }
    let mut sol = mixture_for_parameter(p, g, b)?;
    sol.target = target.to_vec();
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::haar_state;
    use proptest::prelude::*;

    fn dim(d: usize) -> Dim {
        Dim::new(d).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let c = normalize_coeffs3([1.0, 1.0, 1.0], Sign::Plus, dim(2)).unwrap();
        let e = 1.0 / 6f64.sqrt();
        assert!((c.alpha - e).abs() < 1e-15 && (c.gamma - e).abs() < 1e-15);
        for sign in [Sign::Plus, Sign::Minus] {
            let c = normalize_coeffs3([1.0, 0.0, 0.0], sign, dim(3)).unwrap();
            assert_eq!(c.as_array(), [1.0, 0.0, 0.0]);
        }
        let c = normalize_coeffs3([1.0, 1.0, 1.0], Sign::Minus, dim(3)).unwrap();
        assert!((c.alpha - 1.0).abs() < 1e-15);
        // Q = 3 - 3 = 0 for the minus sign at d = 2
        assert!(matches!(
            normalize_coeffs3([1.0, 1.0, 1.0], Sign::Minus, dim(2)),
            Err(Error::NotNormalizable(_))
        ));
    }

    #[test]
    fn unnormalized_coeffs_rejected() {
        assert!(matches!(
            Coeffs3::new(1.0, 1.0, 0.0, Sign::Plus, dim(2)),
            Err(Error::Unnormalized(_))
        ));
        assert!(CoeffsN::new(std::vec![1.0, 0.0], dim(2)).is_ok());
        assert!(CoeffsN::new(std::vec![1.0], dim(2)).is_err());
    }

    #[test]
    fn targets_examples() {
        let c = normalize_coeffs3([1.0, 1.0, 1.0], Sign::Plus, dim(2)).unwrap();
        for x in c.targets().values() {
            assert!((x - 4.0 / 6f64.sqrt()).abs() < 1e-15);
        }
        for x in c.targets().squares() {
            assert!((x - 8.0 / 3.0).abs() < 1e-14);
        }
        let t = Coeffs3::new(1.0, 0.0, 0.0, Sign::Plus, dim(2))
            .unwrap()
            .targets();
        assert_eq!(t.values(), &[2.0, 1.0, 1.0]);
        let t = CoeffsN::new(std::vec![1.0, 0.0], dim(2)).unwrap().targets();
        assert_eq!(t.values(), &[2.0, 1.0]);
    }

    #[test]
    fn minus_sign_at_d2_has_a_gauge_direction() {
        let c = normalize_coeffs3([0.7, -0.1, 0.2], Sign::Minus, dim(2)).unwrap();
        let t = c.targets();
        // x_- + y_- + z_- = (d - 2)(α + β + γ) = 0
        assert!(t.values().iter().sum::<f64>().abs() < 1e-14);
        let back = coeffs_from_targets([t.0[0], t.0[1], t.0[2]], Sign::Minus, dim(2)).unwrap();
        let t2 = back.targets();
        for (a, b) in t.values().iter().zip(t2.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(
            coeffs_from_targets([1.0, 0.5, 0.2], Sign::Minus, dim(2)),
            Err(Error::Singular)
        );
    }

    #[test]
    fn u3_isometry_and_labels() {
        let c = normalize_coeffs3([0.4, -0.3, 0.9], Sign::Minus, dim(3)).unwrap();
        let m = build_u3(&c).unwrap();
        assert!(m.isometry_defect() < 1e-12);
        assert_eq!(m.isometry().rows(), 243);
        let outs: Vec<&str> = m.output_labels().iter().map(|l| l.as_str()).collect();
        assert_eq!(outs, ["A", "B", "C"]);
        assert_eq!(m.ancilla_labels().len(), 2);
    }

    #[test]
    fn un_isometry_small_cases() {
        for (n, d) in [(2, 2), (2, 3), (3, 2), (4, 2), (3, 3)] {
            let c = CoeffsN::normalized(&[0.9, -0.2, 0.5, 0.1][..n], dim(d)).unwrap();
            let m = build_un(&c).unwrap();
            assert!(m.isometry_defect() < 1e-12, "(N,d)=({n},{d})");
        }
    }

    #[test]
    fn trivial_cloner_keeps_input_on_first_output() {
        let c = Coeffs3::new(1.0, 0.0, 0.0, Sign::Plus, dim(2)).unwrap();
        let m = build_u3(&c).unwrap();
        let psi = haar_state(&Register::new(dim(2), ["in"]).unwrap(), 3);
        let rho_a = m.marginal(&psi, 0).unwrap();
        let expect = CMatrix::from_fn(2, 2, |i, j| {
            psi.amplitudes()[i] * psi.amplitudes()[j].conj()
        });
        assert!(rho_a.matrix().max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn symmetric_u3_marginal_on_zero() {
        // each output is F|0⟩⟨0| + (1-F)|1⟩⟨1| with F = 7/9
        let c = normalize_coeffs3([1.0, 1.0, 1.0], Sign::Plus, dim(2)).unwrap();
        let m = build_u3(&c).unwrap();
        let zero = StateVector::basis(Register::new(dim(2), ["in"]).unwrap(), &[0]).unwrap();
        for k in 0..3 {
            let rho = m.marginal(&zero, k).unwrap();
            assert!((rho.matrix()[(0, 0)].re - 7.0 / 9.0).abs() < 1e-12);
            assert!((rho.matrix()[(1, 1)].re - 2.0 / 9.0).abs() < 1e-12);
            assert!(rho.matrix()[(0, 1)].norm() < 1e-12);
        }
    }

    #[test]
    fn output_trace_is_one() {
        let c = normalize_coeffs3([0.2, 0.5, -0.1], Sign::Plus, dim(3)).unwrap();
        let m = build_u3(&c).unwrap();
        let r = Register::new(dim(3), ["in"]).unwrap();
        for seed in 0..5 {
            let rho = apply(&m, &haar_state(&r, seed)).unwrap();
            assert!((rho.trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mixture_validation() {
        let m = CloningMachine::identity(dim(2));
        assert!(MachineMixture::new(std::vec![(0.5, m.clone()), (0.4, m.clone())]).is_err());
        assert!(MachineMixture::new(std::vec![(-0.5, m.clone()), (1.5, m.clone())]).is_err());
        let u = build_un(&CoeffsN::symmetric(2, dim(2)).unwrap()).unwrap();
        assert!(MachineMixture::new(std::vec![(0.5, m), (0.5, u)]).is_err());
    }

    #[test]
    fn root_position_examples() {
        assert_eq!(root_position(0.0, 3f64.sqrt(), 1.0), Some(0.0));
        assert!((root_position(1.0, 3f64.sqrt(), 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(root_position(0.3, 1.2, 1.2), Some(0.3));
        let q = root_position(0.5, 3f64.sqrt(), 1.0).unwrap();
        let expect = (2f64.sqrt() - 1.0) / (3f64.sqrt() - 1.0);
        assert!((q - expect).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn coeffs_target_round_trip(
            a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, minus in any::<bool>()
        ) {
            let sign = if minus { Sign::Minus } else { Sign::Plus };
            let d = dim(3);
            prop_assume!(quadratic_form3([a, b, c], sign, d) > 1e-3);
            let k = normalize_coeffs3([a, b, c], sign, d).unwrap();
            let t = k.targets();
            let back = coeffs_from_targets([t.0[0], t.0[1], t.0[2]], sign, d).unwrap();
            let s = if back.alpha * k.alpha + back.beta * k.beta + back.gamma * k.gamma < 0.0 { -1.0 } else { 1.0 };
            prop_assert!((s * back.alpha - k.alpha).abs() < 1e-10);
            prop_assert!((s * back.beta - k.beta).abs() < 1e-10);
            prop_assert!((s * back.gamma - k.gamma).abs() < 1e-10);
        }

        #[test]
        fn u3_is_an_isometry(
            a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0,
            minus in any::<bool>(), d in 2usize..4
        ) {
            let sign = if minus { Sign::Minus } else { Sign::Plus };
            prop_assume!(quadratic_form3([a, b, c], sign, dim(d)) > 1e-3);
            let k = normalize_coeffs3([a, b, c], sign, dim(d)).unwrap();
            prop_assert!(build_u3(&k).unwrap().isometry_defect() < 1e-10);
        }
    }
}
