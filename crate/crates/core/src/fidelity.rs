//! Choi states and fidelity accounting.
//!
//! `f_α = Tr(Q Φ_{Rα})` is the stored quantity; `F = (d + f) / (d (d + 1))`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::machines::{Channel, Coeffs3, CoeffsN, Provenance};
use crate::qudit::{haar_sample, max_entangled, Dim, Label, Operator, Register, StateVector};

/// Label of the reference qudit in every Choi state.
pub const REFERENCE: &str = "R";

/// `F = (d + f) / (d (d + 1))`.
pub fn fidelity_from_f(f: f64, d: Dim) -> f64 {
    let d = d.as_f64();
    (d + f) / (d * (d + 1.0))
}

/// Inverse of [`fidelity_from_f`].
pub fn f_from_fidelity(fid: f64, d: Dim) -> f64 {
    let d = d.as_f64();
    fid * d * (d + 1.0) - d
}

/// `f` of the symmetric 1→N cloner: `d (d + N - 1) / N`.
pub fn symmetric_f(d: Dim, n: usize) -> f64 {
    let d = d.as_f64();
    d * (d + n as f64 - 1.0) / n as f64
}

/// `F` of the symmetric 1→N cloner: `(2N + d - 1) / (N (d + 1))`.
pub fn symmetric_fidelity(d: Dim, n: usize) -> f64 {
    let (d, n) = (d.as_f64(), n as f64);
    (2.0 * n + d - 1.0) / (n * (d + 1.0))
}

/// `Q = Tr_anc (I_R ⊗ V) Φ (I_R ⊗ V)†` on the reference followed by the outputs.
#[derive(Clone, Debug)]
pub struct ChoiState {
    q: Operator,
    outputs: Vec<Label>,
}

/// How far a Choi state is from its defining properties.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChoiDefects {
    /// `|Tr Q - d|`.
    pub trace: f64,
    /// Smallest eigenvalue of `Q`.
    pub min_eigenvalue: f64,
    /// `max |Tr_outputs Q - I|`.
    pub reference: f64,
}

impl ChoiState {
    pub fn operator(&self) -> &Operator {
        &self.q
    }

    pub fn d(&self) -> Dim {
        self.q.register().d()
    }

    pub fn output_labels(&self) -> &[Label] {
        &self.outputs
    }

    /// Two-qudit marginal `Q_{Rα}` for output index `k`.
    pub fn pair_marginal(&self, k: usize) -> Result<Operator> {
        let label = self.outputs.get(k).ok_or(Error::OutOfRange {
            index: k,
            bound: self.outputs.len(),
        })?;
        self.q.partial_trace(&[REFERENCE, label.as_str()])
    }

    pub fn defects(&self) -> Result<ChoiDefects> {
        let d = self.d();
        let reference = self.q.partial_trace(&[REFERENCE])?;
        let id = crate::linalg::CMatrix::identity(d.get());
        Ok(ChoiDefects {
            trace: (self.q.trace().re - d.as_f64()).abs(),
            min_eigenvalue: self.q.min_eigenvalue()?,
            reference: reference.matrix().max_abs_diff(&id),
        })
    }

    /// Fails with the offending number if any defect exceeds `tol`.
    pub fn check(&self, tol: f64) -> Result<()> {
        let def = self.defects()?;
        if def.min_eigenvalue < -tol {
            return Err(Error::Degenerate("Choi state is not positive"));
        }
        if def.trace > tol || def.reference > tol {
            return Err(Error::Unnormalized(def.trace.max(def.reference)));
        }
        Ok(())
    }
}

/// Choi state of a machine or a mixture of machines.
pub fn choi_of<C: Channel + ?Sized>(channel: &C) -> Result<ChoiState> {
    let outputs = channel.output_labels().to_vec();
    let mut keep: Vec<&str> = Vec::with_capacity(outputs.len() + 1);
    keep.push(REFERENCE);
    keep.extend(outputs.iter().map(|l| l.as_str()));
    let mut acc: Option<Operator> = None;
    for (w, m) in channel.branches() {
        let d = m.d().get();
        let reference = Register::new(m.d(), [REFERENCE])?;
        let full = reference.concat(m.register())?;
        let inner = m.register().dim();
        let mut chi = StateVector::zeros(full)?;
        {
            let amps = chi.amplitudes_mut();
            let v = m.isometry();
            for r in 0..d {
                for i in 0..inner {
                    amps[r * inner + i] = v[(i, r)];
                }
            }
        }
        let q = chi.reduced(&keep)?;
        acc = Some(match acc {
            None => q.scaled(w),
            Some(a) => a.plus_scaled(w, &q)?,
        });
    }
    let q = acc.ok_or(Error::InvalidParameter("empty channel"))?;
    Ok(ChoiState { q, outputs })
}

/// Per-output fidelities, with Monte Carlo spread when sampled.
#[derive(Clone, Debug, PartialEq)]
pub struct FidelityReport {
    pub d: Dim,
    pub f: Vec<f64>,
    pub fidelity: Vec<f64>,
    /// Sample variance of the per-input fidelity (Monte Carlo only).
    pub variance: Option<Vec<f64>>,
    /// Standard error of the mean (Monte Carlo only).
    pub standard_error: Option<Vec<f64>>,
    pub samples: usize,
}

impl FidelityReport {
    pub fn from_f(f: Vec<f64>, d: Dim) -> Self {
        let fidelity = f.iter().map(|&v| fidelity_from_f(v, d)).collect();
        Self {
            d,
            f,
            fidelity,
            variance: None,
            standard_error: None,
            samples: 0,
        }
    }
}

/// `f_α = ⟨Φ|Q_{Rα}|Φ⟩` for every output.
pub fn f_values(choi: &ChoiState) -> Result<FidelityReport> {
    let d = choi.d();
    let mut f = Vec::with_capacity(choi.outputs.len());
    for (k, label) in choi.outputs.iter().enumerate() {
        let phi = max_entangled(d, (REFERENCE, label.as_str()))?;
        let pair = choi.pair_marginal(k)?;
        f.push(phi.expectation(&pair)?.re);
    }
    Ok(FidelityReport::from_f(f, d))
}

/// `⟨ψ|ρ_α|ψ⟩` for each output of one input sample.
pub fn sample_fidelities<C: Channel + ?Sized>(
    channel: &C,
    input: &StateVector,
) -> Result<Vec<f64>> {
    let outputs = channel.output_labels();
    let mut out = alloc::vec![0.0; outputs.len()];
    let psi = input.amplitudes();
    for (w, m) in channel.branches() {
        let image = m.image(input)?;
        for (k, label) in outputs.iter().enumerate() {
            let rho = image.reduced(&[label.as_str()])?;
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..psi.len() {
                for j in 0..psi.len() {
                    acc += psi[i].conj() * rho.matrix()[(i, j)] * psi[j];
                }
            }
            out[k] += w * acc.re;
        }
    }
    Ok(out)
}

/// Monte Carlo average of the per-input fidelity over Haar inputs.
///
/// Sample `k` uses stream `k` of `seed`, so any sharding of `0..samples`
/// sees the same inputs.
pub fn haar_average_fidelity<C: Channel + ?Sized>(
    channel: &C,
    samples: usize,
    seed: u64,
) -> Result<FidelityReport> {
    if samples < 2 {
        return Err(Error::InvalidParameter(
            "Haar average needs at least two samples",
        ));
    }
    let d = channel.d();
    let input = Register::new(d, ["in"])?;
    let n_out = channel.output_labels().len();
    let rows: Vec<Vec<f64>> = (0..samples)
        .map(|k| sample_fidelities(channel, &haar_sample(&input, seed, k as u64)))
        .collect::<Result<_>>()?;
    let n = samples as f64;
    let mut mean = alloc::vec![0.0; n_out];
    for row in &rows {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v / n;
        }
    }
    let mut var = alloc::vec![0.0; n_out];
    for row in &rows {
        for k in 0..n_out {
            let dv = row[k] - mean[k];
            var[k] += dv * dv / (n - 1.0);
        }
    }
    let se = var.iter().map(|v| libm::sqrt(v / n)).collect();
    let f = mean.iter().map(|&m| f_from_fidelity(m, d)).collect();
    Ok(FidelityReport {
        d,
        f,
        fidelity: mean,
        variance: Some(var),
        standard_error: Some(se),
        samples,
    })
}

/// `f = x²` for `U±`.
pub fn closed_form_f3(c: &Coeffs3) -> Vec<f64> {
    c.targets().squares()
}

/// `f_a = x_a²` for `U_α`.
pub fn closed_form_fn(c: &CoeffsN) -> Vec<f64> {
    c.targets().squares()
}

/// Closed-form prediction for a machine of known provenance.
pub fn closed_form_f(p: &Provenance, d: Dim) -> Vec<f64> {
    match p {
        Provenance::Identity => alloc::vec![d.as_f64() * d.as_f64()],
        Provenance::U3(c) => closed_form_f3(c),
        Provenance::UN(c) => closed_form_fn(c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::{
        build_u3, build_un, mixture_for_parameter, normalize_coeffs3, CloningMachine,
        MachineMixture, Sign,
    };

    fn dim(d: usize) -> Dim {
        Dim::new(d).unwrap()
    }

    #[test]
    fn identity_channel() {
        let m = CloningMachine::identity(dim(3));
        let c = choi_of(&m).unwrap();
        c.check(1e-12).unwrap();
        let r = f_values(&c).unwrap();
        assert!((r.f[0] - 9.0).abs() < 1e-12);
        assert!((r.fidelity[0] - 1.0).abs() < 1e-15);
        let h = haar_average_fidelity(&m, 20, 1).unwrap();
        assert!((h.fidelity[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trivial_u3_marginals() {
        let c = crate::machines::Coeffs3::new(1.0, 0.0, 0.0, Sign::Plus, dim(2)).unwrap();
        let choi = choi_of(&build_u3(&c).unwrap()).unwrap();
        let qrb = choi.pair_marginal(1).unwrap();
        let expect = crate::linalg::CMatrix::identity(4).scale_re(0.5);
        assert!(qrb.matrix().max_abs_diff(&expect) < 1e-12);
        let f = f_values(&choi).unwrap().f;
        assert!((f[0] - 4.0).abs() < 1e-12 && (f[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_values() {
        let m = build_un(&CoeffsN::symmetric(2, dim(2)).unwrap()).unwrap();
        let r = f_values(&choi_of(&m).unwrap()).unwrap();
        for k in 0..2 {
            assert!((r.f[k] - 3.0).abs() < 1e-12);
            assert!((r.fidelity[k] - 5.0 / 6.0).abs() < 1e-12);
        }
        let c = normalize_coeffs3([1.0, 1.0, 1.0], Sign::Plus, dim(3)).unwrap();
        let r = f_values(&choi_of(&build_u3(&c).unwrap()).unwrap()).unwrap();
        for k in 0..3 {
            assert!((r.fidelity[k] - 2.0 / 3.0).abs() < 1e-12);
        }
        assert!((symmetric_fidelity(dim(3), 5) - 0.6).abs() < 1e-15);
        assert!((symmetric_f(dim(3), 5) - 21.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_choi_for_mixed_signs() {
        for (raw, sign, d) in [
            ([0.3, -0.2, 0.9], Sign::Plus, 2),
            ([0.5, 0.4, -0.6], Sign::Minus, 3),
            ([-0.1, 0.8, 0.2], Sign::Minus, 2),
        ] {
            let c = normalize_coeffs3(raw, sign, dim(d)).unwrap();
            let r = f_values(&choi_of(&build_u3(&c).unwrap()).unwrap()).unwrap();
            for (a, b) in r.f.iter().zip(closed_form_f3(&c)) {
                assert!((a - b).abs() < 1e-10, "{raw:?} {sign:?} {d}: {a} vs {b}");
            }
        }
        let c = CoeffsN::normalized(&[0.8, 0.1, -0.3], dim(2)).unwrap();
        let r = f_values(&choi_of(&build_un(&c).unwrap()).unwrap()).unwrap();
        for (a, b) in r.f.iter().zip(closed_form_fn(&c)) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn haar_mean_matches_choi() {
        let c = CoeffsN::normalized(&[0.8, 0.3, 0.1], dim(2)).unwrap();
        let m = build_un(&c).unwrap();
        let exact = f_values(&choi_of(&m).unwrap()).unwrap();
        let h = haar_average_fidelity(&m, 200, 11).unwrap();
        for k in 0..3 {
            assert!((h.fidelity[k] - exact.fidelity[k]).abs() < 1e-12);
            assert!(h.variance.as_ref().unwrap()[k] < 1e-18);
        }
    }

    #[test]
    fn mixture_choi_is_affine() {
        let d = dim(2);
        let g = build_u3(&normalize_coeffs3([1.0, 1.0, 1.0], Sign::Plus, d).unwrap()).unwrap();
        let b = build_u3(&normalize_coeffs3([1.0, 0.0, 0.2], Sign::Plus, d).unwrap()).unwrap();
        let fg = f_values(&choi_of(&g).unwrap()).unwrap().f;
        let fb = f_values(&choi_of(&b).unwrap()).unwrap().f;
        let mix = MachineMixture::new(std::vec![(0.3, g.clone()), (0.7, b.clone())]).unwrap();
        let choi = choi_of(&mix).unwrap();
        choi.check(1e-10).unwrap();
        let fm = f_values(&choi).unwrap().f;
        for k in 0..3 {
            assert!((fm[k] - (0.3 * fg[k] + 0.7 * fb[k])).abs() < 1e-10);
        }
    }

    #[test]
    fn qubit_mixture_example() {
        // endpoints with f_B = 3 and f_B = 1, mixed at p = 1/2
        let d = dim(2);
        let g = build_un(&CoeffsN::symmetric(2, d).unwrap()).unwrap();
        let b = build_un(&CoeffsN::new(std::vec![1.0, 0.0], d).unwrap()).unwrap();
        let fg = f_values(&choi_of(&g).unwrap()).unwrap().f;
        let fb = f_values(&choi_of(&b).unwrap()).unwrap().f;
        let sol = mixture_for_parameter(0.5, (&g, &fg), (&b, &fb)).unwrap();
        let q = sol.q[1].unwrap();
        assert!((q - (2f64.sqrt() - 1.0) / (3f64.sqrt() - 1.0)).abs() < 1e-12);
        let fm = f_values(&choi_of(&sol.mixture).unwrap()).unwrap().f;
        assert!((fm[1] - 2.0).abs() < 1e-12);
    }
}
