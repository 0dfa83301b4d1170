//! The `verify` suite: every property check from the library, one row each.

use aucm_core::banaszek::{tradeoff_residual, TwoFidelityParams};
use aucm_core::boundary::{
    antisymmetric_ellipsoid_residual, bound_1n, ellipse_residual, hull, sphere_cap, surface_coeffs,
    symmetric_ellipsoid_residual, Axis, ComponentKind, Hull,
};
use aucm_core::fidelity::{choi_of, closed_form_f, f_values, haar_average_fidelity, symmetric_f};
use aucm_core::machines::{
    build_u3, build_un, mixture_for_target, normalize_coeffs3, CloningMachine, CoeffsN, Sign,
};
use aucm_core::oracle::{
    cross_elements, gram_1n, incompleteness_deficit, phi_basis_12, phi_basis_13, support_function,
    verify_bound, BoundTag,
};
use aucm_core::qudit::haar_sample;
use aucm_core::{Dim, Register, C64};
use clap::Args;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde_json::json;

use crate::commands::{dim, write};
use crate::emit::Table;
use crate::{Cli, CliError, VerifyArgs};

#[derive(Args, Debug, Clone)]
pub struct Tolerances {
    /// Surface equalities and bound violations.
    #[arg(long, default_value_t = 1e-9)]
    pub equality_tol: f64,
    /// Isometry, closed-form and subspace identities.
    #[arg(long, default_value_t = 1e-10)]
    pub identity_tol: f64,
    /// Per-output fidelity variance over Haar inputs.
    #[arg(long, default_value_t = 1e-18)]
    pub variance_tol: f64,
    /// Relative gap between the eigenvalue support and the hull mesh.
    #[arg(long, default_value_t = 1e-3)]
    pub support_tol: f64,
    /// Gram matrix positivity.
    #[arg(long, default_value_t = 1e-8)]
    pub gram_tol: f64,
}

struct Check {
    name: &'static str,
    d: usize,
    n: usize,
    trials: usize,
    value: f64,
    tol: f64,
    /// `value ≤ tol` unless the check is of the form `value ≥ tol`.
    at_least: bool,
}

impl Check {
    fn passed(&self) -> bool {
        if self.at_least {
            self.value >= self.tol
        } else {
            self.value <= self.tol
        }
    }
}

struct Rng(ChaCha8Rng);

impl Rng {
    fn new(seed: u64, stream: u64) -> Self {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        r.set_stream(stream);
        Rng(r)
    }

    fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn signed(&mut self) -> f64 {
        2.0 * self.unit() - 1.0
    }
}

fn choi_f(m: &CloningMachine) -> Result<Vec<f64>, CliError> {
    Ok(f_values(&choi_of(m)?)?.f)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

struct Suite<'a> {
    d: Dim,
    trials: usize,
    seed: u64,
    resolution: usize,
    tol: &'a Tolerances,
    checks: Vec<Check>,
}

impl Suite<'_> {
    fn push(&mut self, name: &'static str, n: usize, trials: usize, value: f64, tol: f64) {
        self.checks.push(Check {
            name,
            d: self.d.get(),
            n,
            trials,
            value,
            tol,
            at_least: false,
        });
    }

    fn push_at_least(&mut self, name: &'static str, n: usize, trials: usize, value: f64, tol: f64) {
        self.checks.push(Check {
            name,
            d: self.d.get(),
            n,
            trials,
            value,
            tol,
            at_least: true,
        });
    }

    fn rng(&self, stream: u64) -> Rng {
        Rng::new(self.seed, stream + 1000 * self.d.get() as u64)
    }

    fn machines(&mut self) -> Result<(), CliError> {
        let d = self.d;
        let idt = self.tol.identity_tol;
        for n in 2..=4 {
            let m = build_un(&CoeffsN::symmetric(n, d)?)?;
            let expect = symmetric_f(d, n);
            let got = choi_f(&m)?;
            self.push(
                "symmetric_fidelity",
                n,
                1,
                got.iter().map(|f| (f - expect).abs()).fold(0.0, f64::max),
                idt,
            );
        }

        let mut r = self.rng(1);
        let count = self.trials.min(200);
        let (mut iso, mut closed): (f64, f64) = (0.0, 0.0);
        let mut built = 0;
        for sign in [Sign::Plus, Sign::Minus] {
            let mut done = 0;
            let mut draws = 0;
            while done < count && draws < 100 * count {
                draws += 1;
                let Ok(c) = normalize_coeffs3([r.signed(), r.signed(), r.signed()], sign, d) else {
                    continue;
                };
                let m = build_u3(&c)?;
                iso = iso.max(m.isometry_defect());
                if done < 20 {
                    closed = closed.max(max_diff(&choi_f(&m)?, &closed_form_f(m.provenance(), d)));
                }
                done += 1;
                built += 1;
            }
        }
        for n in 2..=4 {
            for k in 0..count.min(50) {
                let raw: Vec<f64> = (0..n).map(|_| r.signed()).collect();
                let m = build_un(&CoeffsN::normalized(&raw, d)?)?;
                iso = iso.max(m.isometry_defect());
                if k < 5 {
                    closed = closed.max(max_diff(&choi_f(&m)?, &closed_form_f(m.provenance(), d)));
                }
                built += 1;
            }
        }
        self.push("isometry", 0, built, iso, idt);
        self.push("closed_form_vs_choi", 0, built, closed, idt);

        let mut var: f64 = 0.0;
        let mut machines = vec![
            build_u3(&normalize_coeffs3([1.0, 1.0, 1.0], Sign::Plus, d)?)?,
            build_u3(&normalize_coeffs3([0.9, -0.2, 0.4], Sign::Plus, d)?)?,
            build_u3(&normalize_coeffs3([1.0, 0.2, 0.1], Sign::Minus, d)?)?,
        ];
        for n in 2..=3 {
            machines.push(build_un(&CoeffsN::symmetric(n, d)?)?);
        }
        for (k, m) in machines.iter().enumerate() {
            let rep =
                haar_average_fidelity(m, self.trials.max(2), self.seed.wrapping_add(k as u64))?;
            var = var.max(
                rep.variance
                    .unwrap_or_default()
                    .into_iter()
                    .fold(0.0, f64::max),
            );
        }
        self.push(
            "universality_variance",
            0,
            machines.len() * self.trials.max(2),
            var,
            self.tol.variance_tol,
        );
        Ok(())
    }

    fn saturation(&mut self) -> Result<(), CliError> {
        let d = self.d;
        let eqt = self.tol.equality_tol;
        let mut r = self.rng(2);
        let count = self.trials.min(50);
        let (mut e_ellipse, mut e_sym, mut e_1n): (f64, f64, f64) = (0.0, 0.0, 0.0);
        for _ in 0..count {
            let f = choi_f(&build_un(&CoeffsN::normalized(&[r.unit(), r.unit()], d)?)?)?;
            e_ellipse = e_ellipse.max(ellipse_residual(f[0].sqrt(), f[1].sqrt(), d).abs());
            let c = normalize_coeffs3([r.unit(), r.unit(), r.unit()], Sign::Plus, d)?;
            let f = choi_f(&build_u3(&c)?)?;
            e_sym =
                e_sym.max(symmetric_ellipsoid_residual([f[0], f[1], f[2]].map(f64::sqrt), d).abs());
            let raw: Vec<f64> = (0..4).map(|_| r.unit()).collect();
            let f = choi_f(&build_un(&CoeffsN::normalized(&raw, d)?)?)?;
            e_1n = e_1n.max(bound_1n(&f, d).abs());
        }
        self.push("saturation_ellipse_1to2", 2, count, e_ellipse, eqt);
        self.push("saturation_symmetric_ellipsoid", 3, count, e_sym, eqt);
        self.push("saturation_bound_1n", 4, count, e_1n, eqt);
        if d.get() >= 3 {
            let mut e_anti: f64 = 0.0;
            let mut done = 0;
            let mut draws = 0;
            while done < count && draws < 100 * count {
                draws += 1;
                let Ok(c) = normalize_coeffs3([r.signed(), r.signed(), r.signed()], Sign::Minus, d)
                else {
                    continue;
                };
                let t = c.targets().0;
                let pos = t.iter().filter(|v| **v > 0.0).count();
                let odd = match pos {
                    1 => t.iter().position(|v| *v > 0.0),
                    2 => t.iter().position(|v| *v <= 0.0),
                    _ => None,
                };
                let Some(k) = odd else { continue };
                let f = choi_f(&build_u3(&c)?)?;
                let axis = Axis::from_index(k).expect("axis index below 3");
                e_anti = e_anti.max(
                    antisymmetric_ellipsoid_residual(axis, [f[0], f[1], f[2]].map(f64::sqrt), d)?
                        .abs(),
                );
                done += 1;
            }
            self.push("saturation_antisymmetric_ellipsoids", 3, done, e_anti, eqt);
        }
        Ok(())
    }

    fn sampling(&mut self) -> Result<(), CliError> {
        let runs = [
            (BoundTag::Ellipse12, 2),
            (BoundTag::PureState(Sign::Plus), 3),
            (BoundTag::PureState(Sign::Minus), 3),
            (BoundTag::SymmetricEllipsoid, 3),
            (BoundTag::Bound1N, 3),
            (BoundTag::Bound1N, 4),
            (BoundTag::Hull13, 3),
        ];
        for (k, (tag, n)) in runs.into_iter().enumerate() {
            let rep = verify_bound(
                tag,
                self.d,
                n,
                self.trials,
                self.seed.wrapping_add(17 * k as u64),
                self.tol.equality_tol,
            )?;
            self.push(
                tag.name(),
                rep.n,
                rep.trials,
                rep.max_residual,
                rep.tolerance,
            );
        }
        let reg = Register::new(self.d, ["0", "1", "2", "3"])?;
        let mut gram = f64::INFINITY;
        let count = self.trials.min(20);
        for k in 0..count {
            let psi = haar_sample(&reg, self.seed, k as u64)
                .scaled(C64::new(self.d.as_f64().sqrt(), 0.0));
            gram = gram.min(gram_1n(&psi)?.min_eigenvalue);
        }
        self.push_at_least("gram_1n_psd", 3, count, gram, -self.tol.gram_tol);
        Ok(())
    }

    fn subspaces(&mut self) -> Result<(), CliError> {
        let d = self.d;
        let idt = self.tol.identity_tol;
        let f12 = phi_basis_12(d)?;
        let plus = phi_basis_13(d, Sign::Plus)?;
        let minus = phi_basis_13(d, Sign::Minus)?;
        let ortho = [&f12, &plus, &minus]
            .iter()
            .map(|f| f.orthonormality_defect())
            .fold(0.0, f64::max);
        self.push("phi_orthonormality", 0, 1, ortho, idt);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for def in [
            incompleteness_deficit(&[&f12])?,
            incompleteness_deficit(&[&plus, &minus])?,
        ] {
            lo = lo.min(def.min());
            hi = hi.max(def.max());
        }
        self.push_at_least("deficit_min_eigenvalue", 0, 1, lo, -idt);
        self.push("deficit_max_eigenvalue", 0, 1, hi, 1.0 + idt);
        self.push("cross_elements", 3, 1, cross_elements(d)?, idt);
        Ok(())
    }

    fn hull_checks(&mut self) -> Result<(), CliError> {
        let d = self.d;
        let h = Hull::new(d);
        let mesh = hull(d, self.resolution)?;
        let mut r = self.rng(3);
        let count = 500;
        let mut gap: f64 = 0.0;
        for _ in 0..count {
            let w = [r.unit(), r.unit(), r.unit()];
            let exact = support_function(&w, d)?;
            gap = gap.max((exact - mesh.support(w)).abs() / exact);
        }
        self.push("support_vs_hull_mesh", 3, count, gap, self.tol.support_tol);

        // positive homogeneity and convexity of the eigenvalue support
        let mut hom: f64 = 0.0;
        for _ in 0..20 {
            let a = [r.signed(), r.signed(), r.signed()];
            let b = [r.signed(), r.signed(), r.signed()];
            let s = 0.5 + 2.0 * r.unit();
            let ha = support_function(&a, d)?;
            let hb = support_function(&b, d)?;
            let scaled = support_function(&a.map(|v| s * v), d)?;
            let mid = support_function(&[0, 1, 2].map(|i| 0.5 * (a[i] + b[i])), d)?;
            hom = hom.max((scaled - s * ha).abs()).max(mid - 0.5 * (ha + hb));
        }
        self.push(
            "support_homogeneous_convex",
            3,
            20,
            hom,
            self.tol.equality_tol,
        );

        // the mesh sits on the hull boundary: inflating any point leaves it
        let mut inside: f64 = f64::INFINITY;
        let stride = (mesh.points.len() / 200).max(1);
        let mut sampled = 0;
        for p in mesh.points.iter().step_by(stride) {
            let out = p.f.map(|v| v * (1.0 + 1e-3));
            inside = inside.min(h.excess(out));
            sampled += 1;
        }
        self.push_at_least("hull_monotonicity", 3, sampled, inside, 0.0);

        if d.get() >= 3 {
            let cap = sphere_cap(d, 30)?;
            let worst = cap
                .points
                .iter()
                .map(|p| h.excess(p.f))
                .fold(f64::NEG_INFINITY, f64::max);
            self.push(
                "sphere_cap_inside_hull",
                3,
                cap.points.len(),
                worst,
                self.tol.equality_tol,
            );
        } else {
            let only = h
                .components()
                .iter()
                .all(|c| matches!(c.kind(), ComponentKind::SPlus | ComponentKind::Sphere));
            self.push(
                "qubit_hull_components",
                3,
                1,
                if only { 0.0 } else { 1.0 },
                0.0,
            );
            let mut worst = f64::INFINITY;
            let mut done = 0;
            for _ in 0..200 {
                let Ok(c) = normalize_coeffs3([r.signed(), r.signed(), r.signed()], Sign::Minus, d)
                else {
                    continue;
                };
                let f = choi_f(&build_u3(&c)?)?;
                worst = worst.min(h.slack([f[0], f[1], f[2]]).value);
                done += 1;
                if done == 20 {
                    break;
                }
            }
            self.push_at_least(
                "qubit_minus_machines_in_hull",
                3,
                done,
                worst,
                -self.tol.equality_tol,
            );
        }
        Ok(())
    }

    fn mixing(&mut self) -> Result<(), CliError> {
        let d = self.d;
        if d.get() < 3 {
            return Ok(());
        }
        let h = Hull::new(d);
        let mut r = self.rng(4);
        let mut worst: f64 = 0.0;
        let mut found = 0;
        for _ in 0..2000 {
            if found == 20 {
                break;
            }
            let u = [r.unit(), r.unit(), r.unit()];
            let g = h.gauge(u.map(|x| x * x), None);
            let [a, b] = g.active[..] else { continue };
            let pair = [a, b];
            if !pair.contains(&ComponentKind::SPlus)
                || !pair.iter().any(|k| matches!(k, ComponentKind::SMinus(_)))
            {
                continue;
            }
            let mut ends = Vec::new();
            for k in pair {
                let sp = h.component(k).expect("active component").support(g.normal);
                let m = build_u3(&surface_coeffs(k, sp.f, d)?)?;
                let f = choi_f(&m)?;
                ends.push((m, f));
            }
            let sol = mixture_for_target(&g.f, (&ends[0].0, &ends[0].1), (&ends[1].0, &ends[1].1))?;
            let mixed = f_values(&choi_of(&sol.mixture)?)?.f;
            worst = worst.max(max_diff(&mixed, &g.f));
            found += 1;
        }
        self.push("mixture_on_faces", 3, found, worst, self.tol.equality_tol);
        Ok(())
    }

    fn two_fidelity(&mut self) -> Result<(), CliError> {
        let d = self.d;
        let mut r = self.rng(5);
        let mut worst: f64 = 0.0;
        let mut total = 0;
        for n in 2..=6 {
            for _ in 0..self.trials.min(100) {
                let p = TwoFidelityParams::new(r.unit(), r.unit(), n, d)?;
                let (f, g) = p.fg();
                worst = worst.max(tradeoff_residual(f, g, d, n).abs());
                total += 1;
            }
        }
        self.push(
            "two_fidelity_tradeoff",
            0,
            total,
            worst,
            self.tol.identity_tol,
        );
        Ok(())
    }
}

pub fn run(cli: &Cli, a: &VerifyArgs) -> Result<(), CliError> {
    let ds: Vec<usize> = match a.d {
        Some(d) => vec![d],
        None => vec![2, 3],
    };
    if a.trials < 2 {
        return crate::config("--trials must be at least 2");
    }
    let mut checks = Vec::new();
    for &d in &ds {
        let mut s = Suite {
            d: dim(d)?,
            trials: a.trials,
            seed: a.seed,
            resolution: a.resolution,
            tol: &a.tol,
            checks: Vec::new(),
        };
        s.machines()?;
        s.saturation()?;
        s.sampling()?;
        s.subspaces()?;
        s.hull_checks()?;
        s.mixing()?;
        s.two_fidelity()?;
        checks.extend(s.checks);
    }
    let mut t = Table::new(["check", "d", "n", "trials", "value", "tolerance", "passed"]);
    let mut failed = Vec::new();
    for c in &checks {
        let ok = c.passed();
        if !ok {
            failed.push(format!("{}[d={}]", c.name, c.d));
        }
        let cmp = if c.at_least { ">=" } else { "<=" };
        println!(
            "{} {:<36} d={} value {:>11.3e} {cmp} {:.1e}",
            if ok { "PASS" } else { "FAIL" },
            c.name,
            c.d,
            c.value,
            c.tol
        );
        t.push(vec![
            c.name.into(),
            c.d.into(),
            c.n.into(),
            c.trials.into(),
            c.value.into(),
            c.tol.into(),
            ok.into(),
        ]);
    }
    let stem = match a.d {
        Some(d) => format!("verify_d{d}_seed{}", a.seed),
        None => format!("verify_seed{}", a.seed),
    };
    let tol = &a.tol;
    write(
        cli,
        &t,
        &stem,
        "verify",
        json!({"d": ds, "trials": a.trials, "seed": a.seed, "resolution": a.resolution}),
        json!({"equality": tol.equality_tol, "identity": tol.identity_tol, "variance": tol.variance_tol,
               "support_relative": tol.support_tol, "gram": tol.gram_tol}),
    )?;
    if failed.is_empty() {
        println!("all {} checks passed", checks.len());
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "failing checks: {}",
            failed.join(", ")
        )))
    }
}
