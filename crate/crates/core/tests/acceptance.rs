//! Acceptance checks, one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use aucm_core::banaszek::{correction, tradeoff_residual, TwoFidelityParams};
use aucm_core::boundary::{
    antisymmetric_ellipsoid_residual, bound_1n, ellipse_1to2, ellipse_residual, hull,
    surface_coeffs, symmetric_ellipsoid_residual, Axis, ComponentKind, Hull, RegionLabel,
};
use aucm_core::fidelity::{choi_of, f_values, haar_average_fidelity, symmetric_fidelity};
use aucm_core::machines::{
    build_u3, build_un, mixture_for_target, normalize_coeffs3, CloningMachine, CoeffsN, Sign,
};
use aucm_core::oracle::{
    cross_elements, incompleteness_deficit, phi_basis_12, phi_basis_13, support_function,
    verify_bound, BoundTag,
};
use aucm_core::Dim;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

fn dim(d: usize) -> Dim {
    Dim::new(d).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit(r: &mut ChaCha8Rng) -> f64 {
    (r.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn signed(r: &mut ChaCha8Rng) -> f64 {
    2.0 * unit(r) - 1.0
}

fn choi_f(m: &CloningMachine) -> Vec<f64> {
    f_values(&choi_of(m).unwrap()).unwrap().f
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn symmetric_fidelities() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        for d in [2, 3] {
            let c = CoeffsN::symmetric(n, dim(d)).unwrap();
            let m = build_un(&c).unwrap();
            let report = f_values(&choi_of(&m).unwrap()).unwrap();
            let (nf, df) = (n as f64, d as f64);
            let expect = (2.0 * nf + df - 1.0) / (nf * (df + 1.0));
            assert!((symmetric_fidelity(dim(d), n) - expect).abs() < 1e-15);
            for fid in report.fidelity {
                worst = worst.max((fid - expect).abs());
            }
        }
    }
    for d in [2, 3] {
        let c = normalize_coeffs3([1.0, 1.0, 1.0], Sign::Plus, dim(d)).unwrap();
        let m = build_u3(&c).unwrap();
        let expect = (5.0 + d as f64) / (3.0 * (d as f64 + 1.0));
        for fid in f_values(&choi_of(&m).unwrap()).unwrap().fidelity {
            worst = worst.max((fid - expect).abs());
        }
    }
    let two =
        f_values(&choi_of(&build_un(&CoeffsN::symmetric(2, dim(2)).unwrap()).unwrap()).unwrap())
            .unwrap()
            .fidelity[0];
    let three =
        f_values(&choi_of(&build_un(&CoeffsN::symmetric(3, dim(2)).unwrap()).unwrap()).unwrap())
            .unwrap()
            .fidelity[0];
    let special = (two - 5.0 / 6.0).abs().max((three - 7.0 / 9.0).abs());
    worst = worst.max(special);
    outcome(
        worst < 1e-10,
        format!("max |F - (2N+d-1)/(N(d+1))| = {worst:.3e}; F(1->2,d=2) = {two:.15}, F(1->3,d=2) = {three:.15}"),
    )
}

fn isometry() -> Outcome {
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    let mut built = 0;
    let mut unnormalizable = 0;
    for d in [2, 3] {
        for sign in [Sign::Plus, Sign::Minus] {
            let mut done = 0;
            while done < 200 {
                let raw = [signed(&mut r), signed(&mut r), signed(&mut r)];
                let Ok(c) = normalize_coeffs3(raw, sign, dim(d)) else {
                    unnormalizable += 1;
                    continue;
                };
                worst = worst.max(build_u3(&c).unwrap().isometry_defect());
                done += 1;
                built += 1;
            }
        }
    }
    let shapes = [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2), (4, 3)];
    for k in 0..100 {
        let (n, d) = shapes[k % shapes.len()];
        let raw: Vec<f64> = (0..n).map(|_| signed(&mut r)).collect();
        let c = CoeffsN::normalized(&raw, dim(d)).unwrap();
        worst = worst.max(build_un(&c).unwrap().isometry_defect());
        built += 1;
    }
    outcome(
        worst < 1e-10,
        format!("max |V'V - I| = {worst:.3e} over {built} machines ({unnormalizable} raw draws not normalizable)"),
    )
}

fn universality() -> Outcome {
    let mut machines = Vec::new();
    for d in [2, 3] {
        machines.push(
            build_u3(&normalize_coeffs3([1.0, 1.0, 1.0], Sign::Plus, dim(d)).unwrap()).unwrap(),
        );
        machines.push(
            build_u3(&normalize_coeffs3([0.9, -0.2, 0.4], Sign::Plus, dim(d)).unwrap()).unwrap(),
        );
        for n in 2..=4 {
            machines.push(build_un(&CoeffsN::symmetric(n, dim(d)).unwrap()).unwrap());
        }
        machines.push(build_un(&CoeffsN::normalized(&[0.7, 0.2, -0.3], dim(d)).unwrap()).unwrap());
    }
    machines.push(
        build_u3(&normalize_coeffs3([0.3, 0.5, -0.6], Sign::Minus, dim(3)).unwrap()).unwrap(),
    );
    machines
        .push(build_u3(&normalize_coeffs3([1.0, 0.2, 0.1], Sign::Minus, dim(2)).unwrap()).unwrap());
    let mut worst: f64 = 0.0;
    for (k, m) in machines.iter().enumerate() {
        let rep = haar_average_fidelity(m, 1000, 30 + k as u64).unwrap();
        for v in rep.variance.unwrap() {
            worst = worst.max(v);
        }
    }
    outcome(
        worst < 1e-18,
        format!(
            "max per-output variance = {worst:.3e} over {} machines x 1000 inputs",
            machines.len()
        ),
    )
}

fn saturation() -> Outcome {
    let mut r = rng(4);
    let (mut e3, mut e8, mut e9, mut e16): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    let mut skipped9 = 0;
    for d in [2, 3] {
        for _ in 0..30 {
            let c = CoeffsN::normalized(&[unit(&mut r), unit(&mut r)], dim(d)).unwrap();
            let f = choi_f(&build_un(&c).unwrap());
            e3 = e3.max(ellipse_residual(f[0].sqrt(), f[1].sqrt(), dim(d)).abs());

            let c = normalize_coeffs3(
                [unit(&mut r), unit(&mut r), unit(&mut r)],
                Sign::Plus,
                dim(d),
            )
            .unwrap();
            let f = choi_f(&build_u3(&c).unwrap());
            e8 = e8
                .max(symmetric_ellipsoid_residual([f[0], f[1], f[2]].map(f64::sqrt), dim(d)).abs());

            for n in 2..=4 {
                let raw: Vec<f64> = (0..n).map(|_| unit(&mut r)).collect();
                let c = CoeffsN::normalized(&raw, dim(d)).unwrap();
                let f = choi_f(&build_un(&c).unwrap());
                e16 = e16.max(bound_1n(&f, dim(d)).abs());
            }
        }
    }
    // U− at d = 3: targets with one coordinate of opposite sign saturate the
    // ellipsoid attached to that coordinate.
    let d = dim(3);
    let mut checked = 0;
    while checked < 60 {
        let raw = [signed(&mut r), signed(&mut r), signed(&mut r)];
        let Ok(c) = normalize_coeffs3(raw, Sign::Minus, d) else {
            continue;
        };
        let t = c.targets().0;
        let pos = t.iter().filter(|v| **v > 0.0).count();
        let odd = match pos {
            1 => t.iter().position(|v| *v > 0.0),
            2 => t.iter().position(|v| *v <= 0.0),
            _ => None,
        };
        let Some(k) = odd else {
            skipped9 += 1;
            continue;
        };
        let f = choi_f(&build_u3(&c).unwrap());
        let x = [f[0], f[1], f[2]].map(f64::sqrt);
        e9 = e9.max(
            antisymmetric_ellipsoid_residual(Axis::from_index(k).unwrap(), x, d)
                .unwrap()
                .abs(),
        );
        checked += 1;
    }
    let worst = e3.max(e8).max(e9).max(e16);
    outcome(
        worst < 1e-9,
        format!(
            "max |residual|: ellipse {e3:.2e}, symmetric ellipsoid {e8:.2e}, antisymmetric ellipsoids {e9:.2e} ({skipped9} same-sign draws skipped), 1->N bound {e16:.2e}"
        ),
    )
}

fn no_violation() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for d in [2, 3] {
        let runs = [
            (BoundTag::Ellipse12, 2),
            (BoundTag::PureState(Sign::Plus), 3),
            (BoundTag::PureState(Sign::Minus), 3),
            (BoundTag::Bound1N, 3),
            (BoundTag::Bound1N, 4),
            (BoundTag::Hull13, 3),
        ];
        for (k, (tag, n)) in runs.into_iter().enumerate() {
            let rep = verify_bound(tag, dim(d), n, 1000, 500 + k as u64, 1e-9).unwrap();
            ok &= rep.passed();
            lines.push(format!(
                "{}[d={d},N={n}] {}/{} max {:.2e}",
                rep.name, rep.violations, rep.trials, rep.max_residual
            ));
        }
    }
    outcome(ok, format!("violations: {}", lines.join("; ")))
}

fn support_certification() -> Outcome {
    let mut r = rng(6);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for d in [2, 3] {
        let mesh = hull(dim(d), 200).unwrap();
        ok &= mesh.points.len() == 200 * 200;
        for _ in 0..500 {
            let w = [unit(&mut r), unit(&mut r), unit(&mut r)];
            let exact = support_function(&w, dim(d)).unwrap();
            let rel = (exact - mesh.support(w)).abs() / exact;
            worst = worst.max(rel);
        }
        // two-observable case against the 1→2 ellipse
        let ellipse = ellipse_1to2(dim(d), 200 * 200).unwrap();
        for _ in 0..500 {
            let w = [unit(&mut r), unit(&mut r)];
            let exact = support_function(&w, dim(d)).unwrap();
            let mesh = ellipse
                .iter()
                .map(|(x, y)| w[0] * x * x + w[1] * y * y)
                .fold(0.0, f64::max);
            worst = worst.max((exact - mesh).abs() / exact);
        }
    }
    outcome(
        ok && worst <= 1e-3,
        format!("max relative gap |d*lambda_max - mesh support| = {worst:.3e} (hull mesh 200x200, d = 2, 3)"),
    )
}

fn subspace_structure() -> Outcome {
    let (mut ortho, mut cross): (f64, f64) = (0.0, 0.0);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for d in [2, 3] {
        let f12 = phi_basis_12(dim(d)).unwrap();
        let plus = phi_basis_13(dim(d), Sign::Plus).unwrap();
        let minus = phi_basis_13(dim(d), Sign::Minus).unwrap();
        for fam in [&f12, &plus, &minus] {
            ortho = ortho.max(fam.orthonormality_defect());
        }
        for def in [
            incompleteness_deficit(&[&f12]).unwrap(),
            incompleteness_deficit(&[&plus, &minus]).unwrap(),
        ] {
            lo = lo.min(def.min());
            hi = hi.max(def.max());
        }
        cross = cross.max(cross_elements(dim(d)).unwrap());
    }
    let ok = ortho < 1e-10 && lo >= -1e-10 && hi <= 1.0 + 1e-10 && cross < 1e-10;
    outcome(
        ok,
        format!("|G - I| = {ortho:.2e}; deficit spectrum in [{lo:.2e}, {hi:.6}]; max cross element {cross:.2e}"),
    )
}

fn machine_on(kind: ComponentKind, f: [f64; 3], d: Dim) -> Option<CloningMachine> {
    build_u3(&surface_coeffs(kind, f, d).ok()?).ok()
}

fn mixing() -> Outcome {
    let d = dim(3);
    let h = Hull::new(d);
    let mut r = rng(8);
    let (mut worst, mut worst_q): (f64, f64) = (0.0, 0.0);
    let mut found = 0;
    let mut tries = 0;
    while found < 50 && tries < 5000 {
        tries += 1;
        let u = [unit(&mut r), unit(&mut r), unit(&mut r)];
        let v = u.map(|x| x * x);
        let g = h.gauge(v, None);
        let pair = match g.active[..] {
            [a, b] => (a, b),
            _ => continue,
        };
        let (a, b) = match pair {
            (ComponentKind::SPlus, m @ ComponentKind::SMinus(_)) => (ComponentKind::SPlus, m),
            (m @ ComponentKind::SMinus(_), ComponentKind::SPlus) => (ComponentKind::SPlus, m),
            _ => continue,
        };
        let fa = h.component(a).unwrap().support(g.normal).f;
        let fb = h.component(b).unwrap().support(g.normal).f;
        let (Some(ma), Some(mb)) = (machine_on(a, fa, d), machine_on(b, fb, d)) else {
            continue;
        };
        let (ca, cb) = (choi_f(&ma), choi_f(&mb));
        let Ok(sol) = mixture_for_target(&g.f, (&ma, &ca), (&mb, &cb)) else {
            continue;
        };
        let mixed = f_values(&choi_of(&sol.mixture).unwrap()).unwrap().f;
        for k in 0..3 {
            worst = worst.max((mixed[k] - g.f[k]).abs());
            if let Some(q) = sol.q[k] {
                let (rg, rb) = (ca[k].sqrt(), cb[k].sqrt());
                let lhs = (q * rg + (1.0 - q) * rb).powi(2);
                let rhs = sol.p * rg * rg + (1.0 - sol.p) * rb * rb;
                worst_q = worst_q.max((lhs - rhs).abs());
            }
        }
        found += 1;
    }
    outcome(
        found == 50 && worst < 1e-9 && worst_q < 1e-9,
        format!("{found} targets on S+/S- faces (d = 3, {tries} directions): max |f_mix - target| = {worst:.2e}, quadratic condition residual {worst_q:.2e}"),
    )
}

fn two_fidelity() -> Outcome {
    let mut r = rng(9);
    let mut worst: f64 = 0.0;
    for n in 2..=6 {
        for d in [2, 3] {
            for _ in 0..100 {
                let p = TwoFidelityParams::new(unit(&mut r), unit(&mut r), n, dim(d)).unwrap();
                let (f, g) = p.fg();
                worst = worst.max(tradeoff_residual(f, g, dim(d), n).abs());
            }
        }
    }
    let mut slopes = Vec::new();
    for d in [2, 3] {
        let pts: Vec<(f64, f64)> = [10usize, 100, 1000]
            .iter()
            .map(|&n| {
                let p = TwoFidelityParams::new(1.0, 1.0, n, dim(d)).unwrap();
                let (f, g) = p.fg();
                ((p.denominator()).ln(), correction(f, g, dim(d), n).ln())
            })
            .collect();
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / 3.0;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / 3.0;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        slopes.push(sxy / sxx);
    }
    let slope_ok = slopes.iter().all(|s| (s + 1.0).abs() <= 0.01);
    outcome(
        worst < 1e-10 && slope_ok,
        format!("max |residual| = {worst:.2e}; correction log-log slopes {slopes:.5?} (d = 2, 3)"),
    )
}

fn qubit_hull() -> Outcome {
    let d = dim(2);
    let h = Hull::new(d);
    let kinds: Vec<ComponentKind> = h.components().iter().map(|c| c.kind()).collect();
    let only = kinds == [ComponentKind::SPlus, ComponentKind::Sphere];
    let mesh = hull(d, 60).unwrap();
    let no_minus = mesh.points.iter().all(|p| {
        !matches!(p.region, RegionLabel::SMinus(_))
            && !matches!(p.region, RegionLabel::MixedFace(a, b) if matches!(a, ComponentKind::SMinus(_)) || matches!(b, ComponentKind::SMinus(_)))
    });
    let mut r = rng(10);
    let mut worst = f64::INFINITY;
    let mut built = 0;
    let mut tries = 0;
    while built < 40 && tries < 10_000 {
        tries += 1;
        let raw = [signed(&mut r), signed(&mut r), signed(&mut r)];
        let Ok(c) = normalize_coeffs3(raw, Sign::Minus, d) else {
            continue;
        };
        let Ok(m) = build_u3(&c) else { continue };
        let f = choi_f(&m);
        worst = worst.min(h.slack([f[0], f[1], f[2]]).value);
        built += 1;
    }
    outcome(
        only && no_minus && built > 0 && worst >= -1e-9,
        format!("components {kinds:?}; {built} U- machines built from {tries} draws, min slack {worst:.2e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("symmetric fidelities", symmetric_fidelities),
        ("isometry", isometry),
        ("universality", universality),
        ("saturation", saturation),
        ("no-violation sampling", no_violation),
        ("support-function certification", support_certification),
        ("subspace structure", subspace_structure),
        ("mixing", mixing),
        ("two-fidelity trade-off", two_fidelity),
        ("qubit hull", qubit_hull),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let o = run();
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        if !o.passed {
            failed += 1;
        }
        println!(
            "criterion {:>2} {verdict} {name} ({:.1}s): {}",
            k + 1,
            t0.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
