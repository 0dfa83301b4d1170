use std::collections::BTreeMap;

use aucm_core::banaszek::{
    asymptotic_curve, tradeoff_residual, two_fidelity_coeffs, TwoFidelityParams,
};
use aucm_core::boundary::{
    bound_1n, ellipse_1to2, ellipse_residual, ellipse_symmetric_point, hull, sphere_cap,
    surface_coeffs, surface_plus, surfaces_minus, ComponentKind, Hull, RootFidelityPoint,
    EQUALITY_TOL,
};
use aucm_core::fidelity::{
    choi_of, closed_form_f, f_values, fidelity_from_f, haar_average_fidelity,
};
use aucm_core::machines::{
    build_u3, build_un, coeffs_from_targets, mixture_for_parameter, mixture_for_target,
    normalize_coeffs3, CloningMachine, CoeffsN, Provenance, Sign,
};
use aucm_core::{Dim, Error};
use serde_json::{json, Value};

use crate::emit::{emit, resolve_path, Cell, Table};
use crate::{config, Cli, CliError, Command, SignArg, Surface};

/// Largest qudit dimension accepted on the command line.
pub const MAX_D: usize = 4;
/// Largest number of outputs accepted on the command line.
pub const MAX_N: usize = 6;

pub fn dim(d: usize) -> Result<Dim, CliError> {
    if !(2..=MAX_D).contains(&d) {
        return config(format!("--d must be in 2..={MAX_D}, got {d}"));
    }
    Ok(Dim::new(d)?)
}

pub fn outputs(n: usize) -> Result<usize, CliError> {
    if !(2..=MAX_N).contains(&n) {
        return config(format!("N must be in 2..={MAX_N}, got {n}"));
    }
    Ok(n)
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Machine(a) => machine(cli, a),
        Command::Boundary12(a) => boundary12(cli, a),
        Command::Boundary13(a) => boundary13(cli, a),
        Command::Bound1n(a) => bound1n(cli, a),
        Command::Banaszek(a) => banaszek(cli, a),
        Command::Verify(a) => crate::verify::run(cli, a),
        Command::Mix(a) => mix(cli, a),
    }
}

pub fn write(
    cli: &Cli,
    table: &Table,
    stem: &str,
    command: &str,
    params: Value,
    tolerances: Value,
) -> Result<(), CliError> {
    let path = resolve_path(cli.out.as_deref(), stem, cli.format);
    let meta = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "format": cli.format.extension(),
        "params": params,
        "tolerances": tolerances,
        "columns": table.columns,
        "rows": table.rows.len(),
    });
    emit(table, cli.format, &path, meta)?;
    println!("wrote {} rows to {}", table.rows.len(), path.display());
    Ok(())
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.12}")).collect();
    format!("({})", parts.join(", "))
}

fn choi_f(m: &CloningMachine) -> Result<Vec<f64>, CliError> {
    Ok(f_values(&choi_of(m)?)?.f)
}

fn sign_name(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "plus",
        Sign::Minus => "minus",
    }
}

fn machine_u3(
    sign: Sign,
    coeffs: Option<&[f64]>,
    targets: Option<&[f64]>,
    d: Dim,
) -> Result<CloningMachine, CliError> {
    let triple = |v: &[f64], what: &str| -> Result<[f64; 3], CliError> {
        match v {
            [a, b, c] => Ok([*a, *b, *c]),
            _ => config(format!("U± needs exactly three {what}, got {}", v.len())),
        }
    };
    let c = match (coeffs, targets) {
        (Some(c), _) => normalize_coeffs3(triple(c, "coefficients")?, sign, d)?,
        (None, Some(t)) => coeffs_from_targets(triple(t, "targets")?, sign, d)?,
        (None, None) => normalize_coeffs3([1.0, 1.0, 1.0], sign, d)?,
    };
    Ok(build_u3(&c)?)
}

fn machine(cli: &Cli, a: &crate::MachineArgs) -> Result<(), CliError> {
    let d = dim(a.d)?;
    if a.haar_samples.is_some() && a.seed.is_none() {
        return config("--haar-samples needs --seed");
    }
    let m = match a.sign {
        Some(SignArg(sign)) => machine_u3(sign, a.coeffs.as_deref(), a.targets.as_deref(), d)?,
        None => {
            if a.targets.is_some() {
                return config("--targets needs --sign (U± only)");
            }
            let c = match (&a.coeffs, a.n) {
                (Some(c), n) => {
                    outputs(c.len())?;
                    if n.is_some_and(|n| n != c.len()) {
                        return config("--n does not match the number of coefficients");
                    }
                    CoeffsN::normalized(c, d)?
                }
                (None, Some(n)) => CoeffsN::symmetric(outputs(n)?, d)?,
                (None, None) => return config("give --sign, --coeffs or --n"),
            };
            build_un(&c)?
        }
    };
    let (kind, coeffs, targets): (String, Vec<f64>, Vec<f64>) = match m.provenance() {
        Provenance::U3(c) => (
            format!("U{}", c.sign.symbol()),
            c.as_array().to_vec(),
            c.targets().0,
        ),
        Provenance::UN(c) => ("U_alpha".to_string(), c.alphas().to_vec(), c.targets().0),
        Provenance::Identity => ("identity".to_string(), vec![1.0], vec![a.d as f64]),
    };
    let closed = closed_form_f(m.provenance(), d);
    let choi = choi_f(&m)?;
    let haar = match (a.haar_samples, a.seed) {
        (Some(n), Some(seed)) => Some(haar_average_fidelity(&m, n, seed)?),
        _ => None,
    };
    let mut cols = vec!["output", "coeff", "x", "f", "F", "f_choi", "F_choi"];
    if haar.is_some() {
        cols.extend(["F_haar", "F_haar_variance"]);
    }
    let mut t = Table::new(cols);
    for k in 0..choi.len() {
        let mut row: Vec<Cell> = vec![
            (k + 1).into(),
            coeffs.get(k).copied().into(),
            targets[k].into(),
            closed[k].into(),
            fidelity_from_f(closed[k], d).into(),
            choi[k].into(),
            fidelity_from_f(choi[k], d).into(),
        ];
        if let Some(h) = &haar {
            row.push(h.fidelity[k].into());
            row.push(h.variance.as_ref().map(|v| v[k]).into());
        }
        t.push(row);
    }
    let region = match choi.len() {
        3 => {
            let p = RootFidelityPoint::from_f([choi[0], choi[1], choi[2]], d)?;
            Hull::new(d)
                .classify(p.as_array(), EQUALITY_TOL)
                .to_string()
        }
        2 => {
            let r = ellipse_residual(choi[0].sqrt(), choi[1].sqrt(), d);
            if r.abs() <= EQUALITY_TOL {
                "Ellipse"
            } else {
                "Interior"
            }
            .to_string()
        }
        _ => {
            let r = bound_1n(&choi, d);
            if r.abs() <= EQUALITY_TOL {
                "Bound1N"
            } else {
                "Interior"
            }
            .to_string()
        }
    };
    let fids: Vec<f64> = choi.iter().map(|&f| fidelity_from_f(f, d)).collect();
    println!(
        "machine {kind} d={}: coefficients {}",
        a.d,
        fmt_list(&coeffs)
    );
    println!("F = {}", fmt_list(&fids));
    println!("region {region}");
    println!("isometry defect {:.3e}", m.isometry_defect());
    let stem = format!(
        "machine_{}_d{}_n{}",
        kind.replace('+', "plus").replace('-', "minus"),
        a.d,
        choi.len()
    );
    write(
        cli,
        &t,
        &stem,
        "machine",
        json!({"d": a.d, "kind": kind, "raw_coeffs": a.coeffs, "targets": a.targets, "n": choi.len(),
               "haar_samples": a.haar_samples, "seed": a.seed, "region": region}),
        json!({"equality": EQUALITY_TOL}),
    )
}

fn boundary12(cli: &Cli, a: &crate::Boundary12Args) -> Result<(), CliError> {
    let d = dim(a.d)?;
    let pts = ellipse_1to2(d, a.resolution)?;
    let mut t = Table::new(["x", "y", "fA", "fB", "FA", "FB"]);
    for (x, y) in pts {
        let (fa, fb) = (x * x, y * y);
        t.push(vec![
            x.into(),
            y.into(),
            fa.into(),
            fb.into(),
            fidelity_from_f(fa, d).into(),
            fidelity_from_f(fb, d).into(),
        ]);
    }
    let s = ellipse_symmetric_point(d);
    println!(
        "1->2 ellipse d={}: symmetric point x = y = {s:.12}, F = {:.12}",
        a.d,
        fidelity_from_f(s * s, d)
    );
    write(
        cli,
        &t,
        &format!("boundary12_d{}_r{}", a.d, a.resolution),
        "boundary12",
        json!({"d": a.d, "resolution": a.resolution}),
        json!({}),
    )
}

fn boundary13(cli: &Cli, a: &crate::Boundary13Args) -> Result<(), CliError> {
    let d = dim(a.d)?;
    let mesh = match a.surface {
        Surface::Hull => hull(d, a.resolution)?,
        Surface::Plus => surface_plus(d, a.resolution)?,
        Surface::Minus => surfaces_minus(d, a.resolution)?,
        Surface::Sphere => sphere_cap(d, a.resolution)?,
    };
    if let Some(why) = mesh.skipped {
        eprintln!("warning: empty mesh: {why}");
    }
    let mut t = Table::new(["x", "y", "z", "fA", "fB", "fC", "region"]);
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for p in &mesh.points {
        let x = p.point.as_array();
        let label = p.region.to_string();
        *counts.entry(label.clone()).or_default() += 1;
        t.push(vec![
            x[0].into(),
            x[1].into(),
            x[2].into(),
            p.f[0].into(),
            p.f[1].into(),
            p.f[2].into(),
            label.into(),
        ]);
    }
    let surface = format!("{:?}", a.surface).to_lowercase();
    println!(
        "1->3 {surface} mesh d={} resolution {}: {} points",
        a.d,
        a.resolution,
        mesh.points.len()
    );
    for (label, n) in &counts {
        println!("  {label}: {n}");
    }
    if let Some(c) = mesh.contained_in_hull {
        println!("  contained in ellipsoid hull: {c}");
    }
    write(
        cli,
        &t,
        &format!("boundary13_{surface}_d{}_r{}", a.d, a.resolution),
        "boundary13",
        json!({"d": a.d, "resolution": a.resolution, "surface": surface,
               "skipped": mesh.skipped, "contained_in_hull": mesh.contained_in_hull}),
        json!({"equality": EQUALITY_TOL, "hull_membership": 1e-6}),
    )
}

fn bound1n(cli: &Cli, a: &crate::Bound1nArgs) -> Result<(), CliError> {
    let d = dim(a.d)?;
    let n = outputs(a.n)?;
    if a.resolution < 2 {
        return config("--resolution must be at least 2");
    }
    let mut use_choi = !a.no_choi;
    let mut t = Table::new([
        "theta",
        "alpha",
        "beta",
        "f_1",
        "f_rest",
        "F_1",
        "F_rest",
        "bound_residual",
        "tradeoff_residual",
        "choi_max_diff",
    ]);
    let mut worst: f64 = 0.0;
    for k in 0..a.resolution {
        let th = std::f64::consts::FRAC_PI_2 * k as f64 / (a.resolution - 1) as f64;
        let p = TwoFidelityParams::new(th.cos().max(0.0), th.sin(), n, d)?;
        let (f, g) = p.fg();
        let mut fs = vec![g; n];
        fs[0] = f;
        let r16 = bound_1n(&fs, d);
        let r19 = tradeoff_residual(f, g, d, n);
        worst = worst.max(r16.abs());
        let mut diff = None;
        if use_choi {
            match build_un(&two_fidelity_coeffs(&p)?) {
                Ok(m) => {
                    let c = choi_f(&m)?;
                    diff = Some(
                        c.iter()
                            .zip(&fs)
                            .map(|(x, y)| (x - y).abs())
                            .fold(0.0, f64::max),
                    );
                }
                Err(Error::TooLarge(size)) => {
                    eprintln!(
                        "note: dense Choi check skipped, {size} entries exceed the storage cap"
                    );
                    use_choi = false;
                }
                Err(e) => return Err(e.into()),
            }
        }
        t.push(vec![
            th.into(),
            p.alpha.into(),
            p.beta.into(),
            f.into(),
            g.into(),
            fidelity_from_f(f, d).into(),
            fidelity_from_f(g, d).into(),
            r16.into(),
            r19.into(),
            diff.into(),
        ]);
    }
    println!(
        "1->{n} bound d={} along the two-fidelity family: max |residual| = {worst:.3e}",
        a.d
    );
    write(
        cli,
        &t,
        &format!("bound1n_d{}_n{}_r{}", a.d, n, a.resolution),
        "bound1n",
        json!({"d": a.d, "n": n, "resolution": a.resolution, "choi": !a.no_choi}),
        json!({"equality": EQUALITY_TOL}),
    )
}

fn banaszek(cli: &Cli, a: &crate::BanaszekArgs) -> Result<(), CliError> {
    let d = dim(a.d)?;
    if a.n.iter().any(|&n| n < 2) {
        return config("every N must be at least 2");
    }
    let curve = asymptotic_curve(d, a.resolution, &a.n)?;
    let mut cols = vec!["g".to_string(), "f_asymptotic".to_string()];
    cols.extend(a.n.iter().map(|n| format!("f_N{n}")));
    let mut t = Table::new(cols);
    for p in &curve {
        let mut row: Vec<Cell> = vec![p.g.into(), p.f_asymptotic.into()];
        row.extend(p.f_n.iter().map(|&f| Cell::from(f)));
        t.push(row);
    }
    println!(
        "two-fidelity curves d={}: g in [1, {}], N = {:?}",
        a.d, a.d, a.n
    );
    write(
        cli,
        &t,
        &format!("banaszek_d{}_r{}", a.d, a.resolution),
        "banaszek",
        json!({"d": a.d, "n": a.n, "resolution": a.resolution}),
        json!({}),
    )
}

/// Mixture tolerance on `|f_mix − target|`.
const MIX_TOL: f64 = 1e-9;

fn mix(cli: &Cli, a: &crate::MixArgs) -> Result<(), CliError> {
    let d = dim(a.d)?;
    let ((mg, fg), (mb, fb), target, faces) = if let Some(dir) = &a.direction {
        let [x, y, z] = dir[..] else {
            return config("--direction needs three components");
        };
        if [x, y, z].iter().any(|v| !(v.is_finite() && *v >= 0.0)) || x + y + z == 0.0 {
            return config("--direction must be a non-zero non-negative triple");
        }
        let h = Hull::new(d);
        let g = h.gauge([x * x, y * y, z * z], None);
        let [ka, kb] = g.active[..] else {
            return config(format!(
                "direction hits a single surface ({:?}), not a face between two",
                g.active
            ));
        };
        if ka == ComponentKind::Origin || kb == ComponentKind::Origin {
            return config("direction hits a face through the origin; no machine endpoint there");
        }
        let mut ends = Vec::new();
        for k in [ka, kb] {
            let sp = h.component(k).expect("active component").support(g.normal);
            let m = build_u3(&surface_coeffs(k, sp.f, d)?)?;
            let f = choi_f(&m)?;
            ends.push((m, f));
        }
        let b = ends.pop().expect("two endpoints");
        let gg = ends.pop().expect("two endpoints");
        (gg, b, Some(g.f.to_vec()), Some((ka, kb)))
    } else {
        let (Some(cg), Some(cb)) = (&a.coeffs_g, &a.coeffs_b) else {
            return config("give --direction, or --coeffs-g and --coeffs-b");
        };
        let endpoint = |sign: Option<SignArg>, c: &[f64]| -> Result<CloningMachine, CliError> {
            match sign {
                Some(SignArg(s)) => machine_u3(s, Some(c), None, d),
                None => {
                    outputs(c.len())?;
                    Ok(build_un(&CoeffsN::normalized(c, d)?)?)
                }
            }
        };
        let mg = endpoint(a.sign_g, cg)?;
        let mb = endpoint(a.sign_b, cb)?;
        let (fg, fb) = (choi_f(&mg)?, choi_f(&mb)?);
        ((mg, fg), (mb, fb), a.target.clone(), None)
    };
    let sol = match (&target, a.p) {
        (Some(t), _) => mixture_for_target(t, (&mg, &fg), (&mb, &fb))?,
        (None, Some(p)) => mixture_for_parameter(p, (&mg, &fg), (&mb, &fb))?,
        (None, None) => return config("give --p or --target"),
    };
    let mixed = f_values(&choi_of(&sol.mixture)?)?.f;
    let mut t = Table::new([
        "output", "f_g", "f_b", "target", "q", "f_mix", "F_mix", "residual",
    ]);
    let mut worst: f64 = 0.0;
    for k in 0..mixed.len() {
        let r = mixed[k] - sol.target[k];
        worst = worst.max(r.abs());
        t.push(vec![
            (k + 1).into(),
            fg[k].into(),
            fb[k].into(),
            sol.target[k].into(),
            sol.q[k].into(),
            mixed[k].into(),
            fidelity_from_f(mixed[k], d).into(),
            r.into(),
        ]);
    }
    if let Some((ka, kb)) = faces {
        println!("face between {ka} and {kb}");
    }
    println!(
        "mixture d={}: p = {:.12}, target {}",
        a.d,
        sol.p,
        fmt_list(&sol.target)
    );
    println!("max |f_mix - target| = {worst:.3e}");
    write(
        cli,
        &t,
        &format!("mix_d{}", a.d),
        "mix",
        json!({"d": a.d, "p": sol.p, "direction": a.direction, "target": sol.target,
               "sign_g": a.sign_g.map(|s| sign_name(s.0)), "coeffs_g": a.coeffs_g,
               "sign_b": a.sign_b.map(|s| sign_name(s.0)), "coeffs_b": a.coeffs_b}),
        json!({"mixture": MIX_TOL}),
    )?;
    if worst > MIX_TOL {
        return Err(CliError::Verification(format!(
            "mixture residual {worst:.3e} exceeds {MIX_TOL:e}"
        )));
    }
    Ok(())
}
