//! The 1→3 attainable set as the convex hull, in f-space, of the component
//! surfaces and the origin.
//!
//! Each component is a quadric `xᵀAx = c` restricted to a simplicial cone in
//! x-space. Its f-space support function `max w·f = c · max uᵀWu / uᵀAu`
//! (with `W = diag(w)`, `u` in the cone) is computed exactly: a maximizer
//! supported on a face of the cone is a generalized eigenvector of the
//! restricted pencil with positive entries, so enumerating the faces and
//! their eigenpairs finds it.

use alloc::vec::Vec;
use core::fmt;

use super::{golden_margins, Axis, RegionLabel};
use crate::optimize::nelder_mead_restarts;
use crate::qudit::Dim;

type Mat3 = [[f64; 3]; 3];

/// Which surface a component is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ComponentKind {
    SPlus,
    SMinus(Axis),
    Sphere,
    /// The origin, which belongs to the attainable set and closes the hull.
    Origin,
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentKind::SPlus => f.write_str("SPlus"),
            ComponentKind::SMinus(a) => write!(f, "SMinus_{}", a.name()),
            ComponentKind::Sphere => f.write_str("Sphere"),
            ComponentKind::Origin => f.write_str("Origin"),
        }
    }
}

/// A quadric surface patch `xᵀAx = c` inside a simplicial cone.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    kind: ComponentKind,
    d: Dim,
    a: Mat3,
    c: f64,
    /// Extreme rays of the cone.
    rays: [[f64; 3]; 3],
    /// Inward facet normals: `x` is in the cone iff `n·x ≥ 0` for all three.
    facets: [[f64; 3]; 3],
    /// `r_iᵀ A r_j`.
    ray_gram: Mat3,
}

/// A maximizer of `w·f` over one component (or the origin).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupportPoint {
    pub value: f64,
    pub f: [f64; 3],
    pub kind: ComponentKind,
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn quad(m: &Mat3, u: [f64; 3]) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += u[i] * m[i][j] * u[j];
        }
    }
    s
}

fn norm(a: [f64; 3]) -> f64 {
    libm::sqrt(dot(a, a))
}

impl Component {
    fn new(
        kind: ComponentKind,
        d: Dim,
        a: Mat3,
        c: f64,
        rays: [[f64; 3]; 3],
        facets: [[f64; 3]; 3],
    ) -> Self {
        let mut ray_gram = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    for l in 0..3 {
                        s += rays[i][k] * a[k][l] * rays[j][l];
                    }
                }
                ray_gram[i][j] = s;
            }
        }
        Self {
            kind,
            d,
            a,
            c,
            rays,
            facets,
            ray_gram,
        }
    }

    pub fn kind(&self) -> ComponentKind {
        self.kind
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.a
    }

    pub fn level(&self) -> f64 {
        self.c
    }

    /// `xᵀAx − c`.
    pub fn residual(&self, x: [f64; 3]) -> f64 {
        quad(&self.a, x) - self.c
    }

    pub fn in_cone(&self, x: [f64; 3], tol: f64) -> bool {
        let scale = norm(x).max(f64::MIN_POSITIVE);
        self.facets.iter().all(|n| dot(*n, x) >= -tol * scale)
    }

    /// The surface point on the ray through `u`, if the ray is in the cone.
    pub fn radial_point(&self, u: [f64; 3]) -> Option<[f64; 3]> {
        if norm(u) == 0.0 || !self.in_cone(u, 1e-12) {
            return None;
        }
        let r = libm::sqrt(self.c / quad(&self.a, u));
        Some(u.map(|v| (r * v).max(0.0)))
    }

    /// Region label of a point on this surface.
    pub fn surface_label(&self, x: [f64; 3]) -> RegionLabel {
        match self.kind {
            ComponentKind::SPlus => {
                let m = golden_margins(x, self.d);
                let tol = super::EQUALITY_TOL * norm(x).max(1.0);
                if m.iter().all(|&v| v > tol) {
                    RegionLabel::SPlusCentral
                } else {
                    let mut k = 0;
                    for i in 1..3 {
                        if x[i] > x[k] {
                            k = i;
                        }
                    }
                    RegionLabel::SPlusCorner(Axis::from_index(k).unwrap_or(Axis::A))
                }
            }
            ComponentKind::SMinus(a) => RegionLabel::SMinus(a),
            ComponentKind::Sphere => RegionLabel::SphereCap,
            ComponentKind::Origin => RegionLabel::Interior,
        }
    }

    /// Exact `max w·f` over the f-space image of the surface patch.
    pub fn support(&self, w: [f64; 3]) -> SupportPoint {
        let mut best_val = f64::NEG_INFINITY;
        let mut best_u = self.rays[0];
        for idx in FACES {
            let (cands, count) = restricted_eigenvectors(self, idx, w);
            for t in &cands[..count] {
                let mut u = [0.0; 3];
                for (k, &i) in idx.iter().enumerate() {
                    let tk = t[k].max(0.0);
                    for l in 0..3 {
                        u[l] += tk * self.rays[i][l];
                    }
                }
                let den = quad(&self.a, u);
                if !(den > 0.0) {
                    continue;
                }
                let val = (w[0] * u[0] * u[0] + w[1] * u[1] * u[1] + w[2] * u[2] * u[2]) / den;
                if val > best_val {
                    best_val = val;
                    best_u = u;
                }
            }
        }
        let scale = self.c / quad(&self.a, best_u);
        let f = best_u.map(|v| scale * v * v);
        SupportPoint {
            value: self.c * best_val,
            f,
            kind: self.kind,
        }
    }
}

/// Ray subsets spanning the faces of a simplicial cone.
const FACES: [&[usize]; 7] = [&[0], &[1], &[2], &[0, 1], &[0, 2], &[1, 2], &[0, 1, 2]];

/// Generalized eigenvectors of `(RᵀWR, RᵀAR)` restricted to the rays in
/// `idx`, kept only when all entries share a sign (returned non-negative).
fn restricted_eigenvectors(comp: &Component, idx: &[usize], w: [f64; 3]) -> ([[f64; 3]; 3], usize) {
    let n = idx.len();
    let mut out = [[0.0; 3]; 3];
    if n == 1 {
        out[0][0] = 1.0;
        return (out, 1);
    }
    let mut m = [[0.0; 3]; 3];
    let mut b = [[0.0; 3]; 3];
    for (p, &i) in idx.iter().enumerate() {
        for (q, &j) in idx.iter().enumerate() {
            let ri = comp.rays[i];
            let rj = comp.rays[j];
            m[p][q] = w[0] * ri[0] * rj[0] + w[1] * ri[1] * rj[1] + w[2] * ri[2] * rj[2];
            b[p][q] = comp.ray_gram[i][j];
        }
    }
    // Cholesky b = L Lᵀ.
    let mut l = [[0.0; 3]; 3];
    for i in 0..n {
        for j in 0..=i {
            let mut s = b[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > 0.0) {
                    return (out, 0);
                }
                l[i][i] = libm::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    // c = L⁻¹ M L⁻ᵀ, via two triangular solves.
    let solve_lower = |rhs: &mut [f64; 3]| {
        for i in 0..n {
            let mut s = rhs[i];
            for k in 0..i {
                s -= l[i][k] * rhs[k];
            }
            rhs[i] = s / l[i][i];
        }
    };
    let mut x = [[0.0; 3]; 3];
    for col in 0..n {
        let mut v = [m[0][col], m[1][col], m[2][col]];
        solve_lower(&mut v);
        for i in 0..n {
            x[i][col] = v[i];
        }
    }
    let mut c = [[0.0; 3]; 3];
    for row in 0..n {
        let mut v = x[row];
        solve_lower(&mut v);
        for i in 0..n {
            c[i][row] = v[i];
        }
    }
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (c[i][j] + c[j][i]);
            c[i][j] = s;
            c[j][i] = s;
        }
    }
    let vecs = jacobi_small(&mut c, n);
    let mut count = 0;
    for k in 0..n {
        // t = L⁻ᵀ y
        let mut t = [vecs[0][k], vecs[1][k], vecs[2][k]];
        for i in (0..n).rev() {
            let mut s = t[i];
            for j in i + 1..n {
                s -= l[j][i] * t[j];
            }
            t[i] = s / l[i][i];
        }
        let max = t[..n].iter().map(|v| v.abs()).fold(0.0, f64::max);
        let sign = if t[..n].iter().sum::<f64>() < 0.0 {
            -1.0
        } else {
            1.0
        };
        let tol = 1e-10 * max;
        if t[..n].iter().all(|v| sign * v > -tol) {
            for i in 0..n {
                out[count][i] = sign * t[i];
            }
            count += 1;
        }
    }
    (out, count)
}

/// Cyclic Jacobi for symmetric matrices of order ≤ 3 held on the stack.
/// Returns the eigenvectors as columns; `a` ends up diagonal.
fn jacobi_small(a: &mut [[f64; 3]; 3], n: usize) -> [[f64; 3]; 3] {
    let mut v = [[0.0; 3]; 3];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| a[i][j].abs())
        .fold(0.0, f64::max);
    for _ in 0..50 {
        let mut off: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off = off.max(a[i][j].abs());
            }
        }
        if off <= 1e-17 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + libm::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for row in v.iter_mut().take(n) {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    v
}

/// Result of a gauge computation along an f-space ray.
#[derive(Clone, Debug, PartialEq)]
pub struct Gauge {
    /// Boundary point `t·v` with `v` the unit ray direction.
    pub f: [f64; 3],
    pub t: f64,
    /// Supporting normal at the boundary point, scaled so `w·v = 1`.
    pub normal: [f64; 3],
    /// Components touching the supporting plane, most supporting first.
    pub active: Vec<ComponentKind>,
}

/// Signed distance of an f-point to the hull boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Slack {
    /// `min over unit w of h(w) − w·f`: positive inside (distance to the
    /// boundary), negative outside (minus the distance to the hull).
    pub value: f64,
    pub normal: [f64; 3],
}

/// The 1→3 hull for a given `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hull {
    d: Dim,
    components: Vec<Component>,
}

const E: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// Orthonormal basis of the plane orthogonal to the unit vector `v`.
fn frame(v: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let mut k = 0;
    for i in 1..3 {
        if v[i].abs() < v[k].abs() {
            k = i;
        }
    }
    let mut e1 = E[k];
    let p = dot(e1, v);
    for i in 0..3 {
        e1[i] -= p * v[i];
    }
    let n1 = norm(e1);
    let e1 = e1.map(|x| x / n1);
    let e2 = [
        v[1] * e1[2] - v[2] * e1[1],
        v[2] * e1[0] - v[0] * e1[2],
        v[0] * e1[1] - v[1] * e1[0],
    ];
    (e1, e2)
}

impl Hull {
    /// Symmetric ellipsoid, the three antisymmetric ellipsoids (`d ≥ 3`)
    /// and the restricted sphere.
    pub fn new(d: Dim) -> Self {
        let df = d.as_f64();
        let mut components = Vec::with_capacity(5);
        let mut a = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] = if i == j { 1.0 } else { 0.0 } - 1.0 / (df + 2.0);
            }
        }
        components.push(Component::new(
            ComponentKind::SPlus,
            d,
            a,
            df * (df - 1.0),
            E,
            E,
        ));
        if d.get() >= 3 {
            for axis in Axis::ALL {
                let k = axis.index();
                let (i, j) = ((k + 1) % 3, (k + 2) % 3);
                let mut v = [1.0; 3];
                v[k] = -1.0;
                let mut a = [[0.0; 3]; 3];
                for p in 0..3 {
                    for q in 0..3 {
                        a[p][q] = if p == q { 1.0 } else { 0.0 } + v[p] * v[q] / (df - 2.0);
                    }
                }
                let mut r1 = E[k];
                r1[i] = 1.0;
                let mut r2 = E[k];
                r2[j] = 1.0;
                let mut cone = [1.0; 3];
                cone[i] = -1.0;
                cone[j] = -1.0;
                components.push(Component::new(
                    ComponentKind::SMinus(axis),
                    d,
                    a,
                    df * (df + 1.0),
                    [E[k], r1, r2],
                    [E[i], E[j], cone],
                ));
            }
        }
        let rays = [[1.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0]];
        let facets = [[-1.0, 1.0, 1.0], [1.0, -1.0, 1.0], [1.0, 1.0, -1.0]];
        components.push(Component::new(
            ComponentKind::Sphere,
            d,
            E,
            df * (df + 1.0),
            rays,
            facets,
        ));
        Self { d, components }
    }

    pub fn d(&self) -> Dim {
        self.d
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component(&self, kind: ComponentKind) -> Option<&Component> {
        self.components.iter().find(|c| c.kind == kind)
    }

    /// `h(w) = max w·f` over the hull.
    pub fn support(&self, w: [f64; 3]) -> f64 {
        self.components
            .iter()
            .map(|c| c.support(w).value)
            .fold(0.0, f64::max)
    }

    /// Per-component maximizers, the origin last.
    pub fn support_points(&self, w: [f64; 3]) -> Vec<SupportPoint> {
        let mut v: Vec<SupportPoint> = self.components.iter().map(|c| c.support(w)).collect();
        v.push(SupportPoint {
            value: 0.0,
            f: [0.0; 3],
            kind: ComponentKind::Origin,
        });
        v
    }

    /// Components whose maximizer attains `h(w)` within a relative `tol`,
    /// most supporting first.
    pub fn active(&self, w: [f64; 3], tol: f64) -> Vec<SupportPoint> {
        let mut pts = self.support_points(w);
        let h = pts
            .iter()
            .map(|p| p.value)
            .fold(f64::NEG_INFINITY, f64::max);
        let cut = h - tol * h.abs().max(norm(w));
        pts.retain(|p| p.value >= cut);
        pts.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.kind.cmp(&b.kind)));
        pts
    }

    /// Signed slack of an f-point; see [`Slack`].
    pub fn slack(&self, f: [f64; 3]) -> Slack {
        let obj = |w: [f64; 3]| self.support(w) - dot(w, f);
        let sphere = |p: &[f64]| {
            let (st, ct) = (libm::sin(p[0]), libm::cos(p[0]));
            [st * libm::cos(p[1]), st * libm::sin(p[1]), ct]
        };
        const SEEDS: usize = 192;
        let golden = core::f64::consts::PI * (3.0 - libm::sqrt(5.0));
        let mut seeds: Vec<(f64, [f64; 2])> = (0..SEEDS)
            .map(|k| {
                let z = 1.0 - 2.0 * (k as f64 + 0.5) / SEEDS as f64;
                let th = libm::acos(z);
                let ph = golden * k as f64;
                (obj(sphere(&[th, ph])), [th, ph])
            })
            .collect();
        // the outward normal of f itself is a good guess near the boundary
        let nf = norm(f);
        if nf > 0.0 {
            let th = libm::acos((f[2] / nf).clamp(-1.0, 1.0));
            let ph = libm::atan2(f[1], f[0]);
            seeds.push((obj(sphere(&[th, ph])), [th, ph]));
        }
        seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut best = Slack {
            value: f64::INFINITY,
            normal: [0.0; 3],
        };
        for (_, s) in seeds.iter().take(4) {
            let m = nelder_mead_restarts(|p| obj(sphere(p)), s, 0.2, 4);
            if m.value < best.value {
                best = Slack {
                    value: m.value,
                    normal: sphere(&m.x),
                };
            }
        }
        best
    }

    /// `true` unless `f` is outside the hull by more than `tol`.
    pub fn contains(&self, f: [f64; 3], tol: f64) -> bool {
        self.excess(f) <= tol
    }

    /// How far past the hull boundary `f` sits along its own ray, relative
    /// to `|f|`; non-positive inside. Deep interior points only get an
    /// upper bound, certified by a component surface point further out on
    /// the same ray (the segment to the origin lies in the hull).
    pub fn excess(&self, f: [f64; 3]) -> f64 {
        let nf = norm(f);
        if nf == 0.0 {
            return 0.0;
        }
        let u = f.map(|v| libm::sqrt(v.max(0.0)));
        let reach = self
            .components
            .iter()
            .filter_map(|c| c.radial_point(u))
            .map(|x| norm(x.map(|v| v * v)))
            .fold(0.0, f64::max);
        if reach >= nf {
            return (nf - reach) / nf;
        }
        let g = self.gauge(f, None);
        (nf - g.t) / nf
    }

    /// Largest `t` with `t·v̂` in the hull, `v̂ = v/|v|`, from the dual
    /// problem `min h(w)` over `w·v̂ = 1`. `hint` is a guess for the normal.
    pub fn gauge(&self, v: [f64; 3], hint: Option<[f64; 3]>) -> Gauge {
        let nv = norm(v);
        let v = v.map(|x| x / nv);
        let (e1, e2) = frame(v);
        let w_of = |p: &[f64]| {
            let mut w = v;
            for i in 0..3 {
                w[i] += p[0] * e1[i] + p[1] * e2[i];
            }
            w
        };
        let mut start = [0.0, 0.0];
        let mut step = 0.25;
        if let Some(h) = hint {
            let s = dot(h, v);
            if s > 1e-12 {
                let h = h.map(|x| x / s);
                start = [dot(h, e1), dot(h, e2)];
                step = 0.05;
            }
        }
        let m = nelder_mead_restarts(|p| self.support(w_of(p)), &start, step, 3);
        let w = w_of(&m.x);
        let active: Vec<ComponentKind> = self.active(w, 1e-6).into_iter().map(|p| p.kind).collect();
        if let [a, b, ..] = active[..] {
            if a != ComponentKind::Origin && b != ComponentKind::Origin {
                if let Some(g) = self.polish_pair(v, &w_of, m.x, a, b) {
                    return g;
                }
            }
        }
        let t = m.value;
        Gauge {
            f: v.map(|x| t * x),
            t,
            normal: w,
            active,
        }
    }

    /// Boundary point on a face shared by `a` and `b`, refined from a nearby
    /// normal without the global search. `None` if it does not certify.
    pub(crate) fn gauge_on_pair(
        &self,
        v: [f64; 3],
        hint: [f64; 3],
        a: ComponentKind,
        b: ComponentKind,
    ) -> Option<Gauge> {
        let nv = norm(v);
        let v = v.map(|x| x / nv);
        let s = dot(hint, v);
        if !(s > 1e-12) {
            return None;
        }
        let (e1, e2) = frame(v);
        let h = hint.map(|x| x / s);
        let w_of = |p: &[f64]| {
            let mut w = v;
            for i in 0..3 {
                w[i] += p[0] * e1[i] + p[1] * e2[i];
            }
            w
        };
        self.polish_pair(v, &w_of, alloc::vec![dot(h, e1), dot(h, e2)], a, b)
    }

    /// Newton refinement of a two-component face: the supporting normal
    /// ties both components, and the ray lies in the plane spanned by their
    /// maximizers. Returns `None` when the refinement does not certify.
    fn polish_pair(
        &self,
        v: [f64; 3],
        w_of: &dyn Fn(&[f64]) -> [f64; 3],
        start: Vec<f64>,
        a: ComponentKind,
        b: ComponentKind,
    ) -> Option<Gauge> {
        let (ca, cb) = (self.component(a)?, self.component(b)?);
        let resid = |p: &[f64]| {
            let w = w_of(p);
            let (sa, sb) = (ca.support(w), cb.support(w));
            let scale = (norm(sa.f) * norm(sb.f)).max(1e-300);
            let det = v[0] * (sa.f[1] * sb.f[2] - sa.f[2] * sb.f[1])
                - v[1] * (sa.f[0] * sb.f[2] - sa.f[2] * sb.f[0])
                + v[2] * (sa.f[0] * sb.f[1] - sa.f[1] * sb.f[0]);
            let hs = sa.value.abs().max(1.0);
            [(sa.value - sb.value) / hs, det / scale]
        };
        let mut p = start;
        let mut r = resid(&p);
        for _ in 0..40 {
            let rn = r[0].abs().max(r[1].abs());
            if rn < 1e-15 {
                break;
            }
            let hstep = 1e-7;
            let mut jac = [[0.0; 2]; 2];
            for k in 0..2 {
                let mut pp = p.clone();
                let mut pm = p.clone();
                pp[k] += hstep;
                pm[k] -= hstep;
                let (rp, rm) = (resid(&pp), resid(&pm));
                jac[0][k] = (rp[0] - rm[0]) / (2.0 * hstep);
                jac[1][k] = (rp[1] - rm[1]) / (2.0 * hstep);
            }
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            if det.abs() < 1e-300 {
                return None;
            }
            let dx = [
                (r[0] * jac[1][1] - r[1] * jac[0][1]) / det,
                (r[1] * jac[0][0] - r[0] * jac[1][0]) / det,
            ];
            let mut lam = 1.0;
            let mut improved = false;
            for _ in 0..12 {
                let q = [p[0] - lam * dx[0], p[1] - lam * dx[1]];
                let rq = resid(&q);
                if rq[0].abs().max(rq[1].abs()) < rn {
                    p = q.to_vec();
                    r = rq;
                    improved = true;
                    break;
                }
                lam *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if r[0].abs().max(r[1].abs()) > 1e-12 {
            return None;
        }
        let w = w_of(&p);
        let (sa, sb) = (ca.support(w), cb.support(w));
        // t v = λ f_a + (1 − λ) f_b, solved in least squares for (t, λ)
        let dvec = [sa.f[0] - sb.f[0], sa.f[1] - sb.f[1], sa.f[2] - sb.f[2]];
        let (vv, vd, dd) = (dot(v, v), dot(v, dvec), dot(dvec, dvec));
        let (vq, dq) = (dot(v, sb.f), dot(dvec, sb.f));
        let den = vv * dd - vd * vd;
        if den.abs() < 1e-14 * vv * dd.max(1e-300) {
            return None;
        }
        let t = (dd * vq - vd * dq) / den;
        let lam = (vd * vq - vv * dq) / den;
        if !(-1e-9..=1.0 + 1e-9).contains(&lam) || t <= 0.0 {
            return None;
        }
        let h = self.support(w);
        if h > sa.value.max(sb.value) + 1e-11 * h.abs().max(1.0) {
            return None;
        }
        let lam = lam.clamp(0.0, 1.0);
        let f = [0, 1, 2].map(|i| lam * sa.f[i] + (1.0 - lam) * sb.f[i]);
        Some(Gauge {
            f,
            t: norm(f),
            normal: w,
            active: alloc::vec![a, b],
        })
    }

    /// Hull boundary point on the f-ray `u∘u` of an x-space direction `u`,
    /// with its label.
    pub fn boundary_along(&self, u: [f64; 3]) -> ([f64; 3], RegionLabel) {
        let (f, label, _) = self.boundary_along_from(u, None);
        (f, label)
    }

    /// As [`Hull::boundary_along`], warm-started from a nearby face; also
    /// returns the face found when a gauge was needed.
    pub(crate) fn boundary_along_from(
        &self,
        u: [f64; 3],
        warm: Option<&Gauge>,
    ) -> ([f64; 3], RegionLabel, Option<Gauge>) {
        let v = u.map(|x| x * x);
        let mut outer: Option<(&Component, [f64; 3])> = None;
        for c in &self.components {
            if let Some(x) = c.radial_point(u) {
                let better = match outer {
                    None => true,
                    Some((_, y)) => norm(x) > norm(y),
                };
                if better {
                    outer = Some((c, x));
                }
            }
        }
        let mut hint = warm.map(|g| g.normal);
        if let Some((c, x)) = outer {
            let f = x.map(|v| v * v);
            if x.iter().all(|&xi| xi > 1e-9) {
                let mut n = [0.0; 3];
                for i in 0..3 {
                    n[i] = (0..3).map(|j| c.a[i][j] * x[j]).sum::<f64>() / x[i];
                }
                let h = self.support(n);
                let nf = dot(n, f);
                if h <= nf + 1e-12 * nf.abs().max(1.0) {
                    return (f, c.surface_label(x), None);
                }
                if hint.is_none() {
                    hint = Some(n);
                }
            }
        }
        let fast = warm.and_then(|w| match w.active[..] {
            [a, b] => self.gauge_on_pair(v, w.normal, a, b),
            _ => None,
        });
        let g = fast.unwrap_or_else(|| self.gauge(v, hint));
        let label = self.face_label(&g.active, g.f);
        (g.f, label, Some(g))
    }

    fn face_label(&self, active: &[ComponentKind], f: [f64; 3]) -> RegionLabel {
        match active {
            [] => RegionLabel::Interior,
            [k] => {
                let x = f.map(|v| libm::sqrt(v.max(0.0)));
                match self.component(*k) {
                    Some(c) => c.surface_label(x),
                    None => RegionLabel::MixedFace(*k, *k),
                }
            }
            [a, b, ..] => {
                let (a, b) = if a <= b { (*a, *b) } else { (*b, *a) };
                RegionLabel::MixedFace(a, b)
            }
        }
    }

    /// Label for a root-fidelity point: `Infeasible` outside the hull by
    /// more than `tol`, a surface label when the point satisfies a
    /// component equation inside its cone, `MixedFace` on the rest of the
    /// hull boundary, `Interior` otherwise.
    pub fn classify(&self, x: [f64; 3], tol: f64) -> RegionLabel {
        let f = x.map(|v| v * v);
        let slack = self.slack(f);
        if slack.value < -tol {
            return RegionLabel::Infeasible;
        }
        for c in &self.components {
            if c.in_cone(x, tol) && c.residual(x).abs() <= tol * c.c {
                return c.surface_label(x);
            }
        }
        if slack.value <= tol {
            let active: Vec<ComponentKind> = self
                .active(slack.normal, 1e-6)
                .into_iter()
                .map(|p| p.kind)
                .collect();
            return match self.face_label(&active, f) {
                RegionLabel::Interior => RegionLabel::Interior,
                other => other,
            };
        }
        RegionLabel::Interior
    }
}
