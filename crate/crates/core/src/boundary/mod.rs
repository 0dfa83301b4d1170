//! Analytic fidelity trade-off boundaries and region classification.
//!
//! Surfaces are generated in root-fidelity coordinates `x = √f`. Anything
//! involving convexity or mixing happens in f-space, where the attainable
//! set is convex.

mod hull;

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::machines::{coeffs_from_targets, Coeffs3, Sign};
use crate::qudit::Dim;

pub use hull::{Component, ComponentKind, Gauge, Hull, Slack, SupportPoint};

/// Tolerance for "lies on a surface" and for hull-boundary verdicts.
pub const EQUALITY_TOL: f64 = 1e-9;

/// `(x, y, z) = (√f_A, √f_B, √f_C)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootFidelityPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub d: Dim,
}

impl RootFidelityPoint {
    /// Checks `0 ≤ x, y, z ≤ d` up to [`EQUALITY_TOL`].
    pub fn new(x: f64, y: f64, z: f64, d: Dim) -> Result<Self> {
        let hi = d.as_f64() + EQUALITY_TOL;
        for v in [x, y, z] {
            if !(-EQUALITY_TOL..=hi).contains(&v) {
                return Err(Error::InvalidParameter("root fidelity outside [0, d]"));
            }
        }
        Ok(Self {
            x: x.max(0.0),
            y: y.max(0.0),
            z: z.max(0.0),
            d,
        })
    }

    pub fn from_f(f: [f64; 3], d: Dim) -> Result<Self> {
        let r = |v: f64| libm::sqrt(v.max(0.0));
        Self::new(r(f[0]), r(f[1]), r(f[2]), d)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn f(&self) -> [f64; 3] {
        [self.x * self.x, self.y * self.y, self.z * self.z]
    }
}

/// One of the three outputs `A`, `B`, `C`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    A,
    B,
    C,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::A, Axis::B, Axis::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Axis> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        ["A", "B", "C"][self.index()]
    }
}

/// Region of the 1→3 boundary a point belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    /// On the symmetric-subspace ellipsoid with all three golden-plane
    /// inequalities strict.
    SPlusCentral,
    /// On the symmetric-subspace ellipsoid near the given axis.
    SPlusCorner(Axis),
    /// On the antisymmetric ellipsoid whose cone singles out the axis.
    SMinus(Axis),
    SphereCap,
    /// On the hull boundary between two component surfaces.
    MixedFace(ComponentKind, ComponentKind),
    Interior,
    Infeasible,
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionLabel::SPlusCentral => f.write_str("SPlus_central"),
            RegionLabel::SPlusCorner(a) => write!(f, "SPlus_corner_{}", a.name()),
            RegionLabel::SMinus(a) => write!(f, "SMinus_{}", a.name()),
            RegionLabel::SphereCap => f.write_str("SphereCap"),
            RegionLabel::MixedFace(a, b) => write!(f, "MixedFace_{a}_{b}"),
            RegionLabel::Interior => f.write_str("Interior"),
            RegionLabel::Infeasible => f.write_str("Infeasible"),
        }
    }
}

/// Residual of the 1→2 ellipse:
/// `(x+y)²/(2(d+1)) + (x−y)²/(2(d−1)) − d`.
pub fn ellipse_residual(x: f64, y: f64, d: Dim) -> f64 {
    let d = d.as_f64();
    (x + y) * (x + y) / (2.0 * (d + 1.0)) + (x - y) * (x - y) / (2.0 * (d - 1.0)) - d
}

/// Residual of the symmetric-subspace ellipsoid:
/// `x²+y²+z² − (x+y+z)²/(d+2) − d(d−1)`.
pub fn symmetric_ellipsoid_residual(p: [f64; 3], d: Dim) -> f64 {
    let d = d.as_f64();
    let s = p[0] + p[1] + p[2];
    p.iter().map(|v| v * v).sum::<f64>() - s * s / (d + 2.0) - d * (d - 1.0)
}

/// Residual of the antisymmetric ellipsoid attached to `axis`, e.g. for
/// `C`: `x²+y²+z² + (x+y−z)²/(d−2) − d(d+1)`. Undefined at `d = 2`.
pub fn antisymmetric_ellipsoid_residual(axis: Axis, p: [f64; 3], d: Dim) -> Result<f64> {
    if d.get() == 2 {
        return Err(Error::InvalidParameter(
            "antisymmetric ellipsoids need d ≥ 3",
        ));
    }
    let df = d.as_f64();
    let s = p[0] + p[1] + p[2] - 2.0 * p[axis.index()];
    Ok(p.iter().map(|v| v * v).sum::<f64>() + s * s / (df - 2.0) - df * (df + 1.0))
}

/// Residual of the sphere `x²+y²+z² − d(d+1)`.
pub fn sphere_residual(p: [f64; 3], d: Dim) -> f64 {
    let d = d.as_f64();
    p.iter().map(|v| v * v).sum::<f64>() - d * (d + 1.0)
}

/// Residual of the 1→N bound: `Σ f_k − (Σ √f_k)²/(d+N−1) − d(d−1)`.
pub fn bound_1n(f: &[f64], d: Dim) -> f64 {
    let d = d.as_f64();
    let n = f.len() as f64;
    let sum: f64 = f.iter().sum();
    let roots: f64 = f.iter().map(|v| libm::sqrt(v.max(0.0))).sum();
    sum - roots * roots / (d + n - 1.0) - d * (d - 1.0)
}

/// Golden-plane margins `((d+1)x − y − z, (d+1)y − x − z, (d+1)z − x − y)`.
/// All three are non-negative exactly when the `U+` coefficients reaching
/// the point are.
pub fn golden_margins(p: [f64; 3], d: Dim) -> [f64; 3] {
    let d1 = d.as_f64() + 1.0;
    let s = p[0] + p[1] + p[2];
    [
        d1 * p[0] - (s - p[0]),
        d1 * p[1] - (s - p[1]),
        d1 * p[2] - (s - p[2]),
    ]
}

/// Points of the 1→2 ellipse on `resolution` rays at angles evenly spaced
/// over `[0, π/2]`.
pub fn ellipse_1to2(d: Dim, resolution: usize) -> Result<Vec<(f64, f64)>> {
    if resolution < 2 {
        return Err(Error::InvalidParameter("resolution must be at least 2"));
    }
    let df = d.as_f64();
    let step = core::f64::consts::FRAC_PI_2 / (resolution - 1) as f64;
    Ok((0..resolution)
        .map(|i| {
            let phi = step * i as f64;
            let (u1, u2) = (libm::cos(phi), libm::sin(phi));
            let q = (u1 + u2) * (u1 + u2) / (2.0 * (df + 1.0))
                + (u1 - u2) * (u1 - u2) / (2.0 * (df - 1.0));
            let r = libm::sqrt(df / q);
            (r * u1, r * u2)
        })
        .collect())
}

/// The symmetric point of the 1→2 ellipse, `x = y = √(d(d+1)/2)`.
pub fn ellipse_symmetric_point(d: Dim) -> f64 {
    let df = d.as_f64();
    libm::sqrt(df * (df + 1.0) / 2.0)
}

/// A boundary point with its f-space image and label.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshPoint {
    pub point: RootFidelityPoint,
    pub f: [f64; 3],
    pub region: RegionLabel,
    /// `(θ, φ)` grid index of the direction that produced the point.
    pub grid: (usize, usize),
}

/// Tessellated surface over the positive-octant direction grid.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryMesh {
    pub d: Dim,
    pub resolution: usize,
    pub points: Vec<MeshPoint>,
    /// Set when the surface does not exist for this `d`.
    pub skipped: Option<&'static str>,
    /// For the sphere cap: whether it lies inside the hull of the ellipsoids.
    pub contained_in_hull: Option<bool>,
}

impl BoundaryMesh {
    fn empty(d: Dim, resolution: usize) -> Self {
        Self {
            d,
            resolution,
            points: Vec::new(),
            skipped: None,
            contained_in_hull: None,
        }
    }

    /// `max w·f` over the mesh.
    pub fn support(&self, w: [f64; 3]) -> f64 {
        self.points
            .iter()
            .map(|p| w[0] * p.f[0] + w[1] * p.f[1] + w[2] * p.f[2])
            .fold(0.0, f64::max)
    }
}

/// Unit directions `(sin θ cos φ, sin θ sin φ, cos θ)` with `θ, φ` evenly
/// spaced over `[0, π/2]`, row-major in `(θ, φ)`.
pub fn octant_directions(resolution: usize) -> Result<Vec<((usize, usize), [f64; 3])>> {
    if resolution < 2 {
        return Err(Error::InvalidParameter("resolution must be at least 2"));
    }
    let step = core::f64::consts::FRAC_PI_2 / (resolution - 1) as f64;
    let mut out = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        let th = step * i as f64;
        for j in 0..resolution {
            let ph = step * j as f64;
            let u = [
                libm::sin(th) * libm::cos(ph),
                libm::sin(th) * libm::sin(ph),
                libm::cos(th),
            ];
            out.push(((i, j), u.map(|v| v.max(0.0))));
        }
    }
    Ok(out)
}

fn component_mesh(hull: &Hull, kinds: &[ComponentKind], resolution: usize) -> Result<BoundaryMesh> {
    let d = hull.d();
    let mut mesh = BoundaryMesh::empty(d, resolution);
    for (grid, u) in octant_directions(resolution)? {
        for comp in hull
            .components()
            .iter()
            .filter(|c| kinds.contains(&c.kind()))
        {
            if let Some(x) = comp.radial_point(u) {
                let point = RootFidelityPoint::new(x[0], x[1], x[2], d)?;
                mesh.points.push(MeshPoint {
                    point,
                    f: point.f(),
                    region: comp.surface_label(x),
                    grid,
                });
            }
        }
    }
    Ok(mesh)
}

/// Equality mesh of the symmetric-subspace ellipsoid over the octant.
pub fn surface_plus(d: Dim, resolution: usize) -> Result<BoundaryMesh> {
    component_mesh(&Hull::new(d), &[ComponentKind::SPlus], resolution)
}

/// Equality meshes of the three antisymmetric ellipsoids inside their
/// cones. Empty (with `skipped` set) at `d = 2`.
pub fn surfaces_minus(d: Dim, resolution: usize) -> Result<BoundaryMesh> {
    if d.get() == 2 {
        let mut mesh = BoundaryMesh::empty(d, resolution);
        mesh.skipped = Some("antisymmetric ellipsoids do not exist at d = 2");
        return Ok(mesh);
    }
    let kinds = Axis::ALL.map(ComponentKind::SMinus);
    component_mesh(&Hull::new(d), &kinds, resolution)
}

/// Sphere mesh inside the triangle cone `x ≤ y+z, y ≤ x+z, z ≤ x+y`.
pub fn sphere_cap(d: Dim, resolution: usize) -> Result<BoundaryMesh> {
    let mut mesh = component_mesh(&Hull::new(d), &[ComponentKind::Sphere], resolution)?;
    mesh.contained_in_hull = Some(d.get() >= 3);
    Ok(mesh)
}

/// Boundary of the convex hull of all components, one point per grid
/// direction `u`, found along the f-space ray `u∘u`.
pub fn hull(d: Dim, resolution: usize) -> Result<BoundaryMesh> {
    let h = Hull::new(d);
    let mut mesh = BoundaryMesh::empty(d, resolution);
    let mut warm = None;
    for (grid, u) in octant_directions(resolution)? {
        if grid.1 == 0 {
            warm = None;
        }
        let (f, region, face) = h.boundary_along_from(u, warm.as_ref());
        if face.is_some() {
            warm = face;
        }
        let point = RootFidelityPoint::from_f(f, d)?;
        mesh.points.push(MeshPoint {
            point,
            f,
            region,
            grid,
        });
    }
    Ok(mesh)
}

/// Coefficients of the `U±` machine whose fidelity point is the surface
/// point `f` of component `kind`. `U+` reaches the symmetric ellipsoid with
/// all targets non-negative; `U−` reaches an antisymmetric ellipsoid with
/// the cone axis flipped. Sphere points are tried with each axis flipped.
pub fn surface_coeffs(kind: ComponentKind, f: [f64; 3], d: Dim) -> Result<Coeffs3> {
    let root = f.map(|v| libm::sqrt(v.max(0.0)));
    let flipped = |k: usize| {
        let mut t = root;
        t[k] = -t[k];
        t
    };
    let candidates: Vec<([f64; 3], Sign)> = match kind {
        ComponentKind::SPlus => alloc::vec![(root, Sign::Plus)],
        ComponentKind::SMinus(a) => alloc::vec![(flipped(a.index()), Sign::Minus)],
        ComponentKind::Sphere => (0..3).map(|k| (flipped(k), Sign::Minus)).collect(),
        ComponentKind::Origin => {
            return Err(Error::InvalidParameter("no machine reaches the origin"))
        }
    };
    let scale = f.iter().fold(1.0, |m: f64, v| m.max(v.abs()));
    let mut last = Error::Singular;
    for (t, sign) in candidates {
        match coeffs_from_targets(t, sign, d) {
            Ok(c) => {
                let got = c.targets().squares();
                let off = (0..3).map(|i| (got[i] - f[i]).abs()).fold(0.0, f64::max);
                if off <= 1e-9 * scale {
                    return Ok(c);
                }
                last = Error::Degenerate("surface point is not reached by this machine family");
            }
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Label of a root-fidelity point relative to the 1→3 hull.
pub fn classify(point: &RootFidelityPoint) -> RegionLabel {
    Hull::new(point.d).classify(point.as_array(), EQUALITY_TOL)
}
