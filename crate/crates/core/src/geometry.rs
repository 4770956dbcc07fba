//! Analytic machinery tying curvature to singular-value ratios, the shape
//! operator on parametric surfaces, and synthetic manifold generators used
//! for verification.
//!
//! The arc results are exact: for points uniformly distributed on a
//! circular arc of radius `r` subtending a half-angle `T` about the
//! bisector axis, the covariance of the two coordinates has the closed form
//!
//! ```text
//! c11 = r^2 (1/2 + sin(2T)/(4T)) - r^2 sin(T)^2 / T^2      (bisector axis)
//! c22 = r^2 (2T - sin(2T)) / (4T)                          (arc direction)
//! ```
//!
//! whose small-angle limits are `c11 -> r^2 T^4 / 45` and
//! `c22 -> (r^2 T^2 / 3)(1 - T^2/5)`, so the singular-value ratio
//! `sqrt(min/max)` tends to `T / sqrt(15)`. Because the two closed-form
//! terms of `c11` cancel catastrophically for small `T`, that branch
//! switches to its Taylor series below `T = 0.12`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::eig2_general;
use crate::math::{cos, hypot, sin, sqrt};
use crate::rng::Rng;
use crate::{Error, Result};

/// Per-point tag of a synthetic cloud.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Label {
    None,
    Brim,
    Crown,
    Locus,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::None => "none",
            Label::Brim => "brim",
            Label::Crown => "crown",
            Label::Locus => "locus",
        }
    }
}

/// A set of points of uniform dimension, optionally labeled.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    labels: Vec<Label>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>, labels: Vec<Label>) -> Result<Self> {
        if dim == 0 || coords.len() % dim != 0 {
            return Err(Error::InvalidParameter(format!(
                "coordinate buffer of {} values is not a multiple of dimension {dim}",
                coords.len()
            )));
        }
        if labels.len() != coords.len() / dim {
            return Err(Error::InvalidParameter(format!(
                "{} labels for {} points",
                labels.len(),
                coords.len() / dim
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coordinate".into()));
        }
        Ok(PointCloud {
            dim,
            coords,
            labels,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Points carrying `label`, as a new cloud.
    pub fn filter_by_label(&self, label: Label) -> PointCloud {
        let mut coords = Vec::new();
        let mut labels = Vec::new();
        for i in 0..self.len() {
            if self.labels[i] == label {
                coords.extend_from_slice(self.point(i));
                labels.push(label);
            }
        }
        PointCloud {
            dim: self.dim,
            coords,
            labels,
        }
    }
}

/// A circular arc to sample: radius, half-angle at the center, point count.
#[derive(Clone, Copy, Debug)]
pub struct ArcSpec {
    pub radius: f64,
    pub half_angle: f64,
    pub count: usize,
}

impl ArcSpec {
    pub fn new(radius: f64, half_angle: f64, count: usize) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "radius {radius} must be positive"
            )));
        }
        if !(half_angle > 0.0 && half_angle <= core::f64::consts::PI) {
            return Err(Error::InvalidParameter(format!(
                "half angle {half_angle} outside (0, pi]"
            )));
        }
        if count < 3 {
            return Err(Error::InvalidParameter(format!(
                "arc needs at least 3 points, got {count}"
            )));
        }
        Ok(ArcSpec {
            radius,
            half_angle,
            count,
        })
    }
}

/// Deterministic uniform sampling of the arc: midpoint angles
/// `t_k = -T + 2T (k + 1/2) / count`, points `(r cos t_k, r sin t_k)`.
pub fn sample_arc(spec: &ArcSpec) -> PointCloud {
    let n = spec.count;
    let t_span = 2.0 * spec.half_angle;
    let mut coords = Vec::with_capacity(2 * n);
    for k in 0..n {
        let t = -spec.half_angle + t_span * (k as f64 + 0.5) / n as f64;
        coords.push(spec.radius * cos(t));
        coords.push(spec.radius * sin(t));
    }
    PointCloud {
        dim: 2,
        coords,
        labels: vec![Label::None; n],
    }
}

/// Coordinate variances of arc data and their ordered eigenvalues.
///
/// `c11` is the variance along the bisector axis, `c22` along the arc
/// direction; the cross-covariance vanishes by symmetry, so the eigenvalues
/// are just the ordered pair.
#[derive(Clone, Copy, Debug)]
pub struct CovariancePair {
    pub c11: f64,
    pub c22: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

/// Switch to series evaluation below this half-angle; the closed form of
/// `c11` loses ~`eps / T^4` relative accuracy to cancellation.
const SERIES_THRESHOLD: f64 = 0.12;

/// Closed-form covariance of the uniform arc distribution.
pub fn analytic_arc_covariance(radius: f64, half_angle: f64) -> Result<CovariancePair> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "radius {radius} must be positive"
        )));
    }
    if !(half_angle > 0.0 && half_angle <= core::f64::consts::PI) {
        return Err(Error::InvalidParameter(format!(
            "half angle {half_angle} outside (0, pi]"
        )));
    }
    let r2 = radius * radius;
    let t = half_angle;
    let (c11, c22) = if t < SERIES_THRESHOLD {
        let t2 = t * t;
        let t4 = t2 * t2;
        (
            r2 * t4 * (1.0 / 45.0 - t2 / 315.0 + t4 / 4725.0),
            r2 * t2 * (1.0 / 3.0 - t2 / 15.0 + 2.0 * t4 / 315.0 - t2 * t4 / 2835.0),
        )
    } else {
        let c11 = r2 * (0.5 + sin(2.0 * t) / (4.0 * t) - (sin(t) / t) * (sin(t) / t));
        let c22 = r2 / (4.0 * t) * (2.0 * t - sin(2.0 * t));
        (c11, c22)
    };
    let c11 = c11.max(0.0);
    let c22 = c22.max(0.0);
    Ok(CovariancePair {
        c11,
        c22,
        lambda1: c11.max(c22),
        lambda2: c11.min(c22),
    })
}

/// Population covariance (and its eigenvalues) of a 2-d cloud.
pub fn empirical_covariance(cloud: &PointCloud) -> Result<CovariancePair> {
    if cloud.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: cloud.dim(),
        });
    }
    let n = cloud.len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty cloud".into()));
    }
    let inv = 1.0 / n as f64;
    let (mut mx, mut my) = (0.0, 0.0);
    for i in 0..n {
        let p = cloud.point(i);
        mx += p[0];
        my += p[1];
    }
    mx *= inv;
    my *= inv;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let p = cloud.point(i);
        let dx = p[0] - mx;
        let dy = p[1] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    sxx *= inv;
    sxy *= inv;
    syy *= inv;
    let mean = 0.5 * (sxx + syy);
    let half_diff = 0.5 * (sxx - syy);
    let root = hypot(half_diff, sxy);
    Ok(CovariancePair {
        c11: sxx,
        c22: syy,
        lambda1: mean + root,
        lambda2: (mean - root).max(0.0),
    })
}

/// Exact singular-value ratio `sigma2/sigma1 = sqrt(lambda2/lambda1)` of the
/// arc covariance. Valid in the small-angle regime `0 < T < 1`; the radius
/// cancels algebraically.
///
/// Documented approximations for comparison: [`ratio_approx`] (fourth-order)
/// and [`ratio_small_angle`] (leading order).
pub fn theorem_ratio(radius: f64, half_angle: f64) -> Result<f64> {
    if !(half_angle > 0.0 && half_angle < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "half angle {half_angle} outside the small-angle regime (0, 1)"
        )));
    }
    let cov = analytic_arc_covariance(radius, half_angle)?;
    Ok(sqrt(cov.lambda2 / cov.lambda1))
}

/// Fourth-order approximation `T / sqrt(3 (5 - T^2))` of the arc ratio.
pub fn ratio_approx(half_angle: f64) -> f64 {
    half_angle / sqrt(3.0 * (5.0 - half_angle * half_angle))
}

/// Leading-order approximation `T / sqrt(15)` of the arc ratio.
pub fn ratio_small_angle(half_angle: f64) -> f64 {
    half_angle / sqrt(15.0)
}

/// A surface `(u, v) -> R^3` with first partials.
pub trait ParametricSurface {
    fn point(&self, u: f64, v: f64) -> [f64; 3];
    fn tangent_u(&self, u: f64, v: f64) -> [f64; 3];
    fn tangent_v(&self, u: f64, v: f64) -> [f64; 3];
}

/// The saddle `(u, v, u^3 - 3 u v^2)` with analytic partials.
pub struct Saddle;

impl ParametricSurface for Saddle {
    fn point(&self, u: f64, v: f64) -> [f64; 3] {
        [u, v, u * u * u - 3.0 * u * v * v]
    }
    fn tangent_u(&self, u: f64, v: f64) -> [f64; 3] {
        [1.0, 0.0, 3.0 * (u * u - v * v)]
    }
    fn tangent_v(&self, u: f64, v: f64) -> [f64; 3] {
        [0.0, 1.0, -6.0 * u * v]
    }
}

/// The flat plane `(u, v, 0)`.
pub struct Plane;

impl ParametricSurface for Plane {
    fn point(&self, u: f64, v: f64) -> [f64; 3] {
        [u, v, 0.0]
    }
    fn tangent_u(&self, _u: f64, _v: f64) -> [f64; 3] {
        [1.0, 0.0, 0.0]
    }
    fn tangent_v(&self, _u: f64, _v: f64) -> [f64; 3] {
        [0.0, 1.0, 0.0]
    }
}

/// The unit sphere in spherical angles, `u` the colatitude and `v` the
/// azimuth; singular at the poles `u = 0, pi`.
pub struct Sphere;

impl ParametricSurface for Sphere {
    fn point(&self, u: f64, v: f64) -> [f64; 3] {
        [sin(u) * cos(v), sin(u) * sin(v), cos(u)]
    }
    fn tangent_u(&self, u: f64, v: f64) -> [f64; 3] {
        [cos(u) * cos(v), cos(u) * sin(v), -sin(u)]
    }
    fn tangent_v(&self, u: f64, v: f64) -> [f64; 3] {
        [-sin(u) * sin(v), sin(u) * cos(v), 0.0]
    }
}

/// Wraps a bare evaluator, supplying partials by central differences.
pub struct DifferencedSurface<F> {
    eval: F,
    step: f64,
}

impl<F: Fn(f64, f64) -> [f64; 3]> DifferencedSurface<F> {
    pub fn new(eval: F) -> Self {
        Self::with_step(eval, 1e-5)
    }

    pub fn with_step(eval: F, step: f64) -> Self {
        DifferencedSurface { eval, step }
    }
}

impl<F: Fn(f64, f64) -> [f64; 3]> ParametricSurface for DifferencedSurface<F> {
    fn point(&self, u: f64, v: f64) -> [f64; 3] {
        (self.eval)(u, v)
    }
    fn tangent_u(&self, u: f64, v: f64) -> [f64; 3] {
        let h = self.step;
        let p = (self.eval)(u + h, v);
        let m = (self.eval)(u - h, v);
        [
            (p[0] - m[0]) / (2.0 * h),
            (p[1] - m[1]) / (2.0 * h),
            (p[2] - m[2]) / (2.0 * h),
        ]
    }
    fn tangent_v(&self, u: f64, v: f64) -> [f64; 3] {
        let h = self.step;
        let p = (self.eval)(u, v + h);
        let m = (self.eval)(u, v - h);
        [
            (p[0] - m[0]) / (2.0 * h),
            (p[1] - m[1]) / (2.0 * h),
            (p[2] - m[2]) / (2.0 * h),
        ]
    }
}

/// Tuning knobs for [`shape_operator`].
#[derive(Clone, Copy, Debug)]
pub struct ShapeOperatorConfig {
    /// Central-difference step for the normal's directional derivatives.
    pub normal_step: f64,
    /// Tolerated imaginary part before eigenvalues count as complex.
    pub imag_tol: f64,
    /// Minimum tangent cross-product norm before the point is singular.
    pub tangent_tol: f64,
}

impl Default for ShapeOperatorConfig {
    fn default() -> Self {
        ShapeOperatorConfig {
            normal_step: 1e-5,
            imag_tol: 1e-6,
            tangent_tol: 1e-10,
        }
    }
}

/// A plane through the surface point spanned by a principal direction and
/// the unit normal, stored as that (orthonormal) ordered pair.
#[derive(Clone, Copy, Debug)]
pub struct PrincipalSection {
    pub direction: [f64; 3],
    pub normal: [f64; 3],
}

/// Shape operator at a surface point: the 2x2 matrix, unit normal,
/// eigenpairs ordered by descending curvature, and principal sections.
///
/// The matrix follows the convention `S[j1][j2] = -dN/dx_{j1} . vhat_{j2}`
/// with literal parameter partials of the unit normal and unit tangents
/// `vhat`; its eigenvalues reproduce the true principal curvatures where
/// the parametrization is orthonormal at the point.
#[derive(Clone, Debug)]
pub struct ShapeOperatorResult {
    pub shape: [[f64; 2]; 2],
    pub normal: [f64; 3],
    /// Principal curvatures, descending.
    pub curvatures: [f64; 2],
    /// Eigenvectors in the `(vhat_u, vhat_v)` tangent basis.
    pub tangent_directions: [[f64; 2]; 2],
    /// Eigenvectors lifted to unit 3-vectors.
    pub principal_directions: [[f64; 3]; 2],
    pub sections: [PrincipalSection; 2],
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm3(a: [f64; 3]) -> f64 {
    sqrt(dot3(a, a))
}

fn scaled(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn unit_normal(
    surface: &impl ParametricSurface,
    u: f64,
    v: f64,
    tangent_tol: f64,
) -> Result<[f64; 3]> {
    let n = cross(surface.tangent_u(u, v), surface.tangent_v(u, v));
    let len = norm3(n);
    if len <= tangent_tol {
        return Err(Error::SingularSurface { u, v, norm: len });
    }
    Ok(scaled(n, 1.0 / len))
}

/// Shape operator with default configuration.
pub fn shape_operator(
    surface: &impl ParametricSurface,
    u: f64,
    v: f64,
) -> Result<ShapeOperatorResult> {
    shape_operator_with(surface, u, v, &ShapeOperatorConfig::default())
}

pub fn shape_operator_with(
    surface: &impl ParametricSurface,
    u: f64,
    v: f64,
    cfg: &ShapeOperatorConfig,
) -> Result<ShapeOperatorResult> {
    let tu = surface.tangent_u(u, v);
    let tv = surface.tangent_v(u, v);
    let normal = unit_normal(surface, u, v, cfg.tangent_tol)?;
    let vhat_u = scaled(tu, 1.0 / norm3(tu));
    let vhat_v = scaled(tv, 1.0 / norm3(tv));

    let h = cfg.normal_step;
    let diff = |p: [f64; 3], m: [f64; 3]| {
        [
            (p[0] - m[0]) / (2.0 * h),
            (p[1] - m[1]) / (2.0 * h),
            (p[2] - m[2]) / (2.0 * h),
        ]
    };
    let dn_du = diff(
        unit_normal(surface, u + h, v, cfg.tangent_tol)?,
        unit_normal(surface, u - h, v, cfg.tangent_tol)?,
    );
    let dn_dv = diff(
        unit_normal(surface, u, v + h, cfg.tangent_tol)?,
        unit_normal(surface, u, v - h, cfg.tangent_tol)?,
    );

    let shape = [
        [-dot3(dn_du, vhat_u), -dot3(dn_du, vhat_v)],
        [-dot3(dn_dv, vhat_u), -dot3(dn_dv, vhat_v)],
    ];
    let (curvatures, tangent_directions) = eig2_general(shape, cfg.imag_tol)?;

    let lift = |e: [f64; 2]| -> [f64; 3] {
        let d = [
            e[0] * vhat_u[0] + e[1] * vhat_v[0],
            e[0] * vhat_u[1] + e[1] * vhat_v[1],
            e[0] * vhat_u[2] + e[1] * vhat_v[2],
        ];
        scaled(d, 1.0 / norm3(d))
    };
    let principal_directions = [lift(tangent_directions[0]), lift(tangent_directions[1])];
    let sections = [
        PrincipalSection {
            direction: principal_directions[0],
            normal,
        },
        PrincipalSection {
            direction: principal_directions[1],
            normal,
        },
    ];
    Ok(ShapeOperatorResult {
        shape,
        normal,
        curvatures,
        tangent_directions,
        principal_directions,
        sections,
    })
}

/// Default half-width of the band labeled as the transition locus.
pub const DEFAULT_LOCUS_BAND: f64 = 0.1;

/// Seeded sombrero-hat cloud: `R ~ U[0, 4]`, `theta ~ U[0, pi]`, height
/// `4 - R^2` inside radius 2 and flat outside, labeled crown / locus / brim
/// by distance from the fold at `R = 2`.
pub fn generate_sombrero(n: usize, seed: u64) -> Result<PointCloud> {
    generate_sombrero_with(n, seed, DEFAULT_LOCUS_BAND)
}

pub fn generate_sombrero_with(n: usize, seed: u64, locus_band: f64) -> Result<PointCloud> {
    if n < 10 {
        return Err(Error::InvalidParameter(format!(
            "sombrero needs at least 10 points, got {n}"
        )));
    }
    if !(locus_band > 0.0 && locus_band < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "locus band half-width {locus_band} outside (0, 2)"
        )));
    }
    let mut rng = Rng::new(seed);
    let mut coords = Vec::with_capacity(3 * n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let r = rng.uniform(0.0, 4.0);
        let theta = rng.uniform(0.0, core::f64::consts::PI);
        let x3 = if r <= 2.0 { 4.0 - r * r } else { 0.0 };
        coords.push(r * cos(theta));
        coords.push(r * sin(theta));
        coords.push(x3);
        labels.push(if r < 2.0 - locus_band {
            Label::Crown
        } else if r > 2.0 + locus_band {
            Label::Brim
        } else {
            Label::Locus
        });
    }
    Ok(PointCloud {
        dim: 3,
        coords,
        labels,
    })
}
