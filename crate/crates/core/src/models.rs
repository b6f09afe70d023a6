//! Models of the double hyperbolic space and conversions between them.
//!
//! The hyperboloid model is canonical: a point is an [`AmbientVector`] with
//! `x·x = -1`, upper sheet on the `Plus` copy, lower sheet on `Minus`. The
//! other models are charts used by the integration engines:
//!
//! - hemisphere: `u = x / x₀` lands on the unit sphere, upper sheet on the
//!   upper hemisphere `u₀ > 0`, lower sheet on `u₀ < 0`, ideal boundary on the
//!   equator `u₀ = 0`. The antipodal map is `(u₀, ū) ↦ (-u₀, ū)`.
//! - upper half-space: stereographic image of the hemisphere from the pole
//!   `u_n = -1`; coordinates `(z₀, …, z_{n-1})`, the two sheets are `z₀ > 0`
//!   and `z₀ < 0`, glued along `z₀ = 0` plus a point at infinity. The
//!   antipodal map is `(z₀, z̄) ↦ (-z₀, z̄)`.
//! - Klein: central projection `k = x̄ / |x₀|`; both sheets project onto the
//!   same disk (the cover flag tells them apart) and wall membership becomes
//!   linear there.
//! - Poincare: conversion-only; the upper sheet maps into the unit ball, the
//!   lower sheet to its exterior, the lower apex to infinity.

use num_complex::Complex;

use crate::minkowski::{classify, AmbientTag, AmbientVector, PointClass};
use crate::{Error, Result};

/// Tolerance for round trips and chart preconditions.
pub const MODEL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Model {
    Hyperboloid,
    Hemisphere,
    UpperHalfSpace,
    Klein,
    Poincare,
}

/// Which sheet a model point denotes. Redundant whenever the chart encodes
/// the sheet in a coordinate sign, essential for the Klein model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Cover {
    Upper,
    Lower,
}

/// A point expressed in one of the supported models.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPoint {
    pub model: Model,
    pub coords: Vec<f64>,
    pub cover: Cover,
}

impl ModelPoint {
    pub fn new(model: Model, coords: Vec<f64>, cover: Cover) -> Self {
        Self { model, coords, cover }
    }

    /// Wrap a hyperboloid point.
    pub fn hyperboloid(x: &AmbientVector) -> Self {
        let cover = if x.tag == AmbientTag::Plus { Cover::Upper } else { Cover::Lower };
        Self::new(Model::Hyperboloid, x.coords.clone(), cover)
    }
}

/// Signed density of the volume element with respect to the chart's Lebesgue
/// measure (complex-typed for uniformity with the regularized integrands).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricDensity {
    pub value: Complex<f64>,
}

/// Path selector for [`geodesic_distance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathChoice {
    /// Shortest / canonical branch: real distance within a sheet, `πi + t`
    /// across sheets (exactly `πi` for antipodes).
    Auto,
    /// Go through the ideal boundary: the complementary arc `±(2πi - t)`
    /// within a sheet, the same `πi + t` branch across sheets.
    ThroughBoundary,
    /// Stay inside one sheet; invalid across sheets.
    WithinSheet,
}

fn tag_of(cover: Cover) -> AmbientTag {
    match cover {
        Cover::Upper => AmbientTag::Plus,
        Cover::Lower => AmbientTag::Minus,
    }
}

/// Convert any finite model point to its hyperboloid representative.
pub fn to_hyperboloid(p: &ModelPoint) -> Result<AmbientVector> {
    match p.model {
        Model::Hyperboloid => Ok(AmbientVector::new(p.coords.clone(), tag_of(p.cover))),
        Model::Hemisphere => {
            let u0 = p.coords[0];
            if u0.abs() < MODEL_TOL {
                return Err(Error::IdealEndpoint("hemisphere equator point".into()));
            }
            let x0 = 1.0 / u0;
            let mut coords = vec![x0];
            coords.extend(p.coords[1..].iter().map(|u| u * x0));
            let tag = if x0 > 0.0 { AmbientTag::Plus } else { AmbientTag::Minus };
            Ok(AmbientVector::new(coords, tag))
        }
        Model::UpperHalfSpace => to_hyperboloid(&upper_half_space_to_hemisphere(p)?),
        Model::Klein => {
            let k2: f64 = p.coords.iter().map(|c| c * c).sum();
            if k2 >= 1.0 - MODEL_TOL {
                return Err(Error::IdealEndpoint("Klein boundary point".into()));
            }
            let a = 1.0 / (1.0 - k2).sqrt();
            let (x0, tag) = match p.cover {
                Cover::Upper => (a, AmbientTag::Plus),
                Cover::Lower => (-a, AmbientTag::Minus),
            };
            let mut coords = vec![x0];
            coords.extend(p.coords.iter().map(|k| k * a));
            Ok(AmbientVector::new(coords, tag))
        }
        Model::Poincare => {
            let s: f64 = p.coords.iter().map(|c| c * c).sum();
            if (s - 1.0).abs() < MODEL_TOL {
                return Err(Error::IdealEndpoint("Poincare boundary point".into()));
            }
            let x0 = (1.0 + s) / (1.0 - s);
            let f = 2.0 / (1.0 - s);
            let mut coords = vec![x0];
            coords.extend(p.coords.iter().map(|c| c * f));
            let tag = if s < 1.0 { AmbientTag::Plus } else { AmbientTag::Minus };
            Ok(AmbientVector::new(coords, tag))
        }
    }
}

/// `x ↦ x / x₀` onto the unit sphere. Rejects `x₀ = 0` (not a hyperboloid
/// point anyway, but guarded for raw inputs).
pub fn hyperboloid_to_hemisphere(x: &AmbientVector) -> Result<ModelPoint> {
    let x0 = x.coords[0];
    if x0.abs() < MODEL_TOL {
        return Err(Error::Domain("hemisphere chart undefined at x0 = 0".into()));
    }
    let mut coords = vec![1.0 / x0];
    coords.extend(x.coords[1..].iter().map(|c| c / x0));
    let cover = if x0 > 0.0 { Cover::Upper } else { Cover::Lower };
    Ok(ModelPoint::new(Model::Hemisphere, coords, cover))
}

/// Stereographic chart from the pole `u_n = -1`; that pole itself is the
/// model's point at infinity.
pub fn hemisphere_to_upper_half_space(u: &ModelPoint) -> Result<ModelPoint> {
    debug_assert_eq!(u.model, Model::Hemisphere);
    let n = u.coords.len() - 1;
    let un = u.coords[n];
    let denom = un + 1.0;
    if denom.abs() < MODEL_TOL {
        return Err(Error::PointAtInfinity("hemisphere pole u_n = -1".into()));
    }
    let coords: Vec<f64> = (0..n).map(|j| 2.0 * u.coords[j] / denom).collect();
    Ok(ModelPoint::new(Model::UpperHalfSpace, coords, u.cover))
}

/// Inverse stereographic chart back onto the unit sphere.
pub fn upper_half_space_to_hemisphere(z: &ModelPoint) -> Result<ModelPoint> {
    debug_assert_eq!(z.model, Model::UpperHalfSpace);
    let s: f64 = z.coords.iter().map(|c| c * c).sum::<f64>() / 4.0;
    let denom = 1.0 + s;
    let mut coords: Vec<f64> = z.coords.iter().map(|c| c / denom).collect();
    coords.push((1.0 - s) / denom);
    let cover = if coords[0] > 0.0 {
        Cover::Upper
    } else if coords[0] < 0.0 {
        Cover::Lower
    } else {
        z.cover
    };
    Ok(ModelPoint::new(Model::Hemisphere, coords, cover))
}

/// Central projection `k_i = x_i / |x₀|`; both sheets land on the open disk.
pub fn hyperboloid_to_klein(x: &AmbientVector) -> Result<ModelPoint> {
    let x0 = x.coords[0];
    if x0.abs() < MODEL_TOL {
        return Err(Error::Domain("Klein chart undefined at x0 = 0".into()));
    }
    let a = x0.abs();
    let coords: Vec<f64> = x.coords[1..].iter().map(|c| c / a).collect();
    let cover = if x0 > 0.0 { Cover::Upper } else { Cover::Lower };
    Ok(ModelPoint::new(Model::Klein, coords, cover))
}

/// Conversion into the Poincare ball (upper sheet) / ball exterior (lower
/// sheet). The lower apex has no image (it maps to infinity).
pub fn hyperboloid_to_poincare(x: &AmbientVector) -> Result<ModelPoint> {
    let x0 = x.coords[0];
    let denom = 1.0 + x0;
    if denom.abs() < MODEL_TOL {
        return Err(Error::PointAtInfinity("lower apex maps to infinity in the Poincare model".into()));
    }
    let coords: Vec<f64> = x.coords[1..].iter().map(|c| c / denom).collect();
    let cover = if x0 > 0.0 { Cover::Upper } else { Cover::Lower };
    Ok(ModelPoint::new(Model::Poincare, coords, cover))
}

/// Projective image of an ideal point (lightlike direction) in a boundary
/// chart. Future and past rays are identified: `project_ideal(v)` equals
/// `project_ideal(-v)` regardless of tags.
pub fn project_ideal(v: &AmbientVector, target: Model) -> Result<ModelPoint> {
    if classify(v) != PointClass::LightCone {
        return Err(Error::Domain("project_ideal requires a lightlike direction".into()));
    }
    let v0 = v.coords[0];
    if v0.abs() < MODEL_TOL {
        return Err(Error::Domain("zero lightlike direction".into()));
    }
    // normalized future representative (1, w̄) with |w̄| = 1
    let w: Vec<f64> = v.coords[1..].iter().map(|c| c / v0).collect();
    let n = w.len();
    match target {
        Model::Hemisphere => {
            let mut coords = vec![0.0];
            coords.extend(w.iter().copied());
            Ok(ModelPoint::new(Model::Hemisphere, coords, Cover::Upper))
        }
        Model::UpperHalfSpace => {
            let denom = w[n - 1] + 1.0;
            if denom.abs() < MODEL_TOL {
                return Err(Error::PointAtInfinity(
                    "this ideal point is the half-space model's infinity".into(),
                ));
            }
            let mut coords = vec![0.0];
            coords.extend(w[..n - 1].iter().map(|c| 2.0 * c / denom));
            Ok(ModelPoint::new(Model::UpperHalfSpace, coords, Cover::Upper))
        }
        Model::Klein | Model::Poincare => Ok(ModelPoint::new(target, w, Cover::Upper)),
        Model::Hyperboloid => Err(Error::Unsupported(
            "ideal points have no finite hyperboloid representative".into(),
        )),
    }
}

/// Complex-valued geodesic distance.
///
/// Within a sheet the distance is real on the upper sheet and its negative on
/// the lower sheet; `ThroughBoundary` selects the complementary arc
/// `±(2πi - t)` through both ideal points. Across sheets the branch is fixed
/// to `πi + t` where `t ≥ 0` is the distance of the upper-sheet
/// representatives (so antipodal points are at exactly `πi`); a `WithinSheet`
/// path across sheets does not exist. Every branch satisfies
/// `x·y = -cosh d`.
pub fn geodesic_distance(x: &ModelPoint, y: &ModelPoint, path: PathChoice) -> Result<Complex<f64>> {
    let xa = to_hyperboloid(x)?;
    let ya = to_hyperboloid(y)?;
    for (v, name) in [(&xa, "first"), (&ya, "second")] {
        match classify(v) {
            PointClass::UpperHyperboloid | PointClass::LowerHyperboloid => {}
            PointClass::LightCone => {
                return Err(Error::IdealEndpoint(format!("{name} endpoint is ideal")))
            }
            _ => return Err(Error::Domain(format!("{name} endpoint is not a hyperboloid point"))),
        }
    }
    let dot = crate::minkowski::minkowski_dot(&xa, &ya)?;
    let pi = std::f64::consts::PI;
    if xa.tag == ya.tag {
        // same sheet: dot = -cosh t for the sheet's own representatives
        let t = (-dot).max(1.0).acosh();
        let sign = xa.ell();
        match path {
            PathChoice::Auto | PathChoice::WithinSheet => Ok(Complex::new(sign * t, 0.0)),
            PathChoice::ThroughBoundary => Ok(Complex::new(-sign * t, sign * 2.0 * pi)),
        }
    } else {
        // opposite sheets: dot = +cosh t with t the upper-representative gap
        let t = dot.max(1.0).acosh();
        match path {
            PathChoice::Auto | PathChoice::ThroughBoundary => Ok(Complex::new(t, pi)),
            PathChoice::WithinSheet => Err(Error::InvalidPath(
                "no within-sheet path joins points on opposite sheets".into(),
            )),
        }
    }
}

/// Signed volume-element density of the chart at a model point.
///
/// Upper half-space: `1 / z₀^n`. Hemisphere: `sign(u₀) / u₀^{n+1}` (the sign
/// makes the element positive on the upper hemisphere and accounts for the
/// reversed graph orientation below). Other models are not charts of the
/// integration engines and are unsupported.
pub fn metric_density(p: &ModelPoint) -> Result<MetricDensity> {
    match p.model {
        Model::UpperHalfSpace => {
            let n = p.coords.len();
            let z0 = p.coords[0];
            if z0.abs() < MODEL_TOL {
                return Err(Error::SingularDensity);
            }
            Ok(MetricDensity { value: Complex::new(z0.powi(-(n as i32)), 0.0) })
        }
        Model::Hemisphere => {
            let n = p.coords.len() - 1;
            let u0 = p.coords[0];
            if u0.abs() < MODEL_TOL {
                return Err(Error::SingularDensity);
            }
            let v = u0.signum() * u0.powi(-(n as i32 + 1));
            Ok(MetricDensity { value: Complex::new(v, 0.0) })
        }
        _ => Err(Error::Unsupported("metric density is defined for the half-space and hemisphere charts".into())),
    }
}
