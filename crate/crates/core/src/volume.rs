//! ε-regularized complex volume functionals and their ε → 0⁺
//! extrapolation, plus the closed-form evaluators in low dimensions.
//!
//! Half-space-chart functional (the workhorse):
//!
//! ```text
//! μ_{u,ε}(P) = ∫_P dz₀ … dz_{n-1} / (z₀ - εi)ⁿ
//! ```
//!
//! integrated over the chart region of P, both signs of z₀ for two-sheet
//! polytopes. For each horizontal point w the fiber is `{|z₀| ∈ [lo, hi]}`
//! and the z₀ integral has an exact antiderivative; the lower-sheet fiber
//! contributes exactly `(-1)ⁿ · conj` of the upper one, so the paired
//! value is `2·Re` (n even) or `2i·Im` (n odd) of the upper-fiber value.
//! This makes the parity statement (even volumes real, odd ones purely
//! imaginary) hold to machine precision at every ε, not only in the limit.
//!
//! Sphere-chart functionals, parametrized over the sphere of radius r by
//! `x = r(cos ψ, sin ψ·ω)`:
//!
//! ```text
//! μ_{h,ε}:  ∫ rⁿ sin^{n-1}ψ / (r cos ψ - εi)ⁿ dψ dω
//! μ'_{h,ε}: ∫ r^{n+1} sin^{n-1}ψ cos ψ / (r cos ψ - εi)^{n+1} dψ dω
//! ```
//!
//! whose fold ψ ↦ π-ψ again produces the `(-1)ⁿ · conj` pairing.

use crate::geom::{self, MapElement, WallShape};
use crate::numeric::{self, QuadratureRule};
use crate::polytope::{Polytope, PolytopeKind};
use crate::{Complex, Error, Result};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Geometric grid of regularization parameters ε_k = eps0·ratioᵏ.
#[derive(Debug, Clone, Copy)]
pub struct EpsilonLadder {
    pub eps0: f64,
    pub ratio: f64,
    pub count: usize,
}

impl Default for EpsilonLadder {
    fn default() -> Self {
        Self { eps0: 0.2, ratio: 0.5, count: 8 }
    }
}

impl EpsilonLadder {
    pub fn new(eps0: f64, ratio: f64, count: usize) -> Result<Self> {
        let l = Self { eps0, ratio, count };
        l.validate()?;
        Ok(l)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps0 > 0.0) {
            return Err(Error::Domain("ladder eps0 must be positive".into()));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::Domain("ladder ratio must lie in (0, 1)".into()));
        }
        if self.count < 4 {
            return Err(Error::Domain("ladder needs at least 4 rungs".into()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.eps0 * self.ratio.powi(k as i32)).collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    pub max_depth: u32,
    pub abs_tol: f64,
    /// Relative padding applied when an integration box must be grown
    /// around an estimated extent. The iterated integrator computes exact
    /// extents, so this is a compatibility knob with no effect today.
    pub bounding_box_pad: f64,
    pub rule: QuadratureRule,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        // abs_tol also scales the non-convergence gate on the ε-fit
        // residual (10×abs_tol), which for the default ladder is dominated
        // by the ε⁴ model error, not by quadrature noise; 1e-4 keeps the
        // two budgets consistent. All deep refinement is one-dimensional
        // and local (pole neighbourhoods of width ~ε² at the smallest
        // default rung need ~20 levels, sqrt-type crease endpoints a few
        // more), so a generous depth costs little.
        Self {
            max_depth: 30,
            abs_tol: 1e-4,
            bounding_box_pad: 0.1,
            rule: QuadratureRule::AdaptiveSimpson,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeMethod {
    ClosedForm,
    Quadrature,
}

/// An extrapolated complex volume with its ladder samples.
#[derive(Debug, Clone)]
pub struct ComplexVolume {
    pub value: Complex,
    pub samples: Vec<(f64, Complex)>,
    pub fit_residual: f64,
    pub method: VolumeMethod,
}

impl ComplexVolume {
    fn closed(value: Complex) -> Self {
        Self { value, samples: Vec::new(), fit_residual: 0.0, method: VolumeMethod::ClosedForm }
    }

    pub fn to_json(&self) -> String {
        let method = match self.method {
            VolumeMethod::ClosedForm => "closed_form",
            VolumeMethod::Quadrature => "quadrature",
        };
        serde_json::json!({
            "value": [self.value.re, self.value.im],
            "samples": self
                .samples
                .iter()
                .map(|(e, v)| vec![*e, v.re, v.im])
                .collect::<Vec<_>>(),
            "residual": self.fit_residual,
            "method": method,
        })
        .to_string()
    }
}

/// Extrapolate a ladder of regularized samples (ε, value) to ε = 0 with
/// the same polynomial model `volume` uses internally; `n` is the
/// polytope dimension (it selects the ε·ln ε refinement candidate).
/// Returns the ε⁰ coefficient and the fit residual.
pub fn extrapolate_samples(n: usize, samples: &[(f64, Complex)]) -> Result<(Complex, f64)> {
    if samples.len() < 4 {
        return Err(Error::Domain("extrapolation needs at least 4 samples".into()));
    }
    let eps: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let vals: Vec<Complex> = samples.iter().map(|s| s.1).collect();
    fit_epsilon(n, &eps, &vals)
}

/// n-dimensional volume of the unit n-sphere: A₀ = 2, A₁ = 2π,
/// A_n = 2π/(n-1)·A_{n-2}.
pub fn sphere_volume(n: usize) -> f64 {
    let (mut v, mut k) = if n % 2 == 0 { (2.0, 0) } else { (2.0 * PI, 1) };
    while k + 2 <= n {
        v *= 2.0 * PI / ((k + 1) as f64);
        k += 2;
    }
    v
}

/// Total volume of the n-dimensional double hyperbolic space: iⁿ·A_n.
pub fn total_volume(n: usize) -> Complex {
    let a = sphere_volume(n);
    match n % 4 {
        0 => Complex::new(a, 0.0),
        1 => Complex::new(0.0, a),
        2 => Complex::new(-a, 0.0),
        _ => Complex::new(0.0, -a),
    }
}

/// Volume of the n-dimensional lune of angle θ:
/// -θ·total_volume(n-2)/(n-1).
pub fn lune_volume(n: usize, theta: f64) -> Result<Complex> {
    if n < 2 {
        return Err(Error::Domain("lune volume needs dimension >= 2".into()));
    }
    if !(0.0..=2.0 * PI).contains(&theta) {
        return Err(Error::Domain(format!("lune angle {theta} outside [0, 2π]")));
    }
    Ok(total_volume(n - 2) * Complex::new(-theta / (n as f64 - 1.0), 0.0))
}

// ---------------------------------------------------------------------------
// half-space-chart integration
// ---------------------------------------------------------------------------

/// Antiderivative of 1/(z-εi)^p along the real axis, chosen so that the
/// value at +∞ is 0 for p ≥ 2.
fn antiderivative(x: f64, power: i32, eps: f64) -> Complex {
    let z = Complex::new(x, -eps);
    if power == 1 {
        z.ln()
    } else {
        z.powi(1 - power) / f64::from(1 - power)
    }
}

/// Exact z₀ integral of the fiber over a horizontal point, paired across
/// the two sheets unless `upper_only`.
fn fiber_value(
    shapes: &[WallShape],
    w: &[f64],
    power: i32,
    eps: f64,
    upper_only: bool,
) -> Complex {
    let Some(f) = geom::fiber(shapes, w) else {
        return Complex::new(0.0, 0.0);
    };
    let x = match f.hi {
        Some(h) => antiderivative(h, power, eps) - antiderivative(f.lo, power, eps),
        None => {
            assert!(power >= 2, "unbounded fiber reached a logarithmic kernel");
            -antiderivative(f.lo, power, eps)
        }
    };
    if upper_only {
        x
    } else if power % 2 == 0 {
        Complex::new(2.0 * x.re, 0.0)
    } else {
        Complex::new(0.0, 2.0 * x.im)
    }
}

/// Interval of horizontal coordinate `axis` guaranteed to contain the
/// region, clipped by inside balls and by vertical walls whose normal is
/// parallel to that axis; None when provably empty.
fn axis_interval(shapes: &[WallShape], axis: usize) -> Result<Option<(f64, f64)>> {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for s in shapes {
        match s {
            WallShape::Ball { center, radius, inside: true } => {
                lo = lo.max(center[axis] - radius);
                hi = hi.min(center[axis] + radius);
            }
            WallShape::Ball { .. } => {}
            WallShape::Vertical { normal, offset } => {
                let nu = normal[axis];
                let rest: f64 = normal
                    .iter()
                    .enumerate()
                    .filter_map(|(a, v)| (a != axis).then(|| v * v))
                    .sum();
                if nu.abs() < 1e-13 {
                    if rest < 1e-26 && *offset > 0.0 {
                        return Ok(None);
                    }
                } else if rest < 1e-26 {
                    // slanted walls cannot clip a single axis; the inside
                    // balls already bound the region
                    if nu > 0.0 {
                        lo = lo.max(offset / nu);
                    } else {
                        hi = hi.min(offset / nu);
                    }
                }
            }
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(
            "horizontally unbounded region reached the quadrature core".into(),
        ));
    }
    Ok(if hi > lo { Some((lo, hi)) } else { None })
}

/// Points where the integrand loses smoothness along horizontal
/// coordinate `axis`: ball edges and pairwise radical points.
fn axis_breakpoints(shapes: &[WallShape], axis: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    let balls: Vec<(f64, f64)> = shapes
        .iter()
        .filter_map(|s| match s {
            WallShape::Ball { center, radius, .. } => Some((center[axis], *radius)),
            _ => None,
        })
        .collect();
    for &(c, r) in &balls {
        pts.push(c - r);
        pts.push(c + r);
    }
    for i in 0..balls.len() {
        for j in (i + 1)..balls.len() {
            let (c1, r1) = balls[i];
            let (c2, r2) = balls[j];
            if (c2 - c1).abs() > 1e-12 {
                pts.push((r1 * r1 - r2 * r2 + c2 * c2 - c1 * c1) / (2.0 * (c2 - c1)));
            }
        }
    }
    let mut inner: Vec<f64> = pts
        .into_iter()
        .filter(|t| *t > lo + 1e-12 && *t < hi - 1e-12)
        .collect();
    inner.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    inner.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    inner
}

/// Integrate 1/(z₀-εi)^power over the chart region cut out by `shapes`
/// with `horiz_dim` horizontal coordinates. Returns (value, error
/// estimate). The caller must guarantee the region is bounded (an inside
/// ball exists) whenever horiz_dim ≥ 1 or power = 1.
pub(crate) fn integrate_over_shapes(
    shapes: &[WallShape],
    horiz_dim: usize,
    power: i32,
    eps: f64,
    upper_only: bool,
    cfg: &QuadratureConfig,
) -> Result<(Complex, f64)> {
    match horiz_dim {
        0 => Ok((fiber_value(shapes, &[], power, eps, upper_only), 0.0)),
        1 => {
            let Some((lo, hi)) = axis_interval(shapes, 0)? else {
                return Ok((Complex::new(0.0, 0.0), 0.0));
            };
            let mut cuts = vec![lo];
            cuts.extend(axis_breakpoints(shapes, 0, lo, hi));
            cuts.push(hi);
            let piece_tol = cfg.abs_tol / (cuts.len() - 1) as f64;
            let mut total = Complex::new(0.0, 0.0);
            let mut err = 0.0;
            for pair in cuts.windows(2) {
                let mut f = |t: f64| fiber_value(shapes, &[t], power, eps, upper_only);
                let (v, e) =
                    numeric::integrate_interval(&mut f, pair[0], pair[1], piece_tol, cfg.max_depth, cfg.rule);
                total += v;
                err += e;
            }
            Ok((total, err))
        }
        // Iterated integration: one outer 1D pass over the last horizontal
        // coordinate, recursing on the sliced region. Slicing keeps every
        // boundary feature at an exact cut or a single interior kink of a
        // 1D integrand, so adaptive refinement stays local. A direct box
        // rule over the same region would have to chase the boundary
        // surfaces, splitting exponentially many panels along them.
        2 | 3 => {
            let axis = horiz_dim - 1;
            let Some((lo, hi)) = axis_interval(shapes, axis)? else {
                return Ok((Complex::new(0.0, 0.0), 0.0));
            };
            let mut cuts = vec![lo];
            cuts.extend(axis_breakpoints(shapes, axis, lo, hi));
            cuts.push(hi);
            let outer_tol = 0.5 * cfg.abs_tol / (cuts.len() - 1) as f64;
            // inner accuracy is spread over the outer width so the
            // iterated error stays within abs_tol overall
            let inner_cfg =
                QuadratureConfig { abs_tol: 0.5 * cfg.abs_tol / (hi - lo), ..*cfg };
            let mut total = Complex::new(0.0, 0.0);
            let mut err = 0.0;
            let mut inner_err = 0.0f64;
            let mut failure: Option<Error> = None;
            for pair in cuts.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                // closed rules evaluate at piece endpoints, which sit
                // exactly on slice tangencies; nudging into the interior
                // keeps the slicer away from them at negligible cost
                let guard = (1e-8 * (hi - lo)).min(0.25 * (b - a));
                let mut f = |t: f64| {
                    if failure.is_some() {
                        return Complex::new(0.0, 0.0);
                    }
                    let tc = t.clamp(a + guard, b - guard);
                    let sliced = geom::slice_shapes(shapes, tc)
                        .or_else(|_| geom::slice_shapes(shapes, tc + guard));
                    let sliced = match sliced {
                        Ok(Some(s)) => s,
                        Ok(None) => return Complex::new(0.0, 0.0),
                        Err(e) => {
                            failure = Some(e);
                            return Complex::new(0.0, 0.0);
                        }
                    };
                    match integrate_over_shapes(
                        &sliced,
                        horiz_dim - 1,
                        power,
                        eps,
                        upper_only,
                        &inner_cfg,
                    ) {
                        Ok((v, e)) => {
                            inner_err = inner_err.max(e);
                            v
                        }
                        Err(e) => {
                            failure = Some(e);
                            Complex::new(0.0, 0.0)
                        }
                    }
                };
                let (v, e) =
                    numeric::integrate_interval(&mut f, a, b, outer_tol, cfg.max_depth, cfg.rule);
                if let Some(e) = failure.take() {
                    return Err(e);
                }
                total += v;
                err += e;
            }
            Ok((total, err + inner_err * (hi - lo)))
        }
        _ => Err(Error::Unsupported(format!(
            "quadrature not implemented for {horiz_dim} horizontal dimensions"
        ))),
    }
}

fn mu_u_shapes(
    shapes: &[WallShape],
    n: usize,
    eps: f64,
    upper_only: bool,
    cfg: &QuadratureConfig,
) -> Result<Complex> {
    let (v, err) = integrate_over_shapes(shapes, n - 1, n as i32, eps, upper_only, cfg)?;
    if err > 10.0 * cfg.abs_tol {
        return Err(Error::NonConverged { partial: v, residual: err });
    }
    Ok(v)
}

/// ε-regularized chart functional μ_{u,ε}(P). Errors when the closure of
/// P contains the chart's point at infinity; `volume` removes that point
/// by an isometry instead.
pub fn mu_u_eps(p: &Polytope, eps: f64, cfg: &QuadratureConfig) -> Result<Complex> {
    if !(eps > 0.0) {
        return Err(Error::Domain("mu_u needs eps > 0".into()));
    }
    if p.dim == 0 {
        return Err(Error::Domain("mu_u needs dimension >= 1".into()));
    }
    if p.closure_contains_chart_infinity() {
        return Err(Error::PointAtInfinityInPolytope);
    }
    let upper_only = p.kind == PolytopeKind::Type2Upper;
    mu_u_shapes(p.wall_shapes(), p.dim, eps, upper_only, cfg)
}

// ---------------------------------------------------------------------------
// sphere-chart integration
// ---------------------------------------------------------------------------

/// Colatitude interval [lo, hi] ⊆ [0, π/2] cut out by the wall
/// constraints sin ψ·(ω·ē) ≥ e₀ along the direction ω; None when empty.
fn psi_interval(normals: &[Vec<f64>], omega: &[f64]) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (0.0f64, PI / 2.0);
    for e in normals {
        let c: f64 = omega.iter().zip(&e[1..]).map(|(a, b)| a * b).sum();
        let q = e[0];
        if c.abs() <= 1e-13 {
            if q > 1e-13 {
                return None;
            }
        } else if c > 0.0 {
            let s = q / c;
            if s >= 1.0 {
                return None;
            }
            if s > 0.0 {
                lo = lo.max(s.asin());
            }
        } else {
            let s = q / c;
            if s <= 0.0 {
                return None;
            }
            if s < 1.0 {
                hi = hi.min(s.asin());
            }
        }
        if lo >= hi - 1e-14 {
            return None;
        }
    }
    Some((lo, hi))
}

/// Sphere-chart integrand at colatitude ψ, folded across the equator
/// unless `upper_only`.
fn sphere_integrand(
    psi: f64,
    n: usize,
    r: f64,
    eps: f64,
    variant: bool,
    upper_only: bool,
) -> Complex {
    let denom = Complex::new(r * psi.cos(), -eps);
    let g = if variant {
        r.powi(n as i32 + 1) * psi.sin().powi(n as i32 - 1) * psi.cos()
            * denom.powi(-(n as i32 + 1))
    } else {
        r.powi(n as i32) * psi.sin().powi(n as i32 - 1) * denom.powi(-(n as i32))
    };
    if upper_only {
        g
    } else if n % 2 == 0 {
        Complex::new(2.0 * g.re, 0.0)
    } else {
        Complex::new(0.0, 2.0 * g.im)
    }
}

/// ε-regularized sphere functional μ_{h,ε} (variant = false) or its
/// derivative form μ'_{h,ε} (variant = true) on the sphere of radius r.
pub fn mu_h_eps(
    p: &Polytope,
    eps: f64,
    r: f64,
    variant: bool,
    cfg: &QuadratureConfig,
) -> Result<Complex> {
    if !(eps > 0.0) || !(r > 0.0) {
        return Err(Error::Domain("mu_h needs eps > 0 and r > 0".into()));
    }
    let n = p.dim;
    let upper_only = p.kind == PolytopeKind::Type2Upper;
    if n == 0 {
        // closed values on the 0-sphere of radius r
        return Ok(match (upper_only, variant) {
            (false, false) => Complex::new(2.0, 0.0),
            (false, true) => Complex::new(2.0 * r * r / (r * r + eps * eps), 0.0),
            (true, false) => Complex::new(1.0, 0.0),
            (true, true) => Complex::new(r, eps) * r / (r * r + eps * eps),
        });
    }
    let normals = p.normal_coords();
    let inner_tol = cfg.abs_tol / sphere_volume(n - 1).max(1.0);
    let inner = |lohi: Option<(f64, f64)>| -> (Complex, f64) {
        match lohi {
            None => (Complex::new(0.0, 0.0), 0.0),
            Some((lo, hi)) => {
                let mut f = |psi: f64| sphere_integrand(psi, n, r, eps, variant, upper_only);
                numeric::integrate_interval(&mut f, lo, hi, inner_tol, cfg.max_depth, cfg.rule)
            }
        }
    };
    if normals.is_empty() {
        // whole space: the direction integral is the sphere volume
        let (v, e) = inner(Some((0.0, PI / 2.0)));
        let (value, err) = (v * sphere_volume(n - 1), e * sphere_volume(n - 1));
        if err > 10.0 * cfg.abs_tol {
            return Err(Error::NonConverged { partial: value, residual: err });
        }
        return Ok(value);
    }
    let (value, err) = match n {
        1 => {
            let (a, ea) = inner(psi_interval(&normals, &[1.0]));
            let (b, eb) = inner(psi_interval(&normals, &[-1.0]));
            (a + b, ea + eb)
        }
        2 => {
            let mut f = |a: f64| inner(psi_interval(&normals, &[a.cos(), a.sin()])).0;
            numeric::integrate_interval(&mut f, 0.0, 2.0 * PI, cfg.abs_tol, cfg.max_depth, cfg.rule)
        }
        3 => {
            let mut f = |ta: &[f64]| {
                let (t, a) = (ta[0], ta[1]);
                let omega = [t.sin() * a.cos(), t.sin() * a.sin(), t.cos()];
                inner(psi_interval(&normals, &omega)).0 * t.sin()
            };
            numeric::integrate_box(
                &mut f,
                &[0.0, 0.0],
                &[PI, 2.0 * PI],
                cfg.abs_tol,
                cfg.max_depth,
                cfg.rule,
            )
        }
        _ => {
            return Err(Error::Unsupported(
                "sphere-chart quadrature with walls needs dimension <= 3".into(),
            ))
        }
    };
    if err > 10.0 * cfg.abs_tol {
        return Err(Error::NonConverged { partial: value, residual: err });
    }
    Ok(value)
}

// ---------------------------------------------------------------------------
// extrapolation
// ---------------------------------------------------------------------------

/// Move the chart's point at infinity off the closure of P by an
/// inversion about an external boundary point, then recenter and rescale
/// to unit size. Inversion and scaling are isometries, so the ε → 0
/// extrapolation of the result is the volume of P itself, and the default
/// ladder stays calibrated to the normalized geometry.
fn prepare_bounded(p: &Polytope) -> Result<Vec<WallShape>> {
    let b = geom::external_boundary_point(p.wall_shapes())?;
    let inv = MapElement::Inversion { center: b, radius: 1.0 };
    let mapped = p
        .wall_shapes()
        .iter()
        .map(|s| geom::apply_shape(&inv, s))
        .collect::<Result<Vec<_>>>()?;
    let (shapes, _lambda) = geom::normalize_shapes(&mapped);
    if !shapes.iter().any(|s| matches!(s, WallShape::Ball { inside: true, .. })) {
        return Err(Error::Domain("inversion failed to bound the region".into()));
    }
    Ok(shapes)
}

/// Least-squares extrapolation of ladder samples to ε = 0 with the model
/// v + a₁ε + a₂ε² (+ a₃ε³ when the ladder affords it), augmented by
/// b·ε·log ε for even n; the log term is dropped again when its
/// contribution is statistically indistinguishable from zero (it fails
/// to halve the residual).
fn fit_epsilon(n: usize, eps: &[f64], vals: &[Complex]) -> Result<(Complex, f64)> {
    let degree = if eps.len() >= 6 { 3 } else { 2 };
    let row = |e: f64, with_log: bool| {
        let mut r: Vec<Complex> =
            (0..=degree).map(|k| Complex::new(e.powi(k), 0.0)).collect();
        if with_log {
            r.push(Complex::new(e * e.ln(), 0.0));
        }
        r
    };
    let design: Vec<Vec<Complex>> = eps.iter().map(|&e| row(e, false)).collect();
    let (c, _, res) = numeric::complex_least_squares(&design, vals)?;
    if n % 2 == 0 && eps.len() >= degree as usize + 3 {
        let design_log: Vec<Vec<Complex>> =
            eps.iter().map(|&e| row(e, true)).collect();
        let (cl, _, res_log) = numeric::complex_least_squares(&design_log, vals)?;
        if res_log < res / 2.0 {
            return Ok((cl[0], res_log));
        }
    }
    Ok((c[0], res))
}

/// The complex volume V_n(P): closed value in dimension 0, otherwise the
/// ε → 0⁺ extrapolation of μ_{u,ε} (after removing the chart's point at
/// infinity by an isometry when needed; the whole space runs through the
/// sphere chart instead).
pub fn volume(p: &Polytope, cfg: &QuadratureConfig, ladder: &EpsilonLadder) -> Result<ComplexVolume> {
    ladder.validate()?;
    let n = p.dim;
    if n == 0 {
        let v = match p.kind {
            PolytopeKind::Type1 => 2.0,
            PolytopeKind::Type2Upper => 1.0,
        };
        return Ok(ComplexVolume::closed(Complex::new(v, 0.0)));
    }
    let eps_values = ladder.values();
    let upper_only = p.kind == PolytopeKind::Type2Upper;
    let vals: Vec<Complex> = if !p.closure_contains_chart_infinity() {
        eps_values
            .par_iter()
            .map(|&e| mu_u_shapes(p.wall_shapes(), n, e, upper_only, cfg))
            .collect::<Result<_>>()?
    } else if p.halfspaces().is_empty() {
        eps_values
            .par_iter()
            .map(|&e| mu_h_eps(p, e, 1.0, false, cfg))
            .collect::<Result<_>>()?
    } else {
        let shapes = prepare_bounded(p)?;
        eps_values
            .par_iter()
            .map(|&e| mu_u_shapes(&shapes, n, e, upper_only, cfg))
            .collect::<Result<_>>()?
    };
    let (value, fit_residual) = fit_epsilon(n, &eps_values, &vals)?;
    if fit_residual > 10.0 * cfg.abs_tol {
        return Err(Error::NonConverged { partial: value, residual: fit_residual });
    }
    Ok(ComplexVolume {
        value,
        samples: eps_values.into_iter().zip(vals).collect(),
        fit_residual,
        method: VolumeMethod::Quadrature,
    })
}

/// Volume with automatic method choice: closed forms in dimensions ≤ 2
/// for two-sheet polytopes, quadrature extrapolation otherwise.
pub fn volume_auto(p: &Polytope) -> Result<ComplexVolume> {
    match (p.dim, p.kind) {
        (1, PolytopeKind::Type1) => Ok(ComplexVolume::closed(closed_form_v1(p)?)),
        (2, PolytopeKind::Type1) => Ok(ComplexVolume::closed(closed_form_v2(p)?)),
        _ => volume(p, &QuadratureConfig::default(), &EpsilonLadder::default()),
    }
}

// ---------------------------------------------------------------------------
// closed forms
// ---------------------------------------------------------------------------

/// Dimension-1 closed form: πi times the number of ideal points of the
/// double hyperbolic line contained in P (2, 1, or 0).
pub fn closed_form_v1(p: &Polytope) -> Result<Complex> {
    if p.dim != 1 || p.kind != PolytopeKind::Type1 {
        return Err(Error::Domain("dimension-1 closed form needs a two-sheet 1-polytope".into()));
    }
    let count = [[1.0, 1.0], [1.0, -1.0]]
        .iter()
        .filter(|v| p.contains_ideal_ray(*v))
        .count();
    Ok(Complex::new(0.0, PI * count as f64))
}

/// Dimension-2 closed form 2(m-2)π - 2Σθᵢ, with m the number of walls
/// carrying a nonempty facet and θᵢ the interior angles at the actual
/// vertices. Degenerate inputs collapse to 0 (empty or lower-dimensional)
/// or -4π (whole space).
pub fn closed_form_v2(p: &Polytope) -> Result<Complex> {
    if p.dim != 2 || p.kind != PolytopeKind::Type1 {
        return Err(Error::Domain("dimension-2 closed form needs a two-sheet 2-polytope".into()));
    }
    let m = p.halfspaces().len();
    let m_eff = (0..m).filter(|&i| p.wall_chord_interval(i).is_some()).count();
    if m_eff == 0 {
        return Ok(if m == 0 { Complex::new(-4.0 * PI, 0.0) } else { Complex::new(0.0, 0.0) });
    }
    let mut angle_sum = 0.0;
    for face in p.faces(2)? {
        angle_sum += p.dihedral_angle(face.generators[0], face.generators[1])?;
    }
    Ok(Complex::new(2.0 * (m_eff as f64 - 2.0) * PI - 2.0 * angle_sum, 0.0))
}

// ---------------------------------------------------------------------------
// invariant suites
// ---------------------------------------------------------------------------

/// Volume bound |V| ≤ m!/2^{m-1}·A_n for a polytope cut by m half-spaces.
pub fn check_bound(p: &Polytope, v: &ComplexVolume) -> bool {
    let m = p.halfspaces().len() as i32;
    let mut factorial = 1.0f64;
    for k in 2..=m {
        factorial *= f64::from(k);
    }
    let bound = factorial / 2.0f64.powi(m - 1) * sphere_volume(p.dim);
    v.value.norm() <= bound * (1.0 + 1e-6) + 1e-9
}

/// Parity of the regularized functional at a single ε: even-dimensional
/// values are real and odd-dimensional ones purely imaginary, exactly,
/// because the two sheets contribute conjugate fibers. Quadrature
/// accuracy is irrelevant to the check, so a coarse budget suffices.
pub fn check_parity(p: &Polytope, eps: f64) -> Result<bool> {
    if p.kind != PolytopeKind::Type1 {
        return Err(Error::Domain("parity holds for two-sheet polytopes".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain("parity check needs eps > 0".into()));
    }
    let cfg = QuadratureConfig { max_depth: 6, abs_tol: 1e-2, ..QuadratureConfig::default() };
    let n = p.dim;
    let mu = if n == 0 {
        Complex::new(2.0, 0.0)
    } else if !p.closure_contains_chart_infinity() {
        integrate_over_shapes(p.wall_shapes(), n - 1, n as i32, eps, false, &cfg)?.0
    } else if p.halfspaces().is_empty() {
        mu_h_eps(p, eps, 1.0, false, &cfg)?
    } else {
        let shapes = prepare_bounded(p)?;
        integrate_over_shapes(&shapes, n - 1, n as i32, eps, false, &cfg)?.0
    };
    let off = if n % 2 == 0 { mu.im.abs() } else { mu.re.abs() };
    Ok(off <= 1e-13 * (1.0 + mu.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::HalfSpace;

    fn lune(theta: f64) -> Polytope {
        Polytope::from_normals(
            2,
            &[vec![0.0, 0.0, 1.0], vec![0.0, theta.sin(), -theta.cos()]],
            PolytopeKind::Type1,
        )
        .unwrap()
    }

    #[test]
    fn sphere_volumes_match_the_classical_table() {
        let expected = [
            2.0,
            2.0 * PI,
            4.0 * PI,
            2.0 * PI * PI,
            8.0 * PI * PI / 3.0,
            PI.powi(3),
            16.0 * PI.powi(3) / 15.0,
            PI.powi(4) / 3.0,
            32.0 * PI.powi(4) / 105.0,
            PI.powi(5) / 12.0,
            64.0 * PI.powi(5) / 945.0,
        ];
        for (n, e) in expected.iter().enumerate() {
            assert!(
                (sphere_volume(n) - e).abs() < 1e-12 * e,
                "sphere volume mismatch at n = {n}"
            );
        }
        assert!((total_volume(2) - Complex::new(-4.0 * PI, 0.0)).norm() < 1e-12);
        assert!((total_volume(3) - Complex::new(0.0, -2.0 * PI * PI)).norm() < 1e-12);
    }

    #[test]
    fn lune_volumes_follow_the_recursion() {
        assert!((lune_volume(2, 2.0 * PI).unwrap() - Complex::new(-4.0 * PI, 0.0)).norm() < 1e-12);
        assert!((lune_volume(3, PI).unwrap() - Complex::new(0.0, -PI * PI)).norm() < 1e-12);
        assert_eq!(lune_volume(4, 0.0).unwrap(), Complex::new(0.0, 0.0));
        assert!(lune_volume(1, 0.3).is_err());
    }

    #[test]
    fn half_circle_mu_u_is_exact_arctangent() {
        // ball wall of chart radius 1: e = (0.75, 1.25)
        let p = Polytope::from_normals(1, &[vec![0.75, 1.25]], PolytopeKind::Type1).unwrap();
        let cfg = QuadratureConfig::default();
        for &eps in &[1.0, 0.3, 0.05, 1e-3] {
            let mu = mu_u_eps(&p, eps, &cfg).unwrap();
            let expect = Complex::new(0.0, 2.0 * (1.0 / eps).atan());
            assert!(
                (mu - expect).norm() < 1e-13,
                "dimension-1 fiber integral should be exact, got {mu} vs {expect}"
            );
        }
    }

    #[test]
    fn mu_u_rejects_regions_reaching_infinity() {
        let p = Polytope::from_normals(1, &[vec![-0.75, -1.25]], PolytopeKind::Type1).unwrap();
        assert!(matches!(
            mu_u_eps(&p, 0.1, &QuadratureConfig::default()),
            Err(Error::PointAtInfinityInPolytope)
        ));
    }

    #[test]
    fn empty_polytope_has_zero_mu() {
        // two disjoint half-lines: x ≥ a and x ≤ -a in the projective disk
        let p = Polytope::from_normals(
            2,
            &[vec![1.5, (3.25f64).sqrt(), 0.0], vec![1.5, -(3.25f64).sqrt(), 0.0]],
            PolytopeKind::Type1,
        )
        .unwrap();
        let mu = mu_u_eps(&p, 0.1, &QuadratureConfig::default()).unwrap();
        assert!(mu.norm() < 1e-9, "empty region integrates to 0, got {mu}");
    }

    #[test]
    fn mu_h_closed_values_in_dimension_zero() {
        let p = Polytope::whole(0, PolytopeKind::Type1);
        let cfg = QuadratureConfig::default();
        assert_eq!(mu_h_eps(&p, 5.0, 1.0, false, &cfg).unwrap(), Complex::new(2.0, 0.0));
        assert!(
            (mu_h_eps(&p, 1.0, 1.0, true, &cfg).unwrap() - Complex::new(1.0, 0.0)).norm() < 1e-15
        );
        let q = Polytope::whole(0, PolytopeKind::Type2Upper);
        assert_eq!(mu_h_eps(&q, 2.0, 1.0, false, &cfg).unwrap(), Complex::new(1.0, 0.0));
    }

    #[test]
    fn mu_h_variant_on_the_whole_line_matches_the_analytic_value() {
        let p = Polytope::whole(1, PolytopeKind::Type1);
        let cfg = QuadratureConfig { abs_tol: 1e-10, ..QuadratureConfig::default() };
        for &eps in &[0.5, 0.1] {
            let v = mu_h_eps(&p, eps, 1.0, true, &cfg).unwrap();
            let expect = Complex::new(0.0, 2.0 * PI / (1.0 + eps * eps).powf(1.5));
            assert!((v - expect).norm() < 1e-8, "got {v}, expected {expect}");
        }
    }

    #[test]
    fn whole_spaces_extrapolate_to_the_total_volume() {
        let ladder = EpsilonLadder::default();
        let cfg = QuadratureConfig::default();
        for n in [1usize, 2, 3] {
            let p = Polytope::whole(n, PolytopeKind::Type1);
            let v = volume(&p, &cfg, &ladder).unwrap();
            let expect = total_volume(n);
            assert!(
                (v.value - expect).norm() < 4e-3,
                "total volume mismatch at n = {n}: {} vs {expect}",
                v.value
            );
            assert_eq!(v.method, VolumeMethod::Quadrature);
            assert_eq!(v.samples.len(), ladder.count);
        }
    }

    #[test]
    fn lune_volume_by_quadrature_matches_the_closed_form() {
        let theta = PI / 3.0;
        let p = lune(theta);
        let v = volume(&p, &QuadratureConfig::default(), &EpsilonLadder::default()).unwrap();
        assert!(
            (v.value - Complex::new(-2.0 * theta, 0.0)).norm() < 1e-3,
            "lune volume {} vs {}",
            v.value,
            -2.0 * theta
        );
        assert!((closed_form_v2(&p).unwrap() - Complex::new(-2.0 * theta, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn volume_handles_regions_containing_chart_infinity() {
        // single wall whose region is the outside of a ball: contains ∞
        let p = Polytope::from_normals(2, &[vec![0.0, 0.0, -1.0]], PolytopeKind::Type1).unwrap();
        let v = volume(&p, &QuadratureConfig::default(), &EpsilonLadder::default()).unwrap();
        assert!(
            (v.value - Complex::new(-2.0 * PI, 0.0)).norm() < 2e-3,
            "half-space volume after inversion: {}",
            v.value
        );
    }

    #[test]
    fn closed_form_v1_counts_ideal_points() {
        let whole = Polytope::whole(1, PolytopeKind::Type1);
        assert_eq!(closed_form_v1(&whole).unwrap(), Complex::new(0.0, 2.0 * PI));
        let half = Polytope::from_normals(1, &[vec![0.0, 1.0]], PolytopeKind::Type1).unwrap();
        assert_eq!(closed_form_v1(&half).unwrap(), Complex::new(0.0, PI));
        let compact = Polytope::from_normals(
            1,
            &[vec![0.75, 1.25], vec![0.75, -1.25]],
            PolytopeKind::Type1,
        )
        .unwrap();
        assert_eq!(closed_form_v1(&compact).unwrap(), Complex::new(0.0, 0.0));
    }

    #[test]
    fn closed_form_v2_families() {
        // whole plane
        let whole = Polytope::whole(2, PolytopeKind::Type1);
        assert!((closed_form_v2(&whole).unwrap().re + 4.0 * PI).abs() < 1e-12);
        // single half-space
        let half = Polytope::from_normals(2, &[vec![0.0, 1.0, 0.0]], PolytopeKind::Type1).unwrap();
        assert!((closed_form_v2(&half).unwrap().re + 2.0 * PI).abs() < 1e-12);
        // triangle with computable angles
        let s = 0.3f64;
        let normals: Vec<Vec<f64>> = (0..3)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / 3.0;
                vec![-s.sinh(), s.cosh() * a.cos(), s.cosh() * a.sin()]
            })
            .collect();
        let tri = Polytope::from_normals(2, &normals, PolytopeKind::Type1).unwrap();
        let mut angles = 0.0;
        for f in tri.faces(2).unwrap() {
            angles += tri.dihedral_angle(f.generators[0], f.generators[1]).unwrap();
        }
        let expect = 2.0 * PI - 2.0 * angles;
        assert!((closed_form_v2(&tri).unwrap().re - expect).abs() < 1e-12);
        // empty intersection
        let empty = Polytope::from_normals(
            2,
            &[vec![1.5, (3.25f64).sqrt(), 0.0], vec![1.5, -(3.25f64).sqrt(), 0.0]],
            PolytopeKind::Type1,
        )
        .unwrap();
        assert_eq!(closed_form_v2(&empty).unwrap(), Complex::new(0.0, 0.0));
        // band between ultraparallel walls
        let band = Polytope::from_normals(
            2,
            &[vec![0.5, (1.25f64).sqrt(), 0.0], vec![0.5, -(1.25f64).sqrt(), 0.0]],
            PolytopeKind::Type1,
        )
        .unwrap();
        assert_eq!(closed_form_v2(&band).unwrap(), Complex::new(0.0, 0.0));
        // non-crossing triple cut: 2(m-2)π
        let s = 0.8f64;
        let cut: Vec<Vec<f64>> = (0..3)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / 3.0;
                vec![-s.sinh(), s.cosh() * a.cos(), s.cosh() * a.sin()]
            })
            .collect();
        let cut = Polytope::from_normals(2, &cut, PolytopeKind::Type1).unwrap();
        assert!((closed_form_v2(&cut).unwrap().re - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn additivity_under_a_split() {
        let p = lune(1.0);
        let h = HalfSpace::new(vec![0.1, 0.4, 1.0]).unwrap();
        let (a, b) = p.split(&h).unwrap();
        let cfg = QuadratureConfig::default();
        let ladder = EpsilonLadder::default();
        let vp = volume(&p, &cfg, &ladder).unwrap().value;
        let va = volume(&a, &cfg, &ladder).unwrap().value;
        let vb = volume(&b, &cfg, &ladder).unwrap().value;
        assert!(
            (vp - va - vb).norm() < 3e-3,
            "additivity violated: {vp} vs {va} + {vb}"
        );
    }

    #[test]
    fn chart_and_sphere_functionals_agree_after_extrapolation() {
        let p = lune(0.9);
        let ladder = EpsilonLadder::default();
        let cfg = QuadratureConfig::default();
        let fit = |vals: &[Complex]| fit_epsilon(2, &ladder.values(), vals).unwrap().0;
        let mu_u: Vec<Complex> =
            ladder.values().iter().map(|&e| mu_u_eps(&p, e, &cfg).unwrap()).collect();
        let mu_h: Vec<Complex> =
            ladder.values().iter().map(|&e| mu_h_eps(&p, e, 1.0, false, &cfg).unwrap()).collect();
        let mu_hp: Vec<Complex> =
            ladder.values().iter().map(|&e| mu_h_eps(&p, e, 1.0, true, &cfg).unwrap()).collect();
        let (u, h, hp) = (fit(&mu_u), fit(&mu_h), fit(&mu_hp));
        assert!((u - h).norm() < 2e-3, "chart vs sphere: {u} vs {h}");
        assert!((u - hp).norm() < 2e-3, "chart vs sphere variant: {u} vs {hp}");
        assert!((u - Complex::new(-1.8, 0.0)).norm() < 2e-3);
    }

    #[test]
    fn parity_is_machine_exact_at_finite_eps() {
        let p2 = lune(1.3);
        assert!(check_parity(&p2, 0.17).unwrap());
        let b = (1.0f64 - 0.18).sqrt();
        let p3 = Polytope::from_normals(
            3,
            &[
                vec![0.0, 1.0, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0],
                vec![0.0, -0.3, -0.3, b],
            ],
            PolytopeKind::Type1,
        )
        .unwrap();
        assert!(check_parity(&p3, 0.25).unwrap());
        // raw values really are exactly real / exactly imaginary
        let mu2 = mu_u_eps(&p2, 0.17, &QuadratureConfig::default()).unwrap();
        assert_eq!(mu2.im, 0.0);
    }

    #[test]
    fn bound_invariant_on_small_families() {
        let whole = Polytope::whole(2, PolytopeKind::Type1);
        assert!(check_bound(&whole, &ComplexVolume::closed(total_volume(2))));
        let p = lune(PI / 2.0);
        assert!(check_bound(&p, &ComplexVolume::closed(Complex::new(-PI, 0.0))));
        // a fake value beyond the bound must fail
        assert!(!check_bound(&p, &ComplexVolume::closed(Complex::new(100.0, 0.0))));
    }

    #[test]
    fn volume_auto_uses_closed_forms_in_low_dimensions() {
        let v1 = volume_auto(&Polytope::whole(1, PolytopeKind::Type1)).unwrap();
        assert_eq!(v1.method, VolumeMethod::ClosedForm);
        assert!((v1.value - Complex::new(0.0, 2.0 * PI)).norm() < 1e-12);
        let v2 = volume_auto(&lune(0.4)).unwrap();
        assert_eq!(v2.method, VolumeMethod::ClosedForm);
        assert!((v2.value - Complex::new(-0.8, 0.0)).norm() < 1e-12);
        let v0 = volume_auto(&Polytope::whole(0, PolytopeKind::Type1)).unwrap();
        assert_eq!(v0.value, Complex::new(2.0, 0.0));
    }

    #[test]
    fn json_serialization_is_stable() {
        let v = ComplexVolume {
            value: Complex::new(1.5, -2.0),
            samples: vec![(0.1, Complex::new(1.0, 0.5))],
            fit_residual: 1e-9,
            method: VolumeMethod::Quadrature,
        };
        let s = v.to_json();
        assert!(s.contains("\"value\":[1.5,-2.0]"));
        assert!(s.contains("\"method\":\"quadrature\""));
        assert!(s.contains("\"samples\":[[0.1,1.0,0.5]]"));
    }

    #[test]
    fn ladder_validation_rejects_bad_parameters() {
        assert!(EpsilonLadder::new(0.0, 0.5, 8).is_err());
        assert!(EpsilonLadder::new(0.1, 1.0, 8).is_err());
        assert!(EpsilonLadder::new(0.1, 0.5, 3).is_err());
        let l = EpsilonLadder::new(0.4, 0.5, 4).unwrap();
        assert_eq!(l.values(), vec![0.4, 0.2, 0.1, 0.05]);
    }
}
