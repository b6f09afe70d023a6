//! Internal geometry of the upper half-space chart.
//!
//! A half-space with unit Minkowski normal `e = (e₀, ē', e_n)` becomes, in
//! the chart coordinates `z = (z₀, w)` with `w = (z₁, …, z_{n-1})`, either
//!
//! - a ball centered on the boundary plane `z₀ = 0`: with `a = e₀ + e_n`,
//!   membership is `-(a/4)|z - (0, c)|² + 1/a ≥ 0`, i.e. the inside of the
//!   ball of radius `2/|a|` around `(0, 2ē'/a)` when `a > 0` and the outside
//!   when `a < 0`; or
//! - a vertical slab wall `ē'·w ≥ e₀ - e_n` when `a = 0` (impossible for
//!   n = 1, where `(e₀+e₁)(e₀-e₁) = -1`).
//!
//! The point at infinity of the chart is the ideal ray `(1, 0, …, 0, -1)`;
//! it belongs to the half-space exactly when `a ≤ 0`.
//!
//! All shapes are symmetric in `z₀ ↦ -z₀`, so they are stored by their
//! horizontal data only, which doubles as the induced shape on the boundary
//! `ℝ^{n-1} ∪ {∞}` (disks / half-planes). The conformal boundary maps
//! (translations, similarities, rotations, reflections, inversions) act on
//! that data exactly.

use crate::{Error, Result};

/// Walls with |e₀ + e_n| below this are treated as exactly vertical.
pub(crate) const VERTICAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum WallShape {
    /// Ball of the given radius centered at height 0 over `center`
    /// (horizontal coordinates); `inside` tells which side is kept.
    Ball { center: Vec<f64>, radius: f64, inside: bool },
    /// Height-independent wall `normal·w ≥ offset` on the horizontal
    /// coordinates; `normal` need not be unit.
    Vertical { normal: Vec<f64>, offset: f64 },
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Coefficient deciding membership of the chart's point at infinity:
/// the ideal ray at infinity pairs with `e` to `-(e₀ + e_n)`.
pub(crate) fn infinity_coefficient(e: &[f64]) -> f64 {
    e[0] + e[e.len() - 1]
}

/// The closed polytope contains the chart's point at infinity iff every
/// half-space does, i.e. all infinity coefficients are ≤ 0 (within the
/// vertical snapping tolerance).
pub(crate) fn contains_infinity(normals: &[Vec<f64>]) -> bool {
    normals.iter().all(|e| infinity_coefficient(e) <= VERTICAL_TOL)
}

/// Exact chart shape of the half-space with unit normal `e` (length n+1).
pub(crate) fn wall_shape(e: &[f64]) -> WallShape {
    let n = e.len() - 1;
    let a = infinity_coefficient(e);
    let horiz = &e[1..n];
    if a.abs() <= VERTICAL_TOL {
        WallShape::Vertical { normal: horiz.to_vec(), offset: e[0] - e[n] }
    } else {
        WallShape::Ball {
            center: horiz.iter().map(|x| 2.0 * x / a).collect(),
            radius: 2.0 / a.abs(),
            inside: a > 0.0,
        }
    }
}

/// Reconstruct the unit Minkowski normal (length n+1) from a chart shape.
/// Inverse of [`wall_shape`] up to floating error.
pub(crate) fn shape_normal(shape: &WallShape, n: usize) -> Result<Vec<f64>> {
    match shape {
        WallShape::Ball { center, radius, inside } => {
            if center.len() != n - 1 || *radius <= 0.0 {
                return Err(Error::InvalidNormal("bad ball shape data".into()));
            }
            let a = if *inside { 2.0 / radius } else { -2.0 / radius };
            let horiz: Vec<f64> = center.iter().map(|c| a * c / 2.0).collect();
            let s: f64 = horiz.iter().map(|x| x * x).sum();
            let b = (s - 1.0) / a;
            let mut e = vec![(a + b) / 2.0];
            e.extend(horiz);
            e.push((a - b) / 2.0);
            Ok(e)
        }
        WallShape::Vertical { normal, offset } => {
            if normal.len() != n - 1 {
                return Err(Error::InvalidNormal("bad vertical shape data".into()));
            }
            let len = dot(normal, normal).sqrt();
            if len < 1e-14 {
                return Err(Error::InvalidNormal("vertical wall with zero normal".into()));
            }
            let mut e = vec![offset / (2.0 * len)];
            e.extend(normal.iter().map(|x| x / len));
            e.push(-offset / (2.0 * len));
            Ok(e)
        }
    }
}

/// Membership of a full chart point `z = (z₀, w)`.
#[cfg(test)]
fn shape_contains(shape: &WallShape, z: &[f64]) -> bool {
    match shape {
        WallShape::Ball { center, radius, inside } => {
            let d2 = z[0] * z[0] + dist2(&z[1..], center);
            if *inside {
                d2 <= radius * radius
            } else {
                d2 >= radius * radius
            }
        }
        WallShape::Vertical { normal, offset } => dot(normal, &z[1..]) >= *offset,
    }
}

/// Membership of a boundary point `w ∈ ℝ^{n-1}` in the induced boundary
/// shape (disk / half-plane).
#[cfg(test)]
fn boundary_contains(shape: &WallShape, w: &[f64]) -> bool {
    match shape {
        WallShape::Ball { center, radius, inside } => {
            let d2 = dist2(w, center);
            if *inside {
                d2 <= radius * radius
            } else {
                d2 >= radius * radius
            }
        }
        WallShape::Vertical { normal, offset } => dot(normal, w) >= *offset,
    }
}

/// The fiber over a horizontal point: the set `{ z₀ : (z₀, w) ∈ P }` is
/// always of the form `{ |z₀| ∈ [lo, hi] }` (hi = None means unbounded).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Fiber {
    pub lo: f64,
    pub hi: Option<f64>,
}

/// Intersect the fibers of all shapes over `w`; None when empty.
pub(crate) fn fiber(shapes: &[WallShape], w: &[f64]) -> Option<Fiber> {
    let mut lo = 0.0f64;
    let mut hi: Option<f64> = None;
    for shape in shapes {
        match shape {
            WallShape::Ball { center, radius, inside } => {
                let d = radius * radius - dist2(w, center);
                if *inside {
                    if d <= 0.0 {
                        return None;
                    }
                    let h = d.sqrt();
                    hi = Some(match hi {
                        Some(old) => old.min(h),
                        None => h,
                    });
                } else if d > 0.0 {
                    lo = lo.max(d.sqrt());
                }
            }
            WallShape::Vertical { normal, offset } => {
                if dot(normal, w) < *offset {
                    return None;
                }
            }
        }
    }
    if let Some(h) = hi {
        if h <= lo {
            return None;
        }
    }
    Some(Fiber { lo, hi })
}

/// Restrict shapes to the slice `w_last = t`, producing shapes one
/// horizontal dimension lower. Tangential configurations are rejected.
pub(crate) fn slice_shapes(shapes: &[WallShape], t: f64) -> Result<Option<Vec<WallShape>>> {
    let mut out = Vec::with_capacity(shapes.len());
    for shape in shapes {
        match shape {
            WallShape::Ball { center, radius, inside } => {
                let last = *center.last().expect("slice needs horizontal dimension >= 1");
                let gap = (t - last).abs();
                if (gap - radius).abs() < 1e-9 * radius.max(1.0) {
                    return Err(Error::TangentSlice(format!(
                        "slice plane t = {t} tangent to a wall sphere of radius {radius}"
                    )));
                }
                let d = radius * radius - (t - last) * (t - last);
                if d <= 0.0 {
                    if *inside {
                        return Ok(None); // slice misses the polytope entirely
                    }
                    continue; // outside-ball constraint vacuous on this slice
                }
                out.push(WallShape::Ball {
                    center: center[..center.len() - 1].to_vec(),
                    radius: d.sqrt(),
                    inside: *inside,
                });
            }
            WallShape::Vertical { normal, offset } => {
                let last = *normal.last().expect("slice needs horizontal dimension >= 1");
                let rest = &normal[..normal.len() - 1];
                let new_offset = offset - last * t;
                if dot(rest, rest).sqrt() < 1e-12 {
                    if new_offset.abs() < 1e-9 {
                        return Err(Error::TangentSlice(format!(
                            "slice plane t = {t} lies inside a vertical wall"
                        )));
                    }
                    if new_offset > 0.0 {
                        return Ok(None); // wall excludes the whole slice
                    }
                    continue; // wall contains the whole slice
                }
                out.push(WallShape::Vertical { normal: rest.to_vec(), offset: new_offset });
            }
        }
    }
    Ok(Some(out))
}

/// One conformal generator of the boundary ℝ^d ∪ {∞}.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum MapElement {
    Translation(Vec<f64>),
    Similarity(f64),
    Rotation { i: usize, j: usize, angle: f64 },
    Reflection { axis: usize },
    Inversion { center: Vec<f64>, radius: f64 },
}

pub(crate) fn apply_point(el: &MapElement, w: &[f64]) -> Vec<f64> {
    match el {
        MapElement::Translation(t) => w.iter().zip(t).map(|(x, y)| x + y).collect(),
        MapElement::Similarity(l) => w.iter().map(|x| l * x).collect(),
        MapElement::Rotation { i, j, angle } => {
            let mut out = w.to_vec();
            let (c, s) = (angle.cos(), angle.sin());
            out[*i] = c * w[*i] - s * w[*j];
            out[*j] = s * w[*i] + c * w[*j];
            out
        }
        MapElement::Reflection { axis } => {
            let mut out = w.to_vec();
            out[*axis] = -out[*axis];
            out
        }
        MapElement::Inversion { center, radius } => {
            let d2 = dist2(w, center);
            let f = radius * radius / d2;
            w.iter().zip(center).map(|(x, c)| c + f * (x - c)).collect()
        }
    }
}

/// A point strictly inside the region of `shape`, at a definite distance
/// from `avoid` (needed as an inversion witness).
fn witness_point(shape: &WallShape, avoid: &[f64]) -> Vec<f64> {
    let d = avoid.len();
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    match shape {
        WallShape::Ball { center, radius, inside } => {
            let step = if *inside { radius * 0.5 } else { radius * 2.0 };
            for axis in 0..d {
                for sign in [1.0, -1.0] {
                    let mut p = center.clone();
                    p[axis] += sign * step;
                    candidates.push(p);
                }
            }
        }
        WallShape::Vertical { normal, offset } => {
            let n2 = dot(normal, normal);
            let base: Vec<f64> = normal.iter().map(|x| x * offset / n2).collect();
            for t in [1.0, 2.0, 3.0] {
                candidates.push(
                    base.iter()
                        .zip(normal)
                        .map(|(b, nv)| b + t * nv / n2.sqrt())
                        .collect(),
                );
            }
        }
    }
    candidates
        .into_iter()
        .max_by(|a, b| {
            dist2(a, avoid)
                .partial_cmp(&dist2(b, avoid))
                .expect("finite witness distances")
        })
        .expect("witness candidates nonempty")
}

/// Image of a boundary shape under one map element; sides are fixed with a
/// mapped witness point, so orientation conventions cannot drift.
pub(crate) fn apply_shape(el: &MapElement, shape: &WallShape) -> Result<WallShape> {
    match el {
        MapElement::Translation(t) => Ok(match shape {
            WallShape::Ball { center, radius, inside } => WallShape::Ball {
                center: center.iter().zip(t).map(|(c, x)| c + x).collect(),
                radius: *radius,
                inside: *inside,
            },
            WallShape::Vertical { normal, offset } => WallShape::Vertical {
                normal: normal.clone(),
                offset: offset + dot(normal, t),
            },
        }),
        MapElement::Similarity(l) => {
            if *l <= 0.0 {
                return Err(Error::Domain("similarity ratio must be positive".into()));
            }
            Ok(match shape {
                WallShape::Ball { center, radius, inside } => WallShape::Ball {
                    center: center.iter().map(|c| l * c).collect(),
                    radius: l * radius,
                    inside: *inside,
                },
                WallShape::Vertical { normal, offset } => WallShape::Vertical {
                    normal: normal.clone(),
                    offset: l * offset,
                },
            })
        }
        MapElement::Rotation { .. } | MapElement::Reflection { .. } => Ok(match shape {
            WallShape::Ball { center, radius, inside } => WallShape::Ball {
                center: apply_point(el, center),
                radius: *radius,
                inside: *inside,
            },
            WallShape::Vertical { normal, offset } => WallShape::Vertical {
                normal: apply_point(el, normal),
                offset: *offset,
            },
        }),
        MapElement::Inversion { center: b, radius: rho } => {
            let r2 = rho * rho;
            let witness = witness_point(shape, b);
            let wd2 = dist2(&witness, b);
            if wd2 < 1e-18 {
                return Err(Error::Domain("inversion witness degenerate".into()));
            }
            let wimg = apply_point(el, &witness);
            match shape {
                WallShape::Ball { center: c, radius: r, .. } => {
                    let delta = dist2(c, b) - r * r; // power of the inversion center
                    let scale = (dist2(c, b) + r * r).max(1.0);
                    if delta.abs() < 1e-12 * scale {
                        // sphere through the center maps to the plane
                        // (y - b)·(c - b) = rho²/2
                        let normal: Vec<f64> = c.iter().zip(b).map(|(x, y)| x - y).collect();
                        let offset = dot(&normal, b) + r2 / 2.0;
                        if dot(&normal, &wimg) >= offset {
                            Ok(WallShape::Vertical { normal, offset })
                        } else {
                            Ok(WallShape::Vertical {
                                normal: normal.iter().map(|x| -x).collect(),
                                offset: -offset,
                            })
                        }
                    } else {
                        let f = r2 / delta;
                        let center: Vec<f64> = b.iter().zip(c).map(|(y, x)| y + f * (x - y)).collect();
                        let radius = (r2 * r / delta.abs()).max(f64::MIN_POSITIVE);
                        let inside = dist2(&wimg, &center) <= radius * radius;
                        Ok(WallShape::Ball { center, radius, inside })
                    }
                }
                WallShape::Vertical { normal, offset } => {
                    let h = offset - dot(normal, b);
                    if h.abs() < 1e-12 * offset.abs().max(1.0) {
                        // plane through the center maps to itself, sides kept
                        Ok(shape.clone())
                    } else {
                        let f = r2 / (2.0 * h);
                        let center: Vec<f64> = b.iter().zip(normal).map(|(y, nv)| y + f * nv).collect();
                        let radius = r2 * dot(normal, normal).sqrt() / (2.0 * h.abs());
                        let inside = dist2(&wimg, &center) <= radius * radius;
                        Ok(WallShape::Ball { center, radius, inside })
                    }
                }
            }
        }
    }
}

/// A boundary point strictly outside the closed polytope, suitable as an
/// inversion center that pulls the point at infinity off the polytope.
/// Requires at least one wall.
pub(crate) fn external_boundary_point(shapes: &[WallShape]) -> Result<Vec<f64>> {
    for shape in shapes {
        if let WallShape::Ball { center, inside: false, .. } = shape {
            return Ok(center.clone()); // center of an excluded ball
        }
    }
    for shape in shapes {
        if let WallShape::Ball { center, radius, inside: true } = shape {
            let mut p = center.clone();
            p[0] += 2.0 * radius;
            return Ok(p);
        }
    }
    for shape in shapes {
        if let WallShape::Vertical { normal, offset } = shape {
            let n2 = dot(normal, normal);
            let delta = offset.abs().max(1.0);
            return Ok(normal.iter().map(|x| x * (offset - delta) / n2).collect());
        }
    }
    Err(Error::Domain("no walls available to pick an external point".into()))
}

/// Translate shapes by `-c` and rescale by `1/lambda` (exact chart
/// isometries up to the ε rescaling handled by the caller).
pub(crate) fn normalize_shapes(shapes: &[WallShape]) -> (Vec<WallShape>, f64) {
    // tightest inside ball fixes the frame
    let mut best: Option<(&Vec<f64>, f64)> = None;
    for shape in shapes {
        if let WallShape::Ball { center, radius, inside: true } = shape {
            if best.map_or(true, |(_, r)| *radius < r) {
                best = Some((center, *radius));
            }
        }
    }
    let Some((c, lambda)) = best else {
        return (shapes.to_vec(), 1.0);
    };
    let c = c.clone();
    let out = shapes
        .iter()
        .map(|s| match s {
            WallShape::Ball { center, radius, inside } => WallShape::Ball {
                center: center.iter().zip(&c).map(|(x, y)| (x - y) / lambda).collect(),
                radius: radius / lambda,
                inside: *inside,
            },
            WallShape::Vertical { normal, offset } => WallShape::Vertical {
                normal: normal.clone(),
                offset: (offset - dot(normal, &c)) / lambda,
            },
        })
        .collect();
    (out, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_normal(e0: f64, dir: &[f64]) -> Vec<f64> {
        let scale = (1.0 + e0 * e0).sqrt();
        let mut e = vec![e0];
        e.extend(dir.iter().map(|d| d * scale));
        e
    }

    #[test]
    fn shape_round_trip_matches_normals() {
        let cases = vec![
            unit_normal(-0.4, &[0.6, 0.8]),
            unit_normal(0.3, &[-1.0, 0.0]),
            vec![0.5, 1.0, 0.0, -0.5], // vertical in n=3 (e0 = -e_n)
            unit_normal(0.0, &[0.0, 1.0]),
        ];
        for e in cases {
            let n = e.len() - 1;
            let shape = wall_shape(&e);
            let back = shape_normal(&shape, n).unwrap();
            for (a, b) in e.iter().zip(&back) {
                assert!((a - b).abs() < 1e-12, "round trip drifted: {e:?} vs {back:?}");
            }
        }
    }

    #[test]
    fn shape_membership_agrees_with_minkowski_membership() {
        use crate::minkowski::AmbientVector;
        use crate::models::{hemisphere_to_upper_half_space, hyperboloid_to_hemisphere};
        let e = unit_normal(-0.35, &[0.28, 0.96]);
        let shape = wall_shape(&e);
        // sample hyperboloid points on both sheets and compare memberships
        for k in 0..40 {
            let t = -1.9 + 0.1 * k as f64;
            let dir = [(0.3 + 0.05 * k as f64).cos(), (0.3 + 0.05 * k as f64).sin()];
            let x = AmbientVector::upper(vec![t.cosh(), dir[0] * t.sinh(), dir[1] * t.sinh()]);
            for p in [x.clone(), x.antipode()] {
                let dot_val: f64 = -p.coords[0] * e[0] + p.coords[1] * e[1] + p.coords[2] * e[2];
                let member = p.ell() * dot_val >= 0.0;
                let z = hemisphere_to_upper_half_space(&hyperboloid_to_hemisphere(&p).unwrap()).unwrap();
                assert_eq!(
                    shape_contains(&shape, &z.coords),
                    member,
                    "chart membership mismatch at {:?}",
                    p.coords
                );
            }
        }
    }

    #[test]
    fn fibers_are_symmetric_intervals() {
        let shapes = vec![
            WallShape::Ball { center: vec![0.0], radius: 2.0, inside: true },
            WallShape::Ball { center: vec![0.5], radius: 1.0, inside: false },
        ];
        let f = fiber(&shapes, &[0.4]).unwrap();
        assert!((f.lo - (1.0f64 - 0.01).sqrt()).abs() < 1e-12);
        assert!((f.hi.unwrap() - (4.0f64 - 0.16).sqrt()).abs() < 1e-12);
        assert!(fiber(&shapes, &[3.0]).is_none(), "outside the bounding ball");
        // deep inside the excluded ball but still within the big one
        let g = fiber(&shapes, &[0.5]).unwrap();
        assert!((g.lo - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infinity_membership_follows_coefficients() {
        let inside_ball = unit_normal(-0.2, &[0.0, 1.0]); // e_n > 0 > e_0 with a > 0
        assert!(!contains_infinity(&[inside_ball.clone()]));
        let outside = vec![-inside_ball[0], -inside_ball[1], -inside_ball[2]];
        assert!(contains_infinity(&[outside]));
    }

    #[test]
    fn inversion_swaps_ball_types_and_preserves_membership() {
        let el = MapElement::Inversion { center: vec![5.0, 0.0], radius: 2.0 };
        let shapes = vec![
            WallShape::Ball { center: vec![0.0, 0.0], radius: 1.5, inside: true },
            WallShape::Vertical { normal: vec![0.0, 1.0], offset: -0.5 },
        ];
        for shape in &shapes {
            let image = apply_shape(&el, shape).unwrap();
            // membership must commute with the point map on a sample grid
            for i in 0..20 {
                for j in 0..20 {
                    let w = [-3.0 + 0.35 * i as f64, -3.0 + 0.35 * j as f64];
                    if dist2(&w, &[5.0, 0.0]) < 1e-6 {
                        continue;
                    }
                    // points on the wall itself round either way
                    let margin = match shape {
                        WallShape::Ball { center, radius, .. } => {
                            dist2(&w, center).sqrt() - radius
                        }
                        WallShape::Vertical { normal, offset } => dot(normal, &w) - offset,
                    };
                    if margin.abs() < 1e-9 {
                        continue;
                    }
                    let img = apply_point(&el, &w);
                    assert_eq!(
                        boundary_contains(shape, &w),
                        boundary_contains(&image, &img),
                        "membership broke at {w:?} for {shape:?} -> {image:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn plane_through_inversion_center_is_fixed() {
        let el = MapElement::Inversion { center: vec![1.0, 2.0], radius: 1.0 };
        let shape = WallShape::Vertical { normal: vec![3.0, -1.0], offset: 1.0 }; // 3*1 - 2 = 1
        let image = apply_shape(&el, &shape).unwrap();
        assert_eq!(image, shape);
    }

    #[test]
    fn slicing_reduces_dimension_and_flags_tangency() {
        let shapes = vec![WallShape::Ball { center: vec![0.0, 0.0], radius: 2.0, inside: true }];
        let sliced = slice_shapes(&shapes, 1.0).unwrap().unwrap();
        match &sliced[0] {
            WallShape::Ball { center, radius, inside } => {
                assert_eq!(center.len(), 1);
                assert!(*inside && (radius - 3.0f64.sqrt()).abs() < 1e-12);
            }
            _ => panic!("expected a ball slice"),
        }
        assert!(matches!(slice_shapes(&shapes, 2.0), Err(Error::TangentSlice(_))));
        assert!(slice_shapes(&shapes, 3.0).unwrap().is_none(), "slice misses the ball");
    }

    #[test]
    fn normalization_centers_the_tightest_ball() {
        let shapes = vec![
            WallShape::Ball { center: vec![3.0], radius: 2.0, inside: true },
            WallShape::Ball { center: vec![2.5], radius: 4.0, inside: true },
            WallShape::Vertical { normal: vec![1.0], offset: 2.0 },
        ];
        let (norm, lambda) = normalize_shapes(&shapes);
        assert_eq!(lambda, 2.0);
        match &norm[0] {
            WallShape::Ball { center, radius, .. } => {
                assert!(center[0].abs() < 1e-15 && (radius - 1.0).abs() < 1e-15);
            }
            _ => panic!(),
        }
        match &norm[2] {
            WallShape::Vertical { offset, .. } => assert!((offset + 0.5).abs() < 1e-15),
            _ => panic!(),
        }
    }

    #[test]
    fn external_point_is_outside_every_wall() {
        let shapes = vec![
            WallShape::Ball { center: vec![1.0, 0.0], radius: 1.0, inside: false },
            WallShape::Vertical { normal: vec![0.0, 2.0], offset: 1.0 },
        ];
        let p = external_boundary_point(&shapes).unwrap();
        assert!(
            !boundary_contains(&shapes[0], &p),
            "external point must violate the excluded-ball wall"
        );
    }
}
