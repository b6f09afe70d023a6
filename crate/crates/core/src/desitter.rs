//! The double de Sitter space 𝔻𝕊ⁿ₁ dual to 𝔻ℍⁿ, plus flat pictures of
//! quadric charts: isometric embeddings of half-spaces of ℝ^{p,q} onto
//! open pieces of {y·y = 1} with signature (p+1, q).
//!
//! Points of 𝔻𝕊ⁿ₁ are unit spacelike vectors with a copy tag; a double
//! hyperbolic point x determines the dual half-space
//! {e : ℓ(x)ℓ(e)(x·e) ≥ 0}. The embedding y and its inverse identify
//! the four half-spaces (upper/lower on each metric copy) with the four
//! regions of the doubled quadric, glued along a locus homeomorphic to
//! 𝕊^{p-1} × 𝕊^q.

use crate::minkowski::{self, AmbientTag, AmbientVector};
use crate::{Error, Result};

/// Tolerance on the defining quadric x·x = 1.
pub const QUADRIC_TOL: f64 = 1e-10;

/// A point of the double de Sitter space: a unit spacelike vector on one
/// of the two metric copies.
#[derive(Debug, Clone, PartialEq)]
pub struct DeSitterPoint {
    pub vector: AmbientVector,
}

impl DeSitterPoint {
    pub fn new(coords: Vec<f64>, tag: AmbientTag) -> Result<Self> {
        let vector = AmbientVector::new(coords, tag);
        let residual = (vector.norm2() - 1.0).abs();
        if residual > QUADRIC_TOL {
            return Err(Error::Domain(format!(
                "de Sitter point needs x·x = 1, residual {residual:.3e}"
            )));
        }
        Ok(Self { vector })
    }

    /// Sheet sign ℓ(e) = ±1 from the copy tag.
    pub fn ell(&self) -> f64 {
        self.vector.ell()
    }

    /// Spacelike antipode -e (same copy) and timelike antipode (opposite
    /// copy). Both square to the original under a second application.
    pub fn antipodes(&self) -> (DeSitterPoint, DeSitterPoint) {
        let neg: Vec<f64> = self.vector.coords.iter().map(|c| -c).collect();
        (
            DeSitterPoint { vector: AmbientVector::new(neg.clone(), self.vector.tag) },
            DeSitterPoint { vector: AmbientVector::new(neg, self.vector.tag.opposite()) },
        )
    }
}

/// Membership of e in the de Sitter half-space dual to the double
/// hyperbolic point x: ℓ(x)ℓ(e)(x·e) ≥ 0.
pub fn dual_halfspace_contains(x: &AmbientVector, e: &DeSitterPoint) -> Result<bool> {
    let d = minkowski::minkowski_dot(x, &e.vector)?;
    Ok(x.ell() * e.ell() * d >= 0.0)
}

/// Sign of the flat metric copy: ℝ^{p,q} carries +(dx² form), the
/// negated copy ℝ^{p,q}_- carries -(dx² form).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricSign {
    Plus,
    Minus,
}

/// A pseudo-Euclidean space ℝ^{p,q} (or its negated copy) whose upper
/// and lower half-spaces {±x_{p+q} > 0} embed into the quadric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignatureSpace {
    pub p: usize,
    pub q: usize,
    pub sign: MetricSign,
}

impl SignatureSpace {
    pub fn new(p: usize, q: usize, sign: MetricSign) -> Result<Self> {
        if p < 1 || q < 1 {
            return Err(Error::Domain(format!(
                "signature space needs p >= 1 and q >= 1, got ({p}, {q})"
            )));
        }
        Ok(Self { p, q, sign })
    }

    /// Diagonal of the flat form ±(+1, …, +1, -1, …, -1) with p pluses
    /// and q minuses.
    pub fn flat_metric_diag(&self) -> Vec<f64> {
        let s = match self.sign {
            MetricSign::Plus => 1.0,
            MetricSign::Minus => -1.0,
        };
        (0..self.p + self.q)
            .map(|j| if j < self.p { s } else { -s })
            .collect()
    }
}

fn check_pq(x: &[f64], p: usize, q: usize) -> Result<()> {
    if p < 1 || q < 1 {
        return Err(Error::Domain(format!(
            "embedding needs p >= 1 and q >= 1, got ({p}, {q})"
        )));
    }
    if x.len() != p + q {
        return Err(Error::DimensionMismatch(x.len(), p + q));
    }
    Ok(())
}

/// Signs of the ambient quadratic form on the y coordinates. For q = 1
/// the quadric sits in ℝ^{p+1,1} with y₀ timelike; for q ≥ 2 the
/// coordinate y₀ is spacelike and the last q coordinates are timelike.
pub fn ambient_signs(p: usize, q: usize) -> Vec<f64> {
    let n = p + q;
    if q == 1 {
        (0..=n).map(|a| if a == 0 { -1.0 } else { 1.0 }).collect()
    } else {
        (0..=n).map(|a| if a <= p { 1.0 } else { -1.0 }).collect()
    }
}

/// Isometric embedding of the half-space {x_{p+q} ≠ 0} of ℝ^{p,q} into
/// the quadric {Σ signs·y² = 1} in one higher dimension.
///
/// The middle coordinates are y_j = -x_j/x_{p+q}; the two extreme ones
/// are fixed by the quadric together with the conformal relation
/// 1/(y₀ + y_{p+q}) = x_{p+q}. The upper half-space lands in
/// {y₀ + y_{p+q} > 0}, the lower one in its complement.
pub fn embed_minkowski(x: &[f64], p: usize, q: usize) -> Result<Vec<f64>> {
    check_pq(x, p, q)?;
    let n = p + q;
    let s = x[n - 1];
    if s == 0.0 {
        return Err(Error::PointAtInfinity(
            "the embedding is undefined on the boundary x_{p+q} = 0".into(),
        ));
    }
    // flat quadratic form value on x
    let qx: f64 = x
        .iter()
        .enumerate()
        .map(|(j, v)| if j < p { v * v } else { -v * v })
        .sum();
    let mut y = vec![0.0; n + 1];
    for j in 1..n {
        y[j] = -x[j - 1] / s;
    }
    // the timelike end coordinate carries (1 - Q); with q = 1 that end
    // is y₀, otherwise it is y_{p+q}
    if q == 1 {
        y[0] = (1.0 + qx) / (2.0 * s);
        y[n] = (1.0 - qx) / (2.0 * s);
    } else {
        y[0] = (1.0 - qx) / (2.0 * s);
        y[n] = (1.0 + qx) / (2.0 * s);
    }
    Ok(y)
}

/// Copy tag of the image point: crossing to the lower half-space flips
/// the sign of the conformal factor and moves the image to the other
/// copy of the quadric.
pub fn image_copy(input: AmbientTag, x_last: f64) -> AmbientTag {
    if x_last >= 0.0 {
        input
    } else {
        input.opposite()
    }
}

/// Max-norm residual between the finite-difference pullback of the
/// quadric metric and the flat form diag(+p, -q)/x_{p+q}².
pub fn pullback_metric_check(x: &[f64], p: usize, q: usize) -> Result<f64> {
    check_pq(x, p, q)?;
    let n = p + q;
    let s = x[n - 1];
    let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    // fourth-order stencil: the image grows like 1/x_last near the
    // boundary plane and a second-order difference cannot keep both the
    // truncation and the rounding error below the residual budget there
    let h = 1e-4 * scale;
    if s.abs() <= 20.0 * h {
        return Err(Error::Domain(
            "finite-difference step would cross the boundary x_{p+q} = 0".into(),
        ));
    }
    let mut jac_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    for j in 0..n {
        let eval = |offset: f64| -> Result<Vec<f64>> {
            let mut xo = x.to_vec();
            xo[j] += offset;
            embed_minkowski(&xo, p, q)
        };
        let (y2p, yp, ym, y2m) = (eval(2.0 * h)?, eval(h)?, eval(-h)?, eval(-2.0 * h)?);
        jac_cols.push(
            (0..=n)
                .map(|a| (-y2p[a] + 8.0 * yp[a] - 8.0 * ym[a] + y2m[a]) / (12.0 * h))
                .collect(),
        );
    }
    let signs = ambient_signs(p, q);
    let mut residual = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            let g: f64 = (0..=n).map(|a| signs[a] * jac_cols[j][a] * jac_cols[k][a]).sum();
            let expect = if j != k {
                0.0
            } else if j < p {
                1.0 / (s * s)
            } else {
                -1.0 / (s * s)
            };
            residual = residual.max((g - expect).abs());
        }
    }
    Ok(residual)
}

/// One of the four half-spaces in the gluing picture, with its image
/// region on the doubled quadric and the metric signs before and after
/// the conformal factor 1/x_{p+q}².
#[derive(Debug, Clone)]
pub struct GlueRegion {
    pub name: &'static str,
    pub source_copy: AmbientTag,
    pub halfspace: &'static str,
    pub image: &'static str,
    pub image_copy: AmbientTag,
    pub metric_sign_raw: i8,
    pub metric_sign_conformal: i8,
    /// A representative point, usable for embedding sanity checks.
    pub sample: Vec<f64>,
}

/// Seam along which two chart images meet on the doubled quadric.
#[derive(Debug, Clone)]
pub struct GlueSeam {
    pub name: &'static str,
    pub description: String,
}

/// How the four flat half-spaces assemble the doubled quadric.
#[derive(Debug, Clone)]
pub struct GlueTopologyReport {
    pub p: usize,
    pub q: usize,
    pub regions: Vec<GlueRegion>,
    pub seams: Vec<GlueSeam>,
    /// Topology of the gluing locus between the four images.
    pub gluing_locus: String,
}

/// Enumerate the four half-space charts (upper/lower on each copy of
/// ℝ^{p,q}), their images on the doubled quadric, the sign pattern
/// (+,-,-,+) of the raw flat forms turning into (+,+,-,-) after the
/// conformal factor, and the seams where the images meet.
pub fn glue_topology_report(p: usize, q: usize) -> Result<GlueTopologyReport> {
    if p < 1 || q < 1 {
        return Err(Error::Domain(format!(
            "gluing report needs p >= 1 and q >= 1, got ({p}, {q})"
        )));
    }
    let n = p + q;
    let mut up = vec![0.0; n];
    up[n - 1] = 0.5;
    let mut down = vec![0.0; n];
    down[n - 1] = -0.5;
    let regions = vec![
        GlueRegion {
            name: "U",
            source_copy: AmbientTag::Plus,
            halfspace: "x_{p+q} > 0",
            image: "V+",
            image_copy: AmbientTag::Plus,
            metric_sign_raw: 1,
            metric_sign_conformal: 1,
            sample: up.clone(),
        },
        GlueRegion {
            name: "L",
            source_copy: AmbientTag::Plus,
            halfspace: "x_{p+q} < 0",
            image: "V-_-",
            image_copy: AmbientTag::Minus,
            metric_sign_raw: -1,
            metric_sign_conformal: 1,
            sample: down.clone(),
        },
        GlueRegion {
            name: "U-",
            source_copy: AmbientTag::Minus,
            halfspace: "x_{p+q} > 0",
            image: "V+_-",
            image_copy: AmbientTag::Minus,
            metric_sign_raw: -1,
            metric_sign_conformal: -1,
            sample: up,
        },
        GlueRegion {
            name: "L-",
            source_copy: AmbientTag::Minus,
            halfspace: "x_{p+q} < 0",
            image: "V-",
            image_copy: AmbientTag::Plus,
            metric_sign_raw: 1,
            metric_sign_conformal: -1,
            sample: down,
        },
    ];
    let seams = vec![
        GlueSeam {
            name: "Y",
            description: "boundary {x_{p+q} = 0} of the plus copy; its image closes up on \
                          {y0 + y_{p+q} = 0}"
                .into(),
        },
        GlueSeam {
            name: "Y-",
            description: "boundary {x_{p+q} = 0} of the negated copy; its image closes up on \
                          {y0 + y_{p+q} = 0} of the other quadric copy"
                .into(),
        },
        GlueSeam {
            name: "M",
            description: "points at infinity of the plus copy, glued to the far half of the \
                          locus {y0 + y_{p+q} = 0}"
                .into(),
        },
        GlueSeam {
            name: "M-",
            description: "points at infinity of the negated copy, glued to the far half of \
                          the locus {y0 + y_{p+q} = 0} of the other quadric copy"
                .into(),
        },
    ];
    Ok(GlueTopologyReport {
        p,
        q,
        regions,
        seams,
        gluing_locus: format!("S^{} x S^{}", p - 1, q),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_spacelike(t: f64, dir: &[f64], tag: AmbientTag) -> DeSitterPoint {
        // (sinh t, cosh t · u) is unit spacelike for any unit u
        let mut c = vec![t.sinh()];
        c.extend(dir.iter().map(|d| d * t.cosh()));
        DeSitterPoint::new(c, tag).unwrap()
    }

    #[test]
    fn points_must_sit_on_the_unit_quadric() {
        assert!(DeSitterPoint::new(vec![0.0, 0.0, 1.0], AmbientTag::Plus).is_ok());
        assert!(DeSitterPoint::new(vec![0.0, 2.0, 0.0], AmbientTag::Plus).is_err());
        // timelike unit vectors are not de Sitter points
        assert!(DeSitterPoint::new(vec![1.0, 0.0, 0.0], AmbientTag::Plus).is_err());
        let p = unit_spacelike(0.37, &[0.6, 0.8], AmbientTag::Minus);
        assert!((p.vector.norm2() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dual_halfspace_membership_follows_the_sign_rule() {
        let apex = AmbientVector::upper(vec![1.0, 0.0, 0.0, 0.0]);
        let boundary = DeSitterPoint::new(vec![0.0, 0.0, 0.0, 1.0], AmbientTag::Plus).unwrap();
        assert!(dual_halfspace_contains(&apex, &boundary).unwrap(), "x·e = 0 is inside");

        let outside =
            DeSitterPoint::new(vec![1.0, 2f64.sqrt(), 0.0, 0.0], AmbientTag::Plus).unwrap();
        assert!(!dual_halfspace_contains(&apex, &outside).unwrap(), "x·e < 0 on Plus");
        // flipping the copy tag flips membership when x·e is nonzero
        let flipped =
            DeSitterPoint::new(vec![1.0, 2f64.sqrt(), 0.0, 0.0], AmbientTag::Minus).unwrap();
        assert!(dual_halfspace_contains(&apex, &flipped).unwrap());
    }

    #[test]
    fn duality_on_the_plus_copy_is_the_classical_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let r: f64 = rng.gen_range(-1.2..1.2);
            let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let x = AmbientVector::upper(vec![r.cosh(), r.sinh() * a.cos(), r.sinh() * a.sin()]);
            let t: f64 = rng.gen_range(-1.0..1.0);
            let b: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let e = unit_spacelike(t, &[b.cos(), b.sin()], AmbientTag::Plus);
            let classical = minkowski::minkowski_dot(&x, &e.vector).unwrap() >= 0.0;
            assert_eq!(dual_halfspace_contains(&x, &e).unwrap(), classical);
        }
    }

    #[test]
    fn antipodes_swap_sides_as_expected() {
        let e = DeSitterPoint::new(vec![-1.0, 2f64.sqrt(), 0.0], AmbientTag::Plus).unwrap();
        let (space, time) = e.antipodes();
        assert_eq!(space.vector.tag, AmbientTag::Plus);
        assert_eq!(time.vector.tag, AmbientTag::Minus);
        assert_eq!(space.vector.coords, vec![1.0, -(2f64.sqrt()), 0.0]);
        let (s2, t2) = space.antipodes();
        assert_eq!(s2.vector, e.vector, "double spacelike antipode is the identity");
        assert_eq!(t2.vector.tag, AmbientTag::Minus);

        // e strictly inside the half-space dual to the apex
        let apex = AmbientVector::upper(vec![1.0, 0.0, 0.0]);
        assert!(dual_halfspace_contains(&apex, &e).unwrap());
        assert!(
            !dual_halfspace_contains(&apex, &space).unwrap(),
            "spacelike antipode leaves the half-space"
        );
        assert!(
            dual_halfspace_contains(&apex, &time).unwrap(),
            "timelike antipode stays in the half-space"
        );
    }

    #[test]
    fn upper_halves_of_both_sitter_copies_fill_the_dual_halfspace() {
        // the half-space dual to the apex holds the e₀ ≤ 0 half of the
        // plus copy and the e₀ ≥ 0 half of the negated copy
        let apex = AmbientVector::upper(vec![1.0, 0.0, 0.0]);
        for t in [-0.9f64, -0.2, 0.2, 0.9] {
            let plus = unit_spacelike(t, &[1.0, 0.0], AmbientTag::Plus);
            let minus = unit_spacelike(t, &[1.0, 0.0], AmbientTag::Minus);
            assert_eq!(dual_halfspace_contains(&apex, &plus).unwrap(), t <= 0.0);
            assert_eq!(dual_halfspace_contains(&apex, &minus).unwrap(), t >= 0.0);
        }
    }

    #[test]
    fn embedding_fixes_the_reference_point() {
        let y = embed_minkowski(&[0.0, 0.0, 1.0], 2, 1).unwrap();
        assert_eq!(y, vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn embedding_satisfies_quadric_and_conformal_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for (p, q) in [(1usize, 1usize), (2, 1), (2, 2)] {
            let signs = ambient_signs(p, q);
            for _ in 0..100 {
                let mut x: Vec<f64> = (0..p + q).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let last = x[p + q - 1];
                x[p + q - 1] = last.signum() * (0.1 + last.abs());
                let y = embed_minkowski(&x, p, q).unwrap();
                let quad: f64 = y.iter().zip(&signs).map(|(v, s)| s * v * v).sum();
                assert!((quad - 1.0).abs() < 1e-12, "quadric residual {:.3e}", quad - 1.0);
                let conf = 1.0 / (y[0] + y[p + q]);
                let s = x[p + q - 1];
                assert!(
                    (conf - s).abs() < 1e-12 * s.abs().max(1.0),
                    "conformal identity broken: {conf} vs {s}"
                );
            }
        }
    }

    #[test]
    fn lower_half_space_lands_on_the_negative_side() {
        let y = embed_minkowski(&[0.4, -0.3, -0.8], 2, 1).unwrap();
        assert!(y[0] + y[3] < 0.0);
        assert_eq!(image_copy(AmbientTag::Plus, -0.8), AmbientTag::Minus);
        assert_eq!(image_copy(AmbientTag::Plus, 0.8), AmbientTag::Plus);
        assert_eq!(image_copy(AmbientTag::Minus, -0.8), AmbientTag::Plus);
    }

    #[test]
    fn embedding_rejects_the_boundary_plane() {
        assert!(matches!(
            embed_minkowski(&[0.7, 0.0], 1, 1),
            Err(Error::PointAtInfinity(_))
        ));
        assert!(matches!(
            embed_minkowski(&[0.7, 0.1, 0.2], 1, 1),
            Err(Error::DimensionMismatch(3, 2))
        ));
        assert!(embed_minkowski(&[0.7], 1, 0).is_err());
    }

    #[test]
    fn pullback_metric_is_the_flat_form_over_x_last_squared() {
        let r = pullback_metric_check(&[0.3, 0.7], 1, 1).unwrap();
        assert!(r < 1e-8, "residual {r:.3e} at the reference point");

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (p, q) in [(2usize, 1usize), (2, 2), (1, 2)] {
            for _ in 0..10 {
                let mut x: Vec<f64> = (0..p + q).map(|_| rng.gen_range(-1.5..1.5)).collect();
                let last = x[p + q - 1];
                x[p + q - 1] = last.signum() * (0.3 + last.abs());
                let r = pullback_metric_check(&x, p, q).unwrap();
                assert!(r < 1e-8, "residual {r:.3e} at {x:?} for ({p},{q})");
            }
        }
        // too close to the boundary for the finite-difference stencil
        assert!(pullback_metric_check(&[0.5, 1e-7], 1, 1).is_err());
    }

    #[test]
    fn glue_report_lists_the_four_regions_with_their_signs() {
        let rep = glue_topology_report(2, 1).unwrap();
        assert_eq!(rep.regions.len(), 4);
        let raw: Vec<i8> = rep.regions.iter().map(|r| r.metric_sign_raw).collect();
        let conf: Vec<i8> = rep.regions.iter().map(|r| r.metric_sign_conformal).collect();
        assert_eq!(raw, vec![1, -1, -1, 1]);
        assert_eq!(conf, vec![1, 1, -1, -1]);
        assert_eq!(rep.gluing_locus, "S^1 x S^1");
        assert_eq!(rep.seams.len(), 4);

        for region in &rep.regions {
            let y = embed_minkowski(&region.sample, rep.p, rep.q).unwrap();
            let side = y[0] + y[rep.p + rep.q];
            match region.halfspace {
                "x_{p+q} > 0" => assert!(side > 0.0, "{} must map to the upper side", region.name),
                _ => assert!(side < 0.0, "{} must map to the lower side", region.name),
            }
            let expected_copy = image_copy(region.source_copy, region.sample[rep.p + rep.q - 1]);
            assert_eq!(region.image_copy, expected_copy, "copy bookkeeping for {}", region.name);
        }

        let flat = SignatureSpace::new(2, 1, MetricSign::Minus).unwrap().flat_metric_diag();
        assert_eq!(flat, vec![-1.0, -1.0, 1.0]);
        assert!(SignatureSpace::new(0, 1, MetricSign::Plus).is_err());
        assert!(glue_topology_report(1, 0).is_err());
    }
}
