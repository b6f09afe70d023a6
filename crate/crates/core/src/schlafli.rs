//! Numerical verification of the Schläfli differential formula
//!
//! ```text
//! κ·dV_n(P) = (1/(n-1)) Σ_F V_{n-2}(F) dθ_F,    κ = -1,
//! ```
//!
//! summed over the codimension-2 faces F with dihedral angles θ_F, plus
//! the sweep special case and the closed-form angle derivatives that the
//! radial and side-face sweeps obey.

use crate::geom;
use crate::polytope::{Face, Polytope, PolytopeKind};
use crate::volume::{self, EpsilonLadder, QuadratureConfig};
use crate::{Complex, Error, Result};
use std::collections::BTreeSet;

/// Denominator floor in rel_err = |lhs - rhs| / max(|lhs|, |rhs|, floor).
pub(crate) const REL_ERR_FLOOR: f64 = 1e-8;

/// One-parameter family of polytopes: wall `moving_index` follows
/// `normal_path` while all other walls stay fixed. Derivatives are taken
/// at parameter 0 with central differences of step `step`.
pub struct DeformationPath {
    pub polytope: Polytope,
    pub moving_index: usize,
    pub normal_path: Box<dyn Fn(f64) -> Vec<f64> + Send + Sync>,
    pub step: f64,
}

impl DeformationPath {
    pub fn new(
        polytope: Polytope,
        moving_index: usize,
        normal_path: Box<dyn Fn(f64) -> Vec<f64> + Send + Sync>,
        step: f64,
    ) -> Result<Self> {
        if moving_index >= polytope.halfspaces().len() {
            return Err(Error::Domain(format!(
                "moving wall index {moving_index} out of range"
            )));
        }
        if !(step > 0.0) {
            return Err(Error::Domain("deformation step must be positive".into()));
        }
        Ok(Self { polytope, moving_index, normal_path, step })
    }

    /// The polytope at path parameter s.
    pub fn polytope_at(&self, s: f64) -> Result<Polytope> {
        let mut normals: Vec<Vec<f64>> = self
            .polytope
            .halfspaces()
            .iter()
            .map(|h| h.coords().to_vec())
            .collect();
        normals[self.moving_index] = (self.normal_path)(s);
        Polytope::from_normals(self.polytope.dim, &normals, self.polytope.kind)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SDFReport {
    pub lhs: Complex,
    pub rhs: Complex,
    pub rel_err: f64,
}

fn face_signature(faces: &[Face]) -> BTreeSet<Vec<usize>> {
    faces.iter().map(|f| f.generators.clone()).collect()
}

fn central(f: &mut dyn FnMut(f64) -> Result<Complex>, h: f64) -> Result<Complex> {
    Ok((f(h)? - f(-h)?) / (2.0 * h))
}

/// Richardson-refined central difference: (4·D(h/2) - D(h))/3.
pub(crate) fn richardson(f: &mut dyn FnMut(f64) -> Result<Complex>, h: f64) -> Result<Complex> {
    let d_h = central(f, h)?;
    let d_h2 = central(f, h / 2.0)?;
    Ok((d_h2 * 4.0 - d_h) / 3.0)
}

/// Verify the differential formula along `path` at parameter 0 with a
/// stock ε ladder for the quadrature volumes.
pub fn sdf_check(path: &DeformationPath, cfg: &QuadratureConfig) -> Result<SDFReport> {
    // eps0 kept moderate: the two-sheet integrand develops a peak of
    // width ~ε² at the walls' ideal circles, and the smallest rung must
    // stay resolvable within cfg.max_depth.
    let ladder = EpsilonLadder { eps0: 0.3, ratio: 0.7, count: 6 };
    sdf_check_with_ladder(path, cfg, &ladder)
}

/// Base polytope and codimension-2 faces of a path that is safe to
/// differentiate: no ideal vertices and no face-lattice change anywhere
/// on the five-point central difference stencil.
pub(crate) fn guarded_base(path: &DeformationPath) -> Result<(Polytope, Vec<Face>)> {
    let h = path.step;
    let p0 = path.polytope_at(0.0)?;
    if !p0.ideal_vertices().is_empty() {
        return Err(Error::IdealVertexOnPath("ideal vertex at the base polytope".into()));
    }
    let faces0 = p0.faces(2)?;
    let signature0 = face_signature(&faces0);
    for s in [-h, -h / 2.0, h / 2.0, h] {
        let ps = path.polytope_at(s)?;
        if !ps.ideal_vertices().is_empty() {
            return Err(Error::IdealVertexOnPath(format!(
                "ideal vertex at path parameter {s}"
            )));
        }
        if face_signature(&ps.faces(2)?) != signature0 {
            return Err(Error::CombinatorialChange(format!(
                "face lattice changed at path parameter {s}"
            )));
        }
    }
    Ok((p0, faces0))
}

/// Verify the differential formula with an explicit ε ladder (used by
/// quadrature volumes in dimension 3; the 2D side runs on closed forms).
pub fn sdf_check_with_ladder(
    path: &DeformationPath,
    cfg: &QuadratureConfig,
    ladder: &EpsilonLadder,
) -> Result<SDFReport> {
    let n = path.polytope.dim;
    if n < 2 {
        return Err(Error::Domain("differential check needs dimension >= 2".into()));
    }
    if n > 3 {
        return Err(Error::Unsupported(
            "differential check supports dimensions 2 and 3".into(),
        ));
    }
    let h = path.step;
    let (_p0, faces0) = guarded_base(path)?;

    // κ = -1: lhs = -dV/ds. Closed-form volumes are noise-free, so the
    // 2D derivative gets Richardson refinement; quadrature volumes in 3D
    // use a single central difference at the caller's (larger) step so
    // the shared extrapolation bias cancels instead of amplifying.
    let mut vol = |s: f64| -> Result<Complex> {
        let ps = path.polytope_at(s)?;
        match n {
            2 => volume::closed_form_v2(&ps),
            _ => Ok(volume::volume(&ps, cfg, ladder)?.value),
        }
    };
    let dv = if n == 2 { richardson(&mut vol, h)? } else { central(&mut vol, h)? };
    let lhs = -dv;

    // Faces not touching the moving wall keep both generators fixed, so
    // their dihedral angles are constant and drop out of the sum.
    let mut rhs = Complex::new(0.0, 0.0);
    for face in &faces0 {
        if !face.generators.contains(&path.moving_index) {
            continue;
        }
        let (i, j) = (face.generators[0], face.generators[1]);
        let mut angle = |s: f64| -> Result<Complex> {
            Ok(Complex::new(path.polytope_at(s)?.dihedral_angle(i, j)?, 0.0))
        };
        let dtheta = richardson(&mut angle, h)?;
        let v_face = face.volume.expect("codimension-2 faces carry closed-form volumes");
        rhs += v_face * dtheta;
    }
    rhs /= n as f64 - 1.0;

    let scale = lhs.norm().max(rhs.norm()).max(REL_ERR_FLOOR);
    Ok(SDFReport { lhs, rhs, rel_err: (lhs - rhs).norm() / scale })
}

/// Derivative of μ_{u,ε}(P ∩ {x_{n-1} ≤ t}) in t: the slice integral
///
/// ```text
/// f_ε(t) = ∫_{E_t} dx₀ … dx_{n-2} / (x₀ - εi)ⁿ
/// ```
///
/// over the section E_t of P at horizontal height t.
pub fn sweep_derivative_t(
    p: &Polytope,
    t: f64,
    eps: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex> {
    if p.dim < 2 {
        return Err(Error::Domain("sweep derivative needs dimension >= 2".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain("sweep derivative needs eps > 0".into()));
    }
    if p.closure_contains_chart_infinity() {
        return Err(Error::PointAtInfinityInPolytope);
    }
    let n = p.dim;
    let Some(sliced) = geom::slice_shapes(p.wall_shapes(), t)? else {
        return Ok(Complex::new(0.0, 0.0));
    };
    let upper_only = p.kind == PolytopeKind::Type2Upper;
    let (v, _err) = volume::integrate_over_shapes(&sliced, n - 2, n as i32, eps, upper_only, cfg)?;
    Ok(v)
}

/// dθ_F/dt for the dihedral angle between a sweeping side face and a
/// fixed wall sphere of radius r, where the face circle has radius r_F:
/// ±1/r_F, positive for the top face.
pub fn angle_derivative_side(r: f64, r_f: f64, top: bool) -> Result<f64> {
    if !(r_f > 0.0) {
        return Err(Error::Domain("side-face angle derivative is singular at r_F = 0".into()));
    }
    if r_f > r {
        return Err(Error::Domain(format!("face radius {r_f} exceeds sphere radius {r}")));
    }
    Ok(if top { 1.0 / r_f } else { -1.0 / r_f })
}

/// dθ_F/dr for the dihedral angle between the sphere of radius r in a
/// radial sweep and a fixed wall: ±√(r² - r_F²)/(r·r_F), positive when
/// the origin lies outside the fixed half-space (the signed origin-wall
/// distance c = ±√(r² - r_F²) satisfies r·cos θ_F = c). Exactly 0 when
/// r_F = r, i.e. when the wall passes through the origin.
pub fn angle_derivative_radial(r: f64, r_f: f64, origin_inside: bool) -> Result<f64> {
    if !(r_f > 0.0) || !(r > 0.0) {
        return Err(Error::Domain("radial angle derivative needs positive radii".into()));
    }
    if r_f > r {
        return Err(Error::Domain(format!("face radius {r_f} exceeds sweep radius {r}")));
    }
    if r_f == r {
        return Ok(0.0);
    }
    let v = (r * r - r_f * r_f).sqrt() / (r * r_f);
    Ok(if origin_inside { -v } else { v })
}
