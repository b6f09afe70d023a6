//! Half-spaces and polytopes of the double hyperbolic space and of the
//! single upper sheet: membership, dihedral angles, face enumeration,
//! ideal-vertex detection, and restriction to the ideal boundary.

use crate::geom::{self, WallShape};
use crate::minkowski::{minkowski_dot_coords, AmbientTag, AmbientVector, LorentzTransform};
use crate::models::{to_hyperboloid, Model, ModelPoint, MODEL_TOL};
use crate::{Complex, Error, Result};
use serde::{Deserialize, Serialize};

/// Slack used by all membership tests.
pub const CONTAINS_TOL: f64 = 1e-9;

/// Two wall boundaries closer than this to tangency (|e_i·e_j| within
/// TANGENCY_TOL of 1) are treated as meeting at an ideal vertex.
pub const TANGENCY_TOL: f64 = 1e-8;

/// A closed half-space, stored by its inward unit normal on the upper
/// sheet; the lower sheet reuses the same data through the sign ℓ(x).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: AmbientVector,
}

impl HalfSpace {
    /// Build from raw coordinates, rescaling to a unit spacelike normal.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let s = minkowski_dot_coords(&coords, &coords);
        if s <= 0.0 {
            return Err(Error::InvalidNormal(format!(
                "normal must be spacelike, got e·e = {s}"
            )));
        }
        let inv = 1.0 / s.sqrt();
        let normal = AmbientVector::upper(coords.into_iter().map(|c| c * inv).collect());
        Ok(Self { normal })
    }

    pub fn coords(&self) -> &[f64] {
        &self.normal.coords
    }

    /// Half-space with the complementary region: inward normal negated.
    pub fn complement(&self) -> Self {
        Self {
            normal: AmbientVector::upper(self.normal.coords.iter().map(|c| -c).collect()),
        }
    }
}

/// Interior dihedral angle between two intersecting wall boundaries.
pub fn dihedral_angle(h1: &HalfSpace, h2: &HalfSpace) -> Result<f64> {
    let d = minkowski_dot_coords(h1.coords(), h2.coords());
    if d.abs() >= 1.0 {
        return Err(Error::NonIntersecting);
    }
    Ok((-d).acos())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolytopeKind {
    /// Both sheets: membership ℓ(x)·(x·e) ≥ 0 for every wall.
    Type1,
    /// Upper sheet only: membership x·e ≥ 0 and x₀ > 0.
    #[serde(rename = "type2upper")]
    Type2Upper,
}

/// A finite intersection of closed half-spaces. The empty list is the
/// whole space.
#[derive(Debug, Clone)]
pub struct Polytope {
    pub dim: usize,
    pub kind: PolytopeKind,
    halfspaces: Vec<HalfSpace>,
    shapes: Vec<WallShape>,
}

/// A face of codimension 1 or 2, recorded by the walls whose boundaries
/// contain it together with a sampled representation of its components.
#[derive(Debug, Clone)]
pub struct Face {
    pub codim: usize,
    /// Indices of the generating half-spaces.
    pub generators: Vec<usize>,
    /// Sample points on the face (hyperboloid coordinates).
    pub samples: Vec<AmbientVector>,
    /// Intrinsic complex volume where a closed form applies
    /// (0-dimensional point pairs and 1-dimensional edges).
    pub volume: Option<Complex>,
}

/// The intersection of a polytope with the ideal boundary of the upper
/// sheet, kept as a view of its parent.
#[derive(Debug, Clone)]
pub struct BoundaryPolytope {
    pub parent: Polytope,
    /// Chart in which boundary computations run.
    pub model: Model,
}

impl Polytope {
    pub fn new(dim: usize, halfspaces: Vec<HalfSpace>, kind: PolytopeKind) -> Result<Self> {
        let mut dedup: Vec<HalfSpace> = Vec::with_capacity(halfspaces.len());
        for h in halfspaces {
            if h.normal.coords.len() != dim + 1 {
                return Err(Error::DimensionMismatch(dim + 1, h.normal.coords.len()));
            }
            let s = minkowski_dot_coords(h.coords(), h.coords());
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidNormal(format!("normal not unit: e·e = {s}")));
            }
            // duplicates are dropped only on exact coordinate equality;
            // geometric redundancy (nested half-spaces) is legal input
            if !dedup.iter().any(|g| g.normal.coords == h.normal.coords) {
                dedup.push(h);
            }
        }
        let shapes = if dim >= 1 {
            dedup.iter().map(|h| geom::wall_shape(h.coords())).collect()
        } else {
            Vec::new()
        };
        Ok(Self { dim, kind, halfspaces: dedup, shapes })
    }

    /// The whole space in the given dimension.
    pub fn whole(dim: usize, kind: PolytopeKind) -> Self {
        Self { dim, kind, halfspaces: Vec::new(), shapes: Vec::new() }
    }

    /// Convenience constructor from raw normal coordinates.
    pub fn from_normals(dim: usize, normals: &[Vec<f64>], kind: PolytopeKind) -> Result<Self> {
        let hs = normals
            .iter()
            .map(|c| HalfSpace::new(c.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, hs, kind)
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    pub(crate) fn wall_shapes(&self) -> &[WallShape] {
        &self.shapes
    }

    pub(crate) fn normal_coords(&self) -> Vec<Vec<f64>> {
        self.halfspaces.iter().map(|h| h.coords().to_vec()).collect()
    }

    /// Whether the closure contains the ideal point at the top of the
    /// half-space chart (the pole of the hemisphere chart).
    pub(crate) fn closure_contains_chart_infinity(&self) -> bool {
        self.dim >= 1 && geom::contains_infinity(&self.normal_coords())
    }

    /// Membership of a finite point given in any model.
    pub fn contains(&self, x: &ModelPoint) -> Result<bool> {
        if let Some(ray) = ideal_ray(x)? {
            return Ok(self.contains_ideal_ray(&ray));
        }
        let xa = to_hyperboloid(x)?;
        self.contains_ambient(&xa)
    }

    /// Membership of a hyperboloid point (either sheet).
    pub fn contains_ambient(&self, x: &AmbientVector) -> Result<bool> {
        if x.coords.len() != self.dim + 1 {
            return Err(Error::DimensionMismatch(self.dim + 1, x.coords.len()));
        }
        if self.kind == PolytopeKind::Type2Upper && x.tag == AmbientTag::Minus {
            return Ok(false);
        }
        let sign = match self.kind {
            PolytopeKind::Type1 => x.ell(),
            PolytopeKind::Type2Upper => 1.0,
        };
        for h in &self.halfspaces {
            let d = minkowski_dot_coords(&x.coords, h.coords());
            if sign * d < -CONTAINS_TOL {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Membership of an ideal point represented by a future lightlike ray.
    pub fn contains_ideal_ray(&self, v: &[f64]) -> bool {
        self.halfspaces.iter().all(|h| {
            minkowski_dot_coords(v, h.coords()) >= -CONTAINS_TOL
        })
    }

    pub fn dihedral_angle(&self, i: usize, j: usize) -> Result<f64> {
        dihedral_angle(&self.halfspaces[i], &self.halfspaces[j])
    }

    /// Apply an isometry of the ambient space to every wall normal.
    pub fn transformed(&self, g: &LorentzTransform) -> Result<Self> {
        let hs = self
            .halfspaces
            .iter()
            .map(|h| HalfSpace { normal: g.apply(&h.normal) })
            .collect();
        Self::new(self.dim, hs, self.kind)
    }

    /// Cut by `h`: the pair (P ∩ h, P ∩ hᶜ) with disjoint interiors.
    pub fn split(&self, h: &HalfSpace) -> Result<(Self, Self)> {
        let mut left = self.halfspaces.clone();
        left.push(h.clone());
        let mut right = self.halfspaces.clone();
        right.push(h.complement());
        Ok((
            Self::new(self.dim, left, self.kind)?,
            Self::new(self.dim, right, self.kind)?,
        ))
    }

    /// Restriction to the ideal boundary of the upper sheet.
    pub fn restrict_to_boundary(&self) -> Result<BoundaryPolytope> {
        if self.dim < 1 {
            return Err(Error::Domain("boundary restriction needs dim >= 1".into()));
        }
        Ok(BoundaryPolytope { parent: self.clone(), model: Model::UpperHalfSpace })
    }

    /// Nonempty faces of the given codimension (1 or 2), with generator
    /// sets and sampled points. Implemented for ambient dimension ≤ 3.
    pub fn faces(&self, codim: usize) -> Result<Vec<Face>> {
        if codim == 0 || codim > 2 {
            return Err(Error::Domain(format!("face codimension {codim} not in {{1, 2}}")));
        }
        if self.dim > 3 {
            return Err(Error::Unsupported(
                "face enumeration implemented for dimension <= 3".into(),
            ));
        }
        if codim > self.dim {
            return Ok(Vec::new());
        }
        match (self.dim, codim) {
            (1, 1) => self.faces_dim1_walls(),
            (2, 1) => self.faces_dim2_walls(),
            (3, 1) => self.faces_dim3_walls(),
            (2, 2) => self.faces_vertices(),
            (3, 2) => self.faces_edges(),
            _ => Ok(Vec::new()),
        }
    }

    /// 0-faces of a 1-dimensional polytope: each wall boundary is a point
    /// pair (one point on each sheet).
    fn faces_dim1_walls(&self) -> Result<Vec<Face>> {
        let mut out = Vec::new();
        for (i, h) in self.halfspaces.iter().enumerate() {
            let e = h.coords();
            // e^⊥ is spanned by (e₁, e₀), a unit timelike vector
            let (v0, v1) = if e[1] >= 0.0 { (e[1], e[0]) } else { (-e[1], -e[0]) };
            let x = AmbientVector::upper(vec![v0, v1]);
            if self.contains_ambient(&x)? {
                out.push(Face {
                    codim: 1,
                    generators: vec![i],
                    samples: vec![x.clone(), x.antipode()],
                    volume: Some(Complex::new(2.0, 0.0)),
                });
            }
        }
        Ok(out)
    }

    /// 1-faces of a 2-dimensional polytope via the projective disk: each
    /// wall boundary is a chord, clipped by the other walls.
    fn faces_dim2_walls(&self) -> Result<Vec<Face>> {
        let mut out = Vec::new();
        for i in 0..self.halfspaces.len() {
            if let Some((lo, hi)) = self.wall_chord_interval(i) {
                let mut samples = Vec::new();
                for f in [0.5, 0.25, 0.75] {
                    let s = lo + f * (hi - lo);
                    if let Some(x) = self.chord_point(i, s) {
                        samples.push(x.antipode());
                        samples.push(x);
                    }
                }
                out.push(Face { codim: 1, generators: vec![i], samples, volume: None });
            }
        }
        Ok(out)
    }

    /// Chord of wall `i` in the projective disk: returns the clipped
    /// parameter interval when the facet is nonempty.
    pub(crate) fn wall_chord_interval(&self, i: usize) -> Option<(f64, f64)> {
        let e = self.halfspaces[i].coords();
        let (e0, eb) = (e[0], [e[1], e[2]]);
        let n2 = eb[0] * eb[0] + eb[1] * eb[1];
        let p = [e0 * eb[0] / n2, e0 * eb[1] / n2];
        let len = n2.sqrt();
        let d = [-eb[1] / len, eb[0] / len];
        let half = (1.0 - (p[0] * p[0] + p[1] * p[1])).max(0.0).sqrt();
        let (mut lo, mut hi) = (-half, half);
        for (l, h) in self.halfspaces.iter().enumerate() {
            if l == i {
                continue;
            }
            let f = h.coords();
            let fb = [f[1], f[2]];
            let slope = d[0] * fb[0] + d[1] * fb[1];
            let rhs = f[0] - (p[0] * fb[0] + p[1] * fb[1]);
            if slope.abs() < 1e-13 {
                if rhs > CONTAINS_TOL {
                    return None;
                }
            } else if slope > 0.0 {
                lo = lo.max(rhs / slope);
            } else {
                hi = hi.min(rhs / slope);
            }
            if hi - lo <= 1e-9 {
                return None;
            }
        }
        Some((lo, hi))
    }

    /// Hyperboloid point over the chord parameter `s` of wall `i`.
    fn chord_point(&self, i: usize, s: f64) -> Option<AmbientVector> {
        let e = self.halfspaces[i].coords();
        let (e0, eb) = (e[0], [e[1], e[2]]);
        let n2 = eb[0] * eb[0] + eb[1] * eb[1];
        let len = n2.sqrt();
        let k = [
            e0 * eb[0] / n2 - s * eb[1] / len,
            e0 * eb[1] / n2 + s * eb[0] / len,
        ];
        let r2 = k[0] * k[0] + k[1] * k[1];
        if r2 >= 1.0 - 1e-12 {
            return None;
        }
        let f = 1.0 / (1.0 - r2).sqrt();
        Some(AmbientVector::upper(vec![f, f * k[0], f * k[1]]))
    }

    /// 2-faces of a 3-dimensional polytope, sampled on a hyperbolic-polar
    /// grid of each wall plane.
    fn faces_dim3_walls(&self) -> Result<Vec<Face>> {
        let mut out = Vec::new();
        for (i, h) in self.halfspaces.iter().enumerate() {
            let (w1, wsp) = orthogonal_frame(h.coords())?;
            let mut samples = Vec::new();
            for &t in &[0.0f64, 0.4, 0.9, 1.6, 2.5, 3.5] {
                let kmax = if t == 0.0 { 1 } else { 16 };
                for k in 0..kmax {
                    let psi = 2.0 * std::f64::consts::PI * k as f64 / kmax as f64;
                    let dir: Vec<f64> = (0..4)
                        .map(|c| wsp[0][c] * psi.cos() + wsp[1][c] * psi.sin())
                        .collect();
                    let coords: Vec<f64> = (0..4)
                        .map(|c| w1[c] * t.cosh() + dir[c] * t.sinh())
                        .collect();
                    let x = AmbientVector::upper(coords);
                    if self.contains_ambient(&x)? {
                        samples.push(x.antipode());
                        samples.push(x);
                    }
                }
            }
            if !samples.is_empty() {
                out.push(Face { codim: 1, generators: vec![i], samples, volume: None });
            }
        }
        Ok(out)
    }

    /// 0-faces of a 2-dimensional polytope: transversal wall pairs whose
    /// common point lies in all other walls. Tangent pairs are ideal
    /// vertices and are excluded.
    fn faces_vertices(&self) -> Result<Vec<Face>> {
        let mut out = Vec::new();
        for i in 0..self.halfspaces.len() {
            for j in (i + 1)..self.halfspaces.len() {
                let d = minkowski_dot_coords(
                    self.halfspaces[i].coords(),
                    self.halfspaces[j].coords(),
                );
                if d.abs() >= 1.0 - TANGENCY_TOL {
                    continue;
                }
                let v = joint_kernel(&[
                    self.halfspaces[i].coords().to_vec(),
                    self.halfspaces[j].coords().to_vec(),
                ])?;
                let norm2 = minkowski_dot_coords(&v, &v);
                if norm2 >= 0.0 {
                    continue; // boundaries meet outside the hyperboloid
                }
                let scale = 1.0 / (-norm2).sqrt();
                let sign = if v[0] >= 0.0 { scale } else { -scale };
                let x = AmbientVector::upper(v.iter().map(|c| c * sign).collect());
                if self.contains_ambient(&x)? {
                    out.push(Face {
                        codim: 2,
                        generators: vec![i, j],
                        samples: vec![x.clone(), x.antipode()],
                        volume: Some(Complex::new(2.0, 0.0)),
                    });
                }
            }
        }
        Ok(out)
    }

    /// 1-faces of a 3-dimensional polytope: each transversal wall pair
    /// spans a geodesic, clipped exactly by the remaining walls through
    /// the substitution τ = tanh t.
    fn faces_edges(&self) -> Result<Vec<Face>> {
        let mut out = Vec::new();
        for i in 0..self.halfspaces.len() {
            for j in (i + 1)..self.halfspaces.len() {
                let d = minkowski_dot_coords(
                    self.halfspaces[i].coords(),
                    self.halfspaces[j].coords(),
                );
                if d.abs() >= 1.0 - TANGENCY_TOL {
                    continue;
                }
                if let Some(face) = self.clip_edge(i, j)? {
                    out.push(face);
                }
            }
        }
        Ok(out)
    }

    fn clip_edge(&self, i: usize, j: usize) -> Result<Option<Face>> {
        let basis = nullspace(&[
            self.halfspaces[i].coords().to_vec(),
            self.halfspaces[j].coords().to_vec(),
        ]);
        if basis.len() != 2 {
            return Ok(None);
        }
        let Some((w1, w2)) = timelike_split(&basis)? else {
            return Ok(None); // geodesic plane misses the hyperboloid
        };
        // x(t) = w1 cosh t + w2 sinh t; wall k demands a + b·tanh t ≥ 0
        let (mut tau_lo, mut tau_hi) = (-1.0f64, 1.0f64);
        for (k, h) in self.halfspaces.iter().enumerate() {
            if k == i || k == j {
                continue;
            }
            let a = minkowski_dot_coords(&w1, h.coords());
            let b = minkowski_dot_coords(&w2, h.coords());
            if b.abs() < 1e-13 {
                if a < -CONTAINS_TOL {
                    return Ok(None);
                }
            } else if b > 0.0 {
                tau_lo = tau_lo.max(-a / b);
            } else {
                tau_hi = tau_hi.min(-a / b);
            }
            if tau_hi - tau_lo <= 1e-9 {
                return Ok(None);
            }
        }
        let ideal_ends =
            usize::from(tau_lo <= -1.0 + 1e-12) + usize::from(tau_hi >= 1.0 - 1e-12);
        let mut samples = Vec::new();
        for f in [0.5, 0.1, 0.9] {
            let tau = tau_lo + f * (tau_hi - tau_lo);
            if tau.abs() < 1.0 - 1e-9 {
                let t = tau.atanh();
                let coords: Vec<f64> = (0..4)
                    .map(|c| w1[c] * t.cosh() + w2[c] * t.sinh())
                    .collect();
                let x = AmbientVector::upper(coords);
                samples.push(x.antipode());
                samples.push(x);
            }
        }
        Ok(Some(Face {
            codim: 2,
            generators: vec![i, j],
            samples,
            volume: Some(Complex::new(0.0, std::f64::consts::PI * ideal_ends as f64)),
        }))
    }

    /// Ideal points lying on at least two wall boundaries (tangent wall
    /// pairs, and for dimension 3 also joint kernels of wall triples),
    /// filtered by membership and deduplicated projectively.
    pub fn ideal_vertices(&self) -> Vec<AmbientVector> {
        let mut found: Vec<Vec<f64>> = Vec::new();
        let m = self.halfspaces.len();
        if self.dim >= 2 {
            for i in 0..m {
                for j in (i + 1)..m {
                    let ei = self.halfspaces[i].coords();
                    let ej = self.halfspaces[j].coords();
                    let d = minkowski_dot_coords(ei, ej);
                    if (d.abs() - 1.0).abs() > TANGENCY_TOL {
                        continue;
                    }
                    // v ⊥ e_i inside span{e_i, e_j}, lightlike at tangency
                    let v: Vec<f64> =
                        ej.iter().zip(ei).map(|(a, b)| a - d * b).collect();
                    push_ideal_candidate(&mut found, v, self);
                }
            }
        }
        if self.dim == 3 {
            for i in 0..m {
                for j in (i + 1)..m {
                    for k in (j + 1)..m {
                        let rows = vec![
                            self.halfspaces[i].coords().to_vec(),
                            self.halfspaces[j].coords().to_vec(),
                            self.halfspaces[k].coords().to_vec(),
                        ];
                        let basis = nullspace(&rows);
                        if basis.len() != 1 {
                            continue;
                        }
                        let v = basis.into_iter().next().expect("one basis vector");
                        let norm2 =
                            minkowski_dot_coords(&v, &v);
                        let scale: f64 = v.iter().map(|c| c * c).sum();
                        if norm2.abs() <= TANGENCY_TOL * scale {
                            push_ideal_candidate(&mut found, v, self);
                        }
                    }
                }
            }
        }
        found.into_iter().map(AmbientVector::upper).collect()
    }

    /// Serialize to the JSON wire format.
    pub fn to_json(&self) -> String {
        let wire = WirePolytope {
            dim: self.dim,
            kind: Some(self.kind),
            halfspaces: self
                .halfspaces
                .iter()
                .map(|h| WireHalfSpace { normal: h.coords().to_vec() })
                .collect(),
            boundary: None,
        };
        serde_json::to_string_pretty(&wire).expect("wire form serializes")
    }

    /// Parse the JSON wire format, normalizing each normal to unit length
    /// and rejecting inputs that deviate from unit by more than 1e-6.
    pub fn from_json(text: &str) -> Result<Self> {
        let wire: WirePolytope =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut hs = Vec::with_capacity(wire.halfspaces.len());
        for w in wire.halfspaces {
            let s = minkowski_dot_coords(&w.normal, &w.normal);
            if s <= 0.0 || (s - 1.0).abs() > 1e-6 {
                return Err(Error::Parse(format!(
                    "normal {:?} is not unit spacelike (e·e = {s})",
                    w.normal
                )));
            }
            hs.push(HalfSpace::new(w.normal)?);
        }
        Self::new(wire.dim, hs, wire.kind.unwrap_or(PolytopeKind::Type1))
    }
}

#[derive(Serialize, Deserialize)]
struct WirePolytope {
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kind: Option<PolytopeKind>,
    halfspaces: Vec<WireHalfSpace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    #[allow(dead_code)]
    boundary: Option<bool>,
}

#[derive(Serialize, Deserialize)]
struct WireHalfSpace {
    normal: Vec<f64>,
}

impl BoundaryPolytope {
    pub fn dim(&self) -> usize {
        self.parent.dim - 1
    }

    /// Membership of an ideal point given by a future lightlike ray.
    pub fn contains_ray(&self, v: &[f64]) -> bool {
        self.parent.contains_ideal_ray(v)
    }
}

fn push_ideal_candidate(found: &mut Vec<Vec<f64>>, v: Vec<f64>, p: &Polytope) {
    if v[0].abs() < 1e-12 {
        return;
    }
    let v: Vec<f64> = if v[0] > 0.0 {
        v
    } else {
        v.iter().map(|c| -c).collect()
    };
    if !p.contains_ideal_ray(&v) {
        return;
    }
    let proj: Vec<f64> = v.iter().map(|c| c / v[0]).collect();
    let dup = found
        .iter()
        .any(|u| u.iter().zip(&proj).all(|(a, b)| (a - b).abs() < 1e-6));
    if !dup {
        found.push(proj);
    }
}

/// Recognize ideal points handed over in chart coordinates: returns the
/// future lightlike representative when `x` sits on the ideal boundary of
/// its chart.
fn ideal_ray(x: &ModelPoint) -> Result<Option<Vec<f64>>> {
    let c = &x.coords;
    match x.model {
        Model::Hyperboloid => {
            let norm2 = minkowski_dot_coords(c, c);
            let scale: f64 = c.iter().map(|v| v * v).sum();
            if norm2.abs() <= MODEL_TOL * scale.max(1.0) {
                let v = if c[0] >= 0.0 {
                    c.clone()
                } else {
                    c.iter().map(|v| -v).collect()
                };
                return Ok(Some(v));
            }
            Ok(None)
        }
        Model::Hemisphere => {
            if c[0].abs() < MODEL_TOL {
                let mut v = vec![1.0];
                v.extend_from_slice(&c[1..]);
                return Ok(Some(v));
            }
            Ok(None)
        }
        Model::UpperHalfSpace => {
            if c[0].abs() < MODEL_TOL {
                // equatorial image of the boundary point
                let s: f64 = c.iter().map(|v| v * v).sum::<f64>() / 4.0;
                let d = 1.0 + s;
                let mut v = vec![1.0];
                v.extend(c[1..].iter().map(|z| z / d));
                v.push((1.0 - s) / d);
                return Ok(Some(v));
            }
            Ok(None)
        }
        Model::Klein | Model::Poincare => {
            let r2: f64 = c.iter().map(|v| v * v).sum();
            if (r2 - 1.0).abs() < MODEL_TOL {
                let mut v = vec![1.0];
                v.extend_from_slice(c);
                return Ok(Some(v));
            }
            Ok(None)
        }
    }
}

/// Euclidean-orthonormal basis of the joint Minkowski-orthogonal
/// complement of the given row vectors (kernel of the map x ↦ (e_i·x)).
fn nullspace(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows[0].len();
    let mut m = nalgebra::DMatrix::zeros(rows.len(), n);
    for (r, row) in rows.iter().enumerate() {
        m[(r, 0)] = -row[0]; // Minkowski pairing folded into the rows
        for c in 1..n {
            m[(r, c)] = row[c];
        }
    }
    let gram = m.transpose() * &m;
    let eig = nalgebra::SymmetricEigen::new(gram);
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let tol = lmax.max(1.0) * 1e-12;
    let mut basis = Vec::new();
    for k in 0..n {
        if eig.eigenvalues[k].abs() <= tol {
            basis.push(eig.eigenvectors.column(k).iter().copied().collect());
        }
    }
    basis
}

/// One-dimensional joint kernel (for transversal wall pairs in dim 2).
fn joint_kernel(rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    let basis = nullspace(rows);
    basis
        .into_iter()
        .next()
        .ok_or_else(|| Error::Domain("expected a nontrivial joint kernel".into()))
}

/// Split a 2-dimensional nullspace basis into a future unit timelike
/// vector and a Minkowski-orthogonal unit spacelike vector; None when the
/// plane carries no timelike direction.
fn timelike_split(basis: &[Vec<f64>]) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
    let g11 = minkowski_dot_coords(&basis[0], &basis[0]);
    let g12 = minkowski_dot_coords(&basis[0], &basis[1]);
    let g22 = minkowski_dot_coords(&basis[1], &basis[1]);
    let gram = nalgebra::Matrix2::new(g11, g12, g12, g22);
    let eig = nalgebra::SymmetricEigen::new(gram);
    let mut w1 = None;
    let mut w2 = None;
    for k in 0..2 {
        let lam = eig.eigenvalues[k];
        let combo: Vec<f64> = (0..basis[0].len())
            .map(|c| eig.eigenvectors[(0, k)] * basis[0][c] + eig.eigenvectors[(1, k)] * basis[1][c])
            .collect();
        if lam < -1e-12 {
            let s = 1.0 / (-lam).sqrt();
            let sign = if combo[0] >= 0.0 { s } else { -s };
            w1 = Some(combo.iter().map(|c| c * sign).collect::<Vec<f64>>());
        } else if lam > 1e-12 {
            let s = 1.0 / lam.sqrt();
            w2 = Some(combo.iter().map(|c| c * s).collect::<Vec<f64>>());
        }
    }
    Ok(match (w1, w2) {
        (Some(a), Some(b)) => Some((a, b)),
        _ => None,
    })
}

/// Frame of a wall plane in dimension 3: a future unit timelike vector and
/// two unit spacelike vectors spanning e^⊥.
fn orthogonal_frame(e: &[f64]) -> Result<(Vec<f64>, [Vec<f64>; 2])> {
    let basis = nullspace(&[e.to_vec()]);
    if basis.len() != 3 {
        return Err(Error::Domain("wall plane frame construction failed".into()));
    }
    let mut gram = nalgebra::Matrix3::zeros();
    for a in 0..3 {
        for b in 0..3 {
            gram[(a, b)] = minkowski_dot_coords(&basis[a], &basis[b]);
        }
    }
    let eig = nalgebra::SymmetricEigen::new(gram);
    let mut timelike = None;
    let mut spacelike = Vec::new();
    for k in 0..3 {
        let lam = eig.eigenvalues[k];
        let combo: Vec<f64> = (0..4)
            .map(|c| {
                (0..3).map(|a| eig.eigenvectors[(a, k)] * basis[a][c]).sum()
            })
            .collect();
        if lam < -1e-12 {
            let s = 1.0 / (-lam).sqrt();
            let sign = if combo[0] >= 0.0 { s } else { -s };
            timelike = Some(combo.iter().map(|c| c * sign).collect::<Vec<f64>>());
        } else if lam > 1e-12 {
            let s = 1.0 / lam.sqrt();
            spacelike.push(combo.iter().map(|c| c * s).collect::<Vec<f64>>());
        }
    }
    match (timelike, spacelike.len()) {
        (Some(t), 2) => {
            let mut it = spacelike.into_iter();
            let s1 = it.next().expect("two spacelike directions");
            let s2 = it.next().expect("two spacelike directions");
            Ok((t, [s1, s2]))
        }
        _ => Err(Error::Domain("wall plane has unexpected signature".into())),
    }
}
