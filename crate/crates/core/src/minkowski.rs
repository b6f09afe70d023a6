//! Ambient Minkowski space `R^{n,1}` and its negated copy.
//!
//! Vectors carry a copy tag: the double hyperbolic space is the union of the
//! upper sheet in `R^{n,1}` (tag `Plus`) and the lower sheet in the negated
//! copy (tag `Minus`). The bilinear form itself is tag-independent; the tag
//! only enters through the sheet sign `ℓ = ±1`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Tolerance for the light-cone / classification boundary.
pub const CLASSIFY_TOL: f64 = 1e-10;
/// Tolerance on `MᵀηM = η` for Lorentz transforms.
pub const LORENTZ_TOL: f64 = 1e-12;

/// Which metric copy a vector belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum AmbientTag {
    /// `R^{n,1}`, containing the upper hyperboloid sheet.
    Plus,
    /// The negated copy `R^{n,1}_-`, containing the lower sheet.
    Minus,
}

impl AmbientTag {
    /// The other copy.
    pub fn opposite(self) -> Self {
        match self {
            AmbientTag::Plus => AmbientTag::Minus,
            AmbientTag::Minus => AmbientTag::Plus,
        }
    }
}

/// A coordinate vector in the ambient space, together with its copy tag.
///
/// `coords[0]` is the timelike coordinate; `coords.len() = n + 1` for the
/// double hyperbolic space of dimension `n`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AmbientVector {
    pub coords: Vec<f64>,
    pub tag: AmbientTag,
}

impl AmbientVector {
    pub fn new(coords: Vec<f64>, tag: AmbientTag) -> Self {
        Self { coords, tag }
    }

    /// Upper-copy vector (`Plus` tag).
    pub fn upper(coords: Vec<f64>) -> Self {
        Self::new(coords, AmbientTag::Plus)
    }

    /// Dimension `n` of the double hyperbolic space this vector lives over.
    pub fn dim(&self) -> usize {
        self.coords.len().saturating_sub(1)
    }

    /// Sheet sign `ℓ`: `+1` on the `Plus` copy, `-1` on `Minus`.
    pub fn ell(&self) -> f64 {
        match self.tag {
            AmbientTag::Plus => 1.0,
            AmbientTag::Minus => -1.0,
        }
    }

    /// The antipodal point `-x` in the opposite copy.
    pub fn antipode(&self) -> Self {
        Self::new(self.coords.iter().map(|c| -c).collect(), self.tag.opposite())
    }

    /// Minkowski square `x·x`.
    pub fn norm2(&self) -> f64 {
        minkowski_dot_coords(&self.coords, &self.coords)
    }

    /// Euclidean norm of the spatial part `(x₁, …, x_n)`.
    pub fn spatial_norm(&self) -> f64 {
        self.coords[1..].iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// `a·b = -a₀b₀ + Σ_{i≥1} aᵢbᵢ` on raw coordinate slices.
pub fn minkowski_dot_coords(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = -a[0] * b[0];
    for i in 1..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// Minkowski bilinear form. The tags do not enter; the form is the same on
/// both copies. Errors if the dimensions differ.
pub fn minkowski_dot(a: &AmbientVector, b: &AmbientVector) -> Result<f64> {
    if a.coords.len() != b.coords.len() {
        return Err(Error::DimensionMismatch(a.coords.len(), b.coords.len()));
    }
    Ok(minkowski_dot_coords(&a.coords, &b.coords))
}

/// Coarse position of a vector relative to the light cone, interpreted as a
/// point of the double hyperbolic / de Sitter geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    /// Timelike future vector on the `Plus` copy (`x·x < 0`, `x₀ > 0`).
    UpperHyperboloid,
    /// Timelike past vector on the `Minus` copy (`x·x < 0`, `x₀ < 0`).
    LowerHyperboloid,
    /// Lightlike (within tolerance).
    LightCone,
    /// Spacelike (`x·x > 0`), either copy.
    DeSitter,
    /// Timelike but with a sheet/tag combination that is not a point of the
    /// double hyperbolic space (e.g. past vector tagged `Plus`).
    Other,
}

/// Classify a vector against the light cone with tolerance [`CLASSIFY_TOL`].
///
/// A timelike vector is a double-hyperbolic point only when its sheet matches
/// its copy tag: upper sheet on `Plus`, lower sheet on `Minus`.
pub fn classify(x: &AmbientVector) -> PointClass {
    let s = x.norm2();
    if s.abs() < CLASSIFY_TOL {
        return PointClass::LightCone;
    }
    if s > 0.0 {
        return PointClass::DeSitter;
    }
    match (x.coords[0] > 0.0, x.tag) {
        (true, AmbientTag::Plus) => PointClass::UpperHyperboloid,
        (false, AmbientTag::Minus) => PointClass::LowerHyperboloid,
        _ => PointClass::Other,
    }
}

/// Sheet sign as a standalone operation; a pure function of the tag.
pub fn sheet_sign(x: &AmbientVector) -> i32 {
    match x.tag {
        AmbientTag::Plus => 1,
        AmbientTag::Minus => -1,
    }
}

/// A linear isometry of the ambient form, stored as a dense `(n+1)×(n+1)`
/// matrix with `MᵀηM = η` (orthochronous in all constructors here).
#[derive(Debug, Clone)]
pub struct LorentzTransform {
    pub matrix: nalgebra::DMatrix<f64>,
}

impl LorentzTransform {
    pub fn identity(n: usize) -> Self {
        Self { matrix: nalgebra::DMatrix::identity(n + 1, n + 1) }
    }

    /// Boost of the given rapidity in the `(x₀, x_axis)` plane, `axis ≥ 1`.
    pub fn boost(n: usize, axis: usize, rapidity: f64) -> Self {
        assert!(axis >= 1 && axis <= n, "boost axis out of range");
        let mut m = nalgebra::DMatrix::identity(n + 1, n + 1);
        let (c, s) = (rapidity.cosh(), rapidity.sinh());
        m[(0, 0)] = c;
        m[(0, axis)] = s;
        m[(axis, 0)] = s;
        m[(axis, axis)] = c;
        Self { matrix: m }
    }

    /// Rotation by `angle` in the spatial `(x_i, x_j)` plane, `1 ≤ i < j ≤ n`.
    pub fn rotation(n: usize, i: usize, j: usize, angle: f64) -> Self {
        assert!(i >= 1 && j >= 1 && i != j && i <= n && j <= n, "rotation plane out of range");
        let mut m = nalgebra::DMatrix::identity(n + 1, n + 1);
        let (c, s) = (angle.cos(), angle.sin());
        m[(i, i)] = c;
        m[(i, j)] = -s;
        m[(j, i)] = s;
        m[(j, j)] = c;
        Self { matrix: m }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { matrix: &self.matrix * &other.matrix }
    }

    /// Apply to a vector; the tag is preserved (orthochronous action).
    pub fn apply(&self, x: &AmbientVector) -> AmbientVector {
        let v = nalgebra::DVector::from_column_slice(&x.coords);
        let w = &self.matrix * v;
        AmbientVector::new(w.iter().copied().collect(), x.tag)
    }

    /// Max-norm residual of `MᵀηM - η`.
    pub fn eta_residual(&self) -> f64 {
        let d = self.matrix.nrows();
        let mut eta = nalgebra::DMatrix::identity(d, d);
        eta[(0, 0)] = -1.0;
        let r = self.matrix.transpose() * &eta * &self.matrix - eta;
        r.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Validate the defining relation within [`LORENTZ_TOL`].
    pub fn validate(&self) -> Result<()> {
        let r = self.eta_residual();
        if r > LORENTZ_TOL {
            return Err(Error::InvalidNormal(format!(
                "matrix is not a Lorentz transform (eta residual {r:.3e})"
            )));
        }
        Ok(())
    }
}

/// Deterministic pseudo-random orthochronous Lorentz transform.
///
/// Composes seeded rotations and moderate boosts (ChaCha8 keyed by `seed`),
/// keeping the `MᵀηM = η` residual well below [`LORENTZ_TOL`].
pub fn random_lorentz(seed: u64, n: usize) -> LorentzTransform {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = LorentzTransform::identity(n);
    if n == 0 {
        return t;
    }
    for _ in 0..3 {
        if n >= 2 {
            let i = rng.gen_range(1..=n);
            let mut j = rng.gen_range(1..=n);
            while j == i {
                j = rng.gen_range(1..=n);
            }
            let angle = rng.gen_range(0.0..std::f64::consts::TAU);
            t = LorentzTransform::rotation(n, i.min(j), i.max(j), angle).compose(&t);
        }
        let axis = rng.gen_range(1..=n);
        let rapidity = rng.gen_range(-0.8..0.8);
        t = LorentzTransform::boost(n, axis, rapidity).compose(&t);
    }
    t
}
