//! Complex-valued volumes of polytopes in the double hyperbolic space.
//!
//! The double hyperbolic space `DH^n` glues two copies of hyperbolic space
//! along their ideal boundaries (projectively identified), giving a space
//! homeomorphic to the sphere on which volumes of polytopes are complex
//! numbers: `V_n(DH^n) = i^n V_n(S^n)`. This crate computes those volumes by
//! epsilon-regularized integration in the upper half-space and hemisphere
//! models, extrapolates the regularization away, and cross-checks the results
//! against closed forms, the Schläfli differential formula, Möbius-invariant
//! boundary volumes, and de Sitter-style embeddings of flat signature spaces.
//!
//! Conventions used throughout:
//! - Ambient Minkowski form `a·b = -a₀b₀ + Σ aᵢbᵢ` on `R^{n,1}`.
//! - Upper sheet `x₀ > 0` carries the `Plus` tag, the lower sheet lives in the
//!   negated copy and carries `Minus`; the sheet sign `ℓ` is a function of the
//!   tag alone.
//! - Half-spaces are `{x : ℓ(x)(x·e) ≥ 0}` with `e` a unit spacelike inward
//!   normal for the upper sheet.
//! - The distance of antipodal points is `πi` with the principal branch fixed
//!   once and for all; see [`models::geodesic_distance`].

pub mod boundary;
pub mod desitter;
mod error;
mod geom;
pub mod minkowski;
pub mod models;
pub mod numeric;
pub mod polytope;
pub mod renorm;
pub mod schlafli;
pub mod volume;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Complex scalar used for volumes and regularized integrals.
pub type Complex = num_complex::Complex<f64>;

/// Initialize the global rayon pool from `DHVOL_THREADS` if set.
///
/// Returns the number of threads the pool will use. Safe to call more than
/// once; only the first call configures the pool.
pub fn init_threads() -> usize {
    if let Ok(v) = std::env::var("DHVOL_THREADS") {
        if let Ok(k) = v.trim().parse::<usize>() {
            if k >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
        }
    }
    rayon::current_num_threads()
}
