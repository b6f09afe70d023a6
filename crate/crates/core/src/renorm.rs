//! Experimental asymptotics of the regularized volume of an upper
//! polytope P₊ as ε → 0⁺:
//!
//! ```text
//! n odd:   μ_ε(P₊) = c₀(-εi)^{-n} + c₂(-εi)^{-n+2} + … + c_{n-1}(-εi)^{-1} + V° + o(1)
//! n even:  μ_ε(P₊) = c₀(-εi)^{-n} + … + c_{n-2}(-εi)^{-2} - L·log(-εi) + Vᵉ + o(1)
//! ```
//!
//! The expansion shape is conjectural; fits report their residual and
//! conditioning and carry an explicit experimental flag. The constants
//! tie back to honestly-computed volumes through V_{n+1}(P) = 2V°
//! (n odd) and V_{n+1}(P) = Lπi (n even), and to Euler characteristics
//! through closed product formulas.

use rayon::prelude::*;

use crate::polytope::{Polytope, PolytopeKind};
use crate::volume::{self, sphere_volume, EpsilonLadder, QuadratureConfig};
use crate::{numeric, Complex, Error, Result};
use std::f64::consts::PI;

/// Which expansion template applies: the parity of the asymptotic
/// dimension n (one less than the polytope dimension).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

/// Least-squares fit of ladder samples against the parity template.
#[derive(Debug, Clone)]
pub struct AsymptoticFit {
    /// Asymptotic dimension; the fitted polytope has dimension n + 1.
    pub n: usize,
    /// Negative powers of (-εi) in the template: -n, -n+2, …
    pub powers: Vec<i32>,
    /// Coefficients c₀, c₂, … matching `powers`.
    pub coefficients: Vec<Complex>,
    /// The regularized constant V° (n odd) or Vᵉ (n even).
    pub constant: Complex,
    /// L in the -L·log(-εi) term; only present for even n.
    pub log_coeff: Option<Complex>,
    pub condition_number: f64,
    pub residual: f64,
    /// The expansion is conjectural: fitted values are experimental
    /// evidence, not ground truth.
    pub experimental: bool,
}

impl AsymptoticFit {
    pub fn parity(&self) -> Parity {
        if self.n % 2 == 1 { Parity::Odd } else { Parity::Even }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "n": self.n,
            "powers": self.powers,
            "coefficients": self
                .coefficients
                .iter()
                .map(|c| vec![c.re, c.im])
                .collect::<Vec<_>>(),
            "constant": [self.constant.re, self.constant.im],
            "log_coeff": self.log_coeff.map(|c| vec![c.re, c.im]),
            "condition_number": self.condition_number,
            "residual": self.residual,
            "experimental": self.experimental,
        })
        .to_string()
    }
}

/// Maximum condition number accepted for a fit.
pub const CONDITION_LIMIT: f64 = 1e10;

fn template_powers(n: usize) -> Vec<i32> {
    let mut k = -(n as i32);
    let mut powers = Vec::new();
    while k <= -1 {
        powers.push(k);
        k += 2;
    }
    powers
}

/// Fit the ε-ladder samples of μ_ε(P₊) against the parity template.
/// Bounded chart regions sample the plane functional; regions whose
/// closure reaches the chart's point at infinity sample the sphere
/// functional on the unit sphere instead.
pub fn fit_asymptotics(
    p_plus: &Polytope,
    n: usize,
    ladder: &EpsilonLadder,
    cfg: &QuadratureConfig,
) -> Result<AsymptoticFit> {
    if p_plus.kind != PolytopeKind::Type2Upper {
        return Err(Error::Domain("asymptotic fits run on upper polytopes".into()));
    }
    if p_plus.dim != n + 1 {
        return Err(Error::Domain(format!(
            "asymptotic dimension {n} needs a polytope of dimension {}, got {}",
            n + 1,
            p_plus.dim
        )));
    }
    ladder.validate()?;
    let powers = template_powers(n);
    let terms = powers.len() + 1 + usize::from(n % 2 == 0);
    if ladder.count < terms + 3 {
        return Err(Error::Domain(format!(
            "ladder needs at least {} samples for {} fitted terms",
            terms + 3,
            terms
        )));
    }
    let eps_values = ladder.values();
    let vals: Vec<Complex> = if !p_plus.closure_contains_chart_infinity() {
        eps_values
            .par_iter()
            .map(|&e| volume::mu_u_eps(p_plus, e, cfg))
            .collect::<Result<_>>()?
    } else {
        eps_values
            .par_iter()
            .map(|&e| volume::mu_h_eps(p_plus, e, 1.0, false, cfg))
            .collect::<Result<_>>()?
    };
    let design: Vec<Vec<Complex>> = eps_values
        .iter()
        .map(|&e| {
            let z = Complex::new(0.0, -e);
            let mut row: Vec<Complex> = powers.iter().map(|&k| z.powi(k)).collect();
            if n % 2 == 0 {
                row.push(z.ln());
            }
            row.push(Complex::new(1.0, 0.0));
            row
        })
        .collect();
    let (coeffs, cond, residual) = numeric::complex_least_squares(&design, &vals)?;
    if cond > CONDITION_LIMIT {
        return Err(Error::IllConditioned(cond));
    }
    let singular = coeffs[..powers.len()].to_vec();
    let log_coeff = if n % 2 == 0 { Some(-coeffs[powers.len()]) } else { None };
    let constant = coeffs[coeffs.len() - 1];
    Ok(AsymptoticFit {
        n,
        powers,
        coefficients: singular,
        constant,
        log_coeff,
        condition_number: cond,
        residual,
        experimental: true,
    })
}

/// Normalized residual of the identity tying the fit of P₊ to the
/// honestly-computed volume of the doubled polytope P:
/// |V_{n+1}(P) - 2V°| for odd n, |V_{n+1}(P) - Lπi| for even n.
pub fn check_conjecture_identity(p: &Polytope, fit: &AsymptoticFit) -> Result<f64> {
    if p.dim != fit.n + 1 {
        return Err(Error::Domain(format!(
            "fit of asymptotic dimension {} does not match a {}-polytope",
            fit.n, p.dim
        )));
    }
    let v = volume::volume_auto(p)?.value;
    let predicted = match fit.parity() {
        Parity::Odd => 2.0 * fit.constant,
        Parity::Even => {
            let l = fit.log_coeff.ok_or_else(|| {
                Error::Domain("even-parity fit is missing its log coefficient".into())
            })?;
            l * Complex::new(0.0, PI)
        }
    };
    Ok((v - predicted).norm() / v.norm().max(1.0))
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Closed regularized constants for a hyperbolic manifold with Euler
/// characteristic `chi`: the constant V° of the odd template in
/// dimension 2m, or the log coefficient L of the even template in
/// dimension 2m + 1 (where the boundary characteristic is 2·chi).
pub fn epstein_constants(m: usize, chi: i64, parity: Parity) -> Result<Complex> {
    if m == 0 {
        return Err(Error::Domain("closed constants need m >= 1".into()));
    }
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let value = match parity {
        Parity::Odd => {
            sign * 2f64.powi(2 * m as i32) * PI.powi(m as i32) * factorial(m)
                / factorial(2 * m)
                * chi as f64
        }
        Parity::Even => sign * 2.0 * PI.powi(m as i32) / factorial(m) * chi as f64,
    };
    Ok(Complex::new(value, 0.0))
}

/// The same constants through sphere volumes: V° = (-1)^m·A_{2m}/2·chi
/// and L = (-1)^m·A_{2m+1}/π·chi. Agrees with the product form; kept
/// separate as a cross-check.
pub fn epstein_constants_sphere_form(m: usize, chi: i64, parity: Parity) -> Result<Complex> {
    if m == 0 {
        return Err(Error::Domain("closed constants need m >= 1".into()));
    }
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let value = match parity {
        Parity::Odd => sign * sphere_volume(2 * m) / 2.0 * chi as f64,
        Parity::Even => sign * sphere_volume(2 * m + 1) / PI * chi as f64,
    };
    Ok(Complex::new(value, 0.0))
}
