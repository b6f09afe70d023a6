//! Shared numerical kernels: compensated summation, nested-rule adaptive
//! quadrature over boxes in 1 to 3 dimensions, Gauss-Legendre node tables,
//! and complex linear least squares.
//!
//! Everything here is deterministic: node tables are computed once by Newton
//! iteration, subdivision order is fixed, and accumulation uses Neumaier
//! compensated sums so results do not depend on evaluation scheduling.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::{Complex, Error, Result};

/// Neumaier variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Componentwise compensated sum of complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex {
        Complex::new(self.re.value(), self.im.value())
    }
}

/// Quadrature rule family used by the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum QuadratureRule {
    /// Closed Newton-Cotes pair (Simpson 3-point vs Boole 5-point).
    AdaptiveSimpson,
    /// Embedded Gauss-Legendre pair (4-point vs 8-point per axis).
    TensorGauss,
}

fn legendre_nodes(k: usize) -> (Vec<f64>, Vec<f64>) {
    // Newton iteration on P_k; nodes and weights on [-1, 1].
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    for i in 0..k {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        for _ in 0..100 {
            // evaluate P_k and P_k' by the three-term recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=k {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = k as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        // final recurrence pass for the weight
        let mut p0 = 1.0;
        let mut p1 = x;
        for j in 2..=k {
            let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = k as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = -x; // ascending order
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Nodes and weights on [0, 1] for a cached Gauss-Legendre rule.
fn unit_gauss(k: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("gauss cache poisoned");
    *guard.entry(k).or_insert_with(|| {
        let (n, w) = legendre_nodes(k);
        let mapped: (Vec<f64>, Vec<f64>) = (
            n.iter().map(|x| 0.5 * (x + 1.0)).collect(),
            w.iter().map(|x| 0.5 * x).collect(),
        );
        Box::leak(Box::new(mapped))
    })
}

fn unit_rule(rule: QuadratureRule, high: bool) -> &'static (Vec<f64>, Vec<f64>) {
    static SIMPSON: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static BOOLE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    match (rule, high) {
        (QuadratureRule::AdaptiveSimpson, false) => SIMPSON.get_or_init(|| {
            (vec![0.0, 0.5, 1.0], vec![1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0])
        }),
        (QuadratureRule::AdaptiveSimpson, true) => BOOLE.get_or_init(|| {
            let w: Vec<f64> = [7.0, 32.0, 12.0, 32.0, 7.0].iter().map(|x| x / 90.0).collect();
            (vec![0.0, 0.25, 0.5, 0.75, 1.0], w)
        }),
        (QuadratureRule::TensorGauss, false) => unit_gauss(4),
        (QuadratureRule::TensorGauss, true) => unit_gauss(8),
    }
}

fn tensor_eval(
    f: &mut dyn FnMut(&[f64]) -> Complex,
    lo: &[f64],
    hi: &[f64],
    nodes: &[f64],
    weights: &[f64],
) -> Complex {
    let d = lo.len();
    let k = nodes.len();
    let mut idx = vec![0usize; d];
    let mut point = vec![0.0; d];
    let mut sum = ComplexSum::new();
    let vol: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    loop {
        let mut w = 1.0;
        for (dim, &i) in idx.iter().enumerate() {
            point[dim] = lo[dim] + (hi[dim] - lo[dim]) * nodes[i];
            w *= weights[i];
        }
        sum.add(f(&point) * w);
        // odometer increment
        let mut dim = 0;
        loop {
            if dim == d {
                return sum.value() * vol;
            }
            idx[dim] += 1;
            if idx[dim] < k {
                break;
            }
            idx[dim] = 0;
            dim += 1;
        }
    }
}

struct AdaptiveState<'a> {
    f: &'a mut dyn FnMut(&[f64]) -> Complex,
    rule: QuadratureRule,
    max_depth: u32,
    result: ComplexSum,
    err_accum: NeumaierSum,
}

fn adaptive_recurse(st: &mut AdaptiveState, lo: &[f64], hi: &[f64], tol: f64, depth: u32) {
    let low = tensor_eval(st.f, lo, hi, &unit_rule(st.rule, false).0, &unit_rule(st.rule, false).1);
    let high = tensor_eval(st.f, lo, hi, &unit_rule(st.rule, true).0, &unit_rule(st.rule, true).1);
    let est = (high - low).norm();
    // once the refinement difference sits at the floating-point noise
    // floor of the panel value, splitting further only multiplies cost
    if est <= tol || est <= 5e-14 * high.norm() || depth >= st.max_depth {
        st.result.add(high);
        if depth >= st.max_depth {
            st.err_accum.add(est);
        }
        return;
    }
    let d = lo.len();
    let children = 1usize << d;
    let child_tol = tol / children as f64;
    let mid: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let mut clo = vec![0.0; d];
    let mut chi = vec![0.0; d];
    for mask in 0..children {
        for dim in 0..d {
            if mask >> dim & 1 == 0 {
                clo[dim] = lo[dim];
                chi[dim] = mid[dim];
            } else {
                clo[dim] = mid[dim];
                chi[dim] = hi[dim];
            }
        }
        adaptive_recurse(st, &clo, &chi, child_tol, depth + 1);
    }
}

/// Adaptive integration of a complex-valued function over the box
/// `[lo, hi] ⊂ ℝ^d` (d = 1..3 practical). Returns the value and an estimate
/// of the unresolved error (nonzero only where max_depth truncated
/// subdivision).
pub fn integrate_box(
    f: &mut dyn FnMut(&[f64]) -> Complex,
    lo: &[f64],
    hi: &[f64],
    abs_tol: f64,
    max_depth: u32,
    rule: QuadratureRule,
) -> (Complex, f64) {
    debug_assert_eq!(lo.len(), hi.len());
    if lo.iter().zip(hi).any(|(a, b)| b <= a) {
        return (Complex::new(0.0, 0.0), 0.0);
    }
    let mut st = AdaptiveState {
        f,
        rule,
        max_depth,
        result: ComplexSum::new(),
        err_accum: NeumaierSum::new(),
    };
    adaptive_recurse(&mut st, lo, hi, abs_tol, 0);
    (st.result.value(), st.err_accum.value())
}

/// 1D convenience wrapper around [`integrate_box`].
pub fn integrate_interval(
    f: &mut dyn FnMut(f64) -> Complex,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_depth: u32,
    rule: QuadratureRule,
) -> (Complex, f64) {
    let mut g = |p: &[f64]| f(p[0]);
    integrate_box(&mut g, &[a], &[b], abs_tol, max_depth, rule)
}

/// Least-squares solve of `design · c = rhs` over ℂ via the real block
/// embedding `[[Re, -Im], [Im, Re]]` and an SVD. Returns the coefficients,
/// the condition number of the design, and the root-mean-square residual.
pub fn complex_least_squares(
    design: &[Vec<Complex>],
    rhs: &[Complex],
) -> Result<(Vec<Complex>, f64, f64)> {
    let m = design.len();
    if m == 0 || m != rhs.len() {
        return Err(Error::Domain("least squares needs matching nonempty rows".into()));
    }
    let k = design[0].len();
    if design.iter().any(|row| row.len() != k) || k == 0 {
        return Err(Error::Domain("ragged least-squares design".into()));
    }
    let mut a = nalgebra::DMatrix::<f64>::zeros(2 * m, 2 * k);
    let mut b = nalgebra::DVector::<f64>::zeros(2 * m);
    for (i, row) in design.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            a[(i, j)] = z.re;
            a[(i, j + k)] = -z.im;
            a[(i + m, j)] = z.im;
            a[(i + m, j + k)] = z.re;
        }
        b[i] = rhs[i].re;
        b[i + m] = rhs[i].im;
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let sol = svd
        .solve(&b, smax * 1e-14)
        .map_err(|e| Error::Domain(format!("svd solve failed: {e}")))?;
    let coeffs: Vec<Complex> = (0..k).map(|j| Complex::new(sol[j], sol[j + k])).collect();
    let mut rss = NeumaierSum::new();
    for (i, row) in design.iter().enumerate() {
        let mut pred = ComplexSum::new();
        for (j, z) in row.iter().enumerate() {
            pred.add(z * coeffs[j]);
        }
        rss.add((pred.value() - rhs[i]).norm_sqr());
    }
    let rms = (rss.value() / m as f64).sqrt();
    Ok((coeffs, cond, rms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let mut s = NeumaierSum::new();
        s.add(1.0);
        s.add(1e100);
        s.add(1.0);
        s.add(-1e100);
        assert_eq!(s.value(), 2.0, "naive summation would lose the small terms");
    }

    #[test]
    fn gauss_nodes_integrate_polynomials_exactly() {
        let (n, w) = unit_gauss(4).clone();
        // degree-7 polynomial is exact for 4-point Gauss
        let val: f64 = n.iter().zip(&w).map(|(x, w)| w * x.powi(7)).sum();
        assert!((val - 1.0 / 8.0).abs() < 1e-14, "got {val}");
        let total: f64 = w.iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_box_matches_known_integrals() {
        for rule in [QuadratureRule::AdaptiveSimpson, QuadratureRule::TensorGauss] {
            let mut f = |x: f64| Complex::new((2.0 * x).sin(), x * x);
            let (v, _) = integrate_interval(&mut f, 0.0, 1.5, 1e-12, 24, rule);
            let re = (1.0 - (3.0f64).cos()) / 2.0;
            let im = 1.5f64.powi(3) / 3.0;
            assert!((v - Complex::new(re, im)).norm() < 1e-10, "{rule:?} gave {v}");
        }
        // 2D separable check
        let mut g = |p: &[f64]| Complex::new(p[0] * p[1] * p[1], 0.0);
        let (v, _) = integrate_box(&mut g, &[0.0, 0.0], &[2.0, 1.0], 1e-12, 20, QuadratureRule::TensorGauss);
        assert!((v.re - 2.0 / 3.0).abs() < 1e-11, "got {v}");
    }

    #[test]
    fn adaptive_handles_kinks() {
        // |x - 1/3| has a kink; adaptivity must localize it
        let mut f = |x: f64| Complex::new((x - 1.0 / 3.0).abs(), 0.0);
        let (v, _) = integrate_interval(&mut f, 0.0, 1.0, 1e-10, 30, QuadratureRule::TensorGauss);
        let exact = (1.0f64 / 3.0).powi(2) / 2.0 + (2.0f64 / 3.0).powi(2) / 2.0;
        assert!((v.re - exact).abs() < 1e-8, "got {}", v.re);
    }

    #[test]
    fn least_squares_recovers_complex_coefficients() {
        let c0 = Complex::new(1.5, -0.5);
        let c1 = Complex::new(0.0, 2.0);
        let xs = [0.1, 0.2, 0.4, 0.8, 1.6];
        let design: Vec<Vec<Complex>> = xs
            .iter()
            .map(|&x| vec![Complex::new(1.0, 0.0), Complex::new(x, 0.0)])
            .collect();
        let rhs: Vec<Complex> = xs.iter().map(|&x| c0 + c1 * x).collect();
        let (c, cond, rms) = complex_least_squares(&design, &rhs).unwrap();
        assert!((c[0] - c0).norm() < 1e-12 && (c[1] - c1).norm() < 1e-12);
        assert!(cond < 1e3 && rms < 1e-12, "cond {cond} rms {rms}");
    }
}
