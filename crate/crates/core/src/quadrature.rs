//! Gauss-Legendre and Gauss-Hermite rules, and an adaptive Gauss-Legendre
//! integrator.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::tridiag::SymTridiagonal;

/// Fixed Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        let mut s = crate::numeric::NeumaierSum::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s.add(w * f(c + h * x));
        }
        h * s.value()
    }
}

// Legendre polynomial P_n and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-12, max_depth: 20 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

const PANEL_NODES: usize = 15;

/// Adaptive bisection on 15-point Gauss-Legendre panels: a panel is accepted
/// when it agrees with the sum of its two halves.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: AdaptiveOptions) -> QuadResult {
    let rule = GaussLegendre::new(PANEL_NODES);
    let mut evaluations = PANEL_NODES;
    if a == b {
        return QuadResult { value: 0.0, error: 0.0, converged: true, evaluations: 0 };
    }
    let whole = rule.integrate(&mut f, a, b);
    let mut stack: Vec<(f64, f64, f64, u32)> = alloc::vec![(a, b, whole, 0)];
    let mut total = crate::numeric::NeumaierSum::new();
    let mut error = 0.0;
    let mut converged = true;
    let width = (b - a).abs();
    while let Some((lo, hi, est, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(&mut f, lo, mid);
        let right = rule.integrate(&mut f, mid, hi);
        evaluations += 2 * PANEL_NODES;
        let refined = left + right;
        let err = (refined - est).abs();
        let tol = opts.abs_tol.max(opts.rel_tol * whole.abs()) * (hi - lo).abs() / width;
        if err <= tol || !err.is_finite() || depth >= opts.max_depth {
            if depth >= opts.max_depth && err > tol {
                converged = false;
            }
            if !err.is_finite() {
                converged = false;
            }
            total.add(refined);
            error += err;
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    QuadResult { value: total.value(), error, converged, evaluations }
}

/// Gauss-Hermite rule for the standard normal law (probabilists' weight),
/// built by Golub-Welsch: Jacobi eigenvalues, Newton polish, Christoffel
/// weights. Weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let off: Vec<f64> = (1..n).map(|k| libm::sqrt(k as f64)).collect();
        let jacobi = SymTridiagonal::new(alloc::vec![0.0; n], off).expect("shape");
        let mut nodes = jacobi.eigenvalues();
        let mut weights = Vec::with_capacity(n);
        for x in nodes.iter_mut() {
            for _ in 0..3 {
                let (pn, pn1, _) = orthonormal_hermite(n, *x);
                let d = libm::sqrt(n as f64) * pn1;
                if d == 0.0 {
                    break;
                }
                *x -= pn / d;
            }
            let (_, _, sq) = orthonormal_hermite(n, *x);
            weights.push(1.0 / sq);
        }
        let s: f64 = crate::numeric::neumaier(weights.iter().copied());
        for w in weights.iter_mut() {
            *w /= s;
        }
        Self { nodes, weights }
    }

    /// `E[f(mean + sd Z)]` for standard normal `Z`.
    pub fn expect<F: FnMut(f64) -> f64>(&self, mut f: F, mean: f64, sd: f64) -> f64 {
        crate::numeric::neumaier(self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(mean + sd * x)))
    }
}

// Returns (p_n(x), p_{n-1}(x), Σ_{k<n} p_k(x)²) for the orthonormal Hermite
// polynomials of the standard normal law.
fn orthonormal_hermite(n: usize, x: f64) -> (f64, f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut sq = 0.0;
    for k in 0..n {
        sq += cur * cur;
        let next = (x * cur - libm::sqrt(k as f64) * prev) / libm::sqrt((k + 1) as f64);
        prev = cur;
        cur = next;
    }
    (cur, prev, sq)
}
