//! Gaussian limits: Gauss-Hermite expectations, Gaussian Φ-entropy, the
//! Poisson-to-Gaussian and queue-to-Ornstein-Uhlenbeck scalings, and the
//! constants `K(t)`, `K*(t)` and `θ(t)`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::GridFunction;
use crate::measure::DiscreteMeasure;
use crate::phi::PhiFunction;
use crate::quadrature::GaussHermite;
use crate::queue::{local_sides, mehler_law, LocalVariant, QueueParams};
use crate::transform::{a_unchecked, c_unchecked};

/// Nodes of the Gauss-Hermite rule behind every [`GaussianMeasure`].
pub const HERMITE_NODES: usize = 128;

/// A smooth test function with its derivative.
pub trait Smooth {
    fn value(&self, y: f64) -> f64;
    fn derivative(&self, y: f64) -> f64;
}

impl<F: Fn(f64) -> f64, D: Fn(f64) -> f64> Smooth for (F, D) {
    fn value(&self, y: f64) -> f64 {
        (self.0)(y)
    }
    fn derivative(&self, y: f64) -> f64 {
        (self.1)(y)
    }
}

/// Named smooth functions for configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TestFunction {
    /// `a + b y`.
    Linear { a: f64, b: f64 },
    /// `c + s tanh(y)`.
    Tanh { c: f64, s: f64 },
    /// `c e^{k y}`.
    Exp { c: f64, k: f64 },
}

impl Smooth for TestFunction {
    fn value(&self, y: f64) -> f64 {
        match *self {
            Self::Linear { a, b } => a + b * y,
            Self::Tanh { c, s } => c + s * libm::tanh(y),
            Self::Exp { c, k } => c * libm::exp(k * y),
        }
    }
    fn derivative(&self, y: f64) -> f64 {
        match *self {
            Self::Linear { b, .. } => b,
            Self::Tanh { s, .. } => {
                let c = libm::cosh(y);
                s / (c * c)
            }
            Self::Exp { c, k } => c * k * libm::exp(k * y),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMeasure {
    pub mean: f64,
    pub variance: f64,
    rule: GaussHermite,
}

impl GaussianMeasure {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite() && mean.is_finite()) {
            return Err(invalid("a Gaussian needs a finite mean and a finite positive variance"));
        }
        Ok(Self { mean, variance, rule: GaussHermite::new(HERMITE_NODES) })
    }

    pub fn sd(&self) -> f64 {
        libm::sqrt(self.variance)
    }

    /// Quadrature nodes on the measure's own scale.
    pub fn nodes(&self) -> Vec<f64> {
        let sd = self.sd();
        self.rule.nodes.iter().map(|x| self.mean + sd * x).collect()
    }

    pub fn weights(&self) -> &[f64] {
        &self.rule.weights
    }

    pub fn expect(&self, f: impl FnMut(f64) -> f64) -> f64 {
        self.rule.expect(f, self.mean, self.sd())
    }

    /// `[∫1 - 1, ∫(y - m), ∫(y - m)² - σ²]`.
    pub fn moment_defects(&self) -> [f64; 3] {
        let m = self.mean;
        [self.expect(|_| 1.0) - 1.0, self.expect(|y| y - m), self.expect(|y| (y - m) * (y - m)) - self.variance]
    }
}

/// `⟨Φ(g)⟩ - Φ(⟨g⟩)`, as `⟨A(m, g - m)⟩`.
pub fn gaussian_phi_entropy(gm: &GaussianMeasure, phi: &PhiFunction, g: &impl Smooth) -> Result<f64> {
    let iv = phi.interval();
    for y in gm.nodes() {
        iv.check(g.value(y))?;
    }
    let m = iv.check(gm.expect(|y| g.value(y)))?;
    Ok(gm.expect(|y| a_unchecked(phi, m, g.value(y) - m)))
}

/// `⟨C(g, g')⟩ = ⟨Φ''(g) g'²⟩`.
pub fn gaussian_energy(gm: &GaussianMeasure, phi: &PhiFunction, g: &impl Smooth) -> Result<f64> {
    let iv = phi.interval();
    for y in gm.nodes() {
        iv.check(g.value(y))?;
    }
    Ok(gm.expect(|y| c_unchecked(phi, g.value(y), g.derivative(y))))
}

/// Both sides of the Gaussian Φ-Sobolev inequality with constant ρ on `𝒩(0, ρ)`.
pub fn gaussian_sobolev_sides(phi: &PhiFunction, rho: f64, g: &impl Smooth) -> Result<(f64, f64)> {
    let gm = GaussianMeasure::new(0.0, rho)?;
    Ok((gaussian_phi_entropy(&gm, phi, g)?, 0.5 * rho * gaussian_energy(&gm, phi, g)?))
}

/// `κ_N(n) = (n - ρN) / √N`.
pub fn kappa(n_scale: u64, rho: f64, n: usize) -> f64 {
    let nn = n_scale as f64;
    (n as f64 - rho * nn) / libm::sqrt(nn)
}

/// `f_N = g ∘ κ_N` on `0..len`.
pub fn scaled_function(phi: &PhiFunction, g: &impl Smooth, n_scale: u64, rho: f64, len: usize) -> Result<GridFunction> {
    GridFunction::from_fn(len, phi.interval(), |n| g.value(kappa(n_scale, rho, n)))
}

fn relative_gap(x: f64, target: f64) -> f64 {
    (x - target).abs() / target.abs().max(1e-300)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub n_grid: Vec<u64>,
    pub lhs_sequence: Vec<f64>,
    pub rhs_sequence: Vec<f64>,
    pub lhs_target: f64,
    pub rhs_target: f64,
    pub lhs_gap: Vec<f64>,
    pub rhs_gap: Vec<f64>,
}

/// `Ent_{𝒫(Nρ)}[g ∘ κ_N]` and `Nρ⟨𝒫(Nρ), A(f_N, Df_N)⟩` along `n_grid`, with
/// targets `Ent_{𝒩(0,ρ)}[g]` and `½ρ⟨𝒩(0,ρ), C(g, g')⟩`.
pub fn poisson_to_gauss(phi: &PhiFunction, rho: f64, g: &impl Smooth, n_grid: &[u64]) -> Result<ScalingReport> {
    if !(rho > 0.0) {
        return Err(invalid("the Poisson mean must be positive"));
    }
    let (lhs_target, rhs_target) = gaussian_sobolev_sides(phi, rho, g)?;
    let mut lhs_sequence = Vec::new();
    let mut rhs_sequence = Vec::new();
    for &n in n_grid {
        if n == 0 {
            return Err(invalid("scales must be positive"));
        }
        let q = DiscreteMeasure::poisson(rho * n as f64)?;
        let f = scaled_function(phi, g, n, rho, q.len() + 1)?;
        lhs_sequence.push(q.phi_entropy(phi, &f)?);
        let energy = q.expect_with(|k| {
            let x = f.at(k as i64);
            a_unchecked(phi, x, f.at(k as i64 + 1) - x)
        });
        rhs_sequence.push(rho * n as f64 * energy / q.captured_mass());
    }
    Ok(ScalingReport {
        n_grid: n_grid.to_vec(),
        lhs_gap: lhs_sequence.iter().map(|&x| relative_gap(x, lhs_target)).collect(),
        rhs_gap: rhs_sequence.iter().map(|&x| relative_gap(x, rhs_target)).collect(),
        lhs_sequence,
        rhs_sequence,
        lhs_target,
        rhs_target,
    })
}

/// `K(t) = ½ρq(1 + 2p)`.
pub fn k_constant(params: &QueueParams, t: f64) -> Result<f64> {
    Ok(0.5 * params.finite_rho()? * params.q(t) * (1.0 + 2.0 * params.p(t)))
}

/// `K*(t) = ½ρq(1 + p)`.
pub fn k_star_constant(params: &QueueParams, t: f64) -> Result<f64> {
    Ok(0.5 * params.finite_rho()? * params.q(t) * (1.0 + params.p(t)))
}

/// `θ(t) = K/K* = 1 + 1/(1 + 1/p)`, written as `1 + p/(1 + p)`.
pub fn theta(params: &QueueParams, t: f64) -> f64 {
    let p = params.p(t);
    1.0 + p / (1.0 + p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaPoint {
    pub t: f64,
    pub k: f64,
    pub k_star: f64,
    pub theta: f64,
}

pub fn theta_curve(params: &QueueParams, t_grid: &[f64]) -> Result<Vec<ThetaPoint>> {
    t_grid
        .iter()
        .map(|&t| {
            if !(t >= 0.0) {
                return Err(invalid("times must be non-negative"));
            }
            Ok(ThetaPoint { t, k: k_constant(params, t)?, k_star: k_star_constant(params, t)?, theta: theta(params, t) })
        })
        .collect()
}

/// The OU transition law `𝒩(y p(t), ρ(1 - p(t)²))`.
pub fn ou_transition(params: &QueueParams, y: f64, t: f64) -> Result<GaussianMeasure> {
    let rho = params.finite_rho()?;
    GaussianMeasure::new(y * params.p(t), -libm::expm1(-2.0 * params.mu * t) * rho)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuLocalReport {
    pub t: f64,
    pub y: f64,
    pub n_grid: Vec<u64>,
    /// `Ent_{ℒ(X_t^N | X_0 = z_N)}[f_N]`.
    pub lhs_sequence: Vec<f64>,
    /// Right side of the Mehler-transported local bound.
    pub mehler_rhs: Vec<f64>,
    /// Right side of the interpolated local bound.
    pub interpolated_rhs: Vec<f64>,
    /// Gaussian limit of the left side.
    pub lhs_target: f64,
    /// `⟨𝒩(yp, ρ(1-p²)), C(g, g')⟩`.
    pub energy: f64,
    pub k: f64,
    pub k_star: f64,
    pub theta: f64,
    /// `mehler_rhs / energy`, to be compared with `K(t)`.
    pub mehler_constant: Vec<f64>,
    /// `interpolated_rhs / energy`, to be compared with `K*(t)`.
    pub interpolated_constant: Vec<f64>,
    pub mehler_gap_to_k: Vec<f64>,
    pub interpolated_gap_to_k_star: Vec<f64>,
    /// `|mehler_constant / interpolated_constant - θ| / θ`.
    pub ratio_gap_to_theta: Vec<f64>,
    pub lhs_gap: Vec<f64>,
}

/// Local inequalities of the scaled queue started at `⌊Nρ + √N y⌋`, read
/// through `f_N = g ∘ κ_N`, against their Ornstein-Uhlenbeck limits.
pub fn ou_local_check(
    phi: &PhiFunction,
    params: &QueueParams,
    y: f64,
    t: f64,
    g: &impl Smooth,
    n_grid: &[u64],
) -> Result<OuLocalReport> {
    let rho = params.finite_rho()?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid("the local check needs a finite positive time"));
    }
    let gm = ou_transition(params, y, t)?;
    let lhs_target = gaussian_phi_entropy(&gm, phi, g)?;
    let energy = gaussian_energy(&gm, phi, g)?;
    let (k, k_star, th) = (k_constant(params, t)?, k_star_constant(params, t)?, theta(params, t));
    let mut r = OuLocalReport {
        t,
        y,
        n_grid: n_grid.to_vec(),
        lhs_sequence: Vec::new(),
        mehler_rhs: Vec::new(),
        interpolated_rhs: Vec::new(),
        lhs_target,
        energy,
        k,
        k_star,
        theta: th,
        mehler_constant: Vec::new(),
        interpolated_constant: Vec::new(),
        mehler_gap_to_k: Vec::new(),
        interpolated_gap_to_k_star: Vec::new(),
        ratio_gap_to_theta: Vec::new(),
        lhs_gap: Vec::new(),
    };
    for &n in n_grid {
        if n == 0 {
            return Err(invalid("scales must be positive"));
        }
        let nn = n as f64;
        let scaled = QueueParams::new(nn * params.lambda, params.mu)?;
        let start = libm::floor(nn * rho + libm::sqrt(nn) * y);
        if start < 0.0 {
            return Err(invalid("⌊Nρ + √N y⌋ is negative"));
        }
        let z = start as usize;
        let len = mehler_law(&scaled, t, z)?.len() + 1;
        let f = scaled_function(phi, g, n, rho, len)?;
        let (lhs, mehler) = local_sides(LocalVariant::MmiLoc, &scaled, phi, &f, t, z)?;
        let (_, interp) = local_sides(LocalVariant::MmiLocNew, &scaled, phi, &f, t, z)?;
        let (cm, ci) = (mehler / energy, interp / energy);
        r.lhs_sequence.push(lhs);
        r.mehler_rhs.push(mehler);
        r.interpolated_rhs.push(interp);
        r.mehler_constant.push(cm);
        r.interpolated_constant.push(ci);
        r.mehler_gap_to_k.push(relative_gap(cm, k));
        r.interpolated_gap_to_k_star.push(relative_gap(ci, k_star));
        r.ratio_gap_to_theta.push(relative_gap(cm / ci, th));
        r.lhs_gap.push(relative_gap(lhs, lhs_target));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn moments_are_exact() {
        let gm = GaussianMeasure::new(0.7, 2.5).unwrap();
        for d in gm.moment_defects() {
            assert!(d.abs() < 1e-12, "{d}");
        }
    }

    #[test]
    fn gaussian_entropy_basics() {
        let gm = GaussianMeasure::new(0.0, 2.0).unwrap();
        let c = TestFunction::Linear { a: 3.0, b: 0.0 };
        assert_eq!(gaussian_phi_entropy(&gm, &PhiFunction::p1(), &c).unwrap(), 0.0);
        let id = TestFunction::Linear { a: 0.0, b: 1.0 };
        assert_relative_eq!(gaussian_phi_entropy(&gm, &PhiFunction::p2(), &id).unwrap(), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn theta_values() {
        let q = QueueParams::new(2.0, 1.0).unwrap();
        assert_eq!(theta(&q, 0.0), 1.5);
        assert_relative_eq!(theta(&q, core::f64::consts::LN_2), 4.0 / 3.0, max_relative = 1e-15);
        assert!((theta(&q, 40.0) - 1.0).abs() < 1e-12);
        let curve = theta_curve(&q, &[0.0, 0.5, 1.0, 2.0, 5.0]).unwrap();
        assert!(curve.windows(2).all(|w| w[1].theta <= w[0].theta));
        assert!(curve.iter().all(|c| c.k >= c.k_star));
    }

    #[test]
    fn quadratic_linear_ou_equality() {
        let q = QueueParams::new(2.0, 1.0).unwrap();
        let g = TestFunction::Linear { a: 0.0, b: 1.0 };
        let r = ou_local_check(&PhiFunction::p2(), &q, 0.5, 0.8, &g, &[50]).unwrap();
        assert_relative_eq!(r.lhs_target, r.k_star * r.energy, max_relative = 1e-12);
    }
}
