//! Smooth convex functions Φ with analytic derivatives up to order four.

use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::interval::Interval;
use crate::numeric::{normal_pdf, normal_quantile};
use crate::quadrature::GaussLegendre;

/// Family tag of a Φ function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PhiFamily {
    /// `u log u` on (0, ∞).
    P1,
    /// `u²` on ℝ.
    P2,
    /// `u^α` on (0, ∞), α ∈ (1, 2).
    P3 { alpha: f64 },
    /// `-log u` on (0, ∞).
    NegLog,
    /// `-u log(-u)` on (-∞, 0).
    NegXlognegx,
    /// `∫₁² u^p dp = u(u-1)/log u` on (0, ∞).
    PowerMixture,
    /// Minus the Gaussian isoperimetric profile on (0, 1).
    NegGaussIsop,
    Custom { name: String },
}

impl fmt::Display for PhiFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiFamily::P1 => write!(f, "P1"),
            PhiFamily::P2 => write!(f, "P2"),
            PhiFamily::P3 { alpha } => write!(f, "P3({alpha})"),
            PhiFamily::NegLog => write!(f, "NEG_LOG"),
            PhiFamily::NegXlognegx => write!(f, "NEG_XLOGNEGX"),
            PhiFamily::PowerMixture => write!(f, "POWER_MIXTURE"),
            PhiFamily::NegGaussIsop => write!(f, "NEG_GAUSS_ISOP"),
            PhiFamily::Custom { name } => write!(f, "CUSTOM({name})"),
        }
    }
}

/// User-supplied Φ: derivatives of order 0 to 4.
pub trait PhiDerivatives: Send + Sync {
    fn derivative(&self, order: usize, u: f64) -> f64;
}

impl<F> PhiDerivatives for F
where
    F: Fn(usize, f64) -> f64 + Send + Sync,
{
    fn derivative(&self, order: usize, u: f64) -> f64 {
        self(order, u)
    }
}

#[derive(Clone)]
enum Kernel {
    P1,
    P2,
    P3(f64),
    NegLog,
    NegXlognegx,
    PowerMixture,
    NegGaussIsop,
    Custom(Arc<dyn PhiDerivatives>),
}

/// A smooth Φ on an open interval with derivative access up to order four.
#[derive(Clone)]
pub struct PhiFunction {
    family: PhiFamily,
    interval: Interval,
    kernel: Kernel,
    segment: Arc<GaussLegendre>,
}

/// Nodes of the fixed rule used for Taylor remainders along short segments.
const SEGMENT_NODES: usize = 12;

impl fmt::Debug for PhiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhiFunction")
            .field("family", &self.family)
            .field("interval", &self.interval)
            .finish()
    }
}

impl PhiFunction {
    fn make(family: PhiFamily, interval: Interval, kernel: Kernel) -> Self {
        Self { family, interval, kernel, segment: Arc::new(GaussLegendre::new(SEGMENT_NODES)) }
    }

    pub(crate) fn segment_rule(&self) -> &GaussLegendre {
        &self.segment
    }

    pub(crate) fn is_quadratic(&self) -> bool {
        matches!(self.kernel, Kernel::P2)
    }

    pub fn p1() -> Self {
        Self::make(PhiFamily::P1, Interval::POSITIVE, Kernel::P1)
    }

    pub fn p2() -> Self {
        Self::make(PhiFamily::P2, Interval::REAL, Kernel::P2)
    }

    pub fn p3(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(invalid("P3 requires alpha in (1, 2)"));
        }
        Ok(Self::make(PhiFamily::P3 { alpha }, Interval::POSITIVE, Kernel::P3(alpha)))
    }

    pub fn neg_log() -> Self {
        Self::make(PhiFamily::NegLog, Interval::POSITIVE, Kernel::NegLog)
    }

    pub fn neg_xlognegx() -> Self {
        Self::make(PhiFamily::NegXlognegx, Interval::NEGATIVE, Kernel::NegXlognegx)
    }

    pub fn power_mixture() -> Self {
        Self::make(PhiFamily::PowerMixture, Interval::POSITIVE, Kernel::PowerMixture)
    }

    pub fn neg_gauss_isop() -> Self {
        Self::make(PhiFamily::NegGaussIsop, Interval::UNIT, Kernel::NegGaussIsop)
    }

    pub fn custom(name: impl Into<String>, interval: Interval, derivatives: impl PhiDerivatives + 'static) -> Self {
        Self::make(PhiFamily::Custom { name: name.into() }, interval, Kernel::Custom(Arc::new(derivatives)))
    }

    /// The affine function `a u + b` on `interval`.
    pub fn affine(a: f64, b: f64, interval: Interval) -> Self {
        Self::custom("affine", interval, move |k: usize, u: f64| match k {
            0 => a * u + b,
            1 => a,
            _ => 0.0,
        })
    }

    /// `Φ + (a u + b)`, same interval.
    pub fn plus_affine(&self, a: f64, b: f64) -> Self {
        let base = self.clone();
        let name = alloc::format!("{}+affine", self.family);
        Self::custom(name, self.interval, move |k: usize, u: f64| match k {
            0 => base.eval(u) + a * u + b,
            1 => base.d1(u) + a,
            _ => base.derivative(k, u),
        })
    }

    /// Builds a family member from its tag. Custom tags cannot be rebuilt.
    pub fn from_family(family: &PhiFamily) -> Result<Self> {
        Ok(match family {
            PhiFamily::P1 => Self::p1(),
            PhiFamily::P2 => Self::p2(),
            PhiFamily::P3 { alpha } => Self::p3(*alpha)?,
            PhiFamily::NegLog => Self::neg_log(),
            PhiFamily::NegXlognegx => Self::neg_xlognegx(),
            PhiFamily::PowerMixture => Self::power_mixture(),
            PhiFamily::NegGaussIsop => Self::neg_gauss_isop(),
            PhiFamily::Custom { name } => {
                return Err(invalid(alloc::format!("custom Φ '{name}' needs explicit derivatives")))
            }
        })
    }

    pub fn family(&self) -> &PhiFamily {
        &self.family
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    /// Derivative of the given order (0 to 4) at `u`.
    pub fn derivative(&self, order: usize, u: f64) -> f64 {
        debug_assert!(order <= 4);
        match &self.kernel {
            Kernel::P1 => match order {
                0 => {
                    if u == 0.0 {
                        0.0
                    } else {
                        u * libm::log(u)
                    }
                }
                1 => libm::log(u) + 1.0,
                2 => 1.0 / u,
                3 => -1.0 / (u * u),
                _ => 2.0 / (u * u * u),
            },
            Kernel::P2 => match order {
                0 => u * u,
                1 => 2.0 * u,
                2 => 2.0,
                _ => 0.0,
            },
            Kernel::P3(alpha) => falling(*alpha, order) * libm::pow(u, alpha - order as f64),
            Kernel::NegLog => match order {
                0 => -libm::log(u),
                1 => -1.0 / u,
                2 => 1.0 / (u * u),
                3 => -2.0 / (u * u * u),
                _ => 6.0 / (u * u * u * u),
            },
            Kernel::NegXlognegx => match order {
                0 => -u * libm::log(-u),
                1 => -libm::log(-u) - 1.0,
                2 => -1.0 / u,
                3 => 1.0 / (u * u),
                _ => -2.0 / (u * u * u),
            },
            Kernel::PowerMixture => power_mixture_derivative(order, u),
            Kernel::NegGaussIsop => {
                let x = normal_quantile(u);
                let phi = normal_pdf(x);
                match order {
                    0 => -phi,
                    1 => x,
                    2 => 1.0 / phi,
                    3 => x / (phi * phi),
                    _ => (1.0 + 2.0 * x * x) / (phi * phi * phi),
                }
            }
            Kernel::Custom(d) => d.derivative(order, u),
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.derivative(0, u)
    }
    pub fn d1(&self, u: f64) -> f64 {
        self.derivative(1, u)
    }
    pub fn d2(&self, u: f64) -> f64 {
        self.derivative(2, u)
    }
    pub fn d3(&self, u: f64) -> f64 {
        self.derivative(3, u)
    }
    pub fn d4(&self, u: f64) -> f64 {
        self.derivative(4, u)
    }

    /// `(Φ⁗Φ″ - 2Φ‴²)/Φ″³`, the second derivative of `-1/Φ″`.
    pub fn neg_inverse_curvature(&self, u: f64) -> f64 {
        let d2 = self.d2(u);
        let d3 = self.d3(u);
        let d4 = self.d4(u);
        (d4 * d2 - 2.0 * d3 * d3) / (d2 * d2 * d2)
    }
}

// Coefficients of (1+r)(r)…(r-k+2), the falling factorial (p)_k at p = 1 + r,
// in powers of r.
const MIXTURE_POLY: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 1.0, 0.0, 0.0],
    [0.0, -1.0, 0.0, 1.0, 0.0],
    [0.0, 2.0, -1.0, -2.0, 1.0],
];

/// `∫₁² (p)_k u^{p-k} dp = u^{1-k} Σ_j c_kj ∫₀¹ r^j e^{r ln u} dr`.
fn power_mixture_derivative(order: usize, u: f64) -> f64 {
    let moments = exp_moments(libm::log(u), order + 1);
    let sum: f64 = MIXTURE_POLY[order].iter().zip(&moments).map(|(c, m)| c * m).sum();
    if order == 1 {
        sum
    } else {
        libm::pow(u, 1.0 - order as f64) * sum
    }
}

/// `J_j(L) = ∫₀¹ r^j e^{rL} dr` for `j < count`: a power series near zero,
/// otherwise the recursion `J_j = (e^L - j J_{j-1}) / L`, whose
/// amplification `j/|L|` stays below two.
fn exp_moments(l: f64, count: usize) -> [f64; 5] {
    let mut out = [0.0; 5];
    if l.abs() < 2.0 {
        // Σ_m L^m / (m! (j+m+1)); the m-th term shrinks like 2^m/m!.
        let mut term = 1.0;
        for m in 0..40 {
            for (j, slot) in out.iter_mut().enumerate().take(count) {
                *slot += term / (j + m + 1) as f64;
            }
            term *= l / (m + 1) as f64;
            if term.abs() < 1e-19 {
                break;
            }
        }
    } else {
        let e = libm::exp(l);
        out[0] = libm::expm1(l) / l;
        for j in 1..count {
            out[j] = (e - j as f64 * out[j - 1]) / l;
        }
    }
    out
}

/// Falling factorial `a (a-1) ... (a-k+1)`.
fn falling(a: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (a - j as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use approx::assert_relative_eq;

    fn corpus() -> alloc::vec::Vec<PhiFunction> {
        alloc::vec![
            PhiFunction::p1(),
            PhiFunction::p2(),
            PhiFunction::p3(1.5).unwrap(),
            PhiFunction::neg_log(),
            PhiFunction::neg_xlognegx(),
            PhiFunction::power_mixture(),
            PhiFunction::neg_gauss_isop(),
        ]
    }

    #[test]
    fn derivatives_match_central_differences() {
        let mut rng = stream(11, 0);
        for phi in corpus() {
            let iv = phi.interval();
            for _ in 0..64 {
                let u = iv.probe(&mut rng);
                let h = 1e-5 * u.abs().max(1e-2).min(iv.distance_to_boundary(u));
                for k in 0..4 {
                    let fd = (phi.derivative(k, u + h) - phi.derivative(k, u - h)) / (2.0 * h);
                    let exact = phi.derivative(k + 1, u);
                    let scale = exact.abs().max(phi.derivative(k, u).abs() / u.abs().max(1.0)).max(1e-8);
                    assert!(
                        (fd - exact).abs() <= 1e-6 * scale,
                        "{} order {k} at {u}: fd {fd} vs {exact}",
                        phi.family()
                    );
                }
            }
        }
    }

    #[test]
    fn closed_forms() {
        assert_relative_eq!(PhiFunction::p1().eval(2.0), 2.0 * libm::log(2.0));
        assert_eq!(PhiFunction::p2().eval(-3.0), 9.0);
        assert_relative_eq!(PhiFunction::p3(1.5).unwrap().eval(4.0), 8.0, epsilon = 1e-14);
        let mix = PhiFunction::power_mixture();
        for &u in &[0.05, 0.5, 0.999, 1.001, 3.0, 40.0] {
            let closed = u * (u - 1.0) / libm::log(u);
            assert_relative_eq!(mix.eval(u), closed, max_relative = 1e-13);
        }
        // Isoperimetric profile: I·I'' = -1 and Φ = -I.
        let iso = PhiFunction::neg_gauss_isop();
        for &u in &[1e-6, 0.1, 0.5, 0.8, 1.0 - 1e-6] {
            assert_relative_eq!(iso.eval(u) * iso.d2(u), -1.0, max_relative = 1e-12);
            // -1/Φ″ = Φ, so its second derivative is Φ″.
            assert_relative_eq!(iso.neg_inverse_curvature(u), iso.d2(u), max_relative = 1e-10);
        }
    }

    #[test]
    fn power_mixture_matches_its_defining_integral() {
        let rule = GaussLegendre::new(40);
        let mix = PhiFunction::power_mixture();
        for &u in &[1e-3, 0.05, 0.13, 0.5, 0.999, 1.0, 1.001, 2.5, 7.3, 7.4, 40.0, 900.0] {
            for k in 0..5 {
                let direct = rule.integrate(|p| falling(p, k) * libm::pow(u, p - k as f64), 1.0, 2.0);
                assert_relative_eq!(mix.derivative(k, u), direct, max_relative = 1e-12, epsilon = 1e-300);
            }
        }
    }

    #[test]
    fn affine_perturbation_keeps_higher_derivatives() {
        let base = PhiFunction::p1();
        let shifted = base.plus_affine(3.0, -1.0);
        assert_relative_eq!(shifted.eval(2.0), base.eval(2.0) + 5.0);
        assert_relative_eq!(shifted.d1(2.0), base.d1(2.0) + 3.0);
        assert_eq!(shifted.d2(2.0), base.d2(2.0));
        let aff = PhiFunction::affine(1.0, 2.0, Interval::REAL);
        assert_eq!(aff.d2(5.0), 0.0);
    }

    #[test]
    fn p3_rejects_bad_exponent() {
        assert!(PhiFunction::p3(2.0).is_err());
        assert!(PhiFunction::p3(0.5).is_err());
    }
}
