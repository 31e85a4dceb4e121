//! The A, B and C transforms of Φ and the maps τ and σ_p on transform points.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::phi::PhiFunction;

/// A point `(u, v)`; the transforms need `u` and `u + v` inside Φ's interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformPoint {
    pub u: f64,
    pub v: f64,
}

impl TransformPoint {
    pub fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    /// The point with endpoints `(a, b)`, i.e. `(a, b - a)`.
    pub fn from_ends(a: f64, b: f64) -> Self {
        Self { u: a, v: b - a }
    }

    pub fn end(&self) -> f64 {
        self.u + self.v
    }

    /// `τ(u, v) = (u + v, -v)`: swaps the two endpoints.
    pub fn tau(&self) -> Self {
        Self { u: self.u + self.v, v: -self.v }
    }

    /// `σ_p(u, v) = (u, p v)`.
    pub fn sigma(&self, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid("sigma requires p in [0, 1]"));
        }
        Ok(Self { u: self.u, v: p * self.v })
    }

    /// Checks that both endpoints lie in Φ's interval.
    pub fn validate(&self, phi: &PhiFunction) -> Result<()> {
        let iv = phi.interval();
        iv.check(self.u)?;
        iv.check(self.end())?;
        Ok(())
    }
}

// Segments shorter than half the distance to the boundary are integrated
// along the segment instead of differenced.
fn is_short(phi: &PhiFunction, u: f64, v: f64) -> bool {
    let d = phi.interval().distance_to_boundary(u);
    let reach = if d.is_finite() { 0.5 * d } else { 0.5 * u.abs().max(1.0) };
    v.abs() <= reach
}

/// `Φ⁽ᵏ⁾(u+v) - Φ⁽ᵏ⁾(u) - Φ⁽ᵏ⁺¹⁾(u) v`, for `k ≤ 2`.
pub fn taylor_remainder(phi: &PhiFunction, k: usize, u: f64, v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    if is_short(phi, u, v) {
        let rule = phi.segment_rule();
        v * v * rule.integrate(|s| (1.0 - s) * phi.derivative(k + 2, u + s * v), 0.0, 1.0)
    } else {
        phi.derivative(k, u + v) - phi.derivative(k, u) - phi.derivative(k + 1, u) * v
    }
}

/// `Φ⁽ᵏ⁾(u+v) - Φ⁽ᵏ⁾(u)`, for `k ≤ 3`.
pub fn increment(phi: &PhiFunction, k: usize, u: f64, v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    if is_short(phi, u, v) {
        let rule = phi.segment_rule();
        v * rule.integrate(|s| phi.derivative(k + 1, u + s * v), 0.0, 1.0)
    } else {
        phi.derivative(k, u + v) - phi.derivative(k, u)
    }
}

/// `A(u, v) = Φ(u+v) - Φ(u) - Φ'(u) v`.
pub fn transform_a(phi: &PhiFunction, pt: TransformPoint) -> Result<f64> {
    pt.validate(phi)?;
    Ok(a_unchecked(phi, pt.u, pt.v))
}

/// `B(u, v) = (Φ'(u+v) - Φ'(u)) v`.
pub fn transform_b(phi: &PhiFunction, pt: TransformPoint) -> Result<f64> {
    pt.validate(phi)?;
    Ok(b_unchecked(phi, pt.u, pt.v))
}

/// `C(u, v) = Φ''(u) v²`; only `u` needs to lie in the interval.
pub fn transform_c(phi: &PhiFunction, u: f64, v: f64) -> Result<f64> {
    phi.interval().check(u)?;
    Ok(c_unchecked(phi, u, v))
}

pub(crate) fn a_unchecked(phi: &PhiFunction, u: f64, v: f64) -> f64 {
    if phi.is_quadratic() {
        return v * v;
    }
    taylor_remainder(phi, 0, u, v)
}

pub(crate) fn b_unchecked(phi: &PhiFunction, u: f64, v: f64) -> f64 {
    if phi.is_quadratic() {
        return 2.0 * v * v;
    }
    increment(phi, 1, u, v) * v
}

pub(crate) fn c_unchecked(phi: &PhiFunction, u: f64, v: f64) -> f64 {
    if phi.is_quadratic() {
        return 2.0 * v * v;
    }
    phi.d2(u) * v * v
}
