//! The function `U(p) = Ent_{ℬ(1,p)}[f] - pq⟨ℬ(1,p), g⟩` on two points and
//! its endpoint-derivative criterion.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::phi::PhiFunction;
use crate::transform::a_unchecked;

/// Relative band inside which a sign is treated as zero.
pub const U_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPointUReport {
    pub f: [f64; 2],
    pub g: [f64; 2],
    /// `U'(0) = A(a, b - a) - g(0)`.
    pub u_prime_0: f64,
    /// `U'(1) = g(1) - A(b, a - b)`.
    pub u_prime_1: f64,
    /// Largest scaled `U(p)` over the grid.
    pub max_u: f64,
    pub argmax_p: f64,
    pub grid_points: usize,
    /// `U ≤ 0` on the grid, up to the tolerance band.
    pub grid_nonpositive: bool,
    /// `U'(0) ≤ 0 ≤ U'(1)`, up to the tolerance band.
    pub criterion: bool,
    /// One of the endpoint derivatives sits inside the tolerance band.
    pub borderline: bool,
    /// `grid_nonpositive == criterion`, or borderline.
    pub consistent: bool,
}

/// `(U(p), scale)`, with the entropy in Bregman form.
pub fn u_value(phi: &PhiFunction, f: [f64; 2], g: [f64; 2], p: f64) -> (f64, f64) {
    let q = 1.0 - p;
    let [a, b] = f;
    let m = q * a + p * b;
    let ent = q * a_unchecked(phi, m, a - m) + p * a_unchecked(phi, m, b - m);
    let energy = p * q * (q * g[0] + p * g[1]);
    let scale = ent.abs() + p * q * (q * g[0].abs() + p * g[1].abs());
    (ent - energy, scale)
}

pub fn two_point_u(phi: &PhiFunction, f: [f64; 2], g: [f64; 2], grid_points: usize) -> Result<TwoPointUReport> {
    if grid_points < 2 {
        return Err(invalid("the p-grid needs at least two points"));
    }
    let iv = phi.interval();
    iv.check(f[0])?;
    iv.check(f[1])?;
    let [a, b] = f;
    let (fwd, bwd) = (a_unchecked(phi, a, b - a), a_unchecked(phi, b, a - b));
    let u0 = fwd - g[0];
    let u1 = g[1] - bwd;
    let (mut max_u, mut argmax) = (f64::NEG_INFINITY, 0.0);
    let mut grid_ok = true;
    for j in 0..grid_points {
        let p = j as f64 / (grid_points - 1) as f64;
        let (u, scale) = u_value(phi, f, g, p);
        let scaled = u / scale.max(1e-300);
        if scaled > max_u {
            max_u = scaled;
            argmax = p;
        }
        if u > U_TOL * scale {
            grid_ok = false;
        }
    }
    let band0 = U_TOL * (fwd.abs() + g[0].abs());
    let band1 = U_TOL * (bwd.abs() + g[1].abs());
    let criterion = u0 <= band0 && u1 >= -band1;
    let borderline = u0.abs() <= band0 || u1.abs() <= band1;
    Ok(TwoPointUReport {
        f,
        g,
        u_prime_0: u0,
        u_prime_1: u1,
        max_u,
        argmax_p: argmax,
        grid_points,
        grid_nonpositive: grid_ok,
        criterion,
        borderline,
        consistent: grid_ok == criterion || borderline,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_transform_weight_is_critical() {
        let phi = PhiFunction::p1();
        let (a, b) = (0.5, 3.0);
        let g = [a_unchecked(&phi, a, b - a), a_unchecked(&phi, b, a - b)];
        let r = two_point_u(&phi, [a, b], g, 1001).unwrap();
        assert_eq!(r.u_prime_0, 0.0);
        assert!(r.grid_nonpositive && r.criterion && r.consistent);
    }

    #[test]
    fn constant_f() {
        let r = two_point_u(&PhiFunction::p2(), [1.0, 1.0], [2.0, 3.0], 101).unwrap();
        let (u, _) = u_value(&PhiFunction::p2(), [1.0, 1.0], [2.0, 3.0], 0.25);
        assert!((u + 0.25 * 0.75 * (0.75 * 2.0 + 0.25 * 3.0)).abs() < 1e-15);
        assert!(r.grid_nonpositive && r.criterion);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let phi = PhiFunction::p3(1.5).unwrap();
        let (f, g) = ([0.7, 2.2], [0.3, -0.4]);
        let r = two_point_u(&phi, f, g, 11).unwrap();
        let h = 1e-6;
        let d0 = (u_value(&phi, f, g, h).0 - u_value(&phi, f, g, 0.0).0) / h;
        let d1 = (u_value(&phi, f, g, 1.0).0 - u_value(&phi, f, g, 1.0 - h).0) / h;
        assert!((d0 - r.u_prime_0).abs() < 1e-5);
        assert!((d1 - r.u_prime_1).abs() < 1e-5);
    }
}
