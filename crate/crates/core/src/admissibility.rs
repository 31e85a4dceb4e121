//! Classification of Φ by the convexity of `-1/Φ''`, cross-checked against
//! the Hessian of the A transform and of the two-point entropy map.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::phi::PhiFunction;
use crate::rng::{stream, uniform, uniform_in};
use crate::transform::{increment, taylor_remainder};
use crate::transform_check::{sample_point, Samples};

/// Relative tolerance for convexity verdicts.
pub const CONVEXITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// `Φ'' ≤ 0` at the witness.
    NonPositiveCurvature,
    /// `(-1/Φ'')'' < 0` at the witness.
    InverseCurvatureNotConvex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RejectionWitness {
    pub condition: Condition,
    pub u: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    Admissible,
    Affine,
    Rejected(RejectionWitness),
}

impl Classification {
    /// Admissible or affine, the two branches under which the equivalent
    /// convexity statements hold.
    pub fn accepts(&self) -> bool {
        !matches!(self, Classification::Rejected(_))
    }
}

/// A 2×2 symmetric matrix found not to be positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HessianWitness {
    /// Where the Hessian was evaluated: `(u, v)` for the transform, `(a, b, t)`
    /// for the two-point map (third entry 0 for the transform).
    pub point: [f64; 3],
    pub hessian: [f64; 3],
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub classification: Classification,
    pub transform_hessian_convex: bool,
    pub two_point_convex: bool,
    pub transform_witness: Option<HessianWitness>,
    pub two_point_witness: Option<HessianWitness>,
    /// All three verdicts agree.
    pub consistent: bool,
    pub probes: usize,
    pub seed: u64,
}

/// `[xx, xy, yy]` is positive semidefinite up to the relative tolerance.
fn psd(h: [f64; 3]) -> bool {
    let [a, b, c] = h;
    let diag = a.abs().max(c.abs());
    let det_scale = (a * c).abs() + b * b;
    a >= -CONVEXITY_TOL * diag && c >= -CONVEXITY_TOL * diag && a * c - b * b >= -CONVEXITY_TOL * det_scale
}

fn min_eigenvalue(h: [f64; 3]) -> f64 {
    let [a, b, c] = h;
    let mean = 0.5 * (a + c);
    let r = libm::hypot(0.5 * (a - c), b);
    mean - r
}

fn min_eigenvector(h: [f64; 3]) -> [f64; 2] {
    let [a, b, c] = h;
    let lam = min_eigenvalue(h);
    // Pick the better conditioned of the two row equations.
    let (x, y) = if (a - lam).abs() >= (c - lam).abs() { (-b, a - lam) } else { (c - lam, -b) };
    let n = libm::hypot(x, y);
    if n == 0.0 {
        [1.0, 0.0]
    } else {
        [x / n, y / n]
    }
}

/// Hessian of `(u, v) ↦ A(u, v)`, as `[∂uu, ∂uv, ∂vv]`.
pub fn transform_hessian(phi: &PhiFunction, u: f64, v: f64) -> [f64; 3] {
    let uv = increment(phi, 2, u, v);
    [taylor_remainder(phi, 2, u, v), uv, phi.d2(u + v)]
}

/// Hessian of `(a, b) ↦ tΦ(a) + (1-t)Φ(b) - Φ(ta + (1-t)b)`.
pub fn two_point_hessian(phi: &PhiFunction, a: f64, b: f64, t: f64) -> [f64; 3] {
    let s = 1.0 - t;
    let m = t * a + s * b;
    let dm = phi.d2(m);
    [t * phi.d2(a) - t * t * dm, -t * s * dm, s * phi.d2(b) - s * s * dm]
}

/// The two-point entropy map itself.
pub fn two_point_entropy(phi: &PhiFunction, a: f64, b: f64, t: f64) -> f64 {
    t * phi.eval(a) + (1.0 - t) * phi.eval(b) - phi.eval(t * a + (1.0 - t) * b)
}

/// Classifies Φ on seeded probe points.
pub fn admissibility(phi: &PhiFunction, samples: Samples) -> AdmissibilityReport {
    let iv = phi.interval();
    let mut curvature_max: f64 = 0.0;
    let mut rejection: Option<RejectionWitness> = None;
    let mut points = Vec::with_capacity(samples.count);
    for i in 0..samples.count {
        let mut rng = stream(samples.seed, i as u64);
        let u = iv.probe(&mut rng);
        points.push(u);
        let d2 = phi.d2(u);
        curvature_max = curvature_max.max(d2.abs());
        if rejection.is_some() {
            continue;
        }
        if d2.is_nan() || d2 <= 0.0 {
            if d2 != 0.0 {
                rejection = Some(RejectionWitness { condition: Condition::NonPositiveCurvature, u, value: d2 });
            }
            continue;
        }
        let d3 = phi.d3(u);
        let d4 = phi.d4(u);
        let scale = ((d4 * d2).abs() + 2.0 * d3 * d3) / (d2 * d2 * d2);
        let value = phi.neg_inverse_curvature(u);
        if value < -CONVEXITY_TOL * scale {
            rejection = Some(RejectionWitness { condition: Condition::InverseCurvatureNotConvex, u, value });
        }
    }
    let classification = match rejection {
        Some(w) => Classification::Rejected(w),
        None if curvature_max == 0.0 => Classification::Affine,
        None => {
            // Mixed zero and positive curvature is neither affine nor strictly convex.
            match points.iter().find(|&&u| phi.d2(u) == 0.0) {
                Some(&u) => Classification::Rejected(RejectionWitness {
                    condition: Condition::NonPositiveCurvature,
                    u,
                    value: 0.0,
                }),
                None => Classification::Admissible,
            }
        }
    };

    let mut transform_witness = None;
    let mut two_point_witness = None;
    for i in 0..samples.count {
        let mut rng = stream(samples.seed ^ 0x5a5a_5a5a, i as u64);
        if transform_witness.is_none() {
            let pt = sample_point(phi, &mut rng);
            let h = transform_hessian(phi, pt.u, pt.v);
            if !psd(h) {
                transform_witness =
                    Some(HessianWitness { point: [pt.u, pt.v, 0.0], hessian: h, min_eigenvalue: min_eigenvalue(h) });
            }
        }
        if two_point_witness.is_none() {
            let a = iv.probe(&mut rng);
            let b = iv.probe(&mut rng);
            let t = uniform_in(&mut rng, 0.05, 0.95);
            let h = two_point_hessian(phi, a, b, t);
            if !psd(h) {
                two_point_witness = Some(HessianWitness { point: [a, b, t], hessian: h, min_eigenvalue: min_eigenvalue(h) });
            }
        }
    }
    let transform_hessian_convex = transform_witness.is_none();
    let two_point_convex = two_point_witness.is_none();
    let accepts = classification.accepts();
    AdmissibilityReport {
        classification,
        transform_hessian_convex,
        two_point_convex,
        transform_witness,
        two_point_witness,
        consistent: accepts == transform_hessian_convex && accepts == two_point_convex,
        probes: samples.count,
        seed: samples.seed,
    }
}

/// Two pairs `(a, b)` whose midpoint breaks convexity of the two-point entropy
/// map at weight `t`: `gap = F(mid) - (F(first) + F(second))/2 > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPointViolation {
    pub t: f64,
    pub first: [f64; 2],
    pub second: [f64; 2],
    pub gap: f64,
}

/// Seeded search for a direct (derivative-free) convexity violation of the
/// two-point entropy map. Candidates come from indefinite Hessians; the step
/// along the negative-curvature direction is halved until the midpoint test
/// fails decisively.
pub fn find_two_point_violation(phi: &PhiFunction, samples: Samples) -> Option<TwoPointViolation> {
    let iv = phi.interval();
    for i in 0..samples.count {
        let mut rng = stream(samples.seed, i as u64);
        let a = iv.probe(&mut rng);
        let b = iv.probe(&mut rng);
        let t = 0.05 + 0.9 * uniform(&mut rng);
        let h = two_point_hessian(phi, a, b, t);
        if min_eigenvalue(h) >= 0.0 {
            continue;
        }
        let d = min_eigenvector(h);
        let room = iv.distance_to_boundary(a).min(iv.distance_to_boundary(b));
        let mut step = if room.is_finite() { 0.5 * room } else { 0.5 * a.abs().max(b.abs()).max(1.0) };
        for _ in 0..60 {
            let p = [a + step * d[0], b + step * d[1]];
            let q = [a - step * d[0], b - step * d[1]];
            if p.iter().chain(q.iter()).all(|&x| iv.contains(x)) {
                let mid = two_point_entropy(phi, a, b, t);
                let f1 = two_point_entropy(phi, p[0], p[1], t);
                let f2 = two_point_entropy(phi, q[0], q[1], t);
                let gap = mid - 0.5 * (f1 + f2);
                let scale = mid.abs().max(f1.abs()).max(f2.abs()).max(1e-300);
                if gap > 1e-10 * scale {
                    return Some(TwoPointViolation { t, first: p, second: q, gap });
                }
            }
            step *= 0.5;
        }
    }
    None
}
