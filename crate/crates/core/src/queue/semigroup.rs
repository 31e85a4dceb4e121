//! The Mehler semigroup `P_t f(n) = ⟨ℬ(n, p(t)) * 𝒫(ρq(t)), f⟩` and entropy
//! decay along it.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::QueueParams;
use crate::error::{invalid, Result};
use crate::grid::GridFunction;
use crate::measure::DiscreteMeasure;
use crate::numeric::{neumaier, NeumaierSum};
use crate::phi::PhiFunction;

/// Law of `X_t` given `X_0 = n`.
pub fn mehler_law(params: &QueueParams, t: f64, n: usize) -> Result<DiscreteMeasure> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("time must be finite and non-negative"));
    }
    DiscreteMeasure::binpoi(n as u64, params.p(t), params.rho_q(t))
}

/// `P_t f(n)`.
pub fn semigroup_apply(params: &QueueParams, t: f64, f: &GridFunction, n: usize) -> Result<f64> {
    mehler_law(params, t, n)?.expectation(f)
}

/// `P_t f` on `0..count`. The Poisson part is applied once and shared by all
/// starting states.
pub fn semigroup_values(params: &QueueParams, t: f64, f: &GridFunction, count: usize) -> Result<GridFunction> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("time must be finite and non-negative"));
    }
    if count == 0 {
        return Err(invalid("need at least one state"));
    }
    let poisson = DiscreteMeasure::poisson(params.rho_q(t))?;
    let need = count - 1 + poisson.max_index();
    if f.start() != 0 || !f.covers(0, need as i64) {
        return Err(crate::Error::Window { index: need as i64, len: f.len() });
    }
    let pw = poisson.weights();
    let smoothed: Vec<f64> = (0..count)
        .map(|j| {
            let mut s = NeumaierSum::new();
            for (i, &w) in pw.iter().enumerate() {
                s.add(w * f.at((j + i) as i64));
            }
            s.value()
        })
        .collect();
    // Binomial rows by Pascal's rule: each row is a convex combination of
    // the previous one, so the recursion is stable.
    let p = params.p(t);
    let q = 1.0 - p;
    let mut row = Vec::with_capacity(count);
    row.push(1.0);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        if k > 0 {
            row.push(0.0);
            for j in (1..=k).rev() {
                row[j] = q * row[j] + p * row[j - 1];
            }
            row[0] *= q;
        }
        out.push(neumaier(row.iter().zip(&smoothed).map(|(w, v)| w * v)));
    }
    Ok(GridFunction::real(out))
}

/// `c = 2` for the quadratic Φ, `1` otherwise.
pub fn decay_constant(phi: &PhiFunction) -> f64 {
    if phi.is_quadratic() {
        2.0
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayPoint {
    pub t: f64,
    /// `Ent_{𝒫(ρ)}[P_t f]`.
    pub value: f64,
    /// `e^{-cμt} Ent_{𝒫(ρ)}[f]`.
    pub bound: f64,
}

/// Entropy of `P_t f` under the invariant Poisson law along `times`.
pub fn entropy_decay_curve(
    params: &QueueParams,
    phi: &PhiFunction,
    f: &GridFunction,
    times: &[f64],
) -> Result<Vec<DecayPoint>> {
    let rho = params.finite_rho()?;
    let q = DiscreteMeasure::poisson(rho)?;
    let codomain = phi.interval();
    let base = f.clone().with_codomain(codomain)?;
    let initial = q.phi_entropy(phi, &base)?;
    let c = decay_constant(phi);
    times
        .iter()
        .map(|&t| {
            let pf = semigroup_values(params, t, f, q.len())?;
            Ok(DecayPoint {
                t,
                value: q.phi_entropy(phi, &pf)?,
                bound: libm::exp(-c * params.mu * t) * initial,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> QueueParams {
        QueueParams::new(2.0, 1.0).unwrap()
    }

    #[test]
    fn mehler_moments_and_limits() {
        let q = params();
        let d = mehler_law(&q, 0.0, 4).unwrap();
        assert_eq!(d.weight(4), 1.0);
        for &(t, n) in &[(0.3, 5usize), (1.0, 0), (2.5, 12)] {
            let m = mehler_law(&q, t, n).unwrap();
            let (p, qq) = (q.p(t), q.q(t));
            assert_relative_eq!(m.mean(), n as f64 * p + 2.0 * qq, max_relative = 1e-13);
            assert_relative_eq!(m.variance(), (n as f64 * p + 2.0) * qq, max_relative = 1e-12);
        }
        let far = mehler_law(&q, 50.0, 3).unwrap();
        let tv = far.tv_distance(&DiscreteMeasure::poisson(2.0).unwrap());
        assert!(tv.value < 1e-12);
    }

    #[test]
    fn semigroup_values_match_direct_laws() {
        let q = params();
        let f = GridFunction::real((0..60).map(|n| libm::cos(n as f64)).collect());
        let pf = semigroup_values(&q, 0.8, &f, 20).unwrap();
        for n in 0..20 {
            assert_relative_eq!(pf.at(n as i64), semigroup_apply(&q, 0.8, &f, n).unwrap(), epsilon = 1e-14);
        }
        let p0 = semigroup_values(&q, 0.0, &f, 20).unwrap();
        for n in 0..20 {
            assert_eq!(p0.at(n), f.at(n));
        }
    }

    #[test]
    fn semigroup_property() {
        let q = params();
        let f = GridFunction::real((0..120).map(|n| 1.0 / (1.0 + n as f64)).collect());
        let ps = semigroup_values(&q, 0.4, &f, 60).unwrap();
        let pts = semigroup_values(&q, 0.7, &ps, 10).unwrap();
        let direct = semigroup_values(&q, 1.1, &f, 10).unwrap();
        for n in 0..10 {
            assert_relative_eq!(pts.at(n), direct.at(n), max_relative = 1e-12);
        }
    }

    #[test]
    fn variance_decays_at_twice_the_rate() {
        let q = params();
        let f = GridFunction::identity(80);
        let times: Vec<f64> = (1..=30).map(|k| 0.1 * k as f64).collect();
        let curve = entropy_decay_curve(&q, &PhiFunction::p2(), &f, &times).unwrap();
        for pt in curve {
            assert_relative_eq!(pt.value, libm::exp(-2.0 * pt.t) * 2.0, max_relative = 1e-10);
        }
    }
}
