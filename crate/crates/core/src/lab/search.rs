//! Derivative-free search for functions maximising `lhs / rhs`, and the
//! best dissipation constant.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::inequality::{sides, Extra, InequalityId, InequalityParams};
use super::sampler::FunctionSampler;
use crate::error::{invalid, Result};
use crate::grid::GridFunction;
use crate::phi::PhiFunction;
use crate::queue::QueueParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalResult {
    pub f: GridFunction,
    pub ratio: f64,
    pub evaluations: usize,
    /// The budget ran out before the steps shrank to nothing.
    pub exhausted: bool,
}

fn ratio(id: InequalityId, phi: &PhiFunction, params: &InequalityParams, extra: &Extra, f: &GridFunction) -> Option<f64> {
    match sides(id, phi, params, f, extra) {
        Ok((l, r)) if r > 0.0 && l.is_finite() && r.is_finite() => Some(l / r),
        _ => None,
    }
}

/// Coordinate ascent on `lhs / rhs` with per-coordinate steps that grow on
/// success and halve after a sweep without progress. Candidates are pulled
/// inside Φ's interval, so the ratio never decreases along the search.
pub fn find_extremal(
    id: InequalityId,
    phi: &PhiFunction,
    params: &InequalityParams,
    extra: &Extra,
    init: &GridFunction,
    budget: usize,
) -> Result<ExtremalResult> {
    let (l, r) = sides(id, phi, params, init, extra)?;
    if !(r > 0.0) {
        return Err(invalid("the right-hand side must be positive at the starting function"));
    }
    let iv = phi.interval();
    let mut best = l / r;
    let mut values = init.values().to_vec();
    let mut steps: Vec<f64> = values.iter().map(|v| 0.1 * v.abs().max(0.1)).collect();
    let mut evaluations = 1;
    let mut exhausted = false;
    'outer: loop {
        let mut improved = false;
        for k in 0..values.len() {
            for dir in [1.0, -1.0] {
                if evaluations >= budget {
                    exhausted = true;
                    break 'outer;
                }
                let old = values[k];
                let cand = iv.clamp_inside(old + dir * steps[k]);
                if cand == old {
                    continue;
                }
                values[k] = cand;
                evaluations += 1;
                let f = GridFunction::new(values.clone(), iv)?;
                match ratio(id, phi, params, extra, &f) {
                    Some(q) if q > best => {
                        best = q;
                        steps[k] *= 1.5;
                        improved = true;
                        break;
                    }
                    _ => values[k] = old,
                }
            }
        }
        if !improved {
            let top = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for s in &mut steps {
                *s *= 0.5;
            }
            if steps.iter().all(|&s| s < 1e-12 * top) {
                break;
            }
        }
    }
    Ok(ExtremalResult { f: GridFunction::new(values, iv)?, ratio: best, evaluations, exhausted })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestConstant {
    /// `inf λ⟨𝒫(ρ), B(f, Df)⟩ / (μ Ent_{𝒫(ρ)}[f])` over the explored functions.
    pub c_hat: f64,
    pub witness: GridFunction,
    pub evaluations: usize,
    pub exhausted: bool,
}

/// Number of search restarts in [`best_constant`].
pub const RESTARTS: usize = 5;

/// Empirical best constant `c` in `cμ Ent ≤ λ⟨B(f, Df)⟩` under `𝒫(λ/μ)`.
/// A quarter of the budget screens sampled functions; the rest drives
/// [`find_extremal`] from the best few.
pub fn best_constant(phi: &PhiFunction, queue: &QueueParams, sampler: &FunctionSampler, budget: usize) -> Result<BestConstant> {
    let rho = queue.finite_rho()?;
    let params = InequalityParams { rho, queue: *queue, ..Default::default() };
    let id = InequalityId::PoissonBLimit;
    let extra = Extra::default();
    let len = super::inequality::required_len(id, &params, 0)?;
    let screen = (budget / 4).max(RESTARTS);
    let mut ranked: Vec<(f64, GridFunction)> = Vec::new();
    for i in 0..screen as u64 {
        let f = sampler.draw(phi, len, i)?;
        if let Some(q) = ratio(id, phi, &params, &extra, &f) {
            ranked.push((q, f));
        }
    }
    if ranked.is_empty() {
        return Err(invalid("no sampled function had a positive energy"));
    }
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
    ranked.truncate(RESTARTS);
    let per_run = (budget - screen.min(budget)) / ranked.len();
    let mut evaluations = screen;
    let mut exhausted = false;
    let (mut best, mut witness) = (ranked[0].0, ranked[0].1.clone());
    for (_, init) in &ranked {
        let run = find_extremal(id, phi, &params, &extra, init, per_run.max(1))?;
        evaluations += run.evaluations;
        exhausted |= run.exhausted;
        if run.ratio > best {
            best = run.ratio;
            witness = run.f;
        }
    }
    Ok(BestConstant { c_hat: 1.0 / best, witness, evaluations, exhausted })
}
