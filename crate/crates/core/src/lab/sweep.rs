//! Seeded sweeps of an inequality over sampled functions.

use super::inequality::{label, sides, sweep_len, Extra, InequalityId, InequalityParams, INEQUALITY_TOL, MAX_SWEEP_STATE};
use super::sampler::FunctionSampler;
use crate::error::Result;
use crate::phi::PhiFunction;
use crate::report::{Case, Tally, VerificationReport};
use crate::rng::{below, stream, uniform, uniform_in};

const EXTRA_SALT: u64 = 0x5e_ed0f_e47a;

/// The `(t, n, g)` drawn alongside function number `index`.
pub fn sweep_extra(
    id: InequalityId,
    phi: &PhiFunction,
    sampler: &FunctionSampler,
    len: usize,
    index: u64,
    f: &crate::grid::GridFunction,
) -> Result<Extra> {
    let mut extra = Extra::default();
    let mut rng = stream(sampler.seed ^ EXTRA_SALT, index);
    if id.varies_time_and_state() {
        extra.t = uniform_in(&mut rng, 0.05, 3.0);
        extra.n = below(&mut rng, MAX_SWEEP_STATE as u64 + 1) as usize;
    }
    if id == InequalityId::Variational {
        let other = FunctionSampler { family: sampler.family.clone(), seed: sampler.seed.wrapping_add(1) }.draw(phi, len, index)?;
        let s = uniform(&mut rng);
        extra.g = Some(f.zip(&other, |a, b| a + s * (b - a)).with_codomain(phi.interval())?);
    }
    Ok(extra)
}

/// Case number `index` of a sweep; independent of every other case.
pub fn sweep_case(
    id: InequalityId,
    phi: &PhiFunction,
    params: &InequalityParams,
    sampler: &FunctionSampler,
    index: u64,
) -> Result<Case> {
    let len = sweep_len(id, params)?;
    let f = sampler.draw(phi, len, index)?;
    let extra = sweep_extra(id, phi, sampler, len, index, &f)?;
    let (lhs, rhs) = sides(id, phi, params, &f, &extra)?;
    let mut case = Case::new(index as usize, lhs, rhs);
    if id.uses_phi() {
        case = case.with_scale(f.values().iter().map(|&u| phi.eval(u).abs()).fold(0.0, f64::max));
    }
    if id.varies_time_and_state() {
        case = case.input("t", extra.t).input("n", extra.n as f64);
    }
    Ok(case)
}

/// Empty tally for a sweep, to be fed cases in index order.
pub fn sweep_tally(id: InequalityId, phi: &PhiFunction, sampler: &FunctionSampler) -> Tally {
    Tally::inequality(alloc::format!("{}<{}>", label(id, phi), sampler.family.name()), INEQUALITY_TOL).seed(sampler.seed)
}

pub fn sweep(
    id: InequalityId,
    phi: &PhiFunction,
    params: &InequalityParams,
    sampler: &FunctionSampler,
    cases: usize,
) -> Result<VerificationReport> {
    let mut tally = sweep_tally(id, phi, sampler);
    for i in 0..cases as u64 {
        tally.record(sweep_case(id, phi, params, sampler, i)?);
    }
    Ok(tally.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::sampler::SamplerFamily;

    #[test]
    fn every_tag_passes_for_p1() {
        let params = InequalityParams::default();
        let s = FunctionSampler::mixed(21);
        for id in InequalityId::ALL {
            let r = sweep(id, &PhiFunction::p1(), &params, &s, 60).unwrap();
            assert!(r.pass, "{}", r.summary_line());
        }
    }

    #[test]
    fn a_version_is_tighter_than_b_version() {
        let params = InequalityParams::default();
        let s = FunctionSampler::new(SamplerFamily::RandomBounded { lo: 0.1, hi: 5.0 }, 3);
        let phi = PhiFunction::p1();
        for i in 0..200 {
            let a = sweep_case(InequalityId::TwoPointA, &phi, &params, &s, i).unwrap();
            let b = sweep_case(InequalityId::TwoPointB, &phi, &params, &s, i).unwrap();
            assert_eq!(a.lhs, b.lhs);
            assert!(a.rhs <= b.rhs * (1.0 + 1e-12));
        }
    }
}
