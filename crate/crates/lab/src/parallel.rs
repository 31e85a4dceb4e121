//! Rayon fan-out with reductions in index order, so results never depend on
//! the thread count.

use mminf_core::lab::{sweep_case, sweep_tally, FunctionSampler, InequalityId, InequalityParams};
use mminf_core::simulator::{
    clt_sample, fluid_sample, law_from_states, sample_state, summarize_clt, summarize_fluid, CltReport, FluidReport,
    ScalingConfig,
};
use mminf_core::{DiscreteMeasure, PhiFunction, QueueParams, Result, VerificationReport};
use rayon::prelude::*;

pub fn inequality_sweep(
    id: InequalityId,
    phi: &PhiFunction,
    params: &InequalityParams,
    sampler: &FunctionSampler,
    cases: usize,
) -> Result<VerificationReport> {
    let cases: Vec<_> =
        (0..cases as u64).into_par_iter().map(|i| sweep_case(id, phi, params, sampler, i)).collect::<Result<_>>()?;
    let mut tally = sweep_tally(id, phi, sampler);
    for c in cases {
        tally.record(c);
    }
    Ok(tally.finish())
}

pub fn empirical_law(params: &QueueParams, n0: u64, t: f64, paths: usize, seed: u64) -> Result<DiscreteMeasure> {
    let states: Vec<u64> =
        (0..paths as u64).into_par_iter().map(|i| sample_state(params, n0, t, seed, i)).collect::<Result<_>>()?;
    law_from_states(&states)
}

pub fn fluid_experiment(cfg: &ScalingConfig, params: &QueueParams) -> Result<FluidReport> {
    cfg.validate()?;
    let sups: Vec<f64> =
        (0..cfg.paths as u64).into_par_iter().map(|i| fluid_sample(params, cfg, i)).collect::<Result<_>>()?;
    summarize_fluid(params, cfg, &sups)
}

pub fn clt_experiment(cfg: &ScalingConfig, params: &QueueParams) -> Result<CltReport> {
    cfg.validate()?;
    let zs: Vec<f64> = (0..cfg.paths as u64).into_par_iter().map(|i| clt_sample(params, cfg, i)).collect::<Result<_>>()?;
    summarize_clt(params, cfg, &zs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_matches_sequential() {
        let phi = PhiFunction::p1();
        let params = InequalityParams { rho: 1.0, ..Default::default() };
        let s = FunctionSampler::mixed(9);
        let a = inequality_sweep(InequalityId::PoissonA, &phi, &params, &s, 64).unwrap();
        let b = mminf_core::lab::sweep(InequalityId::PoissonA, &phi, &params, &s, 64).unwrap();
        assert_eq!(a, b);
        let q = QueueParams::new(2.0, 1.0).unwrap();
        assert_eq!(empirical_law(&q, 5, 1.0, 500, 3).unwrap(), mminf_core::simulator::empirical_law(&q, 5, 1.0, 500, 3).unwrap());
        let cfg = ScalingConfig { n_scale: 10, x: 4.0, y: 0.0, t_max: 1.0, paths: 20, seed: 4 };
        assert_eq!(fluid_experiment(&cfg, &q).unwrap(), mminf_core::simulator::fluid_experiment(&cfg, &q).unwrap());
    }
}
