//! Entropic inequalities: evaluation, seeded sweeps, the two-point `U`
//! criterion, extremal search and best-constant estimation.

mod inequality;
mod sampler;
mod search;
mod sweep;
mod two_point;

pub use inequality::{
    evaluate, label, required_len, sides, sweep_len, variational_value, Extra, InequalityId, InequalityParams,
    INEQUALITY_TOL, MAX_SWEEP_STATE,
};
pub use sampler::{FunctionSampler, SamplerFamily};
pub use search::{best_constant, find_extremal, BestConstant, ExtremalResult, RESTARTS};
pub use sweep::{sweep, sweep_case, sweep_extra, sweep_tally};
pub use two_point::{two_point_u, u_value, TwoPointUReport, U_TOL};
