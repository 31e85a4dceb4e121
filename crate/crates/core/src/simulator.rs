//! Exact simulation of the queue through its embedded jump chain, and the
//! fluid and central-limit experiments under Kelly scaling.
//!
//! Path `i` of an experiment always draws from `stream(seed, i)`, so the
//! `*_sample` functions can be farmed out to any number of threads and
//! reduced with the `summarize_*` functions in index order.

use alloc::vec::Vec;

use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::measure::DiscreteMeasure;
use crate::numeric::NeumaierSum;
use crate::queue::QueueParams;
use crate::rng::{exponential, stream, uniform};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub jump_times: Vec<f64>,
    /// `states[i]` is held on `[jump_times[i-1], jump_times[i])`.
    pub states: Vec<u64>,
    pub seed: u64,
}

impl Trajectory {
    pub fn initial_state(&self) -> u64 {
        self.states[0]
    }

    pub fn final_state(&self) -> u64 {
        *self.states.last().expect("non-empty")
    }

    /// State at time `t` (right-continuous).
    pub fn state_at(&self, t: f64) -> u64 {
        let i = self.jump_times.partition_point(|&s| s <= t);
        self.states[i]
    }

    /// Completed sojourns as `(state, duration, next state)`.
    pub fn sojourns(&self) -> impl Iterator<Item = (u64, f64, u64)> + '_ {
        (0..self.jump_times.len()).map(move |i| {
            let start = if i == 0 { 0.0 } else { self.jump_times[i - 1] };
            (self.states[i], self.jump_times[i] - start, self.states[i + 1])
        })
    }
}

fn check_horizon(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("the horizon must be finite and non-negative"));
    }
    Ok(())
}

/// One step of the embedded chain from `n`: holding time, then ±1.
/// `None` once the state is absorbing.
fn step<R: RngCore + ?Sized>(params: &QueueParams, n: u64, rng: &mut R) -> Option<(f64, u64)> {
    let death = n as f64 * params.mu;
    let rate = params.lambda + death;
    if rate == 0.0 {
        return None;
    }
    let hold = exponential(rng, rate);
    let up = uniform(rng) * rate < params.lambda;
    Some((hold, if up { n + 1 } else { n - 1 }))
}

/// Full path on `[0, t_max]` from `stream(seed, index)`.
pub fn simulate_path_indexed(params: &QueueParams, n0: u64, t_max: f64, seed: u64, index: u64) -> Result<Trajectory> {
    check_horizon(t_max)?;
    let mut rng = stream(seed, index);
    let mut jump_times = Vec::new();
    let mut states = alloc::vec![n0];
    let (mut t, mut n) = (0.0, n0);
    while let Some((hold, next)) = step(params, n, &mut rng) {
        t += hold;
        if t > t_max {
            break;
        }
        jump_times.push(t);
        states.push(next);
        n = next;
    }
    Ok(Trajectory { jump_times, states, seed })
}

pub fn simulate_path(params: &QueueParams, n0: u64, t_max: f64, seed: u64) -> Result<Trajectory> {
    simulate_path_indexed(params, n0, t_max, seed, 0)
}

/// `X_t` for path `index`, without storing the path.
pub fn sample_state(params: &QueueParams, n0: u64, t: f64, seed: u64, index: u64) -> Result<u64> {
    check_horizon(t)?;
    let mut rng = stream(seed, index);
    let (mut s, mut n) = (0.0, n0);
    while let Some((hold, next)) = step(params, n, &mut rng) {
        s += hold;
        if s > t {
            break;
        }
        n = next;
    }
    Ok(n)
}

/// Empirical frequencies of the given states.
pub fn law_from_states(states: &[u64]) -> Result<DiscreteMeasure> {
    let top = *states.iter().max().ok_or_else(|| invalid("need at least one path"))?;
    let mut counts = alloc::vec![0.0; top as usize + 1];
    for &s in states {
        counts[s as usize] += 1.0;
    }
    let total = states.len() as f64;
    for c in &mut counts {
        *c /= total;
    }
    DiscreteMeasure::from_weights(&counts, 0.0)
}

/// Empirical law of `X_t` over `paths` independent paths.
pub fn empirical_law(params: &QueueParams, n0: u64, t: f64, paths: usize, seed: u64) -> Result<DiscreteMeasure> {
    let states = (0..paths as u64).map(|i| sample_state(params, n0, t, seed, i)).collect::<Result<Vec<_>>>()?;
    law_from_states(&states)
}

/// Kelly scaling: input rate `Nλ`, initial state `⌊Nx + √N y⌋`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub n_scale: u64,
    pub x: f64,
    pub y: f64,
    pub t_max: f64,
    pub paths: usize,
    pub seed: u64,
}

impl ScalingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_scale == 0 || self.paths == 0 {
            return Err(invalid("the scale and path count must be positive"));
        }
        check_horizon(self.t_max)?;
        if !(self.x >= 0.0 && self.x.is_finite() && self.y.is_finite()) {
            return Err(invalid("x must be finite and non-negative, y finite"));
        }
        if self.initial_state_real() < 0.0 {
            return Err(invalid("⌊Nx + √N y⌋ is negative"));
        }
        Ok(())
    }

    fn initial_state_real(&self) -> f64 {
        let n = self.n_scale as f64;
        libm::floor(n * self.x + libm::sqrt(n) * self.y)
    }

    pub fn initial_state(&self) -> u64 {
        self.initial_state_real().max(0.0) as u64
    }

    pub fn scaled_params(&self, params: &QueueParams) -> Result<QueueParams> {
        QueueParams::new(self.n_scale as f64 * params.lambda, params.mu)
    }
}

/// Fluid limit `m(t) = ρ + (x - ρ)p(t)`.
pub fn fluid_mean(params: &QueueParams, x: f64, t: f64) -> Result<f64> {
    let rho = params.finite_rho()?;
    Ok(rho + (x - rho) * params.p(t))
}

/// `sup_{s ≤ t_max} |Y^N_s - m(s)|` for path `index`. Between jumps `Y^N` is
/// constant and `m` monotone, so the supremum sits at jump times or their
/// left limits.
pub fn fluid_sample(params: &QueueParams, cfg: &ScalingConfig, index: u64) -> Result<f64> {
    cfg.validate()?;
    let scaled = cfg.scaled_params(params)?;
    let traj = simulate_path_indexed(&scaled, cfg.initial_state(), cfg.t_max, cfg.seed, index)?;
    let nn = cfg.n_scale as f64;
    let m = |s: f64| fluid_mean(params, cfg.x, s);
    let mut sup: f64 = 0.0;
    let mut start = 0.0;
    for (i, &y) in traj.states.iter().enumerate() {
        let end = traj.jump_times.get(i).copied().unwrap_or(cfg.t_max);
        let level = y as f64 / nn;
        sup = sup.max((level - m(start)?).abs()).max((level - m(end)?).abs());
        start = end;
    }
    Ok(sup)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluidReport {
    pub config: ScalingConfig,
    pub rho: f64,
    pub mean_sup_deviation: f64,
    pub std_error: f64,
    pub max_sup_deviation: f64,
}

fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mut s = NeumaierSum::new();
    for &x in xs {
        s.add(x);
    }
    let mean = s.value() / n;
    let mut v = NeumaierSum::new();
    for &x in xs {
        v.add((x - mean) * (x - mean));
    }
    let var = if xs.len() > 1 { v.value() / (n - 1.0) } else { 0.0 };
    (mean, var)
}

pub fn summarize_fluid(params: &QueueParams, cfg: &ScalingConfig, sups: &[f64]) -> Result<FluidReport> {
    if sups.is_empty() {
        return Err(invalid("need at least one path"));
    }
    let (mean, var) = mean_and_variance(sups);
    Ok(FluidReport {
        config: *cfg,
        rho: params.finite_rho()?,
        mean_sup_deviation: mean,
        std_error: libm::sqrt(var / sups.len() as f64),
        max_sup_deviation: sups.iter().copied().fold(0.0, f64::max),
    })
}

pub fn fluid_experiment(cfg: &ScalingConfig, params: &QueueParams) -> Result<FluidReport> {
    let sups = (0..cfg.paths as u64).map(|i| fluid_sample(params, cfg, i)).collect::<Result<Vec<_>>>()?;
    summarize_fluid(params, cfg, &sups)
}

/// `Z^N_{t_max} = (X^N_{t_max} - N m(t_max)) / √N` for path `index`.
pub fn clt_sample(params: &QueueParams, cfg: &ScalingConfig, index: u64) -> Result<f64> {
    cfg.validate()?;
    let scaled = cfg.scaled_params(params)?;
    let x = sample_state(&scaled, cfg.initial_state(), cfg.t_max, cfg.seed, index)?;
    let nn = cfg.n_scale as f64;
    Ok((x as f64 - nn * fluid_mean(params, cfg.x, cfg.t_max)?) / libm::sqrt(nn))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub config: ScalingConfig,
    pub sample_mean: f64,
    pub sample_variance: f64,
    pub mean_std_error: f64,
    /// `y p(t)`.
    pub target_mean: f64,
    /// `(1 - p(t)²)ρ`; only when started on the equilibrium `x = ρ`.
    pub target_variance: Option<f64>,
    pub relative_variance_gap: Option<f64>,
}

pub fn summarize_clt(params: &QueueParams, cfg: &ScalingConfig, zs: &[f64]) -> Result<CltReport> {
    if zs.is_empty() {
        return Err(invalid("need at least one path"));
    }
    let rho = params.finite_rho()?;
    let (mean, var) = mean_and_variance(zs);
    let p = params.p(cfg.t_max);
    let at_equilibrium = (cfg.x - rho).abs() <= 1e-12 * rho.max(1.0);
    let target_variance = at_equilibrium.then(|| -libm::expm1(-2.0 * params.mu * cfg.t_max) * rho);
    Ok(CltReport {
        config: *cfg,
        sample_mean: mean,
        sample_variance: var,
        mean_std_error: libm::sqrt(var / zs.len() as f64),
        target_mean: cfg.y * p,
        target_variance,
        relative_variance_gap: target_variance.map(|v| if v > 0.0 { (var - v).abs() / v } else { var }),
    })
}

pub fn clt_experiment(cfg: &ScalingConfig, params: &QueueParams) -> Result<CltReport> {
    let zs = (0..cfg.paths as u64).map(|i| clt_sample(params, cfg, i)).collect::<Result<Vec<_>>>()?;
    summarize_clt(params, cfg, &zs)
}
