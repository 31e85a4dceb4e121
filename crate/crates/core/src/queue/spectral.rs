//! Spectrum of the generator truncated to `{0, …, N}`.

use alloc::vec::Vec;

use super::QueueParams;
use crate::error::{invalid, Error, Result};
use crate::measure::DiscreteMeasure;
use crate::tridiag::SymTridiagonal;

/// Largest Poisson mass allowed beyond the truncation level.
pub const SPECTRAL_TAIL_LIMIT: f64 = 1e-8;

/// `-L` on `{0, …, trunc}` (no arrivals out of `trunc`), conjugated by
/// `diag(√𝒫(ρ))` into a symmetric tridiagonal matrix.
pub fn truncated_generator(params: &QueueParams, trunc: usize) -> Result<SymTridiagonal> {
    if !(params.lambda > 0.0 && params.mu > 0.0) {
        return Err(invalid("the spectral gap needs positive arrival and service rates"));
    }
    let rho = params.rho();
    let tail = poisson_tail_beyond(rho, trunc);
    if tail > SPECTRAL_TAIL_LIMIT {
        let mut hint = trunc.max(1);
        while poisson_tail_beyond(rho, hint) > SPECTRAL_TAIL_LIMIT {
            hint *= 2;
        }
        return Err(Error::Truncation(
            alloc::format!(
                "Poisson({rho}) mass beyond {trunc} is {tail:.3e} > {SPECTRAL_TAIL_LIMIT:e}; use trunc ≥ {hint}"
            ),
        ));
    }
    let (lam, mu) = (params.lambda, params.mu);
    let diag = (0..=trunc)
        .map(|n| if n < trunc { lam + n as f64 * mu } else { n as f64 * mu })
        .collect();
    let off = (0..trunc).map(|n| -libm::sqrt(lam * (n + 1) as f64 * mu)).collect();
    SymTridiagonal::new(diag, off)
}

fn poisson_tail_beyond(rho: f64, trunc: usize) -> f64 {
    let m = DiscreteMeasure::poisson(rho).expect("finite intensity");
    (trunc + 1..m.len()).map(|k| m.weight(k)).sum::<f64>() + m.tail_bound()
}

/// Second-smallest eigenvalue of the truncated, symmetrized `-L`.
pub fn spectral_gap(params: &QueueParams, trunc: usize) -> Result<f64> {
    let m = truncated_generator(params, trunc)?;
    Ok(m.eigenvalue(1))
}

/// The `count` smallest eigenvalues of the truncated, symmetrized `-L`.
pub fn spectrum(params: &QueueParams, trunc: usize, count: usize) -> Result<Vec<f64>> {
    let m = truncated_generator(params, trunc)?;
    Ok((0..count.min(m.dim())).map(|k| m.eigenvalue(k)).collect())
}
