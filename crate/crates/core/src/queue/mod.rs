//! The M/M/∞ queue: generator, Mehler semigroup, Γ calculus, spectrum and
//! local entropy inequalities. The M/M/1 variant appears only through its
//! generator.

mod generator;
mod identities;
mod local;
mod semigroup;
mod spectral;

pub use generator::{
    carre_du_champ, carre_du_champ_from_generator, eigen_residual, eigenfunction, gamma_two,
    gamma_two_from_generator, generator_apply, mm1_generator_apply, polarized_form,
};
pub use identities::{check_queue_identity, sweep_queue_identity, QueueAux, QueueIdentityId};
pub use local::{local_inequality_eval, local_sides, LocalVariant};
pub use semigroup::{
    decay_constant, entropy_decay_curve, mehler_law, semigroup_apply, semigroup_values, DecayPoint,
};
pub use spectral::{spectral_gap, spectrum, truncated_generator, SPECTRAL_TAIL_LIMIT};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Arrival rate λ and per-customer service rate μ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueueParams {
    pub lambda: f64,
    pub mu: f64,
}

impl QueueParams {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        let ok = lambda.is_finite() && mu.is_finite() && lambda >= 0.0 && mu >= 0.0 && lambda + mu > 0.0;
        if !ok {
            return Err(invalid("rates must be finite, non-negative and not both zero"));
        }
        Ok(Self { lambda, mu })
    }

    /// `λ/μ`; infinite when μ = 0.
    pub fn rho(&self) -> f64 {
        if self.mu == 0.0 {
            f64::INFINITY
        } else {
            self.lambda / self.mu
        }
    }

    /// `ρ`, or an error when μ = 0.
    pub fn finite_rho(&self) -> Result<f64> {
        if self.mu > 0.0 {
            Ok(self.rho())
        } else {
            Err(invalid("this operation needs a positive service rate"))
        }
    }

    /// `p(t) = e^{-μt}`.
    pub fn p(&self, t: f64) -> f64 {
        libm::exp(-self.mu * t)
    }

    /// `q(t) = 1 - e^{-μt}`.
    pub fn q(&self, t: f64) -> f64 {
        -libm::expm1(-self.mu * t)
    }

    /// `ρ q(t)`, with the limit `λt` when μ = 0.
    pub fn rho_q(&self, t: f64) -> f64 {
        if self.mu == 0.0 {
            self.lambda * t
        } else {
            self.lambda * self.q(t) / self.mu
        }
    }
}
