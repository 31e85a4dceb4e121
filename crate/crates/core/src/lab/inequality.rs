//! Left and right sides of every registered entropic inequality.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::grid::GridFunction;
use crate::measure::DiscreteMeasure;
use crate::phi::PhiFunction;
use crate::queue::{carre_du_champ, decay_constant, gamma_two, mehler_law, semigroup_values, QueueParams};
use crate::report::{Case, Tally, VerificationReport};
use crate::transform::{a_unchecked, b_unchecked, c_unchecked};

/// Slack tolerance shared by all inequality checks.
pub const INEQUALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InequalityId {
    TwoPointA,
    TwoPointB,
    BernProduct,
    Binomial,
    BinomialAlt,
    PoissonA,
    PoissonBLimit,
    #[serde(rename = "BINPOI")]
    BinPoi,
    EntropyDecay,
    TvEnt,
    MixedBcLimit,
    #[serde(rename = "GAMMA2_GE")]
    Gamma2Ge,
    Tensorisation,
    Variational,
}

impl InequalityId {
    pub const ALL: [InequalityId; 14] = [
        Self::TwoPointA,
        Self::TwoPointB,
        Self::BernProduct,
        Self::Binomial,
        Self::BinomialAlt,
        Self::PoissonA,
        Self::PoissonBLimit,
        Self::BinPoi,
        Self::EntropyDecay,
        Self::TvEnt,
        Self::MixedBcLimit,
        Self::Gamma2Ge,
        Self::Tensorisation,
        Self::Variational,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::TwoPointA => "TWO_POINT_A",
            Self::TwoPointB => "TWO_POINT_B",
            Self::BernProduct => "BERN_PRODUCT",
            Self::Binomial => "BINOMIAL",
            Self::BinomialAlt => "BINOMIAL_ALT",
            Self::PoissonA => "POISSON_A",
            Self::PoissonBLimit => "POISSON_B_LIMIT",
            Self::BinPoi => "BINPOI",
            Self::EntropyDecay => "ENTROPY_DECAY",
            Self::TvEnt => "TV_ENT",
            Self::MixedBcLimit => "MIXED_BC_LIMIT",
            Self::Gamma2Ge => "GAMMA2_GE",
            Self::Tensorisation => "TENSORISATION",
            Self::Variational => "VARIATIONAL",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|id| id.name() == name)
    }

    /// Whether the two sides depend on Φ at all.
    pub fn uses_phi(&self) -> bool {
        !matches!(self, Self::TvEnt | Self::Gamma2Ge)
    }

    /// Whether a sweep draws a fresh `(t, n)` for every case.
    pub fn varies_time_and_state(&self) -> bool {
        matches!(self, Self::EntropyDecay | Self::TvEnt | Self::Gamma2Ge)
    }
}

/// Fixed parameters of the reference measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InequalityParams {
    /// Bernoulli/binomial success probability.
    pub p: f64,
    /// Binomial size.
    pub n: u64,
    /// Poisson mean.
    pub rho: f64,
    /// Queue rates for the semigroup tags.
    pub queue: QueueParams,
    /// Success probabilities of the Bernoulli convolution.
    pub ps: Vec<f64>,
}

impl Default for InequalityParams {
    fn default() -> Self {
        Self { p: 0.3, n: 6, rho: 2.0, queue: QueueParams { lambda: 2.0, mu: 1.0 }, ps: alloc::vec![0.2, 0.5, 0.7] }
    }
}

impl InequalityParams {
    pub fn validate(&self) -> Result<()> {
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        if !prob(self.p) || !self.ps.iter().all(|&p| prob(p)) {
            return Err(invalid("probabilities must lie in [0, 1]"));
        }
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return Err(invalid("the Poisson mean must be finite and non-negative"));
        }
        QueueParams::new(self.queue.lambda, self.queue.mu)?;
        Ok(())
    }
}

/// Per-case inputs beyond `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extra {
    pub t: f64,
    pub n: usize,
    /// Competitor `g` in the variational formula; `f` itself when absent.
    pub g: Option<GridFunction>,
}

impl Default for Extra {
    fn default() -> Self {
        Self { t: 1.0, n: 3, g: None }
    }
}

/// Largest state a sweep draws for the state-dependent tags.
pub const MAX_SWEEP_STATE: usize = 9;

/// Number of values of `f` (from 0) that the tag reads at state `n`.
pub fn required_len(id: InequalityId, params: &InequalityParams, n: usize) -> Result<usize> {
    let poisson = || DiscreteMeasure::poisson(params.rho).map(|q| q.len());
    Ok(match id {
        InequalityId::TwoPointA | InequalityId::TwoPointB => 2,
        InequalityId::BernProduct => params.ps.len() + 1,
        InequalityId::Binomial | InequalityId::BinomialAlt => params.n as usize + 1,
        InequalityId::PoissonA | InequalityId::PoissonBLimit | InequalityId::MixedBcLimit => poisson()? + 1,
        InequalityId::Variational => poisson()?,
        InequalityId::Tensorisation => 2 * poisson()?,
        InequalityId::BinPoi => DiscreteMeasure::binpoi(params.n, params.p, params.rho)?.len() + 1,
        InequalityId::EntropyDecay => 2 * DiscreteMeasure::poisson(params.queue.finite_rho()?)?.len(),
        InequalityId::TvEnt => 1,
        InequalityId::Gamma2Ge => n + 3,
    })
}

/// Window used by sweeps: enough for every state they may draw.
pub fn sweep_len(id: InequalityId, params: &InequalityParams) -> Result<usize> {
    required_len(id, params, MAX_SWEEP_STATE)
}

fn window(f: &GridFunction, len: usize) -> Result<()> {
    if f.start() != 0 || !f.covers(0, len as i64 - 1) {
        return Err(Error::Window { index: len as i64 - 1, len: f.len() });
    }
    Ok(())
}

fn in_domain(phi: &PhiFunction, f: &GridFunction, len: usize) -> Result<()> {
    let iv = phi.interval();
    for k in 0..len {
        iv.check(f.at(k as i64))?;
    }
    Ok(())
}

struct Forms<'a> {
    phi: &'a PhiFunction,
    f: &'a GridFunction,
}

impl Forms<'_> {
    fn v(&self, k: usize) -> f64 {
        self.f.at(k as i64)
    }
    /// `A(f, Df)(k)`.
    fn a(&self, k: usize) -> f64 {
        let x = self.v(k);
        a_unchecked(self.phi, x, self.v(k + 1) - x)
    }
    /// `A(f, D*f)(k)`, `k ≥ 1`.
    fn a_star(&self, k: usize) -> f64 {
        let x = self.v(k);
        a_unchecked(self.phi, x, self.v(k - 1) - x)
    }
    /// `A(τ(f, Df))(k)`.
    fn a_tau(&self, k: usize) -> f64 {
        let y = self.v(k + 1);
        a_unchecked(self.phi, y, self.v(k) - y)
    }
    fn b(&self, k: usize) -> f64 {
        let x = self.v(k);
        b_unchecked(self.phi, x, self.v(k + 1) - x)
    }
    fn c(&self, k: usize) -> f64 {
        let x = self.v(k);
        c_unchecked(self.phi, x, self.v(k + 1) - x)
    }
    /// `(n - h)A(f, Df) + hA(f, D*f)` at `k`, skipping zero coefficients.
    fn bern_form(&self, n: usize, k: usize) -> f64 {
        let up = if k < n { (n - k) as f64 * self.a(k) } else { 0.0 };
        let down = if k > 0 { k as f64 * self.a_star(k) } else { 0.0 };
        up + down
    }
}

fn tensorised(phi: &PhiFunction, p: f64, q2: &DiscreteMeasure, f: &GridFunction) -> Result<(f64, f64)> {
    let k2 = q2.len();
    let row = |x1: usize| GridFunction::real(f.values()[x1 * k2..(x1 + 1) * k2].to_vec());
    let (r0, r1) = (row(0), row(1));
    let mass = q2.captured_mass();
    let w1 = [1.0 - p, p];
    let mean = (w1[0] * q2.expect_with(|k| r0.at(k as i64)) + w1[1] * q2.expect_with(|k| r1.at(k as i64))) / mass;
    let m = phi.interval().check(mean)?;
    let total = (w1[0] * q2.expect_with(|k| a_unchecked(phi, m, r0.at(k as i64) - m))
        + w1[1] * q2.expect_with(|k| a_unchecked(phi, m, r1.at(k as i64) - m)))
        / mass;
    let bern_part = q2.expect_with(|k| {
        let (a, b) = (r0.at(k as i64), r1.at(k as i64));
        let mk = w1[0] * a + w1[1] * b;
        w1[0] * a_unchecked(phi, mk, a - mk) + w1[1] * a_unchecked(phi, mk, b - mk)
    }) / mass;
    let poisson_part = w1[0] * q2.phi_entropy(phi, &r0)? + w1[1] * q2.phi_entropy(phi, &r1)?;
    Ok((total, bern_part + poisson_part))
}

/// `⟨Q, (Φ'(g) - Φ'(⟨Q, g⟩))(f - g)⟩ + Ent_Q[g]`.
pub fn variational_value(phi: &PhiFunction, q: &DiscreteMeasure, f: &GridFunction, g: &GridFunction) -> Result<f64> {
    let mass = q.captured_mass();
    let mg = phi.interval().check(q.expect_with(|k| g.at(k as i64)) / mass)?;
    let d = phi.d1(mg);
    let cross = q.expect_with(|k| (phi.d1(g.at(k as i64)) - d) * (f.at(k as i64) - g.at(k as i64))) / mass;
    Ok(cross + q.phi_entropy(phi, g)?)
}

/// Left and right sides of `lhs ≤ rhs` for one function.
///
/// `TENSORISATION` reads `f` as two rows of a function on
/// `{0, 1} × {0, …, K-1}`: `F(x₁, x₂) = f(x₁K + x₂)`, `K` the Poisson support.
pub fn sides(
    id: InequalityId,
    phi: &PhiFunction,
    params: &InequalityParams,
    f: &GridFunction,
    extra: &Extra,
) -> Result<(f64, f64)> {
    params.validate()?;
    let len = required_len(id, params, extra.n)?;
    window(f, len)?;
    if id.uses_phi() {
        in_domain(phi, f, len)?;
    }
    let forms = Forms { phi, f };
    let (p, q) = (params.p, 1.0 - params.p);
    let rho = params.rho;
    match id {
        InequalityId::TwoPointA | InequalityId::TwoPointB => {
            let bern = DiscreteMeasure::bernoulli(p)?;
            let lhs = bern.phi_entropy(phi, f)?;
            let (a, b) = (f.at(0), f.at(1));
            let rhs = if id == InequalityId::TwoPointA {
                p * q * (q * a_unchecked(phi, a, b - a) + p * a_unchecked(phi, b, a - b))
            } else {
                p * q * b_unchecked(phi, a, b - a)
            };
            Ok((lhs, rhs))
        }
        InequalityId::BernProduct => {
            let m = DiscreteMeasure::bern_product(&params.ps)?;
            let cm = params.ps.iter().map(|&p| p * (1.0 - p)).fold(0.0, f64::max);
            let n = params.ps.len();
            Ok((m.phi_entropy(phi, f)?, cm * m.expect_with(|k| forms.bern_form(n, k))))
        }
        InequalityId::Binomial => {
            let m = DiscreteMeasure::binomial(params.n, p)?;
            let n = params.n as usize;
            Ok((m.phi_entropy(phi, f)?, p * q * m.expect_with(|k| forms.bern_form(n, k))))
        }
        InequalityId::BinomialAlt => {
            if params.n == 0 {
                return Err(invalid("the shifted binomial form needs n ≥ 1"));
            }
            let m = DiscreteMeasure::binomial(params.n, p)?;
            let lower = DiscreteMeasure::binomial(params.n - 1, p)?;
            let rhs = params.n as f64 * p * q * lower.expect_with(|k| q * forms.a(k) + p * forms.a_tau(k));
            Ok((m.phi_entropy(phi, f)?, rhs))
        }
        InequalityId::PoissonA | InequalityId::PoissonBLimit | InequalityId::MixedBcLimit => {
            let m = DiscreteMeasure::poisson(rho)?;
            let mass = m.captured_mass();
            let rhs = match id {
                InequalityId::PoissonA => rho * m.expect_with(|k| forms.a(k)),
                InequalityId::PoissonBLimit => rho * m.expect_with(|k| forms.b(k)),
                _ => 0.5 * rho * m.expect_with(|k| (2.0 * forms.b(k) + forms.c(k)) / 3.0),
            };
            Ok((m.phi_entropy(phi, f)?, rhs / mass))
        }
        InequalityId::BinPoi => {
            let m = DiscreteMeasure::binpoi(params.n, p, rho)?;
            let mut rhs = rho * m.expect_with(|k| forms.a(k)) / m.captured_mass();
            if params.n > 0 {
                let lower = DiscreteMeasure::binpoi(params.n - 1, p, rho)?;
                rhs += params.n as f64 * p * q * lower.expect_with(|k| q * forms.a(k) + p * forms.a_tau(k))
                    / lower.captured_mass();
            }
            Ok((m.phi_entropy(phi, f)?, rhs))
        }
        InequalityId::EntropyDecay => {
            let qp = &params.queue;
            let inv = DiscreteMeasure::poisson(qp.finite_rho()?)?;
            let pf = semigroup_values(qp, extra.t, f, inv.len())?;
            let lhs = inv.phi_entropy(phi, &pf)?;
            let rhs = libm::exp(-decay_constant(phi) * qp.mu * extra.t) * inv.phi_entropy(phi, f)?;
            Ok((lhs, rhs))
        }
        InequalityId::TvEnt => {
            let qp = &params.queue;
            let r = qp.finite_rho()?;
            if r <= 0.0 {
                return Err(invalid("the total variation bound needs λ > 0"));
            }
            let law = mehler_law(qp, extra.t, extra.n)?;
            let tv = law.tv_distance(&DiscreteMeasure::poisson(r)?).value;
            let neg_log_q = -crate::numeric::ln_poisson_pmf(extra.n as u64, r);
            Ok((2.0 * tv * tv, libm::exp(-qp.mu * extra.t) * neg_log_q))
        }
        InequalityId::Gamma2Ge => {
            let qp = &params.queue;
            let k = extra.n as i64;
            let g = carre_du_champ(qp, f)?.at(k);
            let g2 = gamma_two(qp, f)?.at(k);
            Ok((0.5 * qp.mu * g, g2))
        }
        InequalityId::Tensorisation => tensorised(phi, p, &DiscreteMeasure::poisson(rho)?, f),
        InequalityId::Variational => {
            let m = DiscreteMeasure::poisson(rho)?;
            let g = extra.g.as_ref().unwrap_or(f);
            window(g, len)?;
            in_domain(phi, g, len)?;
            Ok((variational_value(phi, &m, f, g)?, m.phi_entropy(phi, f)?))
        }
    }
}

/// Label used in reports, e.g. `POISSON_A[P1]`.
pub fn label(id: InequalityId, phi: &PhiFunction) -> alloc::string::String {
    if id.uses_phi() {
        alloc::format!("{}[{}]", id.name(), phi.family())
    } else {
        id.name().into()
    }
}

/// Single-case report.
pub fn evaluate(
    id: InequalityId,
    phi: &PhiFunction,
    params: &InequalityParams,
    f: &GridFunction,
    extra: &Extra,
) -> Result<VerificationReport> {
    let (lhs, rhs) = sides(id, phi, params, f, extra)?;
    let mut tally = Tally::inequality(label(id, phi), INEQUALITY_TOL);
    tally.record(Case::new(0, lhs, rhs).input("t", extra.t).input("n", extra.n as f64));
    Ok(tally.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;
    use approx::assert_relative_eq;

    #[test]
    fn two_point_quadratic_equality() {
        let params = InequalityParams { p: 0.5, ..Default::default() };
        let f = GridFunction::real(alloc::vec![0.0, 2.0]);
        let (l, r) = sides(InequalityId::TwoPointA, &PhiFunction::p2(), &params, &f, &Extra::default()).unwrap();
        assert_relative_eq!(l, 1.0, max_relative = 1e-15);
        assert_relative_eq!(r, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn linear_equality_cases() {
        let params = InequalityParams::default();
        let p2 = PhiFunction::p2();
        let h = GridFunction::identity(40);
        let (l, r) = sides(InequalityId::PoissonA, &p2, &params, &h, &Extra::default()).unwrap();
        assert_relative_eq!(l, 2.0, max_relative = 1e-12);
        assert_relative_eq!(r, 2.0, max_relative = 1e-13);
        let (l, r) = sides(InequalityId::Binomial, &p2, &params, &h, &Extra::default()).unwrap();
        assert_relative_eq!(l, 6.0 * 0.3 * 0.7, max_relative = 1e-13);
        assert_relative_eq!(r, l, max_relative = 1e-13);
        let (l, r) = sides(InequalityId::BinomialAlt, &p2, &params, &h, &Extra::default()).unwrap();
        assert_relative_eq!(r, l, max_relative = 1e-13);
    }

    #[test]
    fn escaping_values_are_rejected() {
        let f = GridFunction::real((0..40).map(|k| k as f64 - 1.0).collect());
        let err = sides(InequalityId::PoissonA, &PhiFunction::p1(), &InequalityParams::default(), &f, &Extra::default());
        assert!(matches!(err, Err(Error::Domain { .. })));
    }

    #[test]
    fn tv_bound_at_origin() {
        let params = InequalityParams::default();
        let extra = Extra { t: 0.7, n: 0, g: None };
        let (l, r) = sides(InequalityId::TvEnt, &PhiFunction::p1(), &params, &GridFunction::constant(1.0, 1), &extra).unwrap();
        assert_relative_eq!(r, libm::exp(-0.7) * 2.0, max_relative = 1e-14);
        assert!(l < r);
    }

    #[test]
    fn variational_attained_at_f() {
        let params = InequalityParams::default();
        let len = required_len(InequalityId::Variational, &params, 0).unwrap();
        let f = GridFunction::new((0..len).map(|k| 1.0 + libm::sin(k as f64).abs()).collect(), Interval::POSITIVE).unwrap();
        let (l, r) = sides(InequalityId::Variational, &PhiFunction::p1(), &params, &f, &Extra::default()).unwrap();
        assert!((l - r).abs() <= 1e-14 * r.abs());
    }
}
