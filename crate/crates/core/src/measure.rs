//! Probability measures on {0, …, N} kept as log-weights with a certified
//! bound on the mass lost to truncation.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::grid::GridFunction;
use crate::numeric::{ln_binomial_pmf, ln_poisson_pmf, log_sum_exp, NeumaierSum};
use crate::phi::PhiFunction;
use crate::transform::a_unchecked;

/// Truncation target for infinite supports.
pub const TAIL_TARGET: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MeasureKind {
    Bernoulli { p: f64 },
    Binomial { n: u64, p: f64 },
    Poisson { rho: f64 },
    #[serde(rename = "BINPOI")]
    BinPoi { n: u64, p: f64, rho: f64 },
    BernProduct { ps: Vec<f64> },
    /// `Q(n) = (1 - ρ) ρⁿ`.
    Geometric { rho: f64 },
    Generic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    kind: MeasureKind,
    log_weights: Vec<f64>,
    tail_bound: f64,
}

/// Total-variation distance with the worst-case contribution of truncated tails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TvDistance {
    pub value: f64,
    pub error_bound: f64,
}

fn check_prob(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(invalid("probability must lie in [0, 1]"))
    }
}

fn check_rate(rho: f64) -> Result<()> {
    if rho.is_finite() && rho >= 0.0 {
        Ok(())
    } else {
        Err(invalid("intensity must be finite and non-negative"))
    }
}

impl DiscreteMeasure {
    fn from_parts(kind: MeasureKind, log_weights: Vec<f64>, tail_bound: f64) -> Self {
        Self { kind, log_weights, tail_bound }
    }

    /// Dirac mass at `n`.
    pub fn dirac(n: usize) -> Self {
        let mut lw = vec![f64::NEG_INFINITY; n + 1];
        lw[n] = 0.0;
        Self::from_parts(MeasureKind::Generic, lw, 0.0)
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        check_prob(p)?;
        Ok(Self::from_parts(MeasureKind::Bernoulli { p }, vec![libm::log1p(-p), libm::log(p)], 0.0))
    }

    pub fn binomial(n: u64, p: f64) -> Result<Self> {
        check_prob(p)?;
        let lw = (0..=n).map(|k| ln_binomial_pmf(k, n, p)).collect();
        Ok(Self::from_parts(MeasureKind::Binomial { n, p }, lw, 0.0))
    }

    /// Poisson law truncated at the smallest `N` whose certified tail
    /// `P(N+1) / (1 - ρ/(N+2))` is below [`TAIL_TARGET`].
    pub fn poisson(rho: f64) -> Result<Self> {
        check_rate(rho)?;
        if rho == 0.0 {
            return Ok(Self::from_parts(MeasureKind::Poisson { rho }, vec![0.0], 0.0));
        }
        let log_pmf = |k: u64| ln_poisson_pmf(k, rho);
        let mut lw = Vec::new();
        let mut k = 0u64;
        loop {
            lw.push(log_pmf(k));
            let next = (k + 2) as f64;
            if next > rho {
                let tail = libm::exp(log_pmf(k + 1)) / (1.0 - rho / next);
                if tail < TAIL_TARGET {
                    return Ok(Self::from_parts(MeasureKind::Poisson { rho }, lw, tail));
                }
            }
            k += 1;
        }
    }

    /// `ℬ(n, p) * 𝒫(ρ)`.
    pub fn binpoi(n: u64, p: f64, rho: f64) -> Result<Self> {
        let mut m = Self::binomial(n, p)?.convolve(&Self::poisson(rho)?);
        m.kind = MeasureKind::BinPoi { n, p, rho };
        Ok(m)
    }

    /// `ℬ(1, p₁) * ⋯ * ℬ(1, p_k)`.
    pub fn bern_product(ps: &[f64]) -> Result<Self> {
        let mut m = Self::dirac(0);
        for &p in ps {
            m = m.convolve(&Self::bernoulli(p)?);
        }
        m.kind = MeasureKind::BernProduct { ps: ps.to_vec() };
        Ok(m)
    }

    /// `Q(n) = (1 - ρ)ρⁿ`, requires `ρ < 1`.
    pub fn geometric(rho: f64) -> Result<Self> {
        check_rate(rho)?;
        if rho >= 1.0 {
            return Err(invalid("geometric law needs rho < 1 to be normalizable"));
        }
        if rho == 0.0 {
            return Ok(Self::from_parts(MeasureKind::Geometric { rho }, vec![0.0], 0.0));
        }
        let lr = libm::log(rho);
        let n = libm::ceil(libm::log(TAIL_TARGET) / lr) as usize;
        let l1 = libm::log1p(-rho);
        let lw = (0..n).map(|k| l1 + k as f64 * lr).collect();
        Ok(Self::from_parts(MeasureKind::Geometric { rho }, lw, libm::pow(rho, n as f64)))
    }

    /// Measure from explicit (non-negative) weights.
    pub fn from_weights(weights: &[f64], tail_bound: f64) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(invalid("weights must be finite and non-negative"));
        }
        if weights.is_empty() {
            return Err(invalid("a measure needs at least one atom"));
        }
        let lw = weights.iter().map(|&w| libm::log(w)).collect();
        Ok(Self::from_parts(MeasureKind::Generic, lw, tail_bound))
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    /// Largest index kept.
    pub fn max_index(&self) -> usize {
        self.log_weights.len() - 1
    }

    pub fn len(&self) -> usize {
        self.log_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_weights.is_empty()
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// Weight of atom `k` (0 beyond the stored range).
    pub fn weight(&self, k: usize) -> f64 {
        self.log_weights.get(k).map_or(0.0, |&l| libm::exp(l))
    }

    pub fn weights(&self) -> Vec<f64> {
        self.log_weights.iter().map(|&l| libm::exp(l)).collect()
    }

    pub fn captured_mass(&self) -> f64 {
        let mut s = NeumaierSum::new();
        for &l in &self.log_weights {
            s.add(libm::exp(l));
        }
        s.value()
    }

    /// Atom-wise convolution in log space; tail bounds add.
    pub fn convolve(&self, other: &Self) -> Self {
        let n = self.log_weights.len() + other.log_weights.len() - 1;
        let mut out = Vec::with_capacity(n);
        let mut terms = Vec::new();
        for k in 0..n {
            terms.clear();
            let lo = k.saturating_sub(other.log_weights.len() - 1);
            let hi = k.min(self.log_weights.len() - 1);
            for j in lo..=hi {
                terms.push(self.log_weights[j] + other.log_weights[k - j]);
            }
            out.push(log_sum_exp(&terms));
        }
        let kind = match (&self.kind, &other.kind) {
            (MeasureKind::Poisson { rho: a }, MeasureKind::Poisson { rho: b }) => MeasureKind::Poisson { rho: a + b },
            (MeasureKind::Binomial { n: a, p }, MeasureKind::Binomial { n: b, p: q }) if p == q => {
                MeasureKind::Binomial { n: a + b, p: *p }
            }
            (MeasureKind::Binomial { n, p }, MeasureKind::Poisson { rho }) => {
                MeasureKind::BinPoi { n: *n, p: *p, rho: *rho }
            }
            _ => MeasureKind::Generic,
        };
        Self::from_parts(kind, out, self.tail_bound + other.tail_bound)
    }

    /// `Σ_k Q(k) g(k)` for an arbitrary evaluator, compensated.
    pub fn expect_with(&self, mut g: impl FnMut(usize) -> f64) -> f64 {
        let mut s = NeumaierSum::new();
        for (k, &l) in self.log_weights.iter().enumerate() {
            if l == f64::NEG_INFINITY {
                continue;
            }
            s.add(libm::exp(l) * g(k));
        }
        s.value()
    }

    fn check_window(&self, f: &GridFunction) -> Result<()> {
        if f.covers(0, self.max_index() as i64) {
            Ok(())
        } else {
            Err(Error::Window { index: self.max_index() as i64, len: f.len() })
        }
    }

    /// `⟨Q, f⟩` with raw weights; the omitted mass contributes at most
    /// `tail_bound · sup|f|`.
    pub fn expectation(&self, f: &GridFunction) -> Result<f64> {
        self.check_window(f)?;
        Ok(self.expect_with(|k| f.at(k as i64)))
    }

    pub fn mean(&self) -> f64 {
        self.expect_with(|k| k as f64)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean() / self.captured_mass();
        self.expect_with(|k| (k as f64 - m) * (k as f64 - m)) / self.captured_mass()
    }

    /// `Ent[f] = ⟨Q, Φ(f)⟩ - Φ(⟨Q, f⟩)` under the normalized captured weights,
    /// evaluated as `⟨Q, A(m, f - m)⟩` with `m = ⟨Q, f⟩`.
    pub fn phi_entropy(&self, phi: &PhiFunction, f: &GridFunction) -> Result<f64> {
        self.check_window(f)?;
        let mass = self.captured_mass();
        let m = self.expect_with(|k| f.at(k as i64)) / mass;
        let iv = phi.interval();
        for k in 0..self.len() {
            if self.log_weights[k] > f64::NEG_INFINITY {
                iv.check(f.at(k as i64))?;
            }
        }
        let m = iv.check(m)?;
        Ok(self.phi_entropy_with(phi, m, |k| f.at(k as i64)) / mass)
    }

    /// Un-normalized `Σ Q(k) A(m, g(k) - m)`.
    pub(crate) fn phi_entropy_with(&self, phi: &PhiFunction, m: f64, mut g: impl FnMut(usize) -> f64) -> f64 {
        self.expect_with(|k| a_unchecked(phi, m, g(k) - m))
    }

    /// Total variation distance; truncated tails are reported as an error bound.
    pub fn tv_distance(&self, other: &Self) -> TvDistance {
        let n = self.len().max(other.len());
        let mut s = NeumaierSum::new();
        for k in 0..n {
            s.add((self.weight(k) - other.weight(k)).abs());
        }
        TvDistance {
            value: (0.5 * s.value()).clamp(0.0, 1.0),
            error_bound: 0.5 * (self.tail_bound + other.tail_bound),
        }
    }
}
