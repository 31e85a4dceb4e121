//! Seeded families of test functions mapping into Φ's interval.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::GridFunction;
use crate::interval::Interval;
use crate::phi::PhiFunction;
use crate::rng::{below, stream, uniform, uniform_in};

/// Largest `|θ|·len` an exponential tilt may reach; keeps `e^{θk}` far from
/// overflow on the whole window.
const MAX_TILT_SPAN: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SamplerFamily {
    /// Independent uniform values in `[lo, hi]`, pulled inside the interval.
    RandomBounded { lo: f64, hi: f64 },
    /// `a + b k`; rejected if it leaves the interval on the window.
    Linear { a: f64, b: f64 },
    /// `c e^{θ' k}` with `θ'` uniform in `[-θ, θ]` and a random amplitude.
    ExpTilt { theta: f64 },
    /// Two random levels, one on `set` and one elsewhere.
    Indicator { set: Vec<usize> },
    /// `c + ε U(-1, 1)` per value.
    PerturbedConstant { c: f64, eps: f64 },
    /// Each case picks one of the shapes above with parameters fitted to the
    /// interval.
    Mixed,
}

impl SamplerFamily {
    pub fn name(&self) -> &'static str {
        match self {
            Self::RandomBounded { .. } => "RANDOM_BOUNDED",
            Self::Linear { .. } => "LINEAR",
            Self::ExpTilt { .. } => "EXP_TILT",
            Self::Indicator { .. } => "INDICATOR",
            Self::PerturbedConstant { .. } => "PERTURBED_CONSTANT",
            Self::Mixed => "MIXED",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSampler {
    pub family: SamplerFamily,
    pub seed: u64,
}

fn tilt(iv: &Interval, rng: &mut ChaCha8Rng, theta_max: f64, len: usize) -> Vec<f64> {
    let bound = theta_max.abs().min(MAX_TILT_SPAN / len.max(1) as f64);
    let theta = uniform_in(rng, -bound, bound);
    let amp = iv.probe(rng);
    let mid = 0.5 * (len as f64 - 1.0);
    (0..len)
        .map(|k| {
            let k = k as f64;
            let x = match (iv.lo.is_finite(), iv.hi.is_finite()) {
                (true, true) => iv.lo + (iv.hi - iv.lo) / (1.0 + libm::exp(-theta * (k - mid))),
                (true, false) => iv.lo + (amp - iv.lo) * libm::exp(theta * k),
                (false, true) => iv.hi - (iv.hi - amp) * libm::exp(theta * k),
                (false, false) => amp * libm::exp(theta * k),
            };
            iv.clamp_inside(x)
        })
        .collect()
}

fn mixed(iv: &Interval, rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    match below(rng, 5) {
        0 => (0..len).map(|_| iv.probe(rng)).collect(),
        1 => {
            let (y0, y1) = (iv.probe(rng), iv.probe(rng));
            let span = (len.max(2) - 1) as f64;
            (0..len).map(|k| y0 + (y1 - y0) * k as f64 / span).collect()
        }
        2 => tilt(iv, rng, 0.5, len),
        3 => {
            let (inside, outside) = (iv.probe(rng), iv.probe(rng));
            (0..len).map(|_| if uniform(rng) < 0.5 { inside } else { outside }).collect()
        }
        _ => {
            let c = iv.probe(rng);
            let eps = 0.1 * c.abs().max(1e-3);
            (0..len).map(|_| iv.clamp_inside(c + eps * uniform_in(rng, -1.0, 1.0))).collect()
        }
    }
}

impl FunctionSampler {
    pub fn new(family: SamplerFamily, seed: u64) -> Self {
        Self { family, seed }
    }

    pub fn mixed(seed: u64) -> Self {
        Self::new(SamplerFamily::Mixed, seed)
    }

    /// Function number `index`, on `0..len`, from `stream(seed, index)`.
    pub fn draw(&self, phi: &PhiFunction, len: usize, index: u64) -> Result<GridFunction> {
        let iv = phi.interval();
        let mut rng = stream(self.seed, index);
        let values: Vec<f64> = match &self.family {
            SamplerFamily::RandomBounded { lo, hi } => {
                if !(lo <= hi) {
                    return Err(invalid("RANDOM_BOUNDED needs lo ≤ hi"));
                }
                (0..len).map(|_| iv.clamp_inside(uniform_in(&mut rng, *lo, *hi))).collect()
            }
            SamplerFamily::Linear { a, b } => (0..len).map(|k| a + b * k as f64).collect(),
            SamplerFamily::ExpTilt { theta } => tilt(&iv, &mut rng, *theta, len),
            SamplerFamily::Indicator { set } => {
                let (inside, outside) = (iv.probe(&mut rng), iv.probe(&mut rng));
                (0..len).map(|k| if set.contains(&k) { inside } else { outside }).collect()
            }
            SamplerFamily::PerturbedConstant { c, eps } => {
                iv.check(*c)?;
                (0..len).map(|_| iv.clamp_inside(c + eps * uniform_in(&mut rng, -1.0, 1.0))).collect()
            }
            SamplerFamily::Mixed => mixed(&iv, &mut rng, len),
        };
        GridFunction::new(values, iv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_family_stays_inside() {
        let families = [
            SamplerFamily::RandomBounded { lo: -3.0, hi: 5.0 },
            SamplerFamily::ExpTilt { theta: 2.0 },
            SamplerFamily::Indicator { set: alloc::vec![0, 3] },
            SamplerFamily::PerturbedConstant { c: 0.5, eps: 2.0 },
            SamplerFamily::Mixed,
        ];
        let phis = [PhiFunction::p1(), PhiFunction::p2(), PhiFunction::neg_xlognegx(), PhiFunction::neg_gauss_isop()];
        for phi in &phis {
            let iv = phi.interval();
            for fam in &families {
                if let SamplerFamily::PerturbedConstant { c, .. } = fam {
                    if !iv.contains(*c) {
                        continue;
                    }
                }
                let s = FunctionSampler::new(fam.clone(), 9);
                for i in 0..50 {
                    let f = s.draw(phi, 30, i).unwrap();
                    assert!(f.values().iter().all(|&x| iv.contains(x)), "{} {}", phi.family(), fam.name());
                }
            }
        }
    }

    #[test]
    fn linear_leaving_the_interval_is_rejected() {
        let s = FunctionSampler::new(SamplerFamily::Linear { a: 1.0, b: -1.0 }, 0);
        assert!(s.draw(&PhiFunction::p1(), 5, 0).is_err());
        assert!(s.draw(&PhiFunction::p2(), 5, 0).is_ok());
    }

    #[test]
    fn draws_are_reproducible() {
        let s = FunctionSampler::mixed(4);
        assert_eq!(s.draw(&PhiFunction::p1(), 12, 7).unwrap(), s.draw(&PhiFunction::p1(), 12, 7).unwrap());
    }
}
