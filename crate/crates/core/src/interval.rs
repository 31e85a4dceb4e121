//! Open intervals of the extended real line.

use rand_core::RngCore;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rng::uniform;

/// Open interval `(lo, hi)`; infinite ends are `±f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Relative margin kept from finite endpoints when probing.
pub const PROBE_MARGIN: f64 = 1e-3;

impl Interval {
    pub const REAL: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };
    pub const POSITIVE: Interval = Interval { lo: 0.0, hi: f64::INFINITY };
    pub const NEGATIVE: Interval = Interval { lo: f64::NEG_INFINITY, hi: 0.0 };
    pub const UNIT: Interval = Interval { lo: 0.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(crate::error::invalid("interval requires lo < hi"));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn check(&self, x: f64) -> Result<f64> {
        if self.contains(x) {
            Ok(x)
        } else {
            Err(Error::Domain { value: x, lo: self.lo, hi: self.hi })
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Distance from `x` to the nearest endpoint (infinite on ℝ).
    pub fn distance_to_boundary(&self, x: f64) -> f64 {
        let a = x - self.lo;
        let b = self.hi - x;
        if a < b {
            a
        } else {
            b
        }
    }

    /// Typical magnitude of points of the interval, used to scale margins.
    pub fn scale(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => self.hi - self.lo,
            (true, false) | (false, true) => 1.0,
            (false, false) => 10.0,
        }
    }

    /// Draws a probe point strictly inside the interval.
    ///
    /// Bounded intervals are sampled uniformly away from the ends, half-lines
    /// log-uniformly over four decades from the finite end, and ℝ uniformly on
    /// `[-10, 10]`.
    pub fn probe<R: RngCore>(&self, rng: &mut R) -> f64 {
        let u = uniform(rng);
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => {
                let w = self.hi - self.lo;
                self.lo + w * (PROBE_MARGIN + (1.0 - 2.0 * PROBE_MARGIN) * u)
            }
            (true, false) => self.lo + libm::pow(10.0, -2.0 + 4.0 * u),
            (false, true) => self.hi - libm::pow(10.0, -2.0 + 4.0 * u),
            (false, false) => -10.0 + 20.0 * u,
        }
    }

    /// Pulls `x` inside the interval, keeping the probe margin from finite ends.
    pub fn clamp_inside(&self, x: f64) -> f64 {
        let margin = PROBE_MARGIN
            * if self.is_bounded() {
                self.hi - self.lo
            } else if self.lo.is_finite() {
                (x - self.lo).abs().clamp(1e-6, 1.0)
            } else {
                (self.hi - x).abs().clamp(1e-6, 1.0)
            };
        let mut y = x;
        if self.lo.is_finite() && y < self.lo + margin {
            y = self.lo + margin;
        }
        if self.hi.is_finite() && y > self.hi - margin {
            y = self.hi - margin;
        }
        y
    }
}

#[derive(Serialize, Deserialize)]
struct Ends {
    lo: Option<f64>,
    hi: Option<f64>,
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        let f = |x: f64| if x.is_finite() { Some(x) } else { None };
        Ends { lo: f(self.lo), hi: f(self.hi) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let e = Ends::deserialize(d)?;
        let lo = e.lo.unwrap_or(f64::NEG_INFINITY);
        let hi = e.hi.unwrap_or(f64::INFINITY);
        Interval::new(lo, hi).map_err(serde::de::Error::custom)
    }
}
