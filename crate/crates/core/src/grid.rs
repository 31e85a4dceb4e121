//! Real functions on a finite window of consecutive integers.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;

/// Values `f(start), …, f(start + len - 1)` with a declared codomain.
///
/// Reading outside the window is an error rather than an extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    start: i64,
    values: Vec<f64>,
    codomain: Interval,
}

impl GridFunction {
    /// Checks every value lies strictly inside `codomain`.
    pub fn new(values: Vec<f64>, codomain: Interval) -> Result<Self> {
        Self::with_start(0, values, codomain)
    }

    pub fn with_start(start: i64, values: Vec<f64>, codomain: Interval) -> Result<Self> {
        for &v in &values {
            codomain.check(v)?;
        }
        Ok(Self { start, values, codomain })
    }

    /// A real-valued function on `0..len`, no codomain restriction.
    pub fn real(values: Vec<f64>) -> Self {
        Self { start: 0, values, codomain: Interval::REAL }
    }

    pub fn from_fn(len: usize, codomain: Interval, f: impl FnMut(usize) -> f64) -> Result<Self> {
        Self::new((0..len).map(f).collect(), codomain)
    }

    /// `h(n) = n` on `0..len`.
    pub fn identity(len: usize) -> Self {
        Self::real((0..len).map(|n| n as f64).collect())
    }

    pub fn constant(c: f64, len: usize) -> Self {
        Self::real(alloc::vec![c; len])
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// One past the last index of the window.
    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn codomain(&self) -> Interval {
        self.codomain
    }

    pub fn covers(&self, lo: i64, hi: i64) -> bool {
        lo >= self.start && hi < self.end()
    }

    pub fn get(&self, n: i64) -> Result<f64> {
        if n < self.start || n >= self.end() {
            return Err(Error::Window { index: n, len: self.values.len() });
        }
        Ok(self.values[(n - self.start) as usize])
    }

    /// Value at `n`; panics outside the window.
    pub fn at(&self, n: i64) -> f64 {
        match self.get(n) {
            Ok(v) => v,
            Err(_) => panic!("index {n} outside window [{}, {})", self.start, self.end()),
        }
    }

    /// `f(1 + ·)`.
    pub fn shift(&self) -> Self {
        Self { start: self.start - 1, values: self.values.clone(), codomain: self.codomain }
    }

    /// Restricts the window to `[lo, hi)`.
    pub fn restrict(&self, lo: i64, hi: i64) -> Result<Self> {
        if !self.covers(lo, hi - 1) || hi <= lo {
            return Err(Error::Window { index: if lo < self.start { lo } else { hi - 1 }, len: self.values.len() });
        }
        let a = (lo - self.start) as usize;
        let b = (hi - self.start) as usize;
        Ok(Self { start: lo, values: self.values[a..b].to_vec(), codomain: self.codomain })
    }

    /// Pointwise map into ℝ.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { start: self.start, values: self.values.iter().map(|&v| f(v)).collect(), codomain: Interval::REAL }
    }

    /// Pointwise map that also sees the index.
    pub fn map_indexed(&self, f: impl Fn(i64, f64) -> f64) -> Self {
        let values = self.values.iter().enumerate().map(|(i, &v)| f(self.start + i as i64, v)).collect();
        Self { start: self.start, values, codomain: Interval::REAL }
    }

    /// Pointwise combination on the common window.
    pub fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let lo = self.start.max(other.start);
        let hi = self.end().min(other.end()).max(lo);
        let values = (lo..hi).map(|n| f(self.at(n), other.at(n))).collect();
        Self { start: lo, values, codomain: Interval::REAL }
    }

    /// `Df(n) = f(n+1) - f(n)`, defined on `[start, end - 1)`.
    pub fn d_forward(&self) -> Self {
        let values = self.values.windows(2).map(|w| w[1] - w[0]).collect();
        Self { start: self.start, values, codomain: Interval::REAL }
    }

    /// `D*f(n) = f(n-1) - f(n)`, defined on `[start + 1, end)`.
    pub fn d_backward(&self) -> Self {
        let values = self.values.windows(2).map(|w| w[0] - w[1]).collect();
        Self { start: self.start + 1, values, codomain: Interval::REAL }
    }

    /// Re-declares the codomain, checking every value.
    pub fn with_codomain(self, codomain: Interval) -> Result<Self> {
        Self::with_start(self.start, self.values, codomain)
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradients_of_identity_and_constants() {
        let h = GridFunction::identity(6);
        assert!(h.d_forward().values().iter().all(|&v| v == 1.0));
        assert!(h.d_backward().values().iter().all(|&v| v == -1.0));
        assert_eq!(h.d_backward().start(), 1);
        let c = GridFunction::constant(3.5, 5);
        assert!(c.d_forward().values().iter().all(|&v| v == 0.0));
        assert!(c.d_backward().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn discrete_laplacian_of_square() {
        let f = GridFunction::real((0..8).map(|n| (n * n) as f64).collect());
        let dds = f.d_backward().d_forward();
        let dsd = f.d_forward().d_backward();
        for n in 1..6 {
            assert_eq!(dds.at(n), -2.0);
            assert_eq!(dsd.at(n), -2.0);
            let minus = -(f.d_forward().at(n) + f.d_backward().at(n));
            assert_eq!(minus, -2.0);
        }
    }

    #[test]
    fn window_errors() {
        let f = GridFunction::identity(3);
        assert!(f.get(-1).is_err());
        assert!(f.get(3).is_err());
        assert_eq!(f.shift().at(-1), 0.0);
        assert!(GridFunction::new(alloc::vec![1.0, -1.0], Interval::POSITIVE).is_err());
        assert_eq!(f.restrict(1, 3).unwrap().values(), &[1.0, 2.0]);
    }
}
