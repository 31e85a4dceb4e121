//! Numerics for Φ-entropies, A-B-C transforms and the M/M/∞ queue.
//!
//! Everything here is `no_std` with `alloc`: the crate only needs a heap and
//! `libm`. File formats, the command line and thread pools live in the
//! companion `mminf-lab` crate.

#![no_std]

extern crate alloc;

pub mod admissibility;
pub mod error;
pub mod grid;
pub mod interval;
pub mod lab;
pub mod measure;
pub mod measure_identity;
pub mod numeric;
pub mod phi;
pub mod quadrature;
pub mod queue;
pub mod registry;
pub mod report;
pub mod rng;
pub mod scaling;
pub mod simulator;
pub mod transform;
pub mod transform_check;
pub mod tridiag;

pub use error::{Error, Result};
pub use grid::GridFunction;
pub use interval::Interval;
pub use measure::{DiscreteMeasure, MeasureKind};
pub use phi::{PhiFamily, PhiFunction};
pub use queue::QueueParams;
pub use report::VerificationReport;
pub use transform::TransformPoint;
