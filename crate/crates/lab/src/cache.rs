//! Shared cache of Mehler transition laws.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use mminf_core::queue::mehler_law;
use mminf_core::{DiscreteMeasure, QueueParams};

type Key = (u64, u64, u64, usize);

/// Transition laws keyed by `(λ, μ, t, n)`, safe to share across threads.
/// Readers never block each other; a miss computes outside the lock, so two
/// racing threads may both compute the same (identical) law.
#[derive(Debug, Default)]
pub struct MehlerCache {
    laws: RwLock<HashMap<Key, Arc<DiscreteMeasure>>>,
}

impl MehlerCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn law(&self, params: &QueueParams, t: f64, n: usize) -> mminf_core::Result<Arc<DiscreteMeasure>> {
        let key = (params.lambda.to_bits(), params.mu.to_bits(), t.to_bits(), n);
        if let Some(hit) = self.laws.read().expect("cache lock").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let law = Arc::new(mehler_law(params, t, n)?);
        let mut w = self.laws.write().expect("cache lock");
        Ok(Arc::clone(w.entry(key).or_insert(law)))
    }

    pub fn len(&self) -> usize {
        self.laws.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
