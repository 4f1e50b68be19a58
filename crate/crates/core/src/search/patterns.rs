//! Bounded cache of layer patterns keyed by `(equation, t)`.
//!
//! Memory is bounded by the total number of stored values. When an insert
//! would exceed the budget, the oldest entries are evicted first (FIFO by
//! insertion time); lookups do not refresh an entry's age. Layers larger than
//! the whole budget are computed and returned without being stored.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use crate::equation::LinearEquation;
use crate::error::Result;
use crate::solutions::layer_patterns;

pub type Layer = Arc<Vec<Vec<u32>>>;

/// Default budget: 32M stored values (about 128 MiB).
pub const DEFAULT_CAPACITY: usize = 32 << 20;

#[derive(Debug)]
pub struct PatternCache {
    inner: Mutex<Inner>,
    capacity: usize,
}

#[derive(Debug, Default)]
struct Inner {
    map: HashMap<(LinearEquation, u32), Layer>,
    order: VecDeque<(LinearEquation, u32)>,
    size: usize,
}

fn weight(layer: &[Vec<u32>]) -> usize {
    layer.iter().map(|p| p.len()).sum::<usize>() + 1
}

impl PatternCache {
    pub fn new(capacity: usize) -> Self {
        Self { inner: Mutex::new(Inner::default()), capacity }
    }

    /// Process-wide cache shared by every search.
    pub fn global() -> &'static PatternCache {
        static CACHE: OnceLock<PatternCache> = OnceLock::new();
        CACHE.get_or_init(|| PatternCache::new(DEFAULT_CAPACITY))
    }

    pub fn get(&self, eq: &LinearEquation, t: u32) -> Result<Layer> {
        let key = (eq.clone(), t);
        if let Some(layer) = self.inner.lock().expect("pattern cache poisoned").map.get(&key) {
            return Ok(Arc::clone(layer));
        }
        let layer = Arc::new(layer_patterns(eq, t)?);
        let w = weight(&layer);
        if w > self.capacity {
            return Ok(layer);
        }
        let mut inner = self.inner.lock().expect("pattern cache poisoned");
        if inner.map.contains_key(&key) {
            return Ok(layer);
        }
        while inner.size + w > self.capacity {
            let Some(old) = inner.order.pop_front() else { break };
            if let Some(l) = inner.map.remove(&old) {
                inner.size -= weight(&l);
            }
        }
        inner.size += w;
        inner.order.push_back(key.clone());
        inner.map.insert(key, Arc::clone(&layer));
        Ok(layer)
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("pattern cache poisoned").map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stored_values(&self) -> usize {
        self.inner.lock().expect("pattern cache poisoned").size
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evicts_oldest_first() {
        let eq: LinearEquation = "x+y=z".parse().unwrap();
        let cache = PatternCache::new(40);
        for t in 1..=12 {
            let layer = cache.get(&eq, t).unwrap();
            assert_eq!(*layer, layer_patterns(&eq, t).unwrap());
            assert!(cache.stored_values() <= 40);
        }
        let inner = cache.inner.lock().unwrap();
        // the newest layer survives, the first ones are gone
        assert!(inner.map.contains_key(&(eq.clone(), 12)));
        assert!(!inner.map.contains_key(&(eq.clone(), 1)));
    }
}
