use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::algebra::TwoModeSpace;
use crate::dynamics::sectors::Sector;
use crate::linalg::HermitianEigen;

/// Detuning resolution of the cache key, Hz.
pub const DETUNING_RESOLUTION_HZ: f64 = 1e-3;

/// Snaps `δ` (rad/s) to the cache grid: `(key, snapped δ)`.
pub fn quantize_detuning(delta: f64) -> (i64, f64) {
    let step = 2.0 * std::f64::consts::PI * DETUNING_RESOLUTION_HZ;
    let key = (delta / step).round() as i64;
    (key, key as f64 * step)
}

/// Sector eigendecompositions at fixed `ξ`, keyed by `(K, quantized δ)`.
/// Shared between workers; results do not depend on evaluation order
/// because every entry is computed from the snapped detuning.
#[derive(Debug)]
pub struct EigenCache {
    space: TwoModeSpace,
    xi: f64,
    map: Mutex<HashMap<(usize, i64), Arc<HermitianEigen>>>,
}

impl EigenCache {
    pub fn new(space: TwoModeSpace, xi: f64) -> Self {
        Self {
            space,
            xi,
            map: Mutex::new(HashMap::new()),
        }
    }

    /// Eigendecomposition at the snapped detuning, which is returned too.
    pub fn get(&self, sector: &Sector, delta: f64) -> (f64, Arc<HermitianEigen>) {
        let (key, snapped) = quantize_detuning(delta);
        if let Some(e) = self.map.lock().expect("cache lock").get(&(sector.k, key)) {
            return (snapped, e.clone());
        }
        let eig = Arc::new(HermitianEigen::new(&sector.hamiltonian(&self.space, self.xi, snapped)));
        self.map
            .lock()
            .expect("cache lock")
            .entry((sector.k, key))
            .or_insert(eig.clone());
        (snapped, eig)
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
