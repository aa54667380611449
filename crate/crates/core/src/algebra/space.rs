use crate::error::{Error, Result};

/// Number of top Fock levels watched for truncation leakage.
pub const DEFAULT_GUARD_LEVELS: usize = 2;
/// Guard-band population at or above which a state counts as leaking.
pub const LEAK_THRESHOLD: f64 = 1e-6;

pub const DEFAULT_RADIAL_DIM: usize = 40;
pub const DEFAULT_AXIAL_DIM: usize = 20;

/// Truncated single-mode Fock space `|0⟩ … |dim-1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockDim {
    dim: usize,
    guard: usize,
}

impl FockDim {
    pub fn new(dim: usize) -> Result<Self> {
        Self::with_guard(dim, DEFAULT_GUARD_LEVELS)
    }

    pub fn with_guard(dim: usize, guard: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension { dim });
        }
        Ok(Self {
            dim,
            guard: guard.min(dim),
        })
    }

    pub fn dim(self) -> usize {
        self.dim
    }

    pub fn guard(self) -> usize {
        self.guard
    }

    /// Levels below the guard band.
    pub fn usable(self) -> usize {
        self.dim - self.guard
    }

    pub fn is_guard_level(self, n: usize) -> bool {
        n >= self.usable()
    }
}

/// Which of the two out-of-phase modes an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Rocking mode, operators `a`, `a†`.
    Radial,
    /// Stretch mode, operators `c`, `c†`.
    Axial,
}

/// Product space of the radial and axial modes.
///
/// Basis ordering is radial-major: `index = n_a * axial.dim + n_c`. Every
/// dense operator and state in the crate relies on this convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwoModeSpace {
    pub radial: FockDim,
    pub axial: FockDim,
}

impl TwoModeSpace {
    pub fn new(radial: FockDim, axial: FockDim) -> Self {
        Self { radial, axial }
    }

    pub fn with_dims(radial: usize, axial: usize) -> Result<Self> {
        Ok(Self::new(FockDim::new(radial)?, FockDim::new(axial)?))
    }

    pub fn dim(&self) -> usize {
        self.radial.dim() * self.axial.dim()
    }

    pub fn index(&self, n_a: usize, n_c: usize) -> usize {
        debug_assert!(n_a < self.radial.dim() && n_c < self.axial.dim());
        n_a * self.axial.dim() + n_c
    }

    /// Inverse of [`TwoModeSpace::index`]: `(n_a, n_c)`.
    pub fn occupations(&self, index: usize) -> (usize, usize) {
        (index / self.axial.dim(), index % self.axial.dim())
    }

    /// Conserved excitation weight `K = n_a + 2 n_c` of a basis state.
    pub fn k_value(&self, index: usize) -> usize {
        let (n_a, n_c) = self.occupations(index);
        n_a + 2 * n_c
    }

    pub fn max_k(&self) -> usize {
        (self.radial.dim() - 1) + 2 * (self.axial.dim() - 1)
    }

    pub fn is_guard_state(&self, index: usize) -> bool {
        let (n_a, n_c) = self.occupations(index);
        self.radial.is_guard_level(n_a) || self.axial.is_guard_level(n_c)
    }
}

impl Default for TwoModeSpace {
    fn default() -> Self {
        Self::with_dims(DEFAULT_RADIAL_DIM, DEFAULT_AXIAL_DIM).expect("default dims are valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_single_level() {
        assert_eq!(FockDim::new(1), Err(Error::InvalidDimension { dim: 1 }));
        assert!(FockDim::new(2).is_ok());
    }

    #[test]
    fn index_map_is_a_bijection() {
        let space = TwoModeSpace::with_dims(7, 4).unwrap();
        let mut seen = vec![false; space.dim()];
        for n_a in 0..7 {
            for n_c in 0..4 {
                let idx = space.index(n_a, n_c);
                assert!(!seen[idx]);
                seen[idx] = true;
                assert_eq!(space.occupations(idx), (n_a, n_c));
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn guard_band_marks_top_levels() {
        let space = TwoModeSpace::with_dims(6, 4).unwrap();
        assert!(!space.is_guard_state(space.index(3, 1)));
        assert!(space.is_guard_state(space.index(4, 0)));
        assert!(space.is_guard_state(space.index(0, 2)));
    }
}
