use crate::algebra::{StateVector, TwoModeSpace};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};

/// Basis states sharing one value of `K = n_a + 2 n_c`, ordered by
/// increasing `n_c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sector {
    pub k: usize,
    pub indices: Vec<usize>,
}

impl Sector {
    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    /// Sector block of `H/ħ` built from matrix elements directly: diagonal
    /// `δ n_c`, and `ξ √(n_a (n_a − 1) (n_c + 1))` between `(n_a, n_c)` and
    /// `(n_a − 2, n_c + 1)`.
    pub fn hamiltonian(&self, space: &TwoModeSpace, xi: f64, delta: f64) -> CMatrix {
        let d = self.dim();
        let mut h = CMatrix::zeros(d, d);
        for (p, &idx) in self.indices.iter().enumerate() {
            let (n_a, n_c) = space.occupations(idx);
            h[(p, p)] = C64::from(delta * n_c as f64);
            if p + 1 < d {
                let el = xi * ((n_a * (n_a - 1) * (n_c + 1)) as f64).sqrt();
                h[(p, p + 1)] = C64::from(el);
                h[(p + 1, p)] = C64::from(el);
            }
        }
        h
    }

    pub fn gather(&self, amps: &CVector) -> CVector {
        CVector::from_iterator(self.dim(), self.indices.iter().map(|&i| amps[i]))
    }

    pub fn scatter(&self, sub: &CVector, out: &mut CVector) {
        for (p, &i) in self.indices.iter().enumerate() {
            out[i] = sub[p];
        }
    }
}

/// Partition of a two-mode basis into `K` sectors.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    space: TwoModeSpace,
    sectors: Vec<Sector>,
}

pub fn block_decompose(space: &TwoModeSpace) -> BlockDecomposition {
    let mut sectors: Vec<Sector> = (0..=space.max_k()).map(|k| Sector { k, indices: Vec::new() }).collect();
    for n_c in 0..space.axial.dim() {
        for n_a in 0..space.radial.dim() {
            sectors[n_a + 2 * n_c].indices.push(space.index(n_a, n_c));
        }
    }
    sectors.retain(|s| !s.indices.is_empty());
    BlockDecomposition { space: *space, sectors }
}

impl BlockDecomposition {
    pub fn space(&self) -> &TwoModeSpace {
        &self.space
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn sector(&self, k: usize) -> Option<&Sector> {
        // sectors are contiguous in K starting at 0
        self.sectors.get(k).filter(|s| s.k == k)
    }

    /// Sub-block of a dense operator restricted to one sector.
    pub fn extract(&self, full: &CMatrix, k: usize) -> Result<CMatrix> {
        let sector = self
            .sector(k)
            .ok_or_else(|| Error::InvalidParameter(format!("no sector with K = {k}")))?;
        let d = sector.dim();
        Ok(CMatrix::from_fn(d, d, |r, c| {
            full[(sector.indices[r], sector.indices[c])]
        }))
    }

    /// Probability weight of each sector, indexed like [`Self::sectors`].
    pub fn weights(&self, state: &StateVector) -> Vec<f64> {
        self.sectors
            .iter()
            .map(|s| s.indices.iter().map(|&i| state.population(i)).sum())
            .collect()
    }

    /// `⟨K⟩`
    pub fn k_expectation(&self, state: &StateVector) -> f64 {
        self.sectors
            .iter()
            .zip(self.weights(state))
            .map(|(s, w)| s.k as f64 * w)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::hamiltonian::build_hamiltonian;
    use crate::linalg::max_abs;
    use std::collections::BTreeMap;

    #[test]
    fn small_space_k2_sector() {
        let space = TwoModeSpace::with_dims(5, 3).unwrap();
        let blocks = block_decompose(&space);
        let k2 = blocks.sector(2).unwrap();
        let occ: Vec<_> = k2.indices.iter().map(|&i| space.occupations(i)).collect();
        assert_eq!(occ, vec![(2, 0), (0, 1)]);
    }

    #[test]
    fn sector_count_matches_enumeration() {
        for (ra, ac) in [(2, 2), (5, 3), (8, 5), (3, 7), (40, 20)] {
            let space = TwoModeSpace::with_dims(ra, ac).unwrap();
            let mut by_k: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for idx in 0..space.dim() {
                let (n_a, n_c) = space.occupations(idx);
                by_k.entry(n_a + 2 * n_c).or_default().push(idx);
            }
            let blocks = block_decompose(&space);
            assert_eq!(blocks.sectors().len(), by_k.len());
            assert_eq!(blocks.sectors().len(), ra + 2 * (ac - 1) - 1 + 1);
            let mut covered = vec![0usize; space.dim()];
            for s in blocks.sectors() {
                let mut want = by_k[&s.k].clone();
                let mut got = s.indices.clone();
                want.sort();
                got.sort();
                assert_eq!(got, want);
                for &i in &s.indices {
                    covered[i] += 1;
                }
            }
            assert!(covered.iter().all(|&c| c == 1));
        }
    }

    #[test]
    fn analytic_blocks_match_dense_assembly() {
        let space = TwoModeSpace::with_dims(8, 5).unwrap();
        let (xi, delta) = (0.9, -1.7);
        let dense = build_hamiltonian(xi, delta, &space).unwrap();
        let blocks = block_decompose(&space);
        let mut covered = 0.0;
        for s in blocks.sectors() {
            let from_dense = blocks.extract(dense.matrix().matrix(), s.k).unwrap();
            let analytic = s.hamiltonian(&space, xi, delta);
            assert!(max_abs(&(from_dense - &analytic)) < 1e-14, "K = {}", s.k);
            covered += analytic.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        // no weight of H lies outside the sector blocks
        let total: f64 = dense.matrix().matrix().iter().map(|z| z.norm_sqr()).sum();
        assert!((total - covered).abs() < 1e-10);
    }
}
