//! Eigenvalues of the `K = 2` sector across resonance.
//!
//! The sector holds `|2,0⟩` and `|0,1⟩`; its two levels anticross at
//! `δ = 0` with splitting `2√2 ξ`.

use std::io::{self, Write};

use crate::algebra::TwoModeSpace;
use crate::dynamics::block_decompose;
use crate::error::{Error, Result};
use crate::linalg::HermitianEigen;
use crate::trap::angular_to_hz;

const SECTOR_K: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumBranch {
    /// rad/s
    pub deltas: Vec<f64>,
    /// Lower and upper eigenvalue per detuning, rad/s.
    pub branches: Vec<[f64; 2]>,
    /// Smallest splitting, refined between grid points, rad/s.
    pub min_gap: f64,
    pub min_gap_delta: f64,
}

impl SpectrumBranch {
    pub fn gaps(&self) -> impl Iterator<Item = f64> + '_ {
        self.branches.iter().map(|b| b[1] - b[0])
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "delta_hz,branch0_hz,branch1_hz")?;
        for (d, b) in self.deltas.iter().zip(&self.branches) {
            writeln!(
                w,
                "{:.6},{:.6},{:.6}",
                angular_to_hz(*d),
                angular_to_hz(b[0]),
                angular_to_hz(b[1])
            )?;
        }
        Ok(())
    }
}

/// Evenly spaced detunings, rad/s.
pub fn detuning_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

fn levels(xi: f64, delta: f64) -> [f64; 2] {
    let space = TwoModeSpace::with_dims(3, 2).expect("small space");
    let blocks = block_decompose(&space);
    let sector = blocks.sector(SECTOR_K).expect("K = 2 sector");
    let eig = HermitianEigen::new(&sector.hamiltonian(&space, xi, delta));
    [eig.values[0], eig.values[1]]
}

/// `K = 2` levels over `deltas`, which must be sorted and straddle zero.
pub fn avoided_crossing_spectrum(deltas: &[f64], xi: f64) -> Result<SpectrumBranch> {
    if deltas.len() < 2 || deltas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter(
            "detunings must be strictly increasing with at least two points".into(),
        ));
    }
    if !(deltas[0] <= 0.0 && *deltas.last().unwrap() >= 0.0) {
        return Err(Error::InvalidParameter("detuning range must span zero".into()));
    }
    let branches: Vec<[f64; 2]> = deltas.iter().map(|&d| levels(xi, d)).collect();
    let gap = |d: f64| {
        let l = levels(xi, d);
        l[1] - l[0]
    };
    let i_min = (0..deltas.len())
        .min_by(|&a, &b| (branches[a][1] - branches[a][0]).total_cmp(&(branches[b][1] - branches[b][0])))
        .expect("nonempty");
    let lo = deltas[i_min.saturating_sub(1)];
    let hi = deltas[(i_min + 1).min(deltas.len() - 1)];
    let (min_gap_delta, min_gap) = golden_min(gap, lo, hi, deltas[i_min]);
    Ok(SpectrumBranch {
        deltas: deltas.to_vec(),
        branches,
        min_gap,
        min_gap_delta,
    })
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, best: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
        if b - a <= f64::EPSILON * (a.abs() + b.abs()) {
            break;
        }
    }
    let mut cand = [(best, f(best)), (x1, f1), (x2, f2)];
    cand.sort_by(|p, q| p.1.total_cmp(&q.1));
    cand[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trap::{hz_to_angular, ModeParams};

    #[test]
    fn gap_matches_two_level_formula() {
        let xi = ModeParams::reference().xi;
        let deltas = detuning_grid(hz_to_angular(-20e3), hz_to_angular(20e3), 81);
        let s = avoided_crossing_spectrum(&deltas, xi).unwrap();
        for (d, g) in deltas.iter().zip(s.gaps()) {
            let expect = (d * d + 8.0 * xi * xi).sqrt();
            assert!((g - expect).abs() <= 1e-10 * expect, "{g} vs {expect}");
        }
        assert!(s.min_gap_delta.abs() < 1e-3);
        assert!((s.min_gap / (8f64.sqrt() * xi) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn refinement_finds_zero_off_grid() {
        let xi = 1000.0;
        let deltas = detuning_grid(-1.0e5, 0.7e5, 10);
        let s = avoided_crossing_spectrum(&deltas, xi).unwrap();
        assert!((s.min_gap / (8f64.sqrt() * xi) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn far_detuned_branches_are_bare() {
        let xi = 1.0;
        let s = avoided_crossing_spectrum(&[-1e6, 0.0, 1e6], xi).unwrap();
        assert!(s.branches[2][0].abs() < 1e-5 && (s.branches[2][1] - 1e6).abs() < 1e-5);
        assert!((s.branches[0][0] + 1e6).abs() < 1e-5 && s.branches[0][1].abs() < 1e-5);
    }

    #[test]
    fn range_must_span_zero() {
        assert!(avoided_crossing_spectrum(&[1.0, 2.0], 1.0).is_err());
        assert!(avoided_crossing_spectrum(&[1.0, -2.0], 1.0).is_err());
    }
}
