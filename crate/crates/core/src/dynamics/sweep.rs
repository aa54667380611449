//! Whole-schedule propagators per `K` sector, built once and applied to many
//! input states (Wigner scans reuse one sweep for every grid point).

use rayon::prelude::*;

use crate::algebra::{Basis, StateVector, TwoModeSpace};
use crate::dynamics::propagate::StepPolicy;
use crate::dynamics::schedule::DetuningProfile;
use crate::dynamics::sectors::{block_decompose, BlockDecomposition, Sector};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, HermitianEigen};

/// Sweep outcome for one sector.
#[derive(Debug, Clone)]
pub struct SectorSweep {
    pub k: usize,
    pub unitary: CMatrix,
    /// `|⟨e_T|U|e_0⟩|²` where `e_0` is the lowest instantaneous eigenstate at
    /// the start and `e_T` the eigenstate reached by following it by maximal
    /// overlap through every step.
    pub adiabatic_fidelity: f64,
    /// Whether the followed eigenstate is still the lowest one at the end.
    pub ends_lowest: bool,
}

#[derive(Debug, Clone)]
pub struct SweepPropagator {
    blocks: BlockDecomposition,
    /// Indexed by `K`; `None` for sectors outside the requested range.
    sweeps: Vec<Option<SectorSweep>>,
    pub xi: f64,
    pub duration: f64,
    pub steps: usize,
}

impl SweepPropagator {
    /// Builds propagators for every sector with `K ≤ k_max`.
    pub fn build(
        space: &TwoModeSpace,
        xi: f64,
        profile: &dyn DetuningProfile,
        policy: &StepPolicy,
        k_max: usize,
    ) -> Result<Self> {
        let blocks = block_decompose(space);
        let wanted: Vec<&Sector> = blocks.sectors().iter().filter(|s| s.k <= k_max).collect();
        policy.validate(profile, xi, space, wanted.iter().copied())?;
        let duration = profile.duration();
        if !duration.is_finite() {
            return Err(Error::InvalidParameter("sweep needs a finite schedule".into()));
        }
        let (steps, dt) = policy.grid(duration);
        let built: Vec<SectorSweep> = wanted
            .par_iter()
            .map(|s| sweep_sector(s, space, xi, profile, steps, dt))
            .collect();
        let mut sweeps = vec![None; blocks.sectors().len()];
        for s in built {
            let k = s.k;
            sweeps[k] = Some(s);
        }
        Ok(Self {
            blocks,
            sweeps,
            xi,
            duration,
            steps,
        })
    }

    /// Convenience for radial-mode inputs with the axial mode in vacuum:
    /// every sector reachable from `|n⟩_r |0⟩_a`.
    pub fn for_radial_inputs(
        space: &TwoModeSpace,
        xi: f64,
        profile: &dyn DetuningProfile,
        policy: &StepPolicy,
    ) -> Result<Self> {
        Self::build(space, xi, profile, policy, space.radial.dim() - 1)
    }

    pub fn space(&self) -> &TwoModeSpace {
        self.blocks.space()
    }

    pub fn sector(&self, k: usize) -> Option<&SectorSweep> {
        self.sweeps.get(k).and_then(|s| s.as_ref())
    }

    pub fn sectors(&self) -> impl Iterator<Item = &SectorSweep> {
        self.sweeps.iter().flatten()
    }

    /// Applies the sweep. Populated sectors without a propagator are an error.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        let Basis::TwoMode(space) = state.basis() else {
            return Err(Error::InvalidParameter("sweep needs a two-mode state".into()));
        };
        if &space != self.space() {
            return Err(Error::DimensionMismatch {
                expected: self.space().dim(),
                found: space.dim(),
            });
        }
        let mut out = CVector::zeros(space.dim());
        for (sector, weight) in self.blocks.sectors().iter().zip(self.blocks.weights(state)) {
            if weight == 0.0 {
                continue;
            }
            let sweep = self.sector(sector.k).ok_or_else(|| {
                Error::InvalidParameter(format!("no sweep propagator for populated sector K = {}", sector.k))
            })?;
            let sub = &sweep.unitary * sector.gather(state.amplitudes());
            sector.scatter(&sub, &mut out);
        }
        StateVector::new(Basis::TwoMode(space), out)
    }

    /// Lowest adiabatic fidelity over sectors carrying more than `min_weight`.
    pub fn worst_fidelity(&self, state: &StateVector, min_weight: f64) -> f64 {
        self.blocks
            .sectors()
            .iter()
            .zip(self.blocks.weights(state))
            .filter(|(_, w)| *w > min_weight)
            .filter_map(|(s, _)| self.sector(s.k))
            .map(|s| s.adiabatic_fidelity)
            .fold(1.0, f64::min)
    }
}

fn best_overlap(eig: &HermitianEigen, v: &CVector) -> usize {
    (0..eig.dim())
        .map(|j| (j, eig.vectors.column(j).dotc(v).norm_sqr()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(j, _)| j)
        .unwrap_or(0)
}

fn sweep_sector(
    sector: &Sector,
    space: &TwoModeSpace,
    xi: f64,
    profile: &dyn DetuningProfile,
    steps: usize,
    dt: f64,
) -> SectorSweep {
    let d = sector.dim();
    let start = HermitianEigen::new(&sector.hamiltonian(space, xi, profile.detuning(0.0)));
    let initial = start.eigenvector(0);
    let mut followed = initial.clone();
    let mut u = CMatrix::identity(d, d);
    for step in 0..steps {
        let t0 = step as f64 * dt;
        let eig = HermitianEigen::new(&sector.hamiltonian(space, xi, profile.mean_detuning(t0, t0 + dt)));
        followed = eig.eigenvector(best_overlap(&eig, &followed));
        u = eig.evolution(dt) * u;
    }
    let end = HermitianEigen::new(&sector.hamiltonian(space, xi, profile.detuning(profile.duration())));
    let j = best_overlap(&end, &followed);
    let target = end.eigenvector(j);
    let adiabatic_fidelity = target.dotc(&(&u * &initial)).norm_sqr();
    SectorSweep {
        k: sector.k,
        unitary: u,
        adiabatic_fidelity,
        ends_lowest: j == 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::product_state;
    use crate::dynamics::propagate::{evolve, Drive};
    use crate::dynamics::schedule::rc_ramp;
    use std::f64::consts::PI;

    #[test]
    fn sweep_matches_stepwise_propagation() {
        let space = TwoModeSpace::with_dims(10, 6).unwrap();
        let xi = 2.0 * PI * 1047.0;
        let ramp = rc_ramp(2.0 * PI * 35e3, -2.0 * PI * 35e3, 0.2e-3, 1e-3).unwrap();
        let policy = StepPolicy::new(2e-6).unwrap();
        let sweep = SweepPropagator::for_radial_inputs(&space, xi, &ramp, &policy).unwrap();
        for n in [0, 2, 5, 7] {
            let psi = product_state(&space, n, 0).unwrap();
            let a = sweep.apply(&psi).unwrap();
            let b = evolve(&psi, Drive::Schedule { xi, profile: &ramp }, ramp.duration, &policy).unwrap();
            assert!((a.amplitudes() - b.amplitudes()).norm() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn missing_sector_is_an_error() {
        let space = TwoModeSpace::with_dims(6, 4).unwrap();
        let ramp = rc_ramp(1e5, -1e5, 1e-3, 5e-3).unwrap();
        let sweep = SweepPropagator::build(&space, 6e3, &ramp, &StepPolicy::new(5e-6).unwrap(), 2).unwrap();
        let psi = product_state(&space, 3, 0).unwrap();
        assert!(sweep.apply(&psi).is_err());
    }
}
