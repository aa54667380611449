//! Piecewise-constant propagation restricted to `K` sectors.
//!
//! Each step freezes `δ` at its average over the step and advances every
//! populated sector by the exact exponential of the frozen block.

use std::io::{self, Write};

use crate::algebra::{Basis, StateVector, TwoModeSpace};
use crate::dynamics::hamiltonian::RotatingFrameHamiltonian;
use crate::dynamics::schedule::DetuningProfile;
use crate::dynamics::sectors::{block_decompose, BlockDecomposition, Sector};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, HermitianEigen};

/// Step used unless configured otherwise, s.
pub const DEFAULT_MAX_STEP: f64 = 2e-6;
/// Steps per RC time constant, at least.
pub const STEPS_PER_TIME_CONSTANT: f64 = 50.0;
/// Steps per period of the smallest relevant sector gap, at least.
pub const STEPS_PER_GAP_PERIOD: f64 = 20.0;

const NORM_TOL: f64 = 1e-9;
const K_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPolicy {
    pub max_step: f64,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self {
            max_step: DEFAULT_MAX_STEP,
        }
    }
}

impl StepPolicy {
    pub fn new(max_step: f64) -> Result<Self> {
        if !(max_step > 0.0 && max_step.is_finite()) {
            return Err(Error::StepPolicy(format!("step must be positive, got {max_step}")));
        }
        Ok(Self { max_step })
    }

    /// The same policy, tightened if needed to resolve time constant `tau`.
    pub fn resolving(&self, tau: f64) -> Self {
        Self {
            max_step: self.max_step.min(tau / STEPS_PER_TIME_CONSTANT),
        }
    }

    pub fn halved(&self) -> Self {
        Self {
            max_step: self.max_step / 2.0,
        }
    }

    /// Uniform grid covering `[0, t_final]`: `(count, dt)`.
    pub fn grid(&self, t_final: f64) -> (usize, f64) {
        if t_final <= 0.0 {
            return (0, 0.0);
        }
        let n = (t_final / self.max_step).ceil().max(1.0) as usize;
        (n, t_final / n as f64)
    }

    /// Checks the step against the profile's time constant and the smallest
    /// gap of the given sectors over the detuning range.
    pub fn validate<'a>(
        &self,
        profile: &dyn DetuningProfile,
        xi: f64,
        space: &TwoModeSpace,
        sectors: impl IntoIterator<Item = &'a Sector>,
    ) -> Result<()> {
        if let Some(tau) = profile.time_constant() {
            if self.max_step > tau / STEPS_PER_TIME_CONSTANT {
                return Err(Error::StepPolicy(format!(
                    "step {:e} s exceeds tau/{STEPS_PER_TIME_CONSTANT} = {:e} s",
                    self.max_step,
                    tau / STEPS_PER_TIME_CONSTANT
                )));
            }
        }
        let (lo, hi) = profile.range();
        if lo == hi {
            // frozen Hamiltonian: every step is exact
            return Ok(());
        }
        let deltas = sample_range(lo, hi);
        let gap = sectors
            .into_iter()
            .filter_map(|s| smallest_gap(s, space, xi, &deltas))
            .min_by(f64::total_cmp);
        if let Some(gap) = gap {
            let limit = 2.0 * std::f64::consts::PI / gap / STEPS_PER_GAP_PERIOD;
            if self.max_step > limit {
                return Err(Error::StepPolicy(format!(
                    "step {:e} s exceeds 1/{STEPS_PER_GAP_PERIOD} of the gap period ({:e} s)",
                    self.max_step, limit
                )));
            }
        }
        Ok(())
    }
}

fn sample_range(lo: f64, hi: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..=16).map(|i| lo + (hi - lo) * i as f64 / 16.0).collect();
    if lo < 0.0 && hi > 0.0 {
        v.push(0.0);
    }
    v
}

/// Smallest adjacent eigenvalue spacing of a sector over a set of detunings.
pub fn smallest_gap(sector: &Sector, space: &TwoModeSpace, xi: f64, deltas: &[f64]) -> Option<f64> {
    if sector.dim() < 2 {
        return None;
    }
    deltas
        .iter()
        .flat_map(|&d| {
            let eig = HermitianEigen::new(&sector.hamiltonian(space, xi, d));
            eig.values.windows(2).map(|w| w[1] - w[0]).collect::<Vec<_>>()
        })
        .filter(|g| *g > 1e-12)
        .min_by(f64::total_cmp)
}

/// What drives the evolution.
#[derive(Debug, Clone, Copy)]
pub enum Drive<'a> {
    /// Fixed Hamiltonian; blocks are cut out of its dense matrix.
    Hamiltonian(&'a RotatingFrameHamiltonian),
    /// Coupling `ξ` with a time-dependent detuning.
    Schedule { xi: f64, profile: &'a dyn DetuningProfile },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    /// Steps replayed last to first with `exp(+iH dt)`: the adjoint of the
    /// forward propagator.
    Backward,
}

/// Which basis states to follow, and how often to sample.
#[derive(Debug, Clone)]
pub struct Recording {
    pub tracked: Vec<(usize, usize)>,
    /// Record every `every`-th step (the final step is always recorded).
    pub every: usize,
}

impl Recording {
    pub fn final_only() -> Self {
        Self {
            tracked: Vec::new(),
            every: usize::MAX,
        }
    }

    pub fn every_step(tracked: Vec<(usize, usize)>) -> Self {
        Self { tracked, every: 1 }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub tracked: Vec<(usize, usize)>,
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    /// `populations[sample][j]` is the population of `tracked[j]`.
    pub populations: Vec<Vec<f64>>,
    pub norms: Vec<f64>,
    pub k_expect: Vec<f64>,
}

impl Trajectory {
    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trajectory has at least one sample")
    }

    /// Columns `t_s`, one `p_<n_a>_<n_c>` per tracked state, `norm`, `K_expect`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let mut header = vec!["t_s".to_string()];
        header.extend(self.tracked.iter().map(|(a, c)| format!("p_{a}_{c}")));
        header.push("norm".into());
        header.push("K_expect".into());
        writeln!(w, "{}", header.join(","))?;
        for (i, t) in self.times.iter().enumerate() {
            let mut row = vec![format!("{t:.9e}")];
            row.extend(self.populations[i].iter().map(|p| format!("{p:.12e}")));
            row.push(format!("{:.15}", self.norms[i]));
            row.push(format!("{:.12}", self.k_expect[i]));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn two_mode_space(state: &StateVector) -> Result<TwoModeSpace> {
    match state.basis() {
        Basis::TwoMode(s) => Ok(s),
        Basis::Mode(_) => Err(Error::InvalidParameter("propagation needs a two-mode state".into())),
    }
}

/// Propagates `state` to `t_final`, recording observables along the way.
pub fn propagate(
    state: &StateVector,
    drive: Drive<'_>,
    t_final: f64,
    policy: &StepPolicy,
    recording: &Recording,
) -> Result<Trajectory> {
    run(state, drive, t_final, policy, recording, Direction::Forward)
}

/// Final state only.
pub fn evolve(state: &StateVector, drive: Drive<'_>, t_final: f64, policy: &StepPolicy) -> Result<StateVector> {
    let traj = run(
        state,
        drive,
        t_final,
        policy,
        &Recording::final_only(),
        Direction::Forward,
    )?;
    Ok(traj.states.into_iter().last().expect("final sample"))
}

/// Applies the adjoint of the forward propagator over `[0, t_final]`.
pub fn evolve_backward(
    state: &StateVector,
    drive: Drive<'_>,
    t_final: f64,
    policy: &StepPolicy,
) -> Result<StateVector> {
    let traj = run(
        state,
        drive,
        t_final,
        policy,
        &Recording::final_only(),
        Direction::Backward,
    )?;
    Ok(traj.states.into_iter().last().expect("final sample"))
}

struct ActiveSector<'b> {
    sector: &'b Sector,
    amps: CVector,
    /// Cached step unitary when the Hamiltonian is frozen for the whole run.
    fixed: Option<CMatrix>,
}

fn run(
    state: &StateVector,
    drive: Drive<'_>,
    t_final: f64,
    policy: &StepPolicy,
    recording: &Recording,
    direction: Direction,
) -> Result<Trajectory> {
    let space = two_mode_space(state)?;
    state.check_guard()?;
    if !(t_final >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t_final must be nonnegative, got {t_final}"
        )));
    }
    let blocks = match drive {
        Drive::Hamiltonian(h) => {
            if h.space != space {
                return Err(Error::DimensionMismatch {
                    expected: h.space.dim(),
                    found: space.dim(),
                });
            }
            block_decompose(&space)
        }
        Drive::Schedule { profile, .. } => {
            if t_final > profile.duration() * (1.0 + 1e-12) {
                return Err(Error::InvalidParameter(format!(
                    "t_final {t_final:e} s beyond schedule duration {:e} s",
                    profile.duration()
                )));
            }
            block_decompose(&space)
        }
    };
    let weights = blocks.weights(state);
    let mut active: Vec<ActiveSector> = blocks
        .sectors()
        .iter()
        .zip(&weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(s, _)| ActiveSector {
            sector: s,
            amps: s.gather(state.amplitudes()),
            fixed: None,
        })
        .collect();

    if let Drive::Schedule { xi, profile } = drive {
        policy.validate(profile, xi, &space, active.iter().map(|a| a.sector))?;
    }

    let (n_steps, dt) = policy.grid(t_final);
    let signed_dt = match direction {
        Direction::Forward => dt,
        Direction::Backward => -dt,
    };
    if let Drive::Hamiltonian(h) = drive {
        for a in &mut active {
            let block = blocks.extract(h.matrix().matrix(), a.sector.k)?;
            a.fixed = Some(HermitianEigen::new(&block).evolution(signed_dt));
        }
    }

    let k0 = blocks.k_expectation(state);
    let mut traj = Trajectory {
        tracked: recording.tracked.clone(),
        times: Vec::new(),
        states: Vec::new(),
        populations: Vec::new(),
        norms: Vec::new(),
        k_expect: Vec::new(),
    };
    let mut record = |t: f64, active: &[ActiveSector]| -> Result<()> {
        let mut amps = CVector::zeros(space.dim());
        for a in active {
            a.sector.scatter(&a.amps, &mut amps);
        }
        let s = StateVector::from_parts_unchecked(Basis::TwoMode(space), amps);
        let norm = s.norm();
        let k = blocks.k_expectation(&s);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Contract(format!("norm drifted to {norm} at t = {t:e} s")));
        }
        if (k - k0).abs() > K_TOL * k0.max(1.0) {
            return Err(Error::Contract(format!("<K> drifted from {k0} to {k} at t = {t:e} s")));
        }
        traj.times.push(t);
        traj.populations.push(
            recording
                .tracked
                .iter()
                .map(|&(a, c)| s.population(space.index(a, c)))
                .collect(),
        );
        traj.norms.push(norm);
        traj.k_expect.push(k);
        traj.states.push(s);
        Ok(())
    };

    if recording.every != usize::MAX || n_steps == 0 {
        record(0.0, &active)?;
    }
    for step in 0..n_steps {
        // forward runs steps 0..n, backward replays n-1..0
        let idx = match direction {
            Direction::Forward => step,
            Direction::Backward => n_steps - 1 - step,
        };
        for a in &mut active {
            let u = match (&a.fixed, drive) {
                (Some(u), _) => u.clone(),
                (None, Drive::Schedule { xi, profile }) => {
                    let t0 = idx as f64 * dt;
                    let delta = profile.mean_detuning(t0, t0 + dt);
                    HermitianEigen::new(&a.sector.hamiltonian(&space, xi, delta)).evolution(signed_dt)
                }
                (None, Drive::Hamiltonian(_)) => unreachable!("fixed unitaries are precomputed"),
            };
            a.amps = u * &a.amps;
        }
        let done = step + 1;
        if done == n_steps || (recording.every != usize::MAX && done % recording.every == 0) {
            record(done as f64 * dt, &active)?;
        }
    }
    let last = traj.states.last().expect("recorded");
    last.check_guard()?;
    Ok(traj)
}

/// Block decomposition with the populated sectors of a state.
pub fn populated_sectors(blocks: &BlockDecomposition, state: &StateVector) -> Vec<usize> {
    blocks
        .weights(state)
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 0.0)
        .map(|(i, _)| blocks.sectors()[i].k)
        .collect()
}
