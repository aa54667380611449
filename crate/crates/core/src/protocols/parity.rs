//! Parity readout through an adiabatic sweep of the detuning.
//!
//! Sweeping `δ` slowly from above to below resonance carries `|n⟩_r|0⟩_a`
//! to `|n mod 2⟩_r |⌊n/2⌋⟩_a`, so the presence of a radial phonon after the
//! sweep reveals the parity of the initial radial state.

use std::fmt;

use crate::algebra::{StateVector, TwoModeSpace, LEAK_THRESHOLD};
use crate::dynamics::{rc_ramp, RampSchedule, StepPolicy, SweepPropagator};
use crate::error::{Error, Result};
use crate::protocols::measurement::{measurement_channel, MeasurementModel, ParityResult};
use crate::trap::hz_to_angular;

/// Parking detuning before and after state manipulation, Hz.
pub const PARKING_DETUNING_HZ: f64 = 35e3;
/// RC constant of the slow (adiabatic) ramp, s.
pub const TAU_SLOW: f64 = 2e-3;
/// RC constant of the fast (diabatic) ramp, s.
pub const TAU_FAST: f64 = 20e-6;
/// Sectors whose followed eigenstate ends below this fidelity raise a flag.
pub const ADIABATIC_FIDELITY_MIN: f64 = 0.99;
/// Sectors lighter than this are ignored when checking adiabaticity.
pub const FLAG_WEIGHT: f64 = 1e-3;

/// Per-evaluation warnings; never fatal.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Flags {
    pub truncation_leak: bool,
    pub adiabaticity: bool,
}

impl Flags {
    pub fn any(&self) -> bool {
        self.truncation_leak || self.adiabaticity
    }

    pub fn merge(self, other: Flags) -> Flags {
        Flags {
            truncation_leak: self.truncation_leak || other.truncation_leak,
            adiabaticity: self.adiabaticity || other.adiabaticity,
        }
    }
}

impl fmt::Display for Flags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.truncation_leak {
            parts.push("leak");
        }
        if self.adiabaticity {
            parts.push("adiabatic");
        }
        if parts.is_empty() {
            f.write_str("ok")
        } else {
            f.write_str(&parts.join("|"))
        }
    }
}

/// `+δ_park → −δ_park` over five RC constants.
pub fn parity_sweep(parking: f64, tau_rc: f64) -> Result<RampSchedule> {
    RampSchedule::minimal(parking, -parking, tau_rc)
}

/// The standard slow sweep at the default parking detuning.
pub fn default_parity_sweep() -> RampSchedule {
    parity_sweep(hz_to_angular(PARKING_DETUNING_HZ), TAU_SLOW).expect("default sweep is valid")
}

#[derive(Debug, Clone)]
pub struct SweepReadout {
    /// Probability of at least one radial phonon after the sweep.
    pub p_phonon: f64,
    pub axial_distribution: Vec<f64>,
    pub radial_distribution: Vec<f64>,
    pub flags: Flags,
    pub worst_fidelity: f64,
}

/// A prepared sweep that can read out many radial states.
#[derive(Debug, Clone)]
pub struct AdiabaticReadout {
    sweep: SweepPropagator,
    ramp: RampSchedule,
}

impl AdiabaticReadout {
    pub fn new(space: &TwoModeSpace, xi: f64, ramp: RampSchedule, policy: &StepPolicy) -> Result<Self> {
        let end = crate::dynamics::DetuningProfile::detuning(&ramp, ramp.duration);
        if !(ramp.delta_start > 0.0 && end < 0.0) {
            return Err(Error::InvalidParameter(
                "parity readout needs a sweep from above to below resonance".into(),
            ));
        }
        let sweep = SweepPropagator::for_radial_inputs(space, xi, &ramp, policy)?;
        Ok(Self { sweep, ramp })
    }

    pub fn ramp(&self) -> &RampSchedule {
        &self.ramp
    }

    pub fn space(&self) -> &TwoModeSpace {
        self.sweep.space()
    }

    pub fn sweep(&self) -> &SweepPropagator {
        &self.sweep
    }

    /// Embeds a radial state with the axial mode in vacuum and sweeps it.
    pub fn read(&self, radial: &StateVector) -> Result<SweepReadout> {
        let space = *self.space();
        let mut flags = Flags {
            truncation_leak: radial.guard_population() >= LEAK_THRESHOLD,
            ..Flags::default()
        };
        let input = radial.with_axial_vacuum(&space)?;
        let out = self.sweep.apply(&input)?;
        flags.truncation_leak |= out.guard_population() >= LEAK_THRESHOLD;
        let worst_fidelity = self.sweep.worst_fidelity(&input, FLAG_WEIGHT);
        flags.adiabaticity = worst_fidelity < ADIABATIC_FIDELITY_MIN;
        let radial_distribution = out.mode_distribution(false);
        let p_phonon = radial_distribution.iter().skip(1).sum::<f64>().clamp(0.0, 1.0);
        Ok(SweepReadout {
            p_phonon,
            axial_distribution: out.mode_distribution(true),
            radial_distribution,
            flags,
            worst_fidelity,
        })
    }

    /// Sweep, map and estimate parity; `stream` selects the sampling stream.
    pub fn parity(&self, radial: &StateVector, model: &MeasurementModel, stream: u64) -> Result<ParityOutcome> {
        let readout = self.read(radial)?;
        let channel = measurement_channel(readout.p_phonon, model, stream)?;
        Ok(ParityOutcome {
            result: ParityResult::from_channel(&channel, model),
            readout,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ParityOutcome {
    pub result: ParityResult,
    pub readout: SweepReadout,
}

/// One-shot parity measurement of a radial state.
pub fn adiabatic_parity(
    radial: &StateVector,
    space: &TwoModeSpace,
    xi: f64,
    ramp: RampSchedule,
    policy: &StepPolicy,
    model: &MeasurementModel,
) -> Result<ParityOutcome> {
    AdiabaticReadout::new(space, xi, ramp, policy)?.parity(radial, model, 0)
}

/// Fast-ramp counterpart used to check that a 20 µs ramp is diabatic.
pub fn fast_ramp(parking: f64) -> Result<RampSchedule> {
    rc_ramp(parking, -parking, TAU_FAST, 5.0 * TAU_FAST)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{make_state, StateSpec};
    use crate::trap::ModeParams;

    fn setup() -> (TwoModeSpace, f64, AdiabaticReadout) {
        let space = TwoModeSpace::with_dims(12, 8).unwrap();
        let xi = ModeParams::reference().xi;
        let readout = AdiabaticReadout::new(&space, xi, default_parity_sweep(), &StepPolicy::default()).unwrap();
        (space, xi, readout)
    }

    #[test]
    fn fock_two_and_three_map_to_parity() {
        let (space, _, readout) = setup();
        let two = make_state(space.radial, &StateSpec::Fock(2)).unwrap();
        let out = readout.parity(&two, &MeasurementModel::ideal(), 0).unwrap();
        assert!((out.result.parity_estimate - 1.0).abs() < 0.02);
        assert!(out.readout.axial_distribution[1] > 0.99);
        let three = make_state(space.radial, &StateSpec::Fock(3)).unwrap();
        let out = readout.parity(&three, &MeasurementModel::ideal(), 0).unwrap();
        assert!((out.result.parity_estimate + 1.0).abs() < 0.02);
        assert!(out.readout.axial_distribution[1] > 0.99);
    }

    #[test]
    fn rejects_upward_sweep() {
        let space = TwoModeSpace::with_dims(6, 4).unwrap();
        let up = parity_sweep(-1e5, TAU_SLOW).unwrap();
        assert!(AdiabaticReadout::new(&space, 6e3, up, &StepPolicy::default()).is_err());
    }

    #[test]
    fn flags_display() {
        assert_eq!(Flags::default().to_string(), "ok");
        let f = Flags {
            truncation_leak: true,
            adiabaticity: true,
        };
        assert_eq!(f.to_string(), "leak|adiabatic");
    }
}
