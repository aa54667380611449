//! Conversion oscillation between the radial and axial modes.
//!
//! Sequence per hold time: prepare `|n⟩_r|0⟩_a` at the parking detuning,
//! ramp to resonance through a fast RC filter (the filter keeps relaxing
//! during the hold), then ramp back to parking and read out either mode.

use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::{product_state, TwoModeSpace};
use crate::dynamics::{block_decompose, evolve, rc_ramp, DetuningProfile, Drive, RampSchedule, Sequence, StepPolicy};
use crate::error::{Error, Result};
use crate::linalg::HermitianEigen;
use crate::protocols::calibration::decoherence_envelope;
use crate::protocols::fit::{fit_sinusoid, FitError, SineFit};
use crate::protocols::measurement::{measurement_channel, MeasurementModel};
use crate::protocols::parity::{PARKING_DETUNING_HZ, TAU_FAST};
use crate::trap::{angular_to_hz, hz_to_angular};

#[derive(Debug, Clone)]
pub struct OscillationSettings {
    /// Radial phonons prepared initially (1 or 2 in the reference experiment).
    pub n_initial: usize,
    pub hold_times: Vec<f64>,
    /// rad/s
    pub parking: f64,
    pub tau_fast: f64,
    /// Phonon coherence time for the contrast envelope; `None` for ideal.
    pub coherence_time: Option<f64>,
    pub space: TwoModeSpace,
    pub policy: StepPolicy,
}

impl OscillationSettings {
    /// `n_initial` phonons, holds from 0 to `t_max` in `count` points.
    pub fn new(n_initial: usize, t_max: f64, count: usize) -> Self {
        let hold_times = (0..count)
            .map(|i| t_max * i as f64 / (count.max(2) - 1) as f64)
            .collect();
        Self {
            n_initial,
            hold_times,
            parking: hz_to_angular(PARKING_DETUNING_HZ),
            tau_fast: TAU_FAST,
            coherence_time: None,
            space: TwoModeSpace::with_dims(8, 5).expect("valid dims"),
            policy: StepPolicy::new(TAU_FAST / 50.0).expect("valid step"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillationRow {
    pub t_hold: f64,
    /// Probability of at least one radial phonon.
    pub p_radial: f64,
    /// Probability of at least one axial phonon.
    pub p_axial: f64,
    /// Sampled bright fractions after the mapping channel.
    pub p_radial_sampled: f64,
    pub p_axial_sampled: f64,
}

#[derive(Debug, Clone)]
pub struct OscillationTable {
    pub rows: Vec<OscillationRow>,
    /// Fit of `p_axial` versus hold time.
    pub fit: std::result::Result<SineFit, FitError>,
    /// `2√2 ξ / 2π`
    pub predicted_hz: f64,
    /// Long-time averages `(radial, axial)` at resonance.
    pub mean_populations: (f64, f64),
}

/// Fast ramp to resonance lasting five constants plus the hold, then back.
pub fn conversion_sequence(parking: f64, tau_fast: f64, hold: f64) -> Result<Sequence> {
    let down = rc_ramp(parking, 0.0, tau_fast, 5.0 * tau_fast + hold)?;
    let reached = down.detuning(down.duration);
    let up = RampSchedule::minimal(reached, parking, tau_fast)?;
    Sequence::new(vec![Arc::new(down), Arc::new(up)])
}

/// Diagonal-ensemble averages at `δ = 0` of the radial and axial occupation
/// probabilities for `|n⟩_r|0⟩_a`.
fn resonant_means(space: &TwoModeSpace, xi: f64, n: usize) -> (f64, f64) {
    let blocks = block_decompose(space);
    let sector = blocks.sector(n).expect("sector of the initial state");
    let eig = HermitianEigen::new(&sector.hamiltonian(space, xi, 0.0));
    let start = sector
        .indices
        .iter()
        .position(|&i| i == space.index(n, 0))
        .expect("initial state in its sector");
    let (mut radial, mut axial) = (0.0, 0.0);
    for j in 0..eig.dim() {
        let w = eig.vectors[(start, j)].norm_sqr();
        for (p, &idx) in sector.indices.iter().enumerate() {
            let (n_a, n_c) = space.occupations(idx);
            let q = w * eig.vectors[(p, j)].norm_sqr();
            if n_a > 0 {
                radial += q;
            }
            if n_c > 0 {
                axial += q;
            }
        }
    }
    (radial, axial)
}

pub fn oscillation_experiment(
    settings: &OscillationSettings,
    xi: f64,
    model: &MeasurementModel,
) -> Result<OscillationTable> {
    if settings.hold_times.iter().any(|&t| !(t >= 0.0)) {
        return Err(Error::InvalidParameter("hold times must be nonnegative".into()));
    }
    let space = settings.space;
    let psi0 = product_state(&space, settings.n_initial, 0)?;
    let means = resonant_means(&space, xi, settings.n_initial);

    let rows: Vec<OscillationRow> = settings
        .hold_times
        .par_iter()
        .enumerate()
        .map(|(i, &hold)| -> Result<OscillationRow> {
            let seq = conversion_sequence(settings.parking, settings.tau_fast, hold)?;
            let out = evolve(
                &psi0,
                Drive::Schedule { xi, profile: &seq },
                seq.duration(),
                &settings.policy,
            )?;
            let mut p_radial: f64 = out.mode_distribution(false).iter().skip(1).sum();
            let mut p_axial: f64 = out.mode_distribution(true).iter().skip(1).sum();
            if let Some(tau_c) = settings.coherence_time {
                let c = decoherence_envelope(hold, tau_c)?;
                p_radial = means.0 + (p_radial - means.0) * c;
                p_axial = means.1 + (p_axial - means.1) * c;
            }
            let stream = 2 * i as u64;
            let r = measurement_channel(p_radial.clamp(0.0, 1.0), model, stream)?;
            let a = measurement_channel(p_axial.clamp(0.0, 1.0), model, stream + 1)?;
            Ok(OscillationRow {
                t_hold: hold,
                p_radial,
                p_axial,
                p_radial_sampled: r.p1_sampled,
                p_axial_sampled: a.p1_sampled,
            })
        })
        .collect::<Result<_>>()?;

    let t: Vec<f64> = rows.iter().map(|r| r.t_hold).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.p_axial).collect();
    let span = t.last().copied().unwrap_or(0.0) - t.first().copied().unwrap_or(0.0);
    let spacing = t.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let fit = if span > 0.0 && spacing.is_finite() && spacing > 0.0 {
        fit_sinusoid(&t, &y, 0.5 / span, 0.5 / spacing)
    } else {
        Err(FitError::TooFewPoints(t.len()))
    };
    Ok(OscillationTable {
        rows,
        fit,
        predicted_hz: angular_to_hz(2.0 * std::f64::consts::SQRT_2 * xi),
        mean_populations: means,
    })
}
