use std::sync::Arc;

use crate::error::{Error, Result};

/// Number of RC time constants a ramp must last (residual below 1%).
pub const MIN_RC_CONSTANTS: f64 = 5.0;

/// Time-dependent detuning `δ(t)` in rad/s over `[0, duration]`.
pub trait DetuningProfile: Send + Sync + std::fmt::Debug {
    fn duration(&self) -> f64;

    fn detuning(&self, t: f64) -> f64;

    /// `∫ δ(t) dt` over `[t0, t1]`.
    fn integral(&self, t0: f64, t1: f64) -> f64;

    fn mean_detuning(&self, t0: f64, t1: f64) -> f64 {
        if t1 > t0 {
            self.integral(t0, t1) / (t1 - t0)
        } else {
            self.detuning(t0)
        }
    }

    /// Shortest time scale of the profile, if it has one.
    fn time_constant(&self) -> Option<f64> {
        None
    }

    /// Interval spanned by `δ(t)`.
    fn range(&self) -> (f64, f64);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantDetuning {
    pub delta: f64,
    pub duration: f64,
}

impl ConstantDetuning {
    /// Unbounded in time.
    pub fn new(delta: f64) -> Self {
        Self {
            delta,
            duration: f64::INFINITY,
        }
    }
}

impl DetuningProfile for ConstantDetuning {
    fn duration(&self) -> f64 {
        self.duration
    }

    fn detuning(&self, _t: f64) -> f64 {
        self.delta
    }

    fn integral(&self, t0: f64, t1: f64) -> f64 {
        self.delta * (t1 - t0)
    }

    fn range(&self) -> (f64, f64) {
        (self.delta, self.delta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RampDirection {
    Increasing,
    Decreasing,
}

/// RC-filtered step between two detunings:
/// `δ(t) = δ_end + (δ_start − δ_end) e^{−t/τ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampSchedule {
    pub delta_start: f64,
    pub delta_end: f64,
    pub tau_rc: f64,
    pub duration: f64,
    pub direction: RampDirection,
}

pub fn rc_ramp(delta_start: f64, delta_end: f64, tau_rc: f64, duration: f64) -> Result<RampSchedule> {
    if !(tau_rc > 0.0 && tau_rc.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "RC time constant must be positive, got {tau_rc}"
        )));
    }
    if !(duration >= MIN_RC_CONSTANTS * tau_rc) {
        return Err(Error::InvalidParameter(format!(
            "ramp duration {duration:e} s is shorter than {MIN_RC_CONSTANTS} time constants of {tau_rc:e} s"
        )));
    }
    Ok(RampSchedule {
        delta_start,
        delta_end,
        tau_rc,
        duration,
        direction: if delta_end >= delta_start {
            RampDirection::Increasing
        } else {
            RampDirection::Decreasing
        },
    })
}

impl RampSchedule {
    /// Ramp of exactly the minimum length.
    pub fn minimal(delta_start: f64, delta_end: f64, tau_rc: f64) -> Result<Self> {
        rc_ramp(delta_start, delta_end, tau_rc, MIN_RC_CONSTANTS * tau_rc)
    }

    /// `|δ(T) − δ_end| / |δ_start − δ_end|`
    pub fn residual_fraction(&self) -> f64 {
        (-self.duration / self.tau_rc).exp()
    }
}

impl DetuningProfile for RampSchedule {
    fn duration(&self) -> f64 {
        self.duration
    }

    fn detuning(&self, t: f64) -> f64 {
        self.delta_end + (self.delta_start - self.delta_end) * (-t / self.tau_rc).exp()
    }

    fn integral(&self, t0: f64, t1: f64) -> f64 {
        let decay = (-t0 / self.tau_rc).exp() - (-t1 / self.tau_rc).exp();
        self.delta_end * (t1 - t0) + (self.delta_start - self.delta_end) * self.tau_rc * decay
    }

    fn time_constant(&self) -> Option<f64> {
        Some(self.tau_rc)
    }

    fn range(&self) -> (f64, f64) {
        let end = self.detuning(self.duration);
        (self.delta_start.min(end), self.delta_start.max(end))
    }
}

/// Profiles played back to back.
#[derive(Debug, Clone)]
pub struct Sequence {
    segments: Vec<Arc<dyn DetuningProfile>>,
    starts: Vec<f64>,
    duration: f64,
}

impl Sequence {
    pub fn new(segments: Vec<Arc<dyn DetuningProfile>>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidParameter("empty sequence".into()));
        }
        let mut starts = Vec::with_capacity(segments.len());
        let mut t = 0.0;
        for s in &segments {
            if !s.duration().is_finite() {
                return Err(Error::InvalidParameter(
                    "sequence segments need finite durations".into(),
                ));
            }
            starts.push(t);
            t += s.duration();
        }
        Ok(Self {
            segments,
            starts,
            duration: t,
        })
    }

    fn locate(&self, t: f64) -> usize {
        self.starts.partition_point(|&s| s <= t).saturating_sub(1)
    }
}

impl DetuningProfile for Sequence {
    fn duration(&self) -> f64 {
        self.duration
    }

    fn detuning(&self, t: f64) -> f64 {
        let k = self.locate(t);
        self.segments[k].detuning(t - self.starts[k])
    }

    fn integral(&self, t0: f64, t1: f64) -> f64 {
        let mut total = 0.0;
        for (seg, &start) in self.segments.iter().zip(&self.starts) {
            let end = start + seg.duration();
            let (a, b) = (t0.max(start), t1.min(end));
            if b > a {
                total += seg.integral(a - start, b - start);
            }
        }
        total
    }

    fn time_constant(&self) -> Option<f64> {
        self.segments
            .iter()
            .filter_map(|s| s.time_constant())
            .min_by(f64::total_cmp)
    }

    fn range(&self) -> (f64, f64) {
        self.segments
            .iter()
            .map(|s| s.range())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (a, b)| {
                (lo.min(a), hi.max(b))
            })
    }
}
