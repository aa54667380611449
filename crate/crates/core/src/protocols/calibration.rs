use crate::error::{Error, Result};

/// `|α|² = n̄ = 3.0e-4 t²` with `t` the drive duration in µs.
pub const DISPLACEMENT_RATE_PER_US2: f64 = 3.0e-4;

/// Coherent displacement magnitude reached after driving for `t_us` µs.
pub fn displacement_calibration(t_us: f64) -> Result<f64> {
    if !(t_us >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "drive duration must be nonnegative, got {t_us}"
        )));
    }
    Ok(DISPLACEMENT_RATE_PER_US2.sqrt() * t_us)
}

/// Inverse of [`displacement_calibration`], µs.
pub fn drive_duration_for(alpha_abs: f64) -> Result<f64> {
    if !(alpha_abs >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "|alpha| must be nonnegative, got {alpha_abs}"
        )));
    }
    Ok(alpha_abs / DISPLACEMENT_RATE_PER_US2.sqrt())
}

/// Coherence times of the out-of-phase modes, s.
pub const AXIAL_COHERENCE_TIME: f64 = 55e-3;
pub const RADIAL_COHERENCE_TIME: f64 = 10.2e-3;

/// Contrast factor `e^{−t/τ_c}` applied to oscillations about their mean.
pub fn decoherence_envelope(t: f64, tau_c: f64) -> Result<f64> {
    if !(t >= 0.0) || !(tau_c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "envelope needs t >= 0 and tau_c > 0 (got {t}, {tau_c})"
        )));
    }
    Ok((-t / tau_c).exp())
}
