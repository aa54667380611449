//! Least-squares sinusoid fit `y ≈ A + C cos ωt + S sin ωt`.
//!
//! For fixed `ω` the model is linear, so the fit scans `ω` on a grid, keeps
//! the best residual and refines it by golden-section search.

use nalgebra::{DMatrix, Matrix3, Vector3};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineFit {
    pub frequency_hz: f64,
    /// One-sigma uncertainty from the residual and the Jacobian.
    pub frequency_err_hz: f64,
    pub offset: f64,
    pub amplitude: f64,
    pub phase: f64,
    pub rms_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FitError {
    TooFewPoints(usize),
    /// Peak-to-peak variation below the detection floor.
    NoOscillation {
        peak_to_peak: f64,
    },
    Degenerate,
}

impl std::fmt::Display for FitError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FitError::TooFewPoints(n) => write!(f, "need at least 5 points, got {n}"),
            FitError::NoOscillation { peak_to_peak } => {
                write!(f, "no oscillation (peak-to-peak {peak_to_peak:.3e})")
            }
            FitError::Degenerate => f.write_str("singular normal equations"),
        }
    }
}

const MIN_PEAK_TO_PEAK: f64 = 1e-6;

fn linear_fit(t: &[f64], y: &[f64], omega: f64) -> Option<(Vector3<f64>, f64)> {
    let mut ata = Matrix3::zeros();
    let mut aty = Vector3::zeros();
    for (&ti, &yi) in t.iter().zip(y) {
        let row = Vector3::new(1.0, (omega * ti).cos(), (omega * ti).sin());
        ata += row * row.transpose();
        aty += row * yi;
    }
    let coef = ata.try_inverse()? * aty;
    let rss = t
        .iter()
        .zip(y)
        .map(|(&ti, &yi)| {
            let m = coef[0] + coef[1] * (omega * ti).cos() + coef[2] * (omega * ti).sin();
            (yi - m).powi(2)
        })
        .sum();
    Some((coef, rss))
}

/// Fits a single sinusoid with frequency between `f_min` and `f_max` (Hz).
pub fn fit_sinusoid(t: &[f64], y: &[f64], f_min: f64, f_max: f64) -> Result<SineFit, FitError> {
    let n = t.len().min(y.len());
    if n < 5 {
        return Err(FitError::TooFewPoints(n));
    }
    let (lo, hi) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if hi - lo < MIN_PEAK_TO_PEAK {
        return Err(FitError::NoOscillation { peak_to_peak: hi - lo });
    }
    let rss = |f: f64| linear_fit(t, y, 2.0 * PI * f).map(|(_, r)| r).unwrap_or(f64::INFINITY);

    const GRID: usize = 4000;
    let grid: Vec<f64> = (0..=GRID)
        .map(|i| f_min + (f_max - f_min) * i as f64 / GRID as f64)
        .collect();
    let best = (0..=GRID)
        .min_by(|&a, &b| rss(grid[a]).total_cmp(&rss(grid[b])))
        .expect("nonempty grid");
    let (mut a, mut b) = (grid[best.saturating_sub(1)], grid[(best + 1).min(GRID)]);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if rss(c) < rss(d) {
            b = d;
        } else {
            a = c;
        }
        if b - a <= 1e-13 * b.abs() {
            break;
        }
    }
    let f = 0.5 * (a + b);
    let omega = 2.0 * PI * f;
    let (coef, rss_best) = linear_fit(t, y, omega).ok_or(FitError::Degenerate)?;

    // Jacobian of (A, C, S, ω) for the covariance estimate
    let jac = DMatrix::from_fn(n, 4, |i, j| {
        let (s, c) = (omega * t[i]).sin_cos();
        match j {
            0 => 1.0,
            1 => c,
            2 => s,
            _ => t[i] * (-coef[1] * s + coef[2] * c),
        }
    });
    let dof = (n as f64 - 4.0).max(1.0);
    let sigma2 = rss_best / dof;
    let jtj = jac.transpose() * &jac;
    let frequency_err_hz = jtj
        .try_inverse()
        .map(|cov| (sigma2 * cov[(3, 3)]).max(0.0).sqrt() / (2.0 * PI))
        .unwrap_or(f64::INFINITY);
    Ok(SineFit {
        frequency_hz: f,
        frequency_err_hz,
        offset: coef[0],
        amplitude: coef[1].hypot(coef[2]),
        phase: (-coef[2]).atan2(coef[1]),
        rms_residual: (rss_best / n as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_clean_sinusoid() {
        let t: Vec<f64> = (0..101).map(|i| i as f64 * 20e-6).collect();
        let y: Vec<f64> = t
            .iter()
            .map(|&x| 0.5 - 0.45 * (2.0 * PI * 2962.3 * x + 0.3).cos())
            .collect();
        let fit = fit_sinusoid(&t, &y, 100.0, 20e3).unwrap();
        assert!((fit.frequency_hz - 2962.3).abs() < 1e-6);
        assert!((fit.amplitude - 0.45).abs() < 1e-9);
        assert!((fit.offset - 0.5).abs() < 1e-9);
        assert!(fit.rms_residual < 1e-10);
    }

    #[test]
    fn flat_data_is_not_an_oscillation() {
        let t: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let y = vec![0.25; 50];
        assert!(matches!(
            fit_sinusoid(&t, &y, 0.01, 0.4),
            Err(FitError::NoOscillation { .. })
        ));
    }
}
