//! Phonon-to-spin mapping with efficiency `η` and finite-shot sampling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};

/// Mapping efficiency used unless configured otherwise.
pub const DEFAULT_ETA: f64 = 0.86;
/// Name of the sampling generator, recorded in provenance headers.
pub const RNG_NAME: &str = "ChaCha8 (rand_chacha 0.9), seed_from_u64(seed), stream = point index";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shots {
    /// Exact probabilities, no sampling noise.
    Infinite,
    Finite(u64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementModel {
    pub eta: f64,
    pub shots: Shots,
    pub seed: u64,
    /// Bright probability with no phonon present. Zero unless set.
    pub dark_error: f64,
}

impl MeasurementModel {
    pub fn new(eta: f64, shots: Shots, seed: u64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidParameter(format!("eta must lie in (0, 1], got {eta}")));
        }
        if shots == Shots::Finite(0) {
            return Err(Error::InvalidParameter("shot count must be positive".into()));
        }
        Ok(Self {
            eta,
            shots,
            seed,
            dark_error: 0.0,
        })
    }

    /// Perfect mapping, exact probabilities.
    pub fn ideal() -> Self {
        Self {
            eta: 1.0,
            shots: Shots::Infinite,
            seed: 0,
            dark_error: 0.0,
        }
    }

    pub fn with_dark_error(mut self, dark_error: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&dark_error) {
            return Err(Error::InvalidParameter(format!(
                "dark error must lie in [0, 1], got {dark_error}"
            )));
        }
        self.dark_error = dark_error;
        Ok(self)
    }

    /// Generator for one work item; independent of scheduling order.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

impl Default for MeasurementModel {
    fn default() -> Self {
        Self {
            eta: DEFAULT_ETA,
            shots: Shots::Infinite,
            seed: 0,
            dark_error: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelOutcome {
    pub p1_exact: f64,
    pub p1_sampled: f64,
    /// `√(p1_exact (1 − p1_exact) / shots)`; zero for infinite shots.
    pub stderr: f64,
}

/// Bright-state probability after mapping, sampled with stream `stream`.
pub fn measurement_channel(p_phonon: f64, model: &MeasurementModel, stream: u64) -> Result<ChannelOutcome> {
    if !(-1e-12..=1.0 + 1e-12).contains(&p_phonon) {
        return Err(Error::InvalidParameter(format!(
            "phonon probability {p_phonon} outside [0, 1]"
        )));
    }
    let p = p_phonon.clamp(0.0, 1.0);
    let p1_exact = model.eta * p + model.dark_error * (1.0 - p);
    match model.shots {
        Shots::Infinite => Ok(ChannelOutcome {
            p1_exact,
            p1_sampled: p1_exact,
            stderr: 0.0,
        }),
        Shots::Finite(n) => {
            let dist = Binomial::new(n, p1_exact).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            let bright = dist.sample(&mut model.rng(stream));
            Ok(ChannelOutcome {
                p1_exact,
                p1_sampled: bright as f64 / n as f64,
                stderr: (p1_exact * (1.0 - p1_exact) / n as f64).sqrt(),
            })
        }
    }
}

/// `⟨P⟩ = 1 − 2 p₁/η`, unclamped.
pub fn parity_estimate(p1: f64, eta: f64) -> f64 {
    1.0 - 2.0 * p1 / eta
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParityResult {
    pub p1: f64,
    pub p1_exact: f64,
    pub parity_estimate: f64,
    pub parity_exact: f64,
    pub shots: Shots,
    /// Binomial error of `p1` carried through the linear map.
    pub stderr: f64,
}

impl ParityResult {
    pub fn from_channel(outcome: &ChannelOutcome, model: &MeasurementModel) -> Self {
        Self {
            p1: outcome.p1_sampled,
            p1_exact: outcome.p1_exact,
            parity_estimate: parity_estimate(outcome.p1_sampled, model.eta),
            parity_exact: parity_estimate(outcome.p1_exact, model.eta),
            shots: model.shots,
            stderr: 2.0 * outcome.stderr / model.eta,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_channel_values() {
        let m = MeasurementModel::new(0.86, Shots::Infinite, 1).unwrap();
        assert_eq!(measurement_channel(1.0, &m, 0).unwrap().p1_exact, 0.86);
        for eta in [0.3, 0.86, 1.0] {
            let m = MeasurementModel::new(eta, Shots::Infinite, 1).unwrap();
            assert_eq!(measurement_channel(0.0, &m, 0).unwrap().p1_exact, 0.0);
        }
    }

    #[test]
    fn binomial_stderr() {
        let m = MeasurementModel::new(1.0, Shots::Finite(400), 7).unwrap();
        let out = measurement_channel(0.5, &m, 0).unwrap();
        assert!((out.stderr - 0.025).abs() < 1e-15);
    }

    #[test]
    fn sampling_is_deterministic_per_stream() {
        let m = MeasurementModel::new(0.86, Shots::Finite(500), 42).unwrap();
        let a = measurement_channel(0.4, &m, 3).unwrap();
        let b = measurement_channel(0.4, &m, 3).unwrap();
        assert_eq!(a, b);
        let draws: Vec<f64> = (0..20)
            .map(|s| measurement_channel(0.4, &m, s).unwrap().p1_sampled)
            .collect();
        assert!(draws.windows(2).any(|w| w[0] != w[1]));
    }

    #[test]
    fn parity_formula() {
        assert_eq!(parity_estimate(0.0, 0.7), 1.0);
        assert!((parity_estimate(0.86, 0.86) + 1.0).abs() < 1e-15);
        assert!((parity_estimate(0.5, 0.86) - (1.0 - 1.0 / 0.86)).abs() < 1e-15);
        assert!((parity_estimate(0.5, 0.86) + 0.1628).abs() < 1e-4);
    }

    #[test]
    fn eta_correction_is_consistent() {
        for p in [0.0, 0.13, 0.5, 0.97, 1.0] {
            let reference = parity_estimate(p, 1.0);
            for eta in [0.7, 0.86, 1.0] {
                assert!((parity_estimate(eta * p, eta) - reference).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn invalid_models_rejected() {
        assert!(MeasurementModel::new(0.0, Shots::Infinite, 0).is_err());
        assert!(MeasurementModel::new(1.2, Shots::Infinite, 0).is_err());
        assert!(MeasurementModel::new(0.86, Shots::Finite(0), 0).is_err());
    }
}
