//! Truncation and step-size convergence of a key observable.

use std::collections::HashMap;
use std::io::{self, Write};

use crate::algebra::{make_state, TwoModeSpace};
use crate::error::{Error, Result};
use crate::harness::config::{Observable, RunConfig};
use crate::harness::runner::{mode_params, oscillation_settings, parity_readout};
use crate::linalg::C64;
use crate::protocols::crossing::{avoided_crossing_spectrum, detuning_grid};
use crate::protocols::measurement::MeasurementModel;
use crate::protocols::oscillation::oscillation_experiment;
use crate::protocols::wigner_scan::{wigner_scan, Grid};
use crate::trap::{angular_to_hz, hz_to_angular};

/// Growth in `|delta|` tolerated before a row counts as non-monotone.
const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Dims,
    Step,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub sweep: SweepKind,
    pub radial_dim: usize,
    pub axial_dim: usize,
    pub max_step: f64,
    pub value: f64,
    /// `value` minus the finest setting's value in the same sweep.
    pub delta: f64,
    /// `|delta|` did not grow relative to the previous setting.
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub observable: Observable,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn monotone(&self) -> bool {
        self.rows.iter().all(|r| r.monotone)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "sweep,radial_dim,axial_dim,max_step_s,observable,value,delta_vs_finest,monotone"
        )?;
        for r in &self.rows {
            let sweep = match r.sweep {
                SweepKind::Dims => "dims",
                SweepKind::Step => "step",
            };
            writeln!(
                w,
                "{sweep},{},{},{:e},{},{:.15e},{:.6e},{}",
                r.radial_dim,
                r.axial_dim,
                r.max_step,
                self.observable.name(),
                r.value,
                r.delta,
                r.monotone
            )?;
        }
        Ok(())
    }
}

/// Observable value at one setting.
pub fn observable_value(cfg: &RunConfig, observable: Observable, space: &TwoModeSpace, max_step: f64) -> Result<f64> {
    let xi = mode_params(cfg)?.xi;
    match observable {
        Observable::WignerOrigin => {
            let spec = cfg
                .state
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("W(0) needs a state".into()))?;
            let radial = make_state(space.radial, spec)?;
            let readout = parity_readout(cfg, space, max_step)?;
            let grid = Grid::Points(vec![C64::new(0.0, 0.0)]);
            let scan = wigner_scan(&radial, "", &grid, &readout, &MeasurementModel::ideal())?;
            Ok(scan.points[0].wigner_exact)
        }
        Observable::Gap => {
            let c = &cfg.crossing;
            let deltas = detuning_grid(hz_to_angular(c.delta_min), hz_to_angular(c.delta_max), c.points);
            Ok(angular_to_hz(avoided_crossing_spectrum(&deltas, xi)?.min_gap))
        }
        Observable::OscillationFrequency => {
            let settings = oscillation_settings(cfg, *space, max_step)?;
            let table = oscillation_experiment(&settings, xi, &MeasurementModel::ideal())?;
            table
                .fit
                .map(|f| f.frequency_hz)
                .map_err(|e| Error::Contract(format!("oscillation fit failed: {e}")))
        }
    }
}

fn sweep_rows(sweep: SweepKind, settings: Vec<((usize, usize), f64, f64)>) -> Vec<ConvergenceRow> {
    let finest = settings.last().map_or(0.0, |s| s.2);
    let mut prev: Option<f64> = None;
    settings
        .into_iter()
        .map(|((r, a), step, value)| {
            let delta = value - finest;
            let monotone = prev.is_none_or(|p| delta.abs() <= p.abs() + MONOTONE_SLACK);
            prev = Some(delta);
            ConvergenceRow {
                sweep,
                radial_dim: r,
                axial_dim: a,
                max_step: step,
                value,
                delta,
                monotone,
            }
        })
        .collect()
}

/// Sweeps the dims list at the configured step, then the step list at the
/// finest dims.
pub fn convergence_report(cfg: &RunConfig) -> Result<ConvergenceTable> {
    let observable = cfg.converge.observable;
    let mut memo: HashMap<((usize, usize), u64), f64> = HashMap::new();
    let mut eval = |dims: (usize, usize), step: f64| -> Result<f64> {
        if let Some(v) = memo.get(&(dims, step.to_bits())) {
            return Ok(*v);
        }
        let space = TwoModeSpace::with_dims(dims.0, dims.1)?;
        let v = observable_value(cfg, observable, &space, step)?;
        memo.insert((dims, step.to_bits()), v);
        Ok(v)
    };
    let step0 = cfg.simulation.max_step;
    let mut dims_settings = Vec::new();
    for &d in &cfg.converge.dims {
        dims_settings.push((d, step0, eval(d, step0)?));
    }
    let finest_dims = *cfg.converge.dims.last().expect("validated nonempty");
    let mut step_settings = Vec::new();
    for &s in &cfg.converge.steps {
        step_settings.push((finest_dims, s, eval(finest_dims, s)?));
    }
    let mut rows = sweep_rows(SweepKind::Dims, dims_settings);
    rows.extend(sweep_rows(SweepKind::Step, step_settings));
    Ok(ConvergenceTable { observable, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::Experiment;

    #[test]
    fn gap_does_not_depend_on_truncation() {
        let mut cfg = RunConfig::defaults(Experiment::Converge);
        cfg.converge.observable = Observable::Gap;
        cfg.converge.dims = vec![(4, 3), (10, 6)];
        let t = convergence_report(&cfg).unwrap();
        assert_eq!(t.rows.len(), 4);
        assert!(t.rows.iter().all(|r| r.delta == 0.0 && r.monotone));
        assert!((t.rows[0].value - 2961.0).abs() < 30.0);
    }

    #[test]
    fn monotone_flag() {
        let rows = sweep_rows(
            SweepKind::Step,
            vec![((4, 3), 1.0, 0.5), ((4, 3), 0.5, 0.1), ((4, 3), 0.2, 0.3)],
        );
        assert!(rows.iter().all(|r| r.monotone));
        assert_eq!(rows[2].delta, 0.0);
        let bad = sweep_rows(
            SweepKind::Step,
            vec![((4, 3), 1.0, 0.31), ((4, 3), 0.5, 0.1), ((4, 3), 0.2, 0.3)],
        );
        assert!(!bad[1].monotone);
    }
}
