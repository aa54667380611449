//! Executes a validated configuration and writes its CSV artifacts.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::algebra::{make_state, StateSpec, TwoModeSpace};
use crate::dynamics::StepPolicy;
use crate::error::Error;
use crate::harness::config::{ConfigError, Experiment, GridKind, RunConfig};
use crate::harness::converge::{convergence_report, ConvergenceTable};
use crate::harness::provenance::ProvenanceHeader;
use crate::linalg::C64;
use crate::protocols::crossing::{avoided_crossing_spectrum, detuning_grid};
use crate::protocols::measurement::MeasurementModel;
use crate::protocols::oscillation::{oscillation_experiment, OscillationSettings};
use crate::protocols::parity::{parity_sweep, AdiabaticReadout};
use crate::protocols::wigner_scan::{wigner_scan, Grid};
use crate::trap::{angular_to_hz, hz_to_angular, ModeParams, TrapConfig};

/// Exit status for success, configuration problems and numerical failures.
pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICS: i32 = 3;

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Numerics(Error),
    Io(io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Numerics(Error::InvalidDimension { .. } | Error::InvalidTrap(_) | Error::InvalidParameter(_)) => {
                EXIT_CONFIG
            }
            RunError::Numerics(_) => EXIT_NUMERICS,
            RunError::Io(_) => EXIT_IO,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "config error ({}): {e}", e.kind()),
            RunError::Numerics(e) => write!(f, "numerical error: {e}"),
            RunError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Numerics(e)
    }
}

impl From<io::Error> for RunError {
    fn from(e: io::Error) -> Self {
        RunError::Io(e)
    }
}

/// Key-value summary lines plus the files written.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub summary: Vec<(String, String)>,
    pub files: Vec<PathBuf>,
}

impl RunReport {
    fn note(&mut self, key: &str, value: impl fmt::Display) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.summary {
            writeln!(f, "{k} = {v}")?;
        }
        for p in &self.files {
            writeln!(f, "wrote {}", p.display())?;
        }
        Ok(())
    }
}

pub fn mode_params(cfg: &RunConfig) -> Result<ModeParams, Error> {
    let trap = TrapConfig::from_hz(cfg.trap.freq_x, cfg.trap.freq_y, cfg.trap.freq_z)?;
    Ok(ModeParams::compute(&cfg.trap.ion_species(), &trap, cfg.trap.coupling))
}

pub fn measurement_model(cfg: &RunConfig) -> Result<MeasurementModel, Error> {
    let m = &cfg.measurement;
    MeasurementModel::new(m.eta, m.shots, m.seed)?.with_dark_error(m.dark_error)
}

pub fn space(cfg: &RunConfig) -> Result<TwoModeSpace, Error> {
    TwoModeSpace::with_dims(cfg.simulation.radial_dim, cfg.simulation.axial_dim)
}

/// The slow parity sweep of `cfg` on `space` with step `max_step`.
pub fn parity_readout(cfg: &RunConfig, space: &TwoModeSpace, max_step: f64) -> Result<AdiabaticReadout, Error> {
    let xi = mode_params(cfg)?.xi;
    let ramp = parity_sweep(hz_to_angular(cfg.simulation.parking), cfg.simulation.tau_slow)?;
    AdiabaticReadout::new(space, xi, ramp, &StepPolicy::new(max_step)?)
}

pub fn oscillation_settings(cfg: &RunConfig, space: TwoModeSpace, max_step: f64) -> Result<OscillationSettings, Error> {
    let o = &cfg.oscillate;
    let mut s = OscillationSettings::new(o.n_initial, o.t_max, o.points);
    s.parking = hz_to_angular(cfg.simulation.parking);
    s.tau_fast = cfg.simulation.tau_fast;
    s.coherence_time = o.coherence_time;
    s.space = space;
    s.policy = StepPolicy::new(max_step)?.resolving(cfg.simulation.tau_fast);
    Ok(s)
}

pub fn wigner_grid(cfg: &RunConfig) -> Grid {
    let w = &cfg.wigner;
    match w.grid {
        GridKind::Rect => Grid::Rect {
            re: (-w.extent, w.extent),
            im: (-w.extent, w.extent),
            n_re: w.points,
            n_im: w.points,
        },
        GridKind::RadialCut => Grid::RadialCut {
            r_max: w.extent,
            count: w.points,
            phases: w.phases,
        },
    }
}

fn require_state(cfg: &RunConfig) -> Result<&StateSpec, ConfigError> {
    cfg.state.as_ref().ok_or(ConfigError::Validation {
        key: "state".into(),
        message: "this experiment needs a [state] section".into(),
    })
}

/// Writes header plus `body` to `dir/name` and records it.
fn emit(
    report: &mut RunReport,
    dir: &Path,
    name: &str,
    header: &ProvenanceHeader,
    extra: &[String],
    body: impl FnOnce(&mut Vec<u8>) -> io::Result<()>,
) -> io::Result<()> {
    let mut buf = Vec::new();
    header.write(&mut buf)?;
    for line in extra {
        writeln!(buf, "# {line}")?;
    }
    body(&mut buf)?;
    let path = dir.join(name);
    fs::write(&path, buf)?;
    report.files.push(path);
    Ok(())
}

/// Runs `cfg.experiment` and writes its artifacts into `cfg.output`.
pub fn run_experiment(cfg: &RunConfig) -> Result<RunReport, RunError> {
    cfg.validate()?;
    let dir = cfg.output.clone();
    fs::create_dir_all(&dir)?;
    let header = ProvenanceHeader::new(cfg);
    let params = mode_params(cfg)?;
    let model = measurement_model(cfg)?;
    let mut report = RunReport::default();
    report.note("experiment", cfg.experiment.name());
    report.note("config_hash", &header.config_hash);

    match cfg.experiment {
        Experiment::Modes => {
            let splitting = angular_to_hz(params.splitting());
            report.note("omega_s_hz", angular_to_hz(params.omega_s));
            report.note("omega_r_hz", angular_to_hz(params.omega_r));
            report.note("delta_hz", angular_to_hz(params.delta));
            report.note("z0_m", params.z0);
            report.note("xi_hz", angular_to_hz(params.xi));
            report.note("splitting_hz", splitting);
            emit(&mut report, &dir, "modes.csv", &header, &[], |w| {
                writeln!(w, "omega_s_hz,omega_r_hz,delta_hz,z0_m,xi_hz,splitting_hz")?;
                writeln!(
                    w,
                    "{:.6},{:.6},{:.6},{:.9e},{:.6},{:.6}",
                    angular_to_hz(params.omega_s),
                    angular_to_hz(params.omega_r),
                    angular_to_hz(params.delta),
                    params.z0,
                    angular_to_hz(params.xi),
                    splitting
                )
            })?;
        }
        Experiment::Oscillate => {
            let settings = oscillation_settings(cfg, space(cfg)?, cfg.simulation.max_step)?;
            let table = oscillation_experiment(&settings, params.xi, &model)?;
            report.note("predicted_hz", table.predicted_hz);
            let fit_line = match &table.fit {
                Ok(fit) => {
                    report.note("fit_hz", fit.frequency_hz);
                    report.note("fit_err_hz", fit.frequency_err_hz);
                    format!("fit: {:.6} +- {:.6} Hz", fit.frequency_hz, fit.frequency_err_hz)
                }
                Err(e) => {
                    report.note("fit", format!("none ({e})"));
                    format!("fit: none ({e})")
                }
            };
            let extra = [format!("predicted: {:.6} Hz", table.predicted_hz), fit_line];
            emit(&mut report, &dir, "oscillation.csv", &header, &extra, |w| {
                writeln!(w, "t_ms,p_radial,p_axial,p_radial_sampled,p_axial_sampled")?;
                for r in &table.rows {
                    writeln!(
                        w,
                        "{:.6},{:.12e},{:.12e},{:.12e},{:.12e}",
                        r.t_hold * 1e3,
                        r.p_radial,
                        r.p_axial,
                        r.p_radial_sampled,
                        r.p_axial_sampled
                    )?;
                }
                Ok(())
            })?;
        }
        Experiment::Crossing => {
            let c = &cfg.crossing;
            let deltas = detuning_grid(hz_to_angular(c.delta_min), hz_to_angular(c.delta_max), c.points);
            let spectrum = avoided_crossing_spectrum(&deltas, params.xi)?;
            let gap = angular_to_hz(spectrum.min_gap);
            let at = angular_to_hz(spectrum.min_gap_delta);
            report.note("min_gap_hz", gap);
            report.note("min_gap_delta_hz", at);
            let extra = [format!("min_gap: {gap:.6} Hz at delta {at:.6} Hz")];
            emit(&mut report, &dir, "spectrum.csv", &header, &extra, |w| {
                spectrum.write_csv(w)
            })?;
        }
        Experiment::Parity => {
            let spec = require_state(cfg)?;
            let space = space(cfg)?;
            let radial = make_state(space.radial, spec)?;
            let readout = parity_readout(cfg, &space, cfg.simulation.max_step)?;
            let out = readout.parity(&radial, &model, 0)?;
            let r = &out.result;
            report.note("state", spec);
            report.note("parity", r.parity_estimate);
            report.note("parity_exact", r.parity_exact);
            report.note("flags", out.readout.flags);
            emit(&mut report, &dir, "parity.csv", &header, &[], |w| {
                writeln!(
                    w,
                    "state,p_phonon,p1_exact,p1_sampled,parity,parity_exact,stderr,worst_fidelity,flags"
                )?;
                writeln!(
                    w,
                    "{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.6e},{:.12e},{}",
                    spec,
                    out.readout.p_phonon,
                    r.p1_exact,
                    r.p1,
                    r.parity_estimate,
                    r.parity_exact,
                    r.stderr,
                    out.readout.worst_fidelity,
                    out.readout.flags
                )
            })?;
            emit(&mut report, &dir, "axial.csv", &header, &[], |w| {
                writeln!(w, "n_axial,probability")?;
                for (n, p) in out.readout.axial_distribution.iter().enumerate() {
                    writeln!(w, "{n},{p:.12e}")?;
                }
                Ok(())
            })?;
        }
        Experiment::Wigner => {
            let spec = require_state(cfg)?;
            let space = space(cfg)?;
            let radial = make_state(space.radial, spec)?;
            let readout = parity_readout(cfg, &space, cfg.simulation.max_step)?;
            let scan = wigner_scan(&radial, &spec.to_string(), &wigner_grid(cfg), &readout, &model)?;
            report.note("state", spec);
            report.note("points", scan.points.len());
            report.note("flags", scan.flags());
            if let Some(p) = scan.points.iter().find(|p| p.alpha == C64::new(0.0, 0.0)) {
                report.note("wigner_origin", p.wigner);
            }
            let extra = [format!("state: {spec}")];
            emit(&mut report, &dir, "wigner.csv", &header, &extra, |w| scan.write_csv(w))?;
        }
        Experiment::Converge => {
            let table: ConvergenceTable = convergence_report(cfg)?;
            report.note("observable", cfg.converge.observable.name());
            report.note("monotone", table.monotone());
            emit(&mut report, &dir, "converge.csv", &header, &[], |w| table.write_csv(w))?;
        }
    }
    Ok(report)
}
