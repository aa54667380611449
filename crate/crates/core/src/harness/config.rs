//! Run configuration: a TOML document with one table per concern.
//!
//! Every section is optional and missing values take the reference
//! experiment's settings. Dimensional values carry explicit units.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::algebra::{StateSpec, DEFAULT_AXIAL_DIM, DEFAULT_RADIAL_DIM};
use crate::dynamics::DEFAULT_MAX_STEP;
use crate::harness::units::{format_quantity, parse_quantity, Dimension};
use crate::protocols::measurement::{Shots, DEFAULT_ETA};
use crate::protocols::parity::{PARKING_DETUNING_HZ, TAU_FAST, TAU_SLOW};
use crate::protocols::wigner_scan::{CUT_PHASES, CUT_POINTS, RECT_HALF_WIDTH, RECT_POINTS};
use crate::trap::{CouplingEvaluation, IonSpecies};

/// Distinct configuration failures; `kind()` is the stable identifier.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    UnknownKey {
        key: String,
    },
    Unit {
        key: String,
        message: String,
    },
    Validation {
        key: String,
        message: String,
    },
}

impl ConfigError {
    pub fn kind(&self) -> &'static str {
        match self {
            ConfigError::Parse { .. } => "parse",
            ConfigError::UnknownKey { .. } => "unknown_key",
            ConfigError::Unit { .. } => "unit",
            ConfigError::Validation { .. } => "validation",
        }
    }

    fn invalid(key: &str, message: impl Into<String>) -> Self {
        ConfigError::Validation {
            key: key.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse { line, column, message } => {
                write!(f, "parse error at {line}:{column}: {message}")
            }
            ConfigError::UnknownKey { key } => write!(f, "unknown key `{key}`"),
            ConfigError::Unit { key, message } => write!(f, "unit error in `{key}`: {message}"),
            ConfigError::Validation { key, message } => write!(f, "invalid `{key}`: {message}"),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Modes,
    Oscillate,
    Crossing,
    Parity,
    Wigner,
    Converge,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Modes,
        Experiment::Oscillate,
        Experiment::Crossing,
        Experiment::Parity,
        Experiment::Wigner,
        Experiment::Converge,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Modes => "modes",
            Experiment::Oscillate => "oscillate",
            Experiment::Crossing => "crossing",
            Experiment::Parity => "parity",
            Experiment::Wigner => "wigner",
            Experiment::Converge => "converge",
        }
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrapSection {
    /// Secular frequencies, Hz.
    pub freq_x: f64,
    pub freq_y: f64,
    pub freq_z: f64,
    pub ion: String,
    pub coupling: CouplingEvaluation,
}

impl Default for TrapSection {
    fn default() -> Self {
        Self {
            freq_x: 0.99e6,
            freq_y: 0.90e6,
            freq_z: 0.75e6,
            ion: "171Yb+".into(),
            coupling: CouplingEvaluation::Resonant,
        }
    }
}

impl TrapSection {
    pub fn ion_species(&self) -> IonSpecies {
        IonSpecies::YB171
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSection {
    pub radial_dim: usize,
    pub axial_dim: usize,
    /// s
    pub max_step: f64,
    /// Hz
    pub parking: f64,
    /// s
    pub tau_slow: f64,
    pub tau_fast: f64,
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            radial_dim: DEFAULT_RADIAL_DIM,
            axial_dim: DEFAULT_AXIAL_DIM,
            max_step: DEFAULT_MAX_STEP,
            parking: PARKING_DETUNING_HZ,
            tau_slow: TAU_SLOW,
            tau_fast: TAU_FAST,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSection {
    pub eta: f64,
    pub shots: Shots,
    pub seed: u64,
    pub dark_error: f64,
}

impl Default for MeasurementSection {
    fn default() -> Self {
        Self {
            eta: DEFAULT_ETA,
            shots: Shots::Infinite,
            seed: 0,
            dark_error: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscillateSection {
    pub n_initial: usize,
    /// s
    pub t_max: f64,
    pub points: usize,
    pub coherence_time: Option<f64>,
}

impl Default for OscillateSection {
    fn default() -> Self {
        Self {
            n_initial: 2,
            t_max: 1e-3,
            points: 41,
            coherence_time: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingSection {
    /// Hz
    pub delta_min: f64,
    pub delta_max: f64,
    pub points: usize,
}

impl Default for CrossingSection {
    fn default() -> Self {
        Self {
            delta_min: -20e3,
            delta_max: 20e3,
            points: 201,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Rect,
    RadialCut,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WignerSection {
    pub grid: GridKind,
    /// Half width of the rectangle or largest radius of the cut.
    pub extent: f64,
    pub points: usize,
    pub phases: usize,
}

impl Default for WignerSection {
    fn default() -> Self {
        Self {
            grid: GridKind::Rect,
            extent: RECT_HALF_WIDTH,
            points: RECT_POINTS,
            phases: CUT_PHASES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    WignerOrigin,
    Gap,
    OscillationFrequency,
}

impl Observable {
    pub fn name(&self) -> &'static str {
        match self {
            Observable::WignerOrigin => "wigner_origin",
            Observable::Gap => "gap",
            Observable::OscillationFrequency => "oscillation_frequency",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeSection {
    pub observable: Observable,
    /// `(radial, axial)`, coarse to fine.
    pub dims: Vec<(usize, usize)>,
    /// s, coarse to fine.
    pub steps: Vec<f64>,
}

impl Default for ConvergeSection {
    fn default() -> Self {
        Self {
            observable: Observable::WignerOrigin,
            dims: vec![(20, 10), (40, 20)],
            steps: vec![4e-6, 2e-6],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub output: PathBuf,
    pub trap: TrapSection,
    pub simulation: SimulationSection,
    pub measurement: MeasurementSection,
    pub state: Option<StateSpec>,
    pub oscillate: OscillateSection,
    pub crossing: CrossingSection,
    pub wigner: WignerSection,
    pub converge: ConvergeSection,
}

impl RunConfig {
    /// Reference settings for `experiment`.
    pub fn defaults(experiment: Experiment) -> Self {
        Self {
            experiment,
            output: PathBuf::from("out"),
            trap: TrapSection::default(),
            simulation: SimulationSection::default(),
            measurement: MeasurementSection::default(),
            state: None,
            oscillate: OscillateSection::default(),
            crossing: CrossingSection::default(),
            wigner: WignerSection::default(),
            converge: ConvergeSection::default(),
        }
    }

    /// Radial-cut defaults differ from the rectangle's.
    pub fn use_radial_cut(&mut self) {
        self.wigner = WignerSection {
            grid: GridKind::RadialCut,
            extent: crate::protocols::wigner_scan::CUT_RADIUS,
            points: CUT_POINTS,
            phases: CUT_PHASES,
        };
    }

    /// Checks cross-field constraints; parsing calls this.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let t = &self.trap;
        for (k, v) in [
            ("trap.freq_x", t.freq_x),
            ("trap.freq_y", t.freq_y),
            ("trap.freq_z", t.freq_z),
        ] {
            if !(v > 0.0) {
                return Err(ConfigError::invalid(k, "must be positive"));
            }
        }
        if !(t.freq_z < t.freq_x && t.freq_z < t.freq_y) {
            return Err(ConfigError::invalid(
                "trap.freq_z",
                "must be below both radial frequencies",
            ));
        }
        let s = &self.simulation;
        if s.radial_dim < 3 || s.axial_dim < 3 {
            return Err(ConfigError::invalid("simulation", "dims must be at least 3"));
        }
        for (k, v) in [
            ("simulation.max_step", s.max_step),
            ("simulation.parking", s.parking),
            ("simulation.tau_slow", s.tau_slow),
            ("simulation.tau_fast", s.tau_fast),
        ] {
            if !(v > 0.0) {
                return Err(ConfigError::invalid(k, "must be positive"));
            }
        }
        let m = &self.measurement;
        if !(m.eta > 0.0 && m.eta <= 1.0) {
            return Err(ConfigError::invalid("measurement.eta", "must lie in (0, 1]"));
        }
        if let Shots::Finite(0) = m.shots {
            return Err(ConfigError::invalid("measurement.shots", "must be positive"));
        }
        if !(0.0..=1.0).contains(&m.dark_error) {
            return Err(ConfigError::invalid("measurement.dark_error", "must lie in [0, 1]"));
        }
        let o = &self.oscillate;
        if !(o.t_max > 0.0) || o.points < 4 {
            return Err(ConfigError::invalid(
                "oscillate",
                "needs t_max > 0 and at least 4 points",
            ));
        }
        if o.coherence_time.is_some_and(|c| !(c > 0.0)) {
            return Err(ConfigError::invalid("oscillate.coherence_time", "must be positive"));
        }
        let c = &self.crossing;
        if !(c.delta_min <= 0.0 && c.delta_max >= 0.0 && c.delta_min < c.delta_max) || c.points < 2 {
            return Err(ConfigError::invalid(
                "crossing",
                "range must span zero with at least 2 points",
            ));
        }
        let w = &self.wigner;
        if !(w.extent >= 0.0) || w.points == 0 || w.phases == 0 {
            return Err(ConfigError::invalid(
                "wigner",
                "extent, points and phases must be positive",
            ));
        }
        let v = &self.converge;
        if v.dims.is_empty() || v.steps.is_empty() {
            return Err(ConfigError::invalid("converge", "dims and steps must be nonempty"));
        }
        if v.dims.windows(2).any(|p| p[1].0 < p[0].0 || p[1].1 < p[0].1) {
            return Err(ConfigError::invalid("converge.dims", "must be nondecreasing"));
        }
        if v.dims.iter().any(|&(r, a)| r < 3 || a < 3) {
            return Err(ConfigError::invalid("converge.dims", "dims must be at least 3"));
        }
        if v.steps.iter().any(|&x| !(x > 0.0)) || v.steps.windows(2).any(|p| p[1] > p[0]) {
            return Err(ConfigError::invalid(
                "converge.steps",
                "must be positive and nonincreasing",
            ));
        }
        let needs_state = matches!(self.experiment, Experiment::Parity | Experiment::Wigner)
            || (self.experiment == Experiment::Converge && v.observable == Observable::WignerOrigin);
        if needs_state && self.state.is_none() {
            return Err(ConfigError::invalid("state", "this experiment needs a [state] section"));
        }
        Ok(())
    }

    /// Fully explicit TOML in a fixed key order; parsing it gives back `self`.
    pub fn canonical(&self) -> String {
        let f = |v: f64| format_quantity(v, Dimension::Frequency);
        let t = |v: f64| format_quantity(v, Dimension::Time);
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!("experiment = {}", quote(self.experiment.name())));
        line(format!("output = {}", quote(&self.output.to_string_lossy())));
        line(String::new());
        line("[trap]".into());
        line(format!("freq_x = {}", quote(&f(self.trap.freq_x))));
        line(format!("freq_y = {}", quote(&f(self.trap.freq_y))));
        line(format!("freq_z = {}", quote(&f(self.trap.freq_z))));
        line(format!("ion = {}", quote(&self.trap.ion)));
        let coupling = match self.trap.coupling {
            CouplingEvaluation::Resonant => "resonant",
            CouplingEvaluation::Bare => "bare",
        };
        line(format!("coupling = {}", quote(coupling)));
        line(String::new());
        let s = &self.simulation;
        line("[simulation]".into());
        line(format!("radial_dim = {}", s.radial_dim));
        line(format!("axial_dim = {}", s.axial_dim));
        line(format!("max_step = {}", quote(&t(s.max_step))));
        line(format!("parking = {}", quote(&f(s.parking))));
        line(format!("tau_slow = {}", quote(&t(s.tau_slow))));
        line(format!("tau_fast = {}", quote(&t(s.tau_fast))));
        line(String::new());
        let m = &self.measurement;
        line("[measurement]".into());
        line(format!("eta = {:?}", m.eta));
        match m.shots {
            Shots::Infinite => line(format!("shots = {}", quote("infinite"))),
            Shots::Finite(n) => line(format!("shots = {n}")),
        }
        line(format!("seed = {}", m.seed));
        line(format!("dark_error = {:?}", m.dark_error));
        if let Some(state) = &self.state {
            line(String::new());
            line("[state]".into());
            line(format!("descriptor = {}", quote(&state.to_string())));
        }
        line(String::new());
        let o = &self.oscillate;
        line("[oscillate]".into());
        line(format!("n_initial = {}", o.n_initial));
        line(format!("t_max = {}", quote(&t(o.t_max))));
        line(format!("points = {}", o.points));
        match o.coherence_time {
            Some(c) => line(format!("coherence_time = {}", quote(&t(c)))),
            None => line(format!("coherence_time = {}", quote("none"))),
        }
        line(String::new());
        let c = &self.crossing;
        line("[crossing]".into());
        line(format!("delta_min = {}", quote(&f(c.delta_min))));
        line(format!("delta_max = {}", quote(&f(c.delta_max))));
        line(format!("points = {}", c.points));
        line(String::new());
        let w = &self.wigner;
        line("[wigner]".into());
        let grid = match w.grid {
            GridKind::Rect => "rect",
            GridKind::RadialCut => "radial_cut",
        };
        line(format!("grid = {}", quote(grid)));
        line(format!("extent = {:?}", w.extent));
        line(format!("points = {}", w.points));
        line(format!("phases = {}", w.phases));
        line(String::new());
        let v = &self.converge;
        line("[converge]".into());
        line(format!("observable = {}", quote(v.observable.name())));
        let dims: Vec<String> = v.dims.iter().map(|(r, a)| quote(&format!("{r}x{a}"))).collect();
        line(format!("dims = [{}]", dims.join(", ")));
        let steps: Vec<String> = v.steps.iter().map(|&x| quote(&t(x))).collect();
        line(format!("steps = [{}]", steps.join(", ")));
        out
    }

    /// SHA-256 of the canonical form, hex.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn quote(s: &str) -> String {
    Value::String(s.to_string()).to_string()
}

/// Parses `"RxA"`, e.g. `"40x20"`.
pub fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (r, a) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("`{s}` is not of the form RxA"))?;
    let r: usize = r.trim().parse().map_err(|_| format!("bad radial dim in `{s}`"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad axial dim in `{s}`"))?;
    Ok((r, a))
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Key reader for one table; remembers which keys were used.
struct Section<'a> {
    name: &'a str,
    table: Option<&'a Table>,
    used: Vec<&'static str>,
}

impl<'a> Section<'a> {
    fn new(root: &'a Table, name: &'a str) -> Result<Self, ConfigError> {
        let table = match root.get(name) {
            None => None,
            Some(Value::Table(t)) => Some(t),
            Some(_) => return Err(ConfigError::invalid(name, "must be a table")),
        };
        Ok(Self {
            name,
            table,
            used: Vec::new(),
        })
    }

    fn path(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    fn get(&mut self, key: &'static str) -> Option<&'a Value> {
        self.used.push(key);
        self.table.and_then(|t| t.get(key))
    }

    fn finish(self) -> Result<(), ConfigError> {
        if let Some(t) = self.table {
            if let Some(k) = t.keys().find(|k| !self.used.contains(&k.as_str())) {
                return Err(ConfigError::UnknownKey { key: self.path(k) });
            }
        }
        Ok(())
    }

    fn string(&mut self, key: &'static str) -> Result<Option<&'a str>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(_) => Err(ConfigError::invalid(&self.path(key), "expected a string")),
        }
    }

    fn quantity(&mut self, key: &'static str, dim: Dimension, default: f64) -> Result<f64, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(Value::String(s)) => parse_quantity(s, dim).map_err(|message| ConfigError::Unit {
                key: self.path(key),
                message,
            }),
            Some(_) => Err(ConfigError::Unit {
                key: self.path(key),
                message: format!("expected a quoted {dim} with unit, e.g. \"1 ms\" or \"1 kHz\""),
            }),
        }
    }

    fn integer(&mut self, key: &'static str, default: usize) -> Result<usize, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(Value::Integer(i)) if *i >= 0 => Ok(*i as usize),
            Some(Value::Integer(_)) => Err(ConfigError::invalid(&self.path(key), "must be nonnegative")),
            Some(_) => Err(ConfigError::invalid(&self.path(key), "expected an integer")),
        }
    }

    fn float(&mut self, key: &'static str, default: f64) -> Result<f64, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(Value::Float(x)) => Ok(*x),
            Some(Value::Integer(i)) => Ok(*i as f64),
            Some(_) => Err(ConfigError::invalid(&self.path(key), "expected a number")),
        }
    }

    fn choice<T: Copy>(&mut self, key: &'static str, options: &[(&str, T)], default: T) -> Result<T, ConfigError> {
        match self.string(key)? {
            None => Ok(default),
            Some(s) => options.iter().find(|(n, _)| *n == s).map(|(_, v)| *v).ok_or_else(|| {
                let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                ConfigError::invalid(&self.path(key), format!("`{s}` is not one of {}", names.join(", ")))
            }),
        }
    }
}

const SECTIONS: [&str; 8] = [
    "trap",
    "simulation",
    "measurement",
    "state",
    "oscillate",
    "crossing",
    "wigner",
    "converge",
];

/// Parses and validates a configuration. `experiment` supplies the
/// experiment when the document does not name one.
pub fn parse_config(text: &str, experiment: Option<Experiment>) -> Result<RunConfig, ConfigError> {
    let cfg = parse_config_unchecked(text, experiment)?;
    cfg.validate()?;
    Ok(cfg)
}

/// As [`parse_config`] without the final cross-field validation, for
/// callers that apply overrides first.
pub fn parse_config_unchecked(text: &str, experiment: Option<Experiment>) -> Result<RunConfig, ConfigError> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        ConfigError::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    for key in root.keys() {
        if !(SECTIONS.contains(&key.as_str()) || key == "experiment" || key == "output") {
            return Err(ConfigError::UnknownKey { key: key.clone() });
        }
    }
    let named = match root.get("experiment") {
        None => None,
        Some(Value::String(s)) => Some(
            s.parse::<Experiment>()
                .map_err(|m| ConfigError::invalid("experiment", m))?,
        ),
        Some(_) => return Err(ConfigError::invalid("experiment", "expected a string")),
    };
    let experiment = match (named, experiment) {
        (Some(a), Some(b)) if a != b => {
            return Err(ConfigError::invalid(
                "experiment",
                format!("file names `{}` but `{}` was requested", a.name(), b.name()),
            ))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(ConfigError::invalid("experiment", "no experiment given")),
    };
    let mut cfg = RunConfig::defaults(experiment);
    match root.get("output") {
        None => {}
        Some(Value::String(s)) => cfg.output = PathBuf::from(s),
        Some(_) => return Err(ConfigError::invalid("output", "expected a string")),
    }

    let mut s = Section::new(&root, "trap")?;
    let d = TrapSection::default();
    cfg.trap.freq_x = s.quantity("freq_x", Dimension::Frequency, d.freq_x)?;
    cfg.trap.freq_y = s.quantity("freq_y", Dimension::Frequency, d.freq_y)?;
    cfg.trap.freq_z = s.quantity("freq_z", Dimension::Frequency, d.freq_z)?;
    if let Some(ion) = s.string("ion")? {
        if ion != "171Yb+" {
            return Err(ConfigError::invalid(
                "trap.ion",
                format!("unsupported ion `{ion}`; only 171Yb+ is built in"),
            ));
        }
    }
    cfg.trap.coupling = s.choice(
        "coupling",
        &[
            ("resonant", CouplingEvaluation::Resonant),
            ("bare", CouplingEvaluation::Bare),
        ],
        d.coupling,
    )?;
    s.finish()?;

    let mut s = Section::new(&root, "simulation")?;
    let d = SimulationSection::default();
    cfg.simulation.radial_dim = s.integer("radial_dim", d.radial_dim)?;
    cfg.simulation.axial_dim = s.integer("axial_dim", d.axial_dim)?;
    cfg.simulation.max_step = s.quantity("max_step", Dimension::Time, d.max_step)?;
    cfg.simulation.parking = s.quantity("parking", Dimension::Frequency, d.parking)?;
    cfg.simulation.tau_slow = s.quantity("tau_slow", Dimension::Time, d.tau_slow)?;
    cfg.simulation.tau_fast = s.quantity("tau_fast", Dimension::Time, d.tau_fast)?;
    s.finish()?;

    let mut s = Section::new(&root, "measurement")?;
    let d = MeasurementSection::default();
    cfg.measurement.eta = s.float("eta", d.eta)?;
    cfg.measurement.shots = match s.get("shots") {
        None => d.shots,
        Some(Value::String(v)) if v == "infinite" => Shots::Infinite,
        Some(Value::Integer(n)) if *n > 0 => Shots::Finite(*n as u64),
        Some(Value::Integer(_)) => return Err(ConfigError::invalid("measurement.shots", "must be positive")),
        Some(_) => {
            return Err(ConfigError::invalid(
                "measurement.shots",
                "expected a positive integer or \"infinite\"",
            ))
        }
    };
    cfg.measurement.seed = match s.get("seed") {
        None => d.seed,
        Some(Value::Integer(n)) if *n >= 0 => *n as u64,
        Some(_) => {
            return Err(ConfigError::invalid(
                "measurement.seed",
                "expected a nonnegative integer",
            ))
        }
    };
    cfg.measurement.dark_error = s.float("dark_error", d.dark_error)?;
    s.finish()?;

    let mut s = Section::new(&root, "state")?;
    if let Some(desc) = s.string("descriptor")? {
        cfg.state = Some(
            desc.parse()
                .map_err(|e: String| ConfigError::invalid("state.descriptor", e))?,
        );
    } else if s.table.is_some() {
        return Err(ConfigError::invalid("state.descriptor", "missing"));
    }
    s.finish()?;

    let mut s = Section::new(&root, "oscillate")?;
    let d = OscillateSection::default();
    cfg.oscillate.n_initial = s.integer("n_initial", d.n_initial)?;
    cfg.oscillate.t_max = s.quantity("t_max", Dimension::Time, d.t_max)?;
    cfg.oscillate.points = s.integer("points", d.points)?;
    cfg.oscillate.coherence_time = match s.get("coherence_time") {
        Some(Value::String(v)) if v == "none" => None,
        None => d.coherence_time,
        Some(_) => Some(s.quantity("coherence_time", Dimension::Time, 0.0)?),
    };
    s.finish()?;

    let mut s = Section::new(&root, "crossing")?;
    let d = CrossingSection::default();
    cfg.crossing.delta_min = s.quantity("delta_min", Dimension::Frequency, d.delta_min)?;
    cfg.crossing.delta_max = s.quantity("delta_max", Dimension::Frequency, d.delta_max)?;
    cfg.crossing.points = s.integer("points", d.points)?;
    s.finish()?;

    let mut s = Section::new(&root, "wigner")?;
    let grid = s.choice(
        "grid",
        &[("rect", GridKind::Rect), ("radial_cut", GridKind::RadialCut)],
        GridKind::Rect,
    )?;
    if grid == GridKind::RadialCut {
        cfg.use_radial_cut();
    }
    let d = cfg.wigner.clone();
    cfg.wigner.extent = s.float("extent", d.extent)?;
    cfg.wigner.points = s.integer("points", d.points)?;
    cfg.wigner.phases = s.integer("phases", d.phases)?;
    s.finish()?;

    let mut s = Section::new(&root, "converge")?;
    let d = ConvergeSection::default();
    cfg.converge.observable = s.choice(
        "observable",
        &[
            ("wigner_origin", Observable::WignerOrigin),
            ("gap", Observable::Gap),
            ("oscillation_frequency", Observable::OscillationFrequency),
        ],
        d.observable,
    )?;
    cfg.converge.dims = match s.get("dims") {
        None => d.dims,
        Some(Value::Array(a)) => a
            .iter()
            .map(|v| match v {
                Value::String(x) => parse_dims(x).map_err(|m| ConfigError::invalid("converge.dims", m)),
                _ => Err(ConfigError::invalid("converge.dims", "expected strings like \"40x20\"")),
            })
            .collect::<Result<_, _>>()?,
        Some(_) => return Err(ConfigError::invalid("converge.dims", "expected an array")),
    };
    cfg.converge.steps = match s.get("steps") {
        None => d.steps,
        Some(Value::Array(a)) => a
            .iter()
            .map(|v| match v {
                Value::String(x) => parse_quantity(x, Dimension::Time).map_err(|message| ConfigError::Unit {
                    key: "converge.steps".into(),
                    message,
                }),
                _ => Err(ConfigError::Unit {
                    key: "converge.steps".into(),
                    message: "expected quoted times with units".into(),
                }),
            })
            .collect::<Result<_, _>>()?,
        Some(_) => return Err(ConfigError::invalid("converge.steps", "expected an array")),
    };
    s.finish()?;
    Ok(cfg)
}
