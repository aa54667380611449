use std::fmt;
use std::str::FromStr;

use crate::algebra::space::{FockDim, TwoModeSpace, LEAK_THRESHOLD};
use crate::error::{Error, Result};
use crate::linalg::{CVector, C64};

pub const NORM_TOL: f64 = 1e-9;

/// Space a [`StateVector`] lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Mode(FockDim),
    TwoMode(TwoModeSpace),
}

impl Basis {
    pub fn dim(&self) -> usize {
        match self {
            Basis::Mode(d) => d.dim(),
            Basis::TwoMode(s) => s.dim(),
        }
    }

    fn is_guard(&self, index: usize) -> bool {
        match self {
            Basis::Mode(d) => d.is_guard_level(index),
            Basis::TwoMode(s) => s.is_guard_state(index),
        }
    }
}

/// Normalized pure state over a truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    basis: Basis,
    amps: CVector,
}

impl StateVector {
    /// Wraps amplitudes, checking length and normalization.
    pub fn new(basis: Basis, amps: CVector) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: amps.len(),
            });
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Contract(format!("state norm {norm} deviates from 1")));
        }
        Ok(Self { basis, amps })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(basis: Basis, amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter("cannot normalize a null vector".into()));
        }
        Self::new(basis, amps / C64::from(norm))
    }

    pub(crate) fn from_parts_unchecked(basis: Basis, amps: CVector) -> Self {
        Self { basis, amps }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn population(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }

    pub fn guard_population(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| self.basis.is_guard(*i))
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }

    pub fn check_guard(&self) -> Result<()> {
        let population = self.guard_population();
        if population >= LEAK_THRESHOLD {
            return Err(Error::TruncationLeak {
                population,
                threshold: LEAK_THRESHOLD,
            });
        }
        Ok(())
    }

    /// Radial-mode state tensored with the axial vacuum.
    pub fn with_axial_vacuum(&self, space: &TwoModeSpace) -> Result<StateVector> {
        let Basis::Mode(dim) = self.basis else {
            return Err(Error::InvalidParameter("expected a single-mode state".into()));
        };
        if dim.dim() != space.radial.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.radial.dim(),
                found: dim.dim(),
            });
        }
        let mut amps = CVector::zeros(space.dim());
        for (n, z) in self.amps.iter().enumerate() {
            amps[space.index(n, 0)] = *z;
        }
        Ok(Self {
            basis: Basis::TwoMode(*space),
            amps,
        })
    }

    /// Fock-number distribution of one mode (traces out the other).
    pub fn mode_distribution(&self, axial: bool) -> Vec<f64> {
        match self.basis {
            Basis::Mode(_) => self.amps.iter().map(|z| z.norm_sqr()).collect(),
            Basis::TwoMode(space) => {
                let len = if axial { space.axial.dim() } else { space.radial.dim() };
                let mut out = vec![0.0; len];
                for (i, z) in self.amps.iter().enumerate() {
                    let (n_a, n_c) = space.occupations(i);
                    out[if axial { n_c } else { n_a }] += z.norm_sqr();
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatSign {
    Plus,
    Minus,
}

impl CatSign {
    pub fn value(self) -> f64 {
        match self {
            CatSign::Plus => 1.0,
            CatSign::Minus => -1.0,
        }
    }
}

/// Radial-mode states used by the experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Fock(usize),
    Coherent(C64),
    /// `N (|α⟩ + sign |α e^{iφ}⟩)`
    Cat {
        alpha: C64,
        phi: f64,
        sign: CatSign,
    },
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn cplx(z: C64) -> String {
            if z.im == 0.0 {
                format!("{}", z.re)
            } else {
                format!("{}{:+}i", z.re, z.im)
            }
        }
        match self {
            StateSpec::Fock(n) => write!(f, "fock:{n}"),
            StateSpec::Coherent(a) => write!(f, "coherent:{}", cplx(*a)),
            StateSpec::Cat { alpha, phi, sign } => write!(
                f,
                "cat:{}:{}:{}",
                cplx(*alpha),
                phi,
                match sign {
                    CatSign::Plus => "plus",
                    CatSign::Minus => "minus",
                }
            ),
        }
    }
}

fn parse_complex(s: &str) -> std::result::Result<C64, String> {
    let s = s.trim();
    if let Some(body) = s.strip_suffix('i') {
        // split at the last sign that is not the leading one or part of an exponent
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        return match split {
            Some(k) => {
                let re: f64 = body[..k].parse().map_err(|_| format!("bad complex '{s}'"))?;
                let im: f64 = body[k..].parse().map_err(|_| format!("bad complex '{s}'"))?;
                Ok(C64::new(re, im))
            }
            None => {
                let im: f64 = match body {
                    "" | "+" => 1.0,
                    "-" => -1.0,
                    b => b.parse().map_err(|_| format!("bad complex '{s}'"))?,
                };
                Ok(C64::new(0.0, im))
            }
        };
    }
    s.parse::<f64>().map(C64::from).map_err(|_| format!("bad number '{s}'"))
}

fn parse_angle(s: &str) -> std::result::Result<f64, String> {
    use std::f64::consts::PI;
    match s.trim() {
        "pi" => Ok(PI),
        "-pi" => Ok(-PI),
        "pi/2" => Ok(PI / 2.0),
        "-pi/2" => Ok(-PI / 2.0),
        other => other.parse().map_err(|_| format!("bad angle '{other}'")),
    }
}

impl FromStr for StateSpec {
    type Err = String;

    /// `fock:N`, `coherent:ALPHA`, `cat:ALPHA:PHI:plus|minus`; complex values
    /// as `1.2`, `0.5+1i`, `2i`; angles in radians or `pi`, `pi/2`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["fock", n] => n
                .trim()
                .parse()
                .map(StateSpec::Fock)
                .map_err(|_| format!("bad Fock number '{n}'")),
            ["coherent", a] => parse_complex(a).map(StateSpec::Coherent),
            ["cat", a, phi, sign] => {
                let sign = match sign.trim() {
                    "plus" | "+" => CatSign::Plus,
                    "minus" | "-" => CatSign::Minus,
                    other => return Err(format!("bad cat sign '{other}'")),
                };
                Ok(StateSpec::Cat {
                    alpha: parse_complex(a)?,
                    phi: parse_angle(phi)?,
                    sign,
                })
            }
            _ => Err(format!("unrecognized state descriptor '{s}'")),
        }
    }
}

/// Unnormalized truncated coherent series `e^{-|α|²/2} αⁿ/√n!`.
fn coherent_series(alpha: C64, dim: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    let mut c = C64::from((-alpha.norm_sqr() / 2.0).exp());
    for n in 0..dim {
        if n > 0 {
            c *= alpha / (n as f64).sqrt();
        }
        v[n] = c;
    }
    v
}

/// `⟨α|β⟩` for untruncated coherent states.
pub fn coherent_overlap(alpha: C64, beta: C64) -> C64 {
    (-(alpha.norm_sqr() + beta.norm_sqr()) / 2.0 + alpha.conj() * beta).exp()
}

fn guarded(basis: Basis, amps: CVector) -> Result<StateVector> {
    let state = StateVector::from_parts_unchecked(basis, amps);
    state.check_guard()?;
    let norm = state.norm();
    StateVector::new(basis, state.into_amplitudes() / C64::from(norm))
}

/// Builds a radial-mode state.
pub fn make_state(dim: FockDim, spec: &StateSpec) -> Result<StateVector> {
    let basis = Basis::Mode(dim);
    match *spec {
        StateSpec::Fock(n) => {
            if n >= dim.usable() {
                return Err(Error::OccupationExceedsTruncation {
                    occupation: n,
                    dim: dim.dim(),
                });
            }
            let mut amps = CVector::zeros(dim.dim());
            amps[n] = C64::from(1.0);
            StateVector::new(basis, amps)
        }
        StateSpec::Coherent(alpha) => guarded(basis, coherent_series(alpha, dim.dim())),
        StateSpec::Cat { alpha, phi, sign } => {
            let beta = alpha * C64::from_polar(1.0, phi);
            let s = sign.value();
            let overlap = coherent_overlap(alpha, beta).re;
            let denom = 2.0 * (1.0 + s * overlap);
            if denom <= 1e-14 {
                return Err(Error::InvalidParameter(format!(
                    "cat state {spec} vanishes identically"
                )));
            }
            let n = denom.sqrt().recip();
            let amps =
                (coherent_series(alpha, dim.dim()) + coherent_series(beta, dim.dim()) * C64::from(s)) * C64::from(n);
            guarded(basis, amps)
        }
    }
}

/// Product Fock state `|n_a⟩_r |n_c⟩_a`.
pub fn product_state(space: &TwoModeSpace, n_a: usize, n_c: usize) -> Result<StateVector> {
    if n_a >= space.radial.usable() {
        return Err(Error::OccupationExceedsTruncation {
            occupation: n_a,
            dim: space.radial.dim(),
        });
    }
    if n_c >= space.axial.usable() {
        return Err(Error::OccupationExceedsTruncation {
            occupation: n_c,
            dim: space.axial.dim(),
        });
    }
    let mut amps = CVector::zeros(space.dim());
    amps[space.index(n_a, n_c)] = C64::from(1.0);
    StateVector::new(Basis::TwoMode(*space), amps)
}
