//! Trap geometry and out-of-phase mode parameters of a two-ion crystal.
//!
//! All frequencies are angular (rad/s); conversion to Hz happens only at
//! the reporting boundary.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};

/// CODATA 2018 values.
pub mod constants {
    /// Reduced Planck constant, J s.
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Elementary charge, C.
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    /// Vacuum permittivity, F/m.
    pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_813e-12;
    /// Unified atomic mass unit, kg.
    pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_067e-27;
}

use constants::*;

pub fn hz_to_angular(f: f64) -> f64 {
    2.0 * PI * f
}

pub fn angular_to_hz(w: f64) -> f64 {
    w / (2.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IonSpecies {
    pub mass: f64,
    pub charge: f64,
}

impl IonSpecies {
    /// ¹⁷¹Yb⁺
    pub const YB171: IonSpecies = IonSpecies {
        mass: 171.0 * ATOMIC_MASS_UNIT,
        charge: ELEMENTARY_CHARGE,
    };

    pub fn new(mass: f64, charge: f64) -> Result<Self> {
        if !(mass > 0.0 && charge > 0.0 && mass.is_finite() && charge.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "ion mass and charge must be positive (got {mass}, {charge})"
            )));
        }
        Ok(Self { mass, charge })
    }
}

/// Single-ion secular frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapConfig {
    omega_x: f64,
    omega_y: f64,
    omega_z: f64,
}

impl TrapConfig {
    pub fn new(omega_x: f64, omega_y: f64, omega_z: f64) -> Result<Self> {
        for (name, w) in [("omega_x", omega_x), ("omega_y", omega_y), ("omega_z", omega_z)] {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidTrap(format!("{name} must be positive, got {w}")));
            }
        }
        if omega_z >= omega_x || omega_z >= omega_y {
            return Err(Error::InvalidTrap(format!(
                "axial crystallization needs omega_z < omega_x, omega_y (got {omega_x}, {omega_y}, {omega_z})"
            )));
        }
        Ok(Self {
            omega_x,
            omega_y,
            omega_z,
        })
    }

    pub fn from_hz(fx: f64, fy: f64, fz: f64) -> Result<Self> {
        Self::new(hz_to_angular(fx), hz_to_angular(fy), hz_to_angular(fz))
    }

    /// (0.99, 0.90, 0.75) MHz
    pub fn reference() -> Self {
        Self::from_hz(0.99e6, 0.90e6, 0.75e6).expect("reference trap is valid")
    }

    pub fn omega_x(&self) -> f64 {
        self.omega_x
    }

    pub fn omega_y(&self) -> f64 {
        self.omega_y
    }

    pub fn omega_z(&self) -> f64 {
        self.omega_z
    }
}

/// Minimizer of `m ω_z² z² + e²/(8πε₀ z)`, i.e. half the ion separation.
pub fn equilibrium_half_separation(ion: &IonSpecies, trap: &TrapConfig) -> f64 {
    let k = ion.charge * ion.charge / (16.0 * PI * VACUUM_PERMITTIVITY);
    (k / (ion.mass * trap.omega_z * trap.omega_z)).cbrt()
}

/// Axial relative-coordinate potential, used to cross-check `z₀`.
pub fn axial_potential(ion: &IonSpecies, trap: &TrapConfig, z: f64) -> f64 {
    ion.mass * trap.omega_z * trap.omega_z * z * z + ion.charge * ion.charge / (8.0 * PI * VACUUM_PERMITTIVITY * z)
}

/// `(ω_s, ω_r) = (√3 ω_z, √(ω_x² − ω_z²))`
pub fn out_of_phase_modes(trap: &TrapConfig) -> (f64, f64) {
    let omega_s = 3f64.sqrt() * trap.omega_z;
    let omega_r = (trap.omega_x * trap.omega_x - trap.omega_z * trap.omega_z).sqrt();
    (omega_s, omega_r)
}

pub fn detuning(omega_s: f64, omega_r: f64) -> f64 {
    omega_s - 2.0 * omega_r
}

/// Which radial frequency enters the coupling formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingEvaluation {
    /// `ω_r := ω_s / 2`, where the rotating-wave Hamiltonian applies.
    #[default]
    Resonant,
    /// The trap's own `√(ω_x² − ω_z²)`.
    Bare,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub xi: f64,
    /// `2√2 ξ`: splitting of the two-phonon manifold at resonance.
    pub splitting: f64,
}

/// `ξ = (1/8z₀) √(ħ ω_s³ / (m ω_r²))`
pub fn coupling_strength(ion: &IonSpecies, trap: &TrapConfig, eval: CouplingEvaluation) -> Coupling {
    let z0 = equilibrium_half_separation(ion, trap);
    let (omega_s, bare_r) = out_of_phase_modes(trap);
    let omega_r = match eval {
        CouplingEvaluation::Resonant => omega_s / 2.0,
        CouplingEvaluation::Bare => bare_r,
    };
    let xi = (HBAR * omega_s.powi(3) / (ion.mass * omega_r * omega_r)).sqrt() / (8.0 * z0);
    Coupling {
        xi,
        splitting: 2.0 * SQRT_2 * xi,
    }
}

/// Derived quantities of one trap setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeParams {
    pub omega_s: f64,
    pub omega_r: f64,
    pub z0: f64,
    pub xi: f64,
    /// `ω_s − 2ω_r` with the bare radial frequency.
    pub delta: f64,
}

impl ModeParams {
    pub fn compute(ion: &IonSpecies, trap: &TrapConfig, eval: CouplingEvaluation) -> Self {
        let (omega_s, omega_r) = out_of_phase_modes(trap);
        Self {
            omega_s,
            omega_r,
            z0: equilibrium_half_separation(ion, trap),
            xi: coupling_strength(ion, trap, eval).xi,
            delta: detuning(omega_s, omega_r),
        }
    }

    /// Reference ion and trap, coupling at resonance.
    pub fn reference() -> Self {
        Self::compute(
            &IonSpecies::YB171,
            &TrapConfig::reference(),
            CouplingEvaluation::Resonant,
        )
    }

    pub fn splitting(&self) -> f64 {
        2.0 * SQRT_2 * self.xi
    }
}
