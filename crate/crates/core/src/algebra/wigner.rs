//! Reference Wigner functions.
//!
//! `W(α) = (2/π) Tr[D(-α) ρ D(α) P]`, evaluated on pure single-mode states
//! with truncated operators, plus the closed form for Fock states.

use std::f64::consts::FRAC_2_PI;

use crate::algebra::operator::displacement_operator;
use crate::algebra::space::LEAK_THRESHOLD;
use crate::algebra::state::{Basis, StateVector};
use crate::error::{Error, Result};
use crate::linalg::{CVector, C64};

/// Largest imaginary part tolerated before a real quantity is accepted.
pub const IMAGINARY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerValue {
    pub value: f64,
    /// Guard-band population of the displaced state.
    pub guard_population: f64,
}

impl WignerValue {
    pub fn leaked(&self) -> bool {
        self.guard_population >= LEAK_THRESHOLD
    }
}

/// Accepts `z` as real if its imaginary part is below [`IMAGINARY_TOL`].
pub fn real_part(z: C64) -> Result<f64> {
    if z.im.abs() >= IMAGINARY_TOL {
        return Err(Error::ImaginaryResidue { residue: z.im });
    }
    Ok(z.re)
}

/// `⟨ψ|P|ψ⟩` for a single-mode amplitude vector.
pub fn parity_expectation(amps: &CVector) -> C64 {
    amps.iter()
        .enumerate()
        .map(|(n, z)| z.conj() * z * if n % 2 == 0 { 1.0 } else { -1.0 })
        .sum()
}

/// `D(-α)|ψ⟩` for a single-mode state.
pub fn displaced(state: &StateVector, alpha: C64) -> Result<StateVector> {
    let Basis::Mode(dim) = state.basis() else {
        return Err(Error::InvalidParameter(
            "Wigner evaluation needs a single-mode state".into(),
        ));
    };
    let d = displacement_operator(-alpha, dim)?;
    Ok(StateVector::from_parts_unchecked(
        state.basis(),
        d.matrix() * state.amplitudes(),
    ))
}

pub fn wigner_oracle(state: &StateVector, alpha: C64) -> Result<WignerValue> {
    let phi = displaced(state, alpha)?;
    let value = FRAC_2_PI * real_part(parity_expectation(phi.amplitudes()))?;
    Ok(WignerValue {
        value,
        guard_population: phi.guard_population(),
    })
}

/// Laguerre polynomial `L_n(x)` by the three-term recurrence.
pub fn laguerre(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0 - x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `W(|α|) = 2 (-1)ⁿ e^{-2|α|²} L_n(4|α|²) / π` for the Fock state `|n⟩`.
pub fn fock_wigner_closed_form(n: usize, r: f64) -> f64 {
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    FRAC_2_PI * sign * (-2.0 * r * r).exp() * laguerre(n, 4.0 * r * r)
}
