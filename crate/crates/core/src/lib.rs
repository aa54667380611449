//! Simulator for the trilinear phonon coupling of two trapped ions: a
//! degenerate parametric oscillator in which one axial (stretch) phonon
//! converts into two radial (rocking) phonons and back.
//!
//! Layers, bottom-up:
//! - [`algebra`]: truncated Fock-space operators, states, reference Wigner functions
//! - [`trap`]: equilibrium geometry, mode frequencies and the coupling `ξ`
//! - [`dynamics`]: rotating-frame Hamiltonian, `K = n_a + 2 n_c` sectors, propagation
//! - [`protocols`]: conversion oscillations, avoided crossing, adiabatic
//!   parity readout, Wigner tomography with a noisy measurement channel
//! - [`harness`]: configuration, experiment runner and CSV artifacts

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod protocols;
pub mod trap;

pub use error::{Error, Result};
