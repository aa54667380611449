//! Truncated Fock-space operators, canonical states and reference Wigner
//! functions for the radial (`a`) and axial (`c`) modes.

pub mod operator;
pub mod space;
pub mod state;
pub mod wigner;

pub use operator::{
    commutator, displacement_guard_population, displacement_operator, embed, mode_operator, ModeOperatorKind, Operator,
    OperatorTag,
};
pub use space::{FockDim, Mode, TwoModeSpace, DEFAULT_AXIAL_DIM, DEFAULT_RADIAL_DIM, LEAK_THRESHOLD};
pub use state::{make_state, product_state, Basis, CatSign, StateSpec, StateVector};
pub use wigner::{fock_wigner_closed_form, laguerre, wigner_oracle, WignerValue};
