//! Rotating-frame dynamics of the coupled modes, block-diagonal in the
//! conserved weight `K = n_a + 2 n_c`.

pub mod cache;
pub mod hamiltonian;
pub mod propagate;
pub mod schedule;
pub mod sectors;
pub mod sweep;

pub use cache::EigenCache;
pub use hamiltonian::{build_hamiltonian, k_operator, RotatingFrameHamiltonian};
pub use propagate::{evolve, evolve_backward, propagate, Drive, Recording, StepPolicy, Trajectory, DEFAULT_MAX_STEP};
pub use schedule::{rc_ramp, ConstantDetuning, DetuningProfile, RampDirection, RampSchedule, Sequence};
pub use sectors::{block_decompose, BlockDecomposition, Sector};
pub use sweep::{SectorSweep, SweepPropagator};
