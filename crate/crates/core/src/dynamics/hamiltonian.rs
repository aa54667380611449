use crate::algebra::{embed, mode_operator, Mode, ModeOperatorKind, Operator, TwoModeSpace};
use crate::error::Result;
use crate::linalg::{kron, C64};

/// `H/ħ = δ c†c + ξ (a†² c + a² c†)` in the frame rotating at `ω_r` for the
/// radial mode and `2ω_r` for the axial mode.
///
/// The free terms of the lab-frame Hamiltonian leave only the axial
/// detuning `δ = ω_s − 2ω_r`; the coupling is unchanged because the phases
/// picked up by `a†²` and `c` cancel. Populations and eigenvalue differences
/// are the same in either frame.
#[derive(Debug, Clone)]
pub struct RotatingFrameHamiltonian {
    pub xi: f64,
    pub delta: f64,
    pub space: TwoModeSpace,
    matrix: Operator,
}

impl RotatingFrameHamiltonian {
    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }
}

/// Dense assembly over the full two-mode space.
pub fn build_hamiltonian(xi: f64, delta: f64, space: &TwoModeSpace) -> Result<RotatingFrameHamiltonian> {
    let a = mode_operator(space.radial, ModeOperatorKind::Annihilate).into_matrix();
    let c = mode_operator(space.axial, ModeOperatorKind::Annihilate).into_matrix();
    let ad = a.adjoint();
    let up = kron(&(&ad * &ad), &c);
    let n_c = embed(
        &mode_operator(space.axial, ModeOperatorKind::Number),
        space,
        Mode::Axial,
    )?;
    let h = n_c.matrix() * C64::from(delta) + (&up + up.adjoint()) * C64::from(xi);
    Ok(RotatingFrameHamiltonian {
        xi,
        delta,
        space: *space,
        matrix: Operator::hermitian(h)?,
    })
}

/// `K = a†a + 2 c†c`
pub fn k_operator(space: &TwoModeSpace) -> Result<Operator> {
    let na = embed(
        &mode_operator(space.radial, ModeOperatorKind::Number),
        space,
        Mode::Radial,
    )?;
    let nc = embed(
        &mode_operator(space.axial, ModeOperatorKind::Number),
        space,
        Mode::Axial,
    )?;
    Operator::hermitian(na.matrix() + nc.matrix() * C64::from(2.0))
}
