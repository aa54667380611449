use std::fmt;

use crate::algebra::space::{FockDim, Mode, TwoModeSpace};
use crate::error::{Error, Result};
use crate::linalg::{kron, max_abs, CMatrix, HermitianEigen, C64, I};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const UNITARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorTag {
    Hermitian,
    Unitary,
    General,
}

impl fmt::Display for OperatorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorTag::Hermitian => "hermitian",
            OperatorTag::Unitary => "unitary",
            OperatorTag::General => "general",
        })
    }
}

/// Dense square matrix with a verified structural tag.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: CMatrix,
    tag: OperatorTag,
}

impl Operator {
    pub fn general(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        Ok(Self {
            matrix,
            tag: OperatorTag::General,
        })
    }

    pub fn hermitian(matrix: CMatrix) -> Result<Self> {
        let mut op = Self::general(matrix)?;
        let residual = max_abs(&(&op.matrix - op.matrix.adjoint()));
        if residual >= HERMITIAN_TOL {
            return Err(Error::TagViolation {
                tag: "hermitian",
                residual,
            });
        }
        op.tag = OperatorTag::Hermitian;
        Ok(op)
    }

    pub fn unitary(matrix: CMatrix) -> Result<Self> {
        let mut op = Self::general(matrix)?;
        let n = op.dim();
        let residual = max_abs(&(op.matrix.adjoint() * &op.matrix - CMatrix::identity(n, n)));
        if residual >= UNITARY_TOL {
            return Err(Error::TagViolation {
                tag: "unitary",
                residual,
            });
        }
        op.tag = OperatorTag::Unitary;
        Ok(op)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
            tag: OperatorTag::Unitary,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn tag(&self) -> OperatorTag {
        self.tag
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            tag: self.tag,
        }
    }
}

/// Single-mode ladder and diagonal operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeOperatorKind {
    Annihilate,
    Create,
    Number,
    Parity,
}

pub fn mode_operator(dim: FockDim, kind: ModeOperatorKind) -> Operator {
    let d = dim.dim();
    let mut m = CMatrix::zeros(d, d);
    let tag = match kind {
        ModeOperatorKind::Annihilate => {
            for n in 1..d {
                m[(n - 1, n)] = C64::from((n as f64).sqrt());
            }
            OperatorTag::General
        }
        ModeOperatorKind::Create => {
            for n in 1..d {
                m[(n, n - 1)] = C64::from((n as f64).sqrt());
            }
            OperatorTag::General
        }
        ModeOperatorKind::Number => {
            for n in 0..d {
                m[(n, n)] = C64::from(n as f64);
            }
            OperatorTag::Hermitian
        }
        ModeOperatorKind::Parity => {
            for n in 0..d {
                m[(n, n)] = C64::from(if n % 2 == 0 { 1.0 } else { -1.0 });
            }
            // diagonal ±1 is both hermitian and unitary
            OperatorTag::Unitary
        }
    };
    Operator { matrix: m, tag }
}

/// Lift a single-mode operator into the two-mode space: `op ⊗ I` for the
/// radial mode, `I ⊗ op` for the axial mode.
pub fn embed(op: &Operator, space: &TwoModeSpace, which: Mode) -> Result<Operator> {
    let target = match which {
        Mode::Radial => space.radial.dim(),
        Mode::Axial => space.axial.dim(),
    };
    if op.dim() != target {
        return Err(Error::DimensionMismatch {
            expected: target,
            found: op.dim(),
        });
    }
    let matrix = match which {
        Mode::Radial => {
            let id = CMatrix::identity(space.axial.dim(), space.axial.dim());
            kron(op.matrix(), &id)
        }
        Mode::Axial => {
            let id = CMatrix::identity(space.radial.dim(), space.radial.dim());
            kron(&id, op.matrix())
        }
    };
    Ok(Operator { matrix, tag: op.tag })
}

/// `[A, B] = AB - BA`
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// `D(α) = exp(α a† − α* a)` on a truncated mode.
///
/// The anti-Hermitian generator `G` is exponentiated through the Hermitian
/// matrix `H = iG`, so `D = exp(-iH)`.
pub fn displacement_operator(alpha: C64, dim: FockDim) -> Result<Operator> {
    if alpha == C64::new(0.0, 0.0) {
        return Ok(Operator::identity(dim.dim()));
    }
    let a = mode_operator(dim, ModeOperatorKind::Annihilate).into_matrix();
    let ad = a.adjoint();
    let generator = ad * alpha - a * alpha.conj();
    let h = generator * I;
    let h = (&h + h.adjoint()) * C64::from(0.5);
    Operator::unitary(HermitianEigen::new(&h).evolution(1.0))
}

/// Population that `D(α)|0⟩` puts into the guard band of `dim`.
pub fn displacement_guard_population(alpha: C64, dim: FockDim) -> Result<f64> {
    let d = displacement_operator(alpha, dim)?;
    Ok((dim.usable()..dim.dim()).map(|n| d.matrix()[(n, 0)].norm_sqr()).sum())
}
