//! Dense complex linear algebra shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Columns are the normalized eigenvectors, in the order of `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(m: &CMatrix) -> Self {
        let n = m.nrows();
        if n == 1 {
            return Self {
                values: vec![m[(0, 0)].re],
                vectors: CMatrix::identity(1, 1),
            };
        }
        let eig = m.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Self { values, vectors }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `exp(-i H t)` assembled from the spectral decomposition.
    pub fn evolution(&self, t: f64) -> CMatrix {
        let phases = DVector::from_iterator(self.dim(), self.values.iter().map(|&e| C64::from_polar(1.0, -e * t)));
        let scaled = CMatrix::from_fn(self.dim(), self.dim(), |r, c| self.vectors[(r, c)] * phases[c]);
        scaled * self.vectors.adjoint()
    }

    pub fn eigenvector(&self, k: usize) -> CVector {
        self.vectors.column(k).into_owned()
    }
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Kronecker product `a ⊗ b`: row index is `ia * b.nrows() + ib`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `|⟨a|b⟩|²`
pub fn fidelity(a: &CVector, b: &CVector) -> f64 {
    a.dotc(b).norm_sqr()
}
