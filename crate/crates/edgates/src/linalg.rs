// SPDX-License-Identifier: Apache-2.0
//! Dense complex linear algebra helpers shared by the modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Eigendecomposition of a Hermitian matrix, reusable for e^{-iHt} at many t.
#[derive(Clone, Debug)]
pub struct HermitianPropagator {
    vectors: CMatrix,
    values: Vec<f64>,
}

impl HermitianPropagator {
    pub fn new(h: &CMatrix) -> Self {
        // Symmetrize first so round-off in the input cannot leak an anti-Hermitian part.
        let sym = (h + h.adjoint()) * c(0.5, 0.0);
        let eig = sym.symmetric_eigen();
        Self {
            vectors: eig.eigenvectors,
            values: eig.eigenvalues.iter().copied().collect(),
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    /// e^{-iHt}
    pub fn at(&self, t: f64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &e) in self.values.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -e * t);
            for v in scaled.column_mut(j).iter_mut() {
                *v *= phase;
            }
        }
        &scaled * self.vectors.adjoint()
    }
}

/// e^{-iHt} for Hermitian H.
pub fn expm_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    HermitianPropagator::new(h).at(t)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Frobenius inner product Tr(A† B).
pub fn frobenius_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// ‖A - A†‖_F / ‖A‖_F, zero for the zero matrix.
pub fn hermiticity_error(a: &CMatrix) -> f64 {
    let n = a.norm();
    if n == 0.0 {
        return 0.0;
    }
    (a - a.adjoint()).norm() / n
}

/// ‖U†U - 1‖_F
pub fn unitarity_error(u: &CMatrix) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - CMatrix::identity(n, n)).norm()
}

pub fn trace(a: &CMatrix) -> Complex64 {
    a.diagonal().iter().sum()
}

pub fn outer(ket: &CVector, bra: &CVector) -> CMatrix {
    ket * bra.adjoint()
}

/// |<a|b>|^2 / (<a|a><b|b>)
pub fn overlap_sq(a: &CVector, b: &CVector) -> f64 {
    let ip = a.dotc(b);
    ip.norm_sqr() / (a.norm_squared() * b.norm_squared())
}

/// Phase-insensitive gate fidelity |Tr(A† B)| / d restricted to the given isometry V
/// (columns span the subspace): |Tr((AV)†(BV))| / k.
pub fn subspace_fidelity(a: &CMatrix, b: &CMatrix, v: &CMatrix) -> f64 {
    let av = a * v;
    let bv = b * v;
    frobenius_inner(&av, &bv).norm() / v.ncols() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn expm_of_pauli_x() {
        let x = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let t = 0.37;
        let u = expm_hermitian(&x, t);
        assert_abs_diff_eq!(u[(0, 0)].re, t.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(u[(0, 1)].im, -t.sin(), epsilon = 1e-14);
        assert!(unitarity_error(&u) < 1e-13);
    }

    #[test]
    fn propagator_composes() {
        let h = CMatrix::from_row_slice(
            3,
            3,
            &[c(1.0, 0.0), c(0.2, 0.3), ZERO, c(0.2, -0.3), c(-0.5, 0.0), c(0.0, 1.0), ZERO, c(0.0, -1.0), c(2.0, 0.0)],
        );
        let p = HermitianPropagator::new(&h);
        let lhs = p.at(0.7);
        let rhs = p.at(0.3) * p.at(0.4);
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn frobenius_inner_is_conjugate_linear_in_first() {
        let a = CMatrix::from_element(2, 2, I);
        let b = CMatrix::from_element(2, 2, ONE);
        assert_abs_diff_eq!(frobenius_inner(&a, &b).im, -4.0, epsilon = 1e-15);
    }
}
