// SPDX-License-Identifier: Apache-2.0
//! CSR kernels for the Lindblad right-hand side on column-major dense matrices.

use crate::linalg::CMatrix;
use nalgebra_sparse::CsrMatrix;
use num_complex::Complex64;

#[derive(Clone, Debug)]
pub(crate) struct Csr {
    n: usize,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl Csr {
    pub(crate) fn from_dense(m: &CMatrix) -> Self {
        assert!(m.is_square());
        let csr = CsrMatrix::from(m);
        Self {
            n: m.nrows(),
            offsets: csr.row_offsets().to_vec(),
            cols: csr.col_indices().to_vec(),
            vals: csr.values().to_vec(),
        }
    }

    #[cfg(test)]
    pub(crate) fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// sqrt(‖A‖₁ ‖A‖∞), an upper bound on the spectral norm.
    pub(crate) fn norm_bound(&self) -> f64 {
        let mut col_sums = vec![0.0; self.n];
        let mut max_row = 0.0f64;
        for i in 0..self.n {
            let mut r = 0.0;
            for p in self.offsets[i]..self.offsets[i + 1] {
                let a = self.vals[p].norm();
                r += a;
                col_sums[self.cols[p]] += a;
            }
            max_row = max_row.max(r);
        }
        let max_col = col_sums.into_iter().fold(0.0, f64::max);
        (max_row * max_col).sqrt()
    }

    /// out += alpha · A X, four columns of X per pass over the sparsity pattern.
    pub(crate) fn left_mul_acc(&self, x: &CMatrix, out: &mut CMatrix, alpha: Complex64) {
        const B: usize = 4;
        let n = self.n;
        let ncols = x.ncols();
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        let zero = Complex64::new(0.0, 0.0);
        let mut c0 = 0;
        while c0 < ncols {
            let w = B.min(ncols - c0);
            let xb = &xs[c0 * n..(c0 + w) * n];
            let ob = &mut os[c0 * n..(c0 + w) * n];
            for i in 0..n {
                let mut s = [zero; B];
                for p in self.offsets[i]..self.offsets[i + 1] {
                    let (v, k) = (self.vals[p], self.cols[p]);
                    for (b, acc) in s.iter_mut().enumerate().take(w) {
                        *acc += v * xb[b * n + k];
                    }
                }
                for (b, acc) in s.iter().enumerate().take(w) {
                    ob[b * n + i] += alpha * acc;
                }
            }
            c0 += w;
        }
    }

    /// out += alpha · X A†
    pub(crate) fn right_mul_adj_acc(&self, x: &CMatrix, out: &mut CMatrix, alpha: Complex64) {
        let n = self.n;
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for j in 0..self.n {
            for p in self.offsets[j]..self.offsets[j + 1] {
                let w = alpha * self.vals[p].conj();
                let k = self.cols[p];
                let xk = &xs[k * n..(k + 1) * n];
                let oj = &mut os[j * n..(j + 1) * n];
                for (o, &v) in oj.iter_mut().zip(xk) {
                    *o += w * v;
                }
            }
        }
    }
}
