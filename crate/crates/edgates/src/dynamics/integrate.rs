// SPDX-License-Identifier: Apache-2.0
//! Constant-generator Lindblad evolution: Chebyshev expansion, truncated Taylor series or
//! Dormand-Prince 5(4).

use super::sparse::Csr;
use super::DynamicsError;
use crate::linalg::CMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Largest `h · ‖𝓛‖` per Taylor step.
const TAYLOR_THETA: f64 = 4.0;
const TAYLOR_MAX_ORDER: usize = 80;
const DP_MAX_STEPS: usize = 10_000_000;
/// Largest `t · S` handled by one Chebyshev expansion.
const CHEB_CHUNK: f64 = 200.0;
/// Abort when a Chebyshev iterate grows beyond this factor (strongly non-normal generator).
const CHEB_GROWTH_LIMIT: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum Integrator {
    /// Chebyshev expansion of `e^{t𝓛}` over the spectral interval of `i𝓛`, truncated where
    /// the coefficients drop below `tol`.
    Chebyshev { tol: f64 },
    /// Truncated Taylor series with steps sized from a norm bound; the series of each step
    /// stops once two consecutive terms fall below `tol` relative to the partial sum.
    Taylor { tol: f64 },
    /// Adaptive Dormand-Prince 5(4).
    DormandPrince { rtol: f64, atol: f64 },
    /// Fixed step count and series order per segment.
    FixedTaylor { steps: usize, order: usize },
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator::Chebyshev { tol: 1e-13 }
    }
}

impl Integrator {
    pub fn taylor() -> Self {
        Integrator::Taylor { tol: 1e-14 }
    }

    pub fn dormand_prince() -> Self {
        Integrator::DormandPrince { rtol: 1e-9, atol: 1e-12 }
    }
}

/// `𝓛X = −i(H_eff X − X H_eff†) + Σ Γ L X L†` with `H_eff = H − (i/2) Σ Γ L†L`.
#[derive(Clone, Debug)]
pub(crate) struct Generator {
    dim: usize,
    h_eff: Csr,
    jumps: Vec<(f64, Csr)>,
    norm: f64,
    /// Bound on the spectral radius of `i𝓛`: eigenvalue spread of H plus the dissipative part.
    spectral_radius: f64,
}

impl Generator {
    pub(crate) fn new(h: &CMatrix, jumps: &[(f64, CMatrix)]) -> Self {
        let dim = h.nrows();
        let mut h_eff = h.clone();
        for (rate, l) in jumps {
            h_eff -= (l.adjoint() * l) * Complex64::new(0.0, 0.5 * rate);
        }
        let h_eff = Csr::from_dense(&h_eff);
        let jumps: Vec<(f64, Csr)> = jumps.iter().map(|(r, l)| (*r, Csr::from_dense(l))).collect();
        let dissipative: f64 = jumps.iter().map(|(r, l)| r * l.norm_bound().powi(2)).sum();
        let norm = 2.0 * h_eff.norm_bound() + dissipative;
        let herm = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
        let ev = herm.symmetric_eigenvalues();
        let spread = ev.max() - ev.min();
        let spectral_radius = (1.01 * spread + 2.0 * dissipative).max(f64::MIN_POSITIVE);
        Self { dim, h_eff, jumps, norm, spectral_radius }
    }

    /// out = 𝓛 x; `scratch` is overwritten.
    pub(crate) fn apply(&self, x: &CMatrix, out: &mut CMatrix, scratch: &mut CMatrix) {
        out.fill(Complex64::new(0.0, 0.0));
        self.h_eff.left_mul_acc(x, out, Complex64::new(0.0, -1.0));
        self.h_eff.right_mul_adj_acc(x, out, Complex64::new(0.0, 1.0));
        for (rate, l) in &self.jumps {
            scratch.fill(Complex64::new(0.0, 0.0));
            l.left_mul_acc(x, scratch, Complex64::new(1.0, 0.0));
            l.right_mul_adj_acc(scratch, out, Complex64::new(*rate, 0.0));
        }
    }

    pub(crate) fn evolve(&self, x: &CMatrix, t: f64, method: Integrator) -> Result<CMatrix, DynamicsError> {
        if t == 0.0 {
            return Ok(x.clone());
        }
        match method {
            Integrator::Chebyshev { tol } => self.chebyshev(x, t, tol),
            Integrator::Taylor { tol } => {
                let steps = ((t * self.norm / TAYLOR_THETA).ceil() as usize).max(1);
                self.taylor(x, t, steps, TAYLOR_MAX_ORDER, Some(tol))
            }
            Integrator::FixedTaylor { steps, order } => {
                if steps == 0 || order == 0 {
                    return Err(DynamicsError::Integration("fixed Taylor needs steps ≥ 1 and order ≥ 1".into()));
                }
                self.taylor(x, t, steps, order, None)
            }
            Integrator::DormandPrince { rtol, atol } => self.dormand_prince(x, t, rtol, atol),
        }
    }

    fn taylor(&self, x: &CMatrix, t: f64, steps: usize, max_order: usize, tol: Option<f64>) -> Result<CMatrix, DynamicsError> {
        let h = t / steps as f64;
        let mut acc = x.clone();
        let mut term = CMatrix::zeros(self.dim, self.dim);
        let mut next = CMatrix::zeros(self.dim, self.dim);
        let mut scratch = CMatrix::zeros(self.dim, self.dim);
        for _ in 0..steps {
            term.copy_from(&acc);
            let mut small = 0;
            let mut converged = tol.is_none();
            for k in 1..=max_order {
                self.apply(&term, &mut next, &mut scratch);
                std::mem::swap(&mut term, &mut next);
                term *= Complex64::new(h / k as f64, 0.0);
                acc += &term;
                if let Some(tol) = tol {
                    if max_abs(&term) <= tol * max_abs(&acc) {
                        small += 1;
                        if small == 2 {
                            converged = true;
                            break;
                        }
                    } else {
                        small = 0;
                    }
                }
            }
            if !converged {
                return Err(DynamicsError::Integration(format!(
                    "Taylor series did not reach tolerance within {max_order} terms"
                )));
            }
        }
        Ok(acc)
    }

    /// `e^{t𝓛} = e^{−iτA}` with `A = i𝓛/S`, `τ = tS`, expanded in Chebyshev polynomials of A.
    fn chebyshev(&self, x: &CMatrix, t: f64, tol: f64) -> Result<CMatrix, DynamicsError> {
        let s = self.spectral_radius;
        let tau_total = t * s;
        let chunks = ((tau_total / CHEB_CHUNK).ceil() as usize).max(1);
        let coeffs = chebyshev_coefficients(tau_total / chunks as f64, tol);
        let scale = Complex64::new(0.0, 1.0 / s);
        let n = self.dim;
        let mut prev = CMatrix::zeros(n, n);
        let mut cur = CMatrix::zeros(n, n);
        let mut next = CMatrix::zeros(n, n);
        let mut scratch = CMatrix::zeros(n, n);
        let mut acc = x.clone();
        for _ in 0..chunks {
            prev.copy_from(&acc);
            let limit = CHEB_GROWTH_LIMIT * max_abs(&prev).max(f64::MIN_POSITIVE);
            acc.copy_from(&prev);
            acc *= coeffs[0];
            if coeffs.len() > 1 {
                self.apply(&prev, &mut cur, &mut scratch);
                cur *= scale;
                acc.zip_apply(&cur, |a, v| *a += coeffs[1] * v);
            }
            for &ck in coeffs.iter().skip(2) {
                self.apply(&cur, &mut next, &mut scratch);
                next *= 2.0 * scale;
                next -= &prev;
                if max_abs(&next) > limit {
                    return Err(DynamicsError::Integration("Chebyshev iterates grew without bound".into()));
                }
                acc.zip_apply(&next, |a, v| *a += ck * v);
                std::mem::swap(&mut prev, &mut cur);
                std::mem::swap(&mut cur, &mut next);
            }
        }
        Ok(acc)
    }

    fn dormand_prince(&self, x: &CMatrix, t: f64, rtol: f64, atol: f64) -> Result<CMatrix, DynamicsError> {
        const A: [&[f64]; 6] = [
            &[1.0 / 5.0],
            &[3.0 / 40.0, 9.0 / 40.0],
            &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
            &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
            &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
            &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
        ];
        const E: [f64; 7] = [
            71.0 / 57600.0,
            0.0,
            -71.0 / 16695.0,
            71.0 / 1920.0,
            -17253.0 / 339200.0,
            22.0 / 525.0,
            -1.0 / 40.0,
        ];
        let n = self.dim;
        let mut y = x.clone();
        let mut k: Vec<CMatrix> = (0..7).map(|_| CMatrix::zeros(n, n)).collect();
        let mut scratch = CMatrix::zeros(n, n);
        let mut stage = CMatrix::zeros(n, n);
        self.apply(&y, &mut k[0], &mut scratch);
        let mut tcur = 0.0;
        let mut h = (1.0 / self.norm.max(1e-300)).min(t);
        for _ in 0..DP_MAX_STEPS {
            if t - tcur <= 1e-14 * t {
                return Ok(y);
            }
            h = h.min(t - tcur);
            for s in 0..6 {
                stage.copy_from(&y);
                for (j, &a) in A[s].iter().enumerate() {
                    if a != 0.0 {
                        stage.zip_apply(&k[j], |z, kj| *z += kj * (h * a));
                    }
                }
                self.apply(&stage, &mut k[s + 1], &mut scratch);
            }
            // stage now holds the 5th-order solution; k[6] = 𝓛(stage)
            let mut err = 0.0f64;
            for idx in 0..n * n {
                let mut e = Complex64::new(0.0, 0.0);
                for (j, &ej) in E.iter().enumerate() {
                    if ej != 0.0 {
                        e += k[j].as_slice()[idx] * ej;
                    }
                }
                let scale = atol + rtol * y.as_slice()[idx].norm().max(stage.as_slice()[idx].norm());
                err = err.max((e * h).norm() / scale);
            }
            if err <= 1.0 {
                tcur += h;
                std::mem::swap(&mut y, &mut stage);
                k.swap(0, 6);
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
            if h < 1e-18 * t {
                return Err(DynamicsError::Integration("Dormand-Prince step size underflow".into()));
            }
        }
        Err(DynamicsError::Integration(format!("Dormand-Prince exceeded {DP_MAX_STEPS} steps")))
    }
}

/// Coefficients `c_k` of `e^{−iτx} ≈ Σ c_k T_k(x)` on [−1, 1] by Chebyshev-Gauss quadrature,
/// truncated at the first coefficient past `k = τ` below `tol`.
fn chebyshev_coefficients(tau: f64, tol: f64) -> Vec<Complex64> {
    let m = (1.5 * tau).ceil() as usize + 120;
    let nodes: Vec<(f64, Complex64)> = (0..m)
        .map(|j| {
            let x = (std::f64::consts::PI * (j as f64 + 0.5) / m as f64).cos();
            (x, Complex64::from_polar(1.0, -tau * x))
        })
        .collect();
    // T_k(x_j) by recurrence, accumulated one order at a time
    let mut t_prev = vec![1.0; m];
    let mut t_cur: Vec<f64> = nodes.iter().map(|n| n.0).collect();
    let project = |t: &[f64], weight: f64| -> Complex64 {
        nodes.iter().zip(t).map(|(n, &tk)| n.1 * tk).sum::<Complex64>() * (weight / m as f64)
    };
    let mut coeffs = vec![project(&t_prev, 1.0), project(&t_cur, 2.0)];
    for _ in 2..m {
        let t_next: Vec<f64> = nodes.iter().zip(t_prev.iter().zip(&t_cur)).map(|(n, (p, c))| 2.0 * n.0 * c - p).collect();
        coeffs.push(project(&t_next, 2.0));
        t_prev = std::mem::replace(&mut t_cur, t_next);
    }
    // beyond k ≈ τ the coefficients decay super-exponentially until they hit the rounding floor
    let cut = (tau.ceil() as usize..coeffs.len()).find(|&k| coeffs[k].norm() < tol).unwrap_or(coeffs.len());
    coeffs.truncate(cut.max(1));
    coeffs
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}
