// SPDX-License-Identifier: Apache-2.0
//! Error-detected infidelity over the 36 cardinal states, failure probability and power-law fits.
//!
//! The channel is linear, so only the ten dyads `|i_L, g⟩⟨j_L, g|` (i ≤ j) are propagated;
//! every cardinal state is assembled from them afterwards.

use crate::circuits::{CircuitError, Schedule};
use crate::codes::{reference_unitary, CodeError, Codespace, LogicalGate};
use crate::dynamics::{
    ancilla_block, readout_map, Channel, DynamicsError, LindbladPropagator, NoiseModel, PropagationOptions,
    ReadoutModel,
};
use crate::fock::{build_nonlinear_terms, Level, NonlinearParams};
use crate::linalg::{outer, trace, CMatrix, CVector};
use crate::units::{hz, khz, mhz};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("post-selection left zero trace for cardinal state {0}")]
    DegeneratePostselection(String),
    #[error("fit needs at least 4 points, got {0}")]
    TooFewPoints(usize),
    #[error("fit points span less than one decade in tau/T ({0:.3})")]
    NarrowSpan(f64),
    #[error("fit needs positive values, got {0:e}")]
    NonPositive(f64),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub t_coh: f64,
    pub tau_gate: f64,
    pub failure_prob: f64,
    pub ed_infidelity: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Failure,
    Infidelity,
}

/// `y = A · x^n` with `x = τ_gate / T_coh`; `residual` is the RMS log-space misfit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub amplitude: f64,
    pub exponent: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateResult {
    pub label: String,
    /// Overlap with the target after post-selection and renormalization.
    pub fidelity: f64,
    /// Probability of passing readout and syndrome check.
    pub success_prob: f64,
    /// `1 − Tr[|g⟩⟨g|ρ]` before readout.
    pub ancilla_failure: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateEvaluation {
    pub tau_gate: f64,
    /// Mean rejection probability (readout not |g⟩ or syndrome fails).
    pub failure_prob: f64,
    pub ancilla_failure_prob: f64,
    pub ed_infidelity: f64,
    pub states: Vec<StateResult>,
}

impl GateEvaluation {
    pub fn sweep_point(&self, t_coh: f64) -> SweepPoint {
        SweepPoint { t_coh, tau_gate: self.tau_gate, failure_prob: self.failure_prob, ed_infidelity: self.ed_infidelity }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub propagation: PropagationOptions,
    pub nonlinear: Option<NonlinearParams>,
}

/// Reduced data of one propagated dyad.
struct DyadData {
    success: Complex64,
    /// `B† (Σ_ψ ⟨ψ|Y|ψ⟩) B` with `B` the frame-rotated codespace isometry.
    overlap: CMatrix,
    p_g: Complex64,
}

fn logical_pairs() -> Vec<(usize, usize)> {
    (0..4).flat_map(|i| (i..4).map(move |j| (i, j))).collect()
}

/// Propagate the logical dyads once and average over the 36 cardinal states.
pub fn error_detected_infidelity(
    schedule: &Schedule,
    gate: LogicalGate,
    codespace: &Codespace,
    noise: &NoiseModel,
    readout: &ReadoutModel,
    opts: &EvalOptions,
) -> Result<GateEvaluation, MetricsError> {
    readout.validate()?;
    let layout = codespace.layout();
    let nonlinear = opts.nonlinear.map(|p| build_nonlinear_terms(&p, layout, schedule.pair)).transpose().map_err(DynamicsError::from)?;
    let prop = LindbladPropagator::new(schedule, noise, layout, nonlinear.as_ref(), opts.propagation)?;
    let syndrome = codespace.syndrome_projector()?.into_matrix();
    let frame = ancilla_block(schedule.frame_operator(layout)?.matrix(), layout, Level::G);
    let b = frame * codespace.basis();
    let full = codespace.full_basis(Level::G);

    let dyads: Vec<DyadData> = logical_pairs()
        .par_iter()
        .map(|&(i, j)| -> Result<DyadData, MetricsError> {
            let x = outer(&full.column(i).into_owned(), &full.column(j).into_owned());
            let y = prop.apply(&x)?;
            let p_g = trace(&ancilla_block(&y, layout, Level::G));
            let post = &syndrome * readout_map(&y, readout, layout) * syndrome.adjoint();
            let mut reduced = ancilla_block(&post, layout, Level::G);
            reduced += ancilla_block(&post, layout, Level::E);
            reduced += ancilla_block(&post, layout, Level::F);
            Ok(DyadData { success: trace(&post), overlap: b.adjoint() * reduced * &b, p_g })
        })
        .collect::<Result<_, _>>()?;

    let u_ref = reference_unitary(gate);
    let pairs = logical_pairs();
    let mut states = Vec::with_capacity(36);
    for card in codespace.cardinal_states() {
        let c = &card.logical;
        let mut success = Complex64::new(0.0, 0.0);
        let mut p_g = Complex64::new(0.0, 0.0);
        let mut w = CMatrix::zeros(4, 4);
        for (&(i, j), d) in pairs.iter().zip(&dyads) {
            let coef = c[i] * c[j].conj();
            success += coef * d.success;
            p_g += coef * d.p_g;
            w += &d.overlap * coef;
            if i != j {
                success += coef.conj() * d.success.conj();
                p_g += coef.conj() * d.p_g.conj();
                w += d.overlap.adjoint() * coef.conj();
            }
        }
        if !(success.re > 0.0) {
            return Err(MetricsError::DegeneratePostselection(card.label));
        }
        let target = &u_ref * CVector::from_row_slice(c);
        let num = target.dotc(&(&w * &target)).re;
        states.push(StateResult {
            label: card.label,
            fidelity: num / success.re,
            success_prob: success.re.clamp(0.0, 1.0),
            ancilla_failure: (1.0 - p_g.re).clamp(0.0, 1.0),
        });
    }
    let n = states.len() as f64;
    let mean = |f: &dyn Fn(&StateResult) -> f64| states.iter().map(f).sum::<f64>() / n;
    Ok(GateEvaluation {
        tau_gate: schedule.duration(),
        failure_prob: mean(&|s| 1.0 - s.success_prob),
        ancilla_failure_prob: mean(&|s| s.ancilla_failure),
        ed_infidelity: mean(&|s| 1.0 - s.fidelity),
        states,
    })
}

/// Default sweep grid of `T_coh / τ_gate`.
pub const DEFAULT_RATIOS: [f64; 5] = [30.0, 100.0, 300.0, 1000.0, 3000.0];

/// One channel at `T_coh = ratio · τ_gate` for each ratio; points returned in input order.
pub fn coherence_sweep(
    schedule: &Schedule,
    gate: LogicalGate,
    codespace: &Codespace,
    channel: Channel,
    ratios: &[f64],
    readout: &ReadoutModel,
    opts: &EvalOptions,
) -> Result<Vec<SweepPoint>, MetricsError> {
    let tau = schedule.duration();
    let n_modes = codespace.layout().n_modes();
    ratios
        .par_iter()
        .map(|&r| {
            let t_coh = r * tau;
            let noise = NoiseModel::single_channel(channel, t_coh, n_modes);
            Ok(error_detected_infidelity(schedule, gate, codespace, &noise, readout, opts)?.sweep_point(t_coh))
        })
        .collect()
}

/// Least-squares fit of `log y = log A + n log(τ/T)`.
pub fn fit_scaling(points: &[SweepPoint], quantity: Quantity) -> Result<ScalingFit, MetricsError> {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|p| {
            let y = match quantity {
                Quantity::Failure => p.failure_prob,
                Quantity::Infidelity => p.ed_infidelity,
            };
            (p.tau_gate / p.t_coh, y)
        })
        .collect();
    fit_power_law(&xy)
}

/// Power-law fit on raw `(x, y)` pairs; same preconditions as [`fit_scaling`].
/// Leading coefficient `A` of `y = A x^order`, with the order held fixed: the
/// geometric mean of `y / x^order` over the points.
pub fn fit_prefactor(points: &[SweepPoint], quantity: Quantity, order: i32) -> Result<f64, MetricsError> {
    if points.is_empty() {
        return Err(MetricsError::TooFewPoints(0));
    }
    let mut acc = 0.0;
    for p in points {
        let y = match quantity {
            Quantity::Failure => p.failure_prob,
            Quantity::Infidelity => p.ed_infidelity,
        };
        if !(y > 0.0) {
            return Err(MetricsError::NonPositive(y));
        }
        acc += (y / (p.tau_gate / p.t_coh).powi(order)).ln();
    }
    Ok((acc / points.len() as f64).exp())
}

pub fn fit_power_law(xy: &[(f64, f64)]) -> Result<ScalingFit, MetricsError> {
    if xy.len() < 4 {
        return Err(MetricsError::TooFewPoints(xy.len()));
    }
    if let Some(&(x, y)) = xy.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(MetricsError::NonPositive(if x > 0.0 { y } else { x }));
    }
    let (lo, hi) = xy.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &(x, _)| (lo.min(x), hi.max(x)));
    let span = (hi / lo).log10();
    if span < 1.0 - 1e-12 {
        return Err(MetricsError::NarrowSpan(span));
    }
    let n = xy.len() as f64;
    let lx: Vec<f64> = xy.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = xy.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residual = (lx.iter().zip(&ly).map(|(x, y)| (y - intercept - exponent * x).powi(2)).sum::<f64>() / n).sqrt();
    Ok(ScalingFit { amplitude: intercept.exp(), exponent, residual })
}

/// Nonlinear corrections that scale as `(χ_f / χ_anchor)²` from an anchor operating point,
/// with a fixed cross-Kerr.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearScaling {
    pub anchor_chi_f: f64,
    pub chi_f_prime: f64,
    pub chi_e_prime: f64,
    pub kerr: f64,
    pub chi_ab: f64,
}

impl Default for NonlinearScaling {
    fn default() -> Self {
        Self { anchor_chi_f: mhz(-1.0), chi_f_prime: khz(2.0), chi_e_prime: khz(1.125), kerr: khz(2.0), chi_ab: hz(100.0) }
    }
}

impl NonlinearScaling {
    pub fn at(&self, chi_f: f64) -> NonlinearParams {
        let s = (chi_f / self.anchor_chi_f).powi(2);
        NonlinearParams {
            k_a: self.kerr * s,
            k_b: self.kerr * s,
            chi_e_prime: self.chi_e_prime * s,
            chi_f_prime: self.chi_f_prime * s,
            chi_ab: self.chi_ab,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiPoint {
    pub chi_f: f64,
    pub tau_gate: f64,
    pub failure_prob: f64,
    pub ed_infidelity: f64,
}

/// Rebuild the gate at each `χ_f` and evaluate it with the scaled nonlinearity and fixed noise.
pub fn chi_sweep(
    build: impl Fn(f64) -> Result<Schedule, CircuitError> + Sync,
    gate: LogicalGate,
    codespace: &Codespace,
    noise: &NoiseModel,
    chi_values: &[f64],
    scaling: Option<NonlinearScaling>,
    readout: &ReadoutModel,
    propagation: PropagationOptions,
) -> Result<Vec<ChiPoint>, MetricsError> {
    chi_values
        .par_iter()
        .map(|&chi_f| {
            let schedule = build(chi_f)?;
            let opts = EvalOptions { propagation, nonlinear: scaling.map(|s| s.at(chi_f)) };
            let ev = error_detected_infidelity(&schedule, gate, codespace, noise, readout, &opts)?;
            Ok(ChiPoint { chi_f, tau_gate: ev.tau_gate, failure_prob: ev.failure_prob, ed_infidelity: ev.ed_infidelity })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{gate_schedule, GateOptions};
    use crate::codes::BosonicCode;
    use crate::units::us;
    use std::f64::consts::FRAC_PI_2;

    fn pts(xy: &[(f64, f64)]) -> Vec<SweepPoint> {
        xy.iter().map(|&(x, y)| SweepPoint { t_coh: 1.0 / x, tau_gate: 1.0, failure_prob: y, ed_infidelity: y }).collect()
    }

    #[test]
    fn exact_power_law() {
        let p = pts(&[1e-3, 3e-3, 1e-2, 3e-2, 1e-1].map(|x| (x, 3.0 * x * x)));
        let f = fit_scaling(&p, Quantity::Infidelity).unwrap();
        assert!((f.amplitude - 3.0).abs() < 1e-6 && (f.exponent - 2.0).abs() < 1e-6 && f.residual < 1e-9);
    }

    #[test]
    fn prefactor_with_fixed_order() {
        let p = pts(&[1e-3, 1e-2, 1e-1].map(|x| (x, 0.25 * x * x * (1.0 + x))));
        let a = fit_prefactor(&p, Quantity::Infidelity, 2).unwrap();
        let expect = 0.25 * (1.001f64 * 1.01 * 1.1).cbrt();
        assert!((a - expect).abs() < 1e-12, "{a}");
        assert!(fit_prefactor(&[], Quantity::Failure, 1).is_err());
    }

    #[test]
    fn fit_preconditions() {
        assert!(matches!(fit_power_law(&[(1.0, 1.0); 3]), Err(MetricsError::TooFewPoints(3))));
        let narrow = [(1.0, 1.0), (2.0, 2.0), (3.0, 3.0), (4.0, 4.0)];
        assert!(matches!(fit_power_law(&narrow), Err(MetricsError::NarrowSpan(_))));
        let neg = [(1.0, 1.0), (10.0, 0.0), (3.0, 3.0), (4.0, 4.0)];
        assert!(matches!(fit_power_law(&neg), Err(MetricsError::NonPositive(_))));
    }

    #[test]
    fn nonlinear_scaling_anchor() {
        let s = NonlinearScaling::default();
        let p = s.at(mhz(-1.0));
        assert!((p.chi_f_prime - khz(2.0)).abs() < 1e-9 && (p.k_a - khz(2.0)).abs() < 1e-9);
        let q = s.at(mhz(-2.0));
        assert!((q.chi_e_prime - 4.0 * khz(1.125)).abs() < 1e-9);
        assert_eq!(q.chi_ab, hz(100.0));
    }

    fn fock01_eval(noise: &NoiseModel, readout: &ReadoutModel) -> GateEvaluation {
        let code = BosonicCode::Fock01;
        let cs = Codespace::new(code, &code.layout(2).unwrap()).unwrap();
        let gate = LogicalGate::Zz { theta: FRAC_PI_2 };
        let s = gate_schedule(code, gate, mhz(-1.0), GateOptions::default()).unwrap();
        error_detected_infidelity(&s, gate, &cs, noise, readout, &EvalOptions::default()).unwrap()
    }

    #[test]
    fn noiseless_gate_is_exact() {
        let ev = fock01_eval(&NoiseModel::noiseless(2), &ReadoutModel::perfect());
        assert_eq!(ev.states.len(), 36);
        assert!(ev.ed_infidelity < 1e-9 && ev.failure_prob < 1e-9, "{ev:?}");
    }

    #[test]
    fn dyad_assembly_matches_direct_propagation() {
        let code = BosonicCode::Fock01;
        let layout = code.layout(2).unwrap();
        let cs = Codespace::new(code, &layout).unwrap();
        let gate = LogicalGate::Zz { theta: FRAC_PI_2 };
        let s = gate_schedule(code, gate, mhz(-1.0), GateOptions::default()).unwrap();
        let noise = NoiseModel { gamma1_t: 1.0 / us(30.0), gammaphi_t: 1.0 / us(50.0), gamma1_cav: vec![1.0 / us(80.0); 2] };
        let readout = ReadoutModel::default();
        let ev = error_detected_infidelity(&s, gate, &cs, &noise, &readout, &EvalOptions::default()).unwrap();
        let prop = LindbladPropagator::new(&s, &noise, &layout, None, PropagationOptions::default()).unwrap();
        let m = cs.syndrome_projector().unwrap();
        let frame = s.frame_operator(&layout).unwrap().into_matrix();
        let u = reference_unitary(gate);
        for (k, card) in cs.cardinal_states().iter().enumerate().step_by(7) {
            let out = crate::dynamics::simulate(&prop, &readout, &m, &outer(&card.ket, &card.ket)).unwrap();
            let tr = trace(&out.rho_postselected).re;
            let logical = &u * CVector::from_row_slice(&card.logical);
            let mut fid = 0.0;
            for level in Level::ALL {
                let t = &frame * cs.ket(&[logical[0], logical[1], logical[2], logical[3]], level);
                fid += t.dotc(&(&out.rho_postselected * &t)).re;
            }
            assert!((fid / tr - ev.states[k].fidelity).abs() < 1e-12);
            assert!((tr - ev.states[k].success_prob).abs() < 1e-12);
            assert!((out.failure_prob - ev.states[k].ancilla_failure).abs() < 1e-12);
        }
    }

    #[test]
    fn failure_grows_with_rate() {
        let mut last = -1.0;
        for t in [200.0, 60.0, 20.0] {
            let noise = NoiseModel::single_channel(Channel::AncillaDecay, us(t), 2);
            let ev = fock01_eval(&noise, &ReadoutModel::perfect());
            assert!(ev.failure_prob > last);
            last = ev.failure_prob;
        }
    }

    #[test]
    fn deterministic_and_label_invariant() {
        let noise = NoiseModel::single_channel(Channel::AncillaDephasing, us(40.0), 2);
        let a = fock01_eval(&noise, &ReadoutModel::perfect());
        let b = fock01_eval(&noise, &ReadoutModel::perfect());
        assert_eq!(a, b);
        let mut fids: Vec<f64> = a.states.iter().map(|s| 1.0 - s.fidelity).collect();
        fids.reverse();
        let rev = fids.iter().sum::<f64>() / 36.0;
        assert!((rev - a.ed_infidelity).abs() < 1e-15);
    }
}
