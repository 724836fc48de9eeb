// SPDX-License-Identifier: Apache-2.0
//! Noiseless and open-system propagation of schedules, readout and syndrome post-selection.

mod integrate;
mod sparse;

pub use integrate::Integrator;

use crate::circuits::{Axis, Schedule, Segment, SegmentKind};
use crate::fock::{self, ancilla, FockError, HilbertLayout, Level, ModePair, Operator};
use crate::linalg::{expm_hermitian, trace, CMatrix};
use integrate::Generator;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("rate {name} must be finite and non-negative, got {value}")]
    InvalidRate { name: &'static str, value: f64 },
    #[error("expected {expected} cavity loss rates, found {found}")]
    RateCount { expected: usize, found: usize },
    #[error("matrix dimension {found} does not match layout dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("invalid readout matrix: {0}")]
    InvalidReadout(String),
    #[error("integration failed: {0}")]
    Integration(String),
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// Single decoherence channel used in scaling sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    AncillaDecay,
    AncillaDephasing,
    PhotonLoss,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::AncillaDecay, Channel::AncillaDephasing, Channel::PhotonLoss];

    pub fn label(self) -> &'static str {
        match self {
            Channel::AncillaDecay => "ancilla_decay",
            Channel::AncillaDephasing => "ancilla_dephasing",
            Channel::PhotonLoss => "photon_loss",
        }
    }
}

/// Lindblad rates in 1/s. Collapse operators: `t̂ = |g⟩⟨e| + √2|e⟩⟨f|` at `gamma1_t`,
/// `t̂†t̂` at `gammaphi_t`, and `â_i` at `gamma1_cav[i]` for every mode.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub gamma1_t: f64,
    pub gammaphi_t: f64,
    pub gamma1_cav: Vec<f64>,
}

impl NoiseModel {
    pub fn noiseless(n_modes: usize) -> Self {
        Self { gamma1_t: 0.0, gammaphi_t: 0.0, gamma1_cav: vec![0.0; n_modes] }
    }

    /// One channel at rate `1 / t_coh`; photon loss hits every mode.
    pub fn single_channel(channel: Channel, t_coh: f64, n_modes: usize) -> Self {
        let mut m = Self::noiseless(n_modes);
        let rate = 1.0 / t_coh;
        match channel {
            Channel::AncillaDecay => m.gamma1_t = rate,
            Channel::AncillaDephasing => m.gammaphi_t = rate,
            Channel::PhotonLoss => m.gamma1_cav.iter_mut().for_each(|g| *g = rate),
        }
        m
    }

    pub fn validate(&self, layout: &HilbertLayout) -> Result<(), DynamicsError> {
        if self.gamma1_cav.len() != layout.n_modes() {
            return Err(DynamicsError::RateCount { expected: layout.n_modes(), found: self.gamma1_cav.len() });
        }
        let named = [("gamma1_t", self.gamma1_t), ("gammaphi_t", self.gammaphi_t)];
        for (name, value) in named.into_iter().chain(self.gamma1_cav.iter().map(|&v| ("gamma1_cav", v))) {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(DynamicsError::InvalidRate { name, value });
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.gamma1_t == 0.0 && self.gammaphi_t == 0.0 && self.gamma1_cav.iter().all(|&g| g == 0.0)
    }

    /// (rate, collapse operator) pairs with nonzero rate.
    pub fn collapse_operators(&self, layout: &HilbertLayout) -> Result<Vec<(f64, CMatrix)>, DynamicsError> {
        self.validate(layout)?;
        let mut out = Vec::new();
        if self.gamma1_t > 0.0 {
            out.push((self.gamma1_t, fock::ancilla_op(&ancilla::lowering(), layout)?.into_matrix()));
        }
        if self.gammaphi_t > 0.0 {
            let t = ancilla::lowering();
            out.push((self.gammaphi_t, fock::ancilla_op(&(t.adjoint() * t), layout)?.into_matrix()));
        }
        for (i, &g) in self.gamma1_cav.iter().enumerate() {
            if g > 0.0 {
                out.push((g, fock::annihilation(layout, i)?.into_matrix()));
            }
        }
        Ok(out)
    }
}

/// Assignment probabilities `eta[observed][actual]` over (g, e, f).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadoutModel {
    pub eta: [[f64; 3]; 3],
}

/// Probability of reading |g⟩ when the ancilla is in |g⟩.
pub const DEFAULT_ETA_GG: f64 = 1.0 - 1e-4;
pub const DEFAULT_ETA_GE: f64 = 0.01;

impl Default for ReadoutModel {
    fn default() -> Self {
        Self::from_eta_ge(DEFAULT_ETA_GE)
    }
}

impl ReadoutModel {
    pub fn perfect() -> Self {
        let mut eta = [[0.0; 3]; 3];
        for (i, row) in eta.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Self { eta }
    }

    /// `η_gg = 1 − 10⁻⁴`, the given `η_ge`, and `η_gf = η_ge²`. Misassigned weight goes to the
    /// neighbouring level.
    pub fn from_eta_ge(eta_ge: f64) -> Self {
        Self::from_g_row(DEFAULT_ETA_GG, eta_ge, eta_ge * eta_ge)
    }

    pub fn from_g_row(eta_gg: f64, eta_ge: f64, eta_gf: f64) -> Self {
        Self {
            eta: [
                [eta_gg, eta_ge, eta_gf],
                [1.0 - eta_gg, 1.0 - eta_ge, 0.0],
                [0.0, 0.0, 1.0 - eta_gf],
            ],
        }
    }

    pub fn g_row(&self) -> [f64; 3] {
        self.eta[0]
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        for actual in 0..3 {
            let col: Vec<f64> = (0..3).map(|o| self.eta[o][actual]).collect();
            if col.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(DynamicsError::InvalidReadout(format!("probabilities out of range for level {actual}")));
            }
            let s: f64 = col.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(DynamicsError::InvalidReadout(format!("level {actual} assignments sum to {s}")));
            }
        }
        Ok(())
    }
}

/// Hamiltonian of one segment. Rotations drop the dispersive and nonlinear terms.
pub fn segment_hamiltonian(
    seg: &Segment,
    layout: &HilbertLayout,
    pair: ModePair,
    nonlinear: Option<&Operator>,
) -> Result<Operator, DynamicsError> {
    match seg.kind {
        SegmentKind::AncillaRotation { axis, drive, .. } => {
            let sigma = match axis {
                Axis::X => ancilla::sigma_x_gf(),
                Axis::Y => ancilla::sigma_y_gf(),
            };
            Ok(fock::ancilla_op(&(sigma * Complex64::new(drive, 0.0)), layout)?)
        }
        _ => {
            let p = seg.pump_params().expect("non-rotation segments carry pump parameters");
            let h = fock::build_hamiltonian(&p, layout, pair)?;
            match nonlinear {
                Some(nl) => {
                    check_dim(layout, nl.matrix())?;
                    Ok(h.add(nl)?)
                }
                None => Ok(h),
            }
        }
    }
}

fn check_dim(layout: &HilbertLayout, m: &CMatrix) -> Result<(), DynamicsError> {
    if m.nrows() != layout.dim() || m.ncols() != layout.dim() {
        return Err(DynamicsError::DimensionMismatch { expected: layout.dim(), found: m.nrows() });
    }
    Ok(())
}

pub fn propagate_unitary(schedule: &Schedule, layout: &HilbertLayout) -> Result<Operator, DynamicsError> {
    propagate_unitary_with(schedule, layout, None)
}

/// Ordered product of `e^{−iH_seg t}`, optionally with extra static terms in the
/// beamsplitter and delay segments.
pub fn propagate_unitary_with(
    schedule: &Schedule,
    layout: &HilbertLayout,
    nonlinear: Option<&Operator>,
) -> Result<Operator, DynamicsError> {
    layout.check_pair(schedule.pair)?;
    let mut u = CMatrix::identity(layout.dim(), layout.dim());
    for seg in &schedule.segments {
        let h = segment_hamiltonian(seg, layout, schedule.pair, nonlinear)?;
        u = expm_hermitian(h.matrix(), seg.duration) * u;
    }
    Ok(Operator::new(layout.clone(), u)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationOptions {
    pub integrator: Integrator,
    /// Use dense segment unitaries when every rate is zero.
    pub exact_when_noiseless: bool,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self { integrator: Integrator::default(), exact_when_noiseless: true }
    }
}

#[derive(Clone, Debug)]
enum Stage {
    Unitary(CMatrix),
    Open { generator: Generator, duration: f64 },
}

/// Precomputed per-segment channels of a schedule. Linear in its input, so it also
/// propagates non-Hermitian operators such as `|i⟩⟨j|`. Safe to share across threads.
#[derive(Clone, Debug)]
pub struct LindbladPropagator {
    layout: HilbertLayout,
    stages: Vec<Stage>,
    integrator: Integrator,
}

impl LindbladPropagator {
    pub fn new(
        schedule: &Schedule,
        noise: &NoiseModel,
        layout: &HilbertLayout,
        nonlinear: Option<&Operator>,
        opts: PropagationOptions,
    ) -> Result<Self, DynamicsError> {
        layout.check_pair(schedule.pair)?;
        let jumps = noise.collapse_operators(layout)?;
        let exact = jumps.is_empty() && opts.exact_when_noiseless;
        let stages = schedule
            .segments
            .iter()
            .map(|seg| {
                let h = segment_hamiltonian(seg, layout, schedule.pair, nonlinear)?;
                Ok(if exact {
                    Stage::Unitary(expm_hermitian(h.matrix(), seg.duration))
                } else {
                    Stage::Open { generator: Generator::new(h.matrix(), &jumps), duration: seg.duration }
                })
            })
            .collect::<Result<Vec<_>, DynamicsError>>()?;
        Ok(Self { layout: layout.clone(), stages, integrator: opts.integrator })
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    pub fn n_stages(&self) -> usize {
        self.stages.len()
    }

    /// Apply every segment channel in order.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix, DynamicsError> {
        self.apply_observed(x, |_, _| {})
    }

    /// Like [`apply`](Self::apply), calling `observe(k, state)` after segment `k`.
    pub fn apply_observed(&self, x: &CMatrix, mut observe: impl FnMut(usize, &CMatrix)) -> Result<CMatrix, DynamicsError> {
        check_dim(&self.layout, x)?;
        let mut state = x.clone();
        for (k, stage) in self.stages.iter().enumerate() {
            state = match stage {
                Stage::Unitary(u) => u * state * u.adjoint(),
                Stage::Open { generator, duration } => generator.evolve(&state, *duration, self.integrator)?,
            };
            observe(k, &state);
        }
        Ok(state)
    }
}

/// Tolerance for density-matrix validation.
const DENSITY_TOL: f64 = 1e-10;

pub fn validate_density(rho: &CMatrix, layout: &HilbertLayout) -> Result<(), DynamicsError> {
    check_dim(layout, rho)?;
    if crate::linalg::hermiticity_error(rho) > DENSITY_TOL {
        return Err(DynamicsError::InvalidDensity("not Hermitian".into()));
    }
    let tr = trace(rho);
    if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
        return Err(DynamicsError::InvalidDensity(format!("trace {tr}")));
    }
    let sym = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let min = sym.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    if min < -DENSITY_TOL {
        return Err(DynamicsError::InvalidDensity(format!("negative eigenvalue {min:e}")));
    }
    Ok(())
}

/// Open-system evolution of a density matrix under the schedule.
pub fn propagate_lindblad(
    schedule: &Schedule,
    noise: &NoiseModel,
    layout: &HilbertLayout,
    rho0: &CMatrix,
    nonlinear: Option<&Operator>,
) -> Result<CMatrix, DynamicsError> {
    validate_density(rho0, layout)?;
    LindbladPropagator::new(schedule, noise, layout, nonlinear, PropagationOptions::default())?.apply(rho0)
}

/// Ancilla block `⟨ψ|X|ψ⟩` on the mode space.
pub fn ancilla_block(x: &CMatrix, layout: &HilbertLayout, level: Level) -> CMatrix {
    let m = layout.mode_space_dim();
    let o = level.index() * m;
    x.view((o, o), (m, m)).into_owned()
}

/// `Σ_ψ η_gψ |ψ⟩⟨ψ| X |ψ⟩⟨ψ|` (linear in X).
pub fn readout_map(x: &CMatrix, readout: &ReadoutModel, layout: &HilbertLayout) -> CMatrix {
    let m = layout.mode_space_dim();
    let mut out = CMatrix::zeros(x.nrows(), x.ncols());
    for level in Level::ALL {
        let w = readout.g_row()[level.index()];
        if w != 0.0 {
            let o = level.index() * m;
            out.view_mut((o, o), (m, m)).copy_from(&(x.view((o, o), (m, m)) * Complex64::new(w, 0.0)));
        }
    }
    out
}

/// Post-select on reading |g⟩. Returns the unnormalized conditional state and
/// `1 − Tr[|g⟩⟨g|ρ]`.
pub fn apply_readout(rho: &CMatrix, readout: &ReadoutModel, layout: &HilbertLayout) -> Result<(CMatrix, f64), DynamicsError> {
    readout.validate()?;
    check_dim(layout, rho)?;
    let p_g = trace(&ancilla_block(rho, layout, Level::G)).re;
    Ok((readout_map(rho, readout, layout), (1.0 - p_g).clamp(0.0, 1.0)))
}

/// `MρM†` and the pass probability `Tr(MρM†) / Tr(ρ)`.
pub fn apply_syndrome(rho: &CMatrix, syndrome: &Operator) -> Result<(CMatrix, f64), DynamicsError> {
    let m = syndrome.matrix();
    if m.nrows() != rho.nrows() {
        return Err(DynamicsError::DimensionMismatch { expected: m.nrows(), found: rho.nrows() });
    }
    let out = m * rho * m.adjoint();
    let before = trace(rho).re;
    let pass = if before > 0.0 { (trace(&out).re / before).clamp(0.0, 1.0) } else { 0.0 };
    Ok((out, pass))
}

#[derive(Clone, Debug)]
pub struct SimOutcome {
    /// Unnormalized; the trace is the overall success probability.
    pub rho_postselected: CMatrix,
    pub failure_prob: f64,
    pub syndrome_pass_prob: f64,
}

/// Propagate, read out the ancilla and apply the syndrome check.
pub fn simulate(
    propagator: &LindbladPropagator,
    readout: &ReadoutModel,
    syndrome: &Operator,
    rho0: &CMatrix,
) -> Result<SimOutcome, DynamicsError> {
    validate_density(rho0, propagator.layout())?;
    let rho = propagator.apply(rho0)?;
    let (rho_g, failure_prob) = apply_readout(&rho, readout, propagator.layout())?;
    let (rho_ps, syndrome_pass_prob) = apply_syndrome(&rho_g, syndrome)?;
    Ok(SimOutcome { rho_postselected: rho_ps, failure_prob, syndrome_pass_prob })
}
