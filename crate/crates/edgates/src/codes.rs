// SPDX-License-Identifier: Apache-2.0
//! Bosonic codes for two logical qubits sharing one ancilla.
//!
//! Single-mode codes place qubit `q` in mode `q`. The dual-rail code uses the four-mode
//! layout `(a1, a2, b1, b2)`, so qubit `q` lives in modes `(q, q + 2)` and the
//! beamsplitter pair `(0, 1)` couples the first rail of each qubit.
//!
//! Logical two-qubit basis order is `|q0 q1⟩` with qubit 0 most significant.

use crate::fock::{embed, FockError, HilbertLayout, Level, Operator, Slot, ANCILLA_DIM};
use crate::linalg::{c, kron, CMatrix, CVector, ONE, ZERO};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodeError {
    #[error("four-legged cat code requires an amplitude alpha")]
    MissingAlpha,
    #[error("cat amplitude must be positive, got {0}")]
    InvalidAlpha(f64),
    #[error("{code} needs {needed} modes, layout has {got}")]
    ModeCount { code: &'static str, needed: usize, got: usize },
    #[error("{code} needs mode dimension >= {needed}, got {got}")]
    Truncation { code: &'static str, needed: usize, got: usize },
    #[error("qubit index {0} out of range (two logical qubits)")]
    NoSuchQubit(usize),
    #[error(transparent)]
    Fock(#[from] FockError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeName {
    Fock01,
    DualRail,
    Binomial,
    FourCat,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum BosonicCode {
    Fock01,
    DualRail,
    Binomial,
    FourCat { alpha: f64 },
}

pub const DEFAULT_CAT_ALPHA: f64 = std::f64::consts::SQRT_2;

impl BosonicCode {
    pub fn new(name: CodeName, alpha: Option<f64>) -> Result<Self, CodeError> {
        Ok(match name {
            CodeName::Fock01 => BosonicCode::Fock01,
            CodeName::DualRail => BosonicCode::DualRail,
            CodeName::Binomial => BosonicCode::Binomial,
            CodeName::FourCat => {
                let alpha = alpha.ok_or(CodeError::MissingAlpha)?;
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(CodeError::InvalidAlpha(alpha));
                }
                BosonicCode::FourCat { alpha }
            }
        })
    }

    pub fn name(&self) -> CodeName {
        match self {
            BosonicCode::Fock01 => CodeName::Fock01,
            BosonicCode::DualRail => CodeName::DualRail,
            BosonicCode::Binomial => CodeName::Binomial,
            BosonicCode::FourCat { .. } => CodeName::FourCat,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            BosonicCode::Fock01 => "fock01",
            BosonicCode::DualRail => "dual_rail",
            BosonicCode::Binomial => "binomial",
            BosonicCode::FourCat { .. } => "four_cat",
        }
    }

    pub fn modes_per_qubit(&self) -> usize {
        match self {
            BosonicCode::DualRail => 2,
            _ => 1,
        }
    }

    /// `n` in `Z_L = e^{iπ n̂ / n}`.
    pub fn rotation_order(&self) -> u32 {
        match self {
            BosonicCode::Fock01 | BosonicCode::DualRail => 1,
            BosonicCode::Binomial | BosonicCode::FourCat { .. } => 2,
        }
    }

    fn min_dim(&self) -> usize {
        match self {
            BosonicCode::Fock01 | BosonicCode::DualRail => 2,
            BosonicCode::Binomial => 5,
            BosonicCode::FourCat { .. } => 7,
        }
    }

    /// Mode slots of logical qubit `q`; the first entry carries `Z_L`.
    pub fn qubit_modes(&self, qubit: usize) -> Result<Vec<usize>, CodeError> {
        if qubit > 1 {
            return Err(CodeError::NoSuchQubit(qubit));
        }
        Ok(match self {
            BosonicCode::DualRail => vec![qubit, qubit + 2],
            _ => vec![qubit],
        })
    }

    /// Two-qubit layout with every mode truncated at `mode_dim`.
    pub fn layout(&self, mode_dim: usize) -> Result<HilbertLayout, CodeError> {
        let layout = HilbertLayout::uniform(2 * self.modes_per_qubit(), mode_dim)?;
        self.check_layout(&layout)?;
        Ok(layout)
    }

    fn check_layout(&self, layout: &HilbertLayout) -> Result<(), CodeError> {
        let needed = 2 * self.modes_per_qubit();
        if layout.n_modes() != needed {
            return Err(CodeError::ModeCount { code: self.label(), needed, got: layout.n_modes() });
        }
        if let Some(&d) = layout.mode_dims().iter().find(|&&d| d < self.min_dim()) {
            return Err(CodeError::Truncation { code: self.label(), needed: self.min_dim(), got: d });
        }
        Ok(())
    }

    /// Single-mode Fock amplitudes of `|0_L⟩` and `|1_L⟩`, or per-rail Fock numbers for dual-rail.
    fn single_mode_codewords(&self, dim: usize) -> [CVector; 2] {
        let fock = |n: usize| {
            let mut v = CVector::zeros(dim);
            v[n] = ONE;
            v
        };
        match *self {
            BosonicCode::Fock01 => [fock(0), fock(1)],
            BosonicCode::Binomial => [(fock(0) + fock(4)) * c(FRAC_1_SQRT_2, 0.0), fock(2)],
            BosonicCode::FourCat { alpha } => {
                let cat = |residue: usize| {
                    let mut v = CVector::zeros(dim);
                    let mut amp = 1.0;
                    for n in 0..dim {
                        if n > 0 {
                            amp *= alpha / (n as f64).sqrt();
                        }
                        if n % 4 == residue {
                            v[n] = c(amp, 0.0);
                        }
                    }
                    let norm = v.norm();
                    v / c(norm, 0.0)
                };
                [cat(0), cat(2)]
            }
            BosonicCode::DualRail => unreachable!("dual-rail codewords span two modes"),
        }
    }

    /// Per-mode state vectors for logical value `bit` of qubit `qubit`, keyed by slot.
    fn qubit_factors(&self, layout: &HilbertLayout, qubit: usize, bit: usize) -> Result<Vec<(usize, CVector)>, CodeError> {
        let modes = self.qubit_modes(qubit)?;
        let dim = layout.mode_dims()[modes[0]];
        Ok(match self {
            BosonicCode::DualRail => {
                // |0_L⟩ = |0⟩_a|1⟩_b, |1_L⟩ = |1⟩_a|0⟩_b
                let fock = |n: usize, d: usize| {
                    let mut v = CVector::zeros(d);
                    v[n] = ONE;
                    v
                };
                let db = layout.mode_dims()[modes[1]];
                vec![(modes[0], fock(bit, dim)), (modes[1], fock(1 - bit, db))]
            }
            _ => vec![(modes[0], self.single_mode_codewords(dim)[bit].clone())],
        })
    }

    /// Codewords of a single qubit as `(|0_L⟩, |1_L⟩)` on its own modes (one or two modes).
    pub fn codewords(&self, dim: usize) -> [CVector; 2] {
        match self {
            BosonicCode::DualRail => {
                let fock = |n: usize| {
                    let mut v = CVector::zeros(dim);
                    v[n] = ONE;
                    v
                };
                [kron_vec(&fock(0), &fock(1)), kron_vec(&fock(1), &fock(0))]
            }
            _ => self.single_mode_codewords(dim),
        }
    }
}

fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let mut out = CVector::zeros(a.len() * b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            out[i * b.len() + j] = a[i] * b[j];
        }
    }
    out
}

/// Six single-qubit cardinal states as (label, amplitudes on |0⟩, |1⟩).
pub fn single_qubit_cardinals() -> [(&'static str, [Complex64; 2]); 6] {
    let h = FRAC_1_SQRT_2;
    [
        ("0", [ONE, ZERO]),
        ("1", [ZERO, ONE]),
        ("+", [c(h, 0.0), c(h, 0.0)]),
        ("-", [c(h, 0.0), c(-h, 0.0)]),
        ("+i", [c(h, 0.0), c(0.0, h)]),
        ("-i", [c(h, 0.0), c(0.0, -h)]),
    ]
}

#[derive(Clone, Debug)]
pub struct CardinalState {
    pub label: String,
    /// Coefficients on the logical basis `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub logical: [Complex64; 4],
    /// Full-space ket with the ancilla in |g⟩.
    pub ket: CVector,
}

/// Two-qubit codespace embedded in a concrete layout.
#[derive(Clone, Debug)]
pub struct Codespace {
    code: BosonicCode,
    layout: HilbertLayout,
    /// Mode-space isometry; columns are |00_L⟩, |01_L⟩, |10_L⟩, |11_L⟩.
    basis: CMatrix,
}

impl Codespace {
    pub fn new(code: BosonicCode, layout: &HilbertLayout) -> Result<Self, CodeError> {
        code.check_layout(layout)?;
        let md = layout.mode_space_dim();
        let mut basis = CMatrix::zeros(md, 4);
        for (col, (b0, b1)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
            let mut factors: Vec<Option<CVector>> = vec![None; layout.n_modes()];
            for (q, bit) in [(0, b0), (1, b1)] {
                for (slot, v) in code.qubit_factors(layout, q, bit)? {
                    factors[slot] = Some(v);
                }
            }
            let mut v = CVector::from_element(1, ONE);
            for f in factors {
                let f = f.expect("every mode belongs to a qubit");
                v = kron_vec(&v, &f);
            }
            basis.set_column(col, &v);
        }
        Ok(Self { code, layout: layout.clone(), basis })
    }

    pub fn code(&self) -> BosonicCode {
        self.code
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    /// Mode-space isometry `V` (mode_space_dim x 4).
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// `|level⟩ ⊗ V` on the full space (dim x 4).
    pub fn full_basis(&self, level: Level) -> CMatrix {
        let mut e = CMatrix::zeros(ANCILLA_DIM, 1);
        e[(level.index(), 0)] = ONE;
        kron(&e, &self.basis)
    }

    pub fn ket(&self, logical: &[Complex64; 4], level: Level) -> CVector {
        let coeffs = CVector::from_row_slice(logical);
        self.full_basis(level) * coeffs
    }

    /// `V u V†` on the mode space.
    pub fn lift(&self, u: &CMatrix) -> CMatrix {
        &self.basis * u * self.basis.adjoint()
    }

    /// `anc ⊗ V u V†` on the full space.
    pub fn lift_full(&self, u: &CMatrix, anc: &CMatrix) -> Result<Operator, CodeError> {
        Ok(Operator::new(self.layout.clone(), kron(anc, &self.lift(u)))?)
    }

    /// Projector onto the codespace on the mode space.
    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    pub fn logical_z(&self, qubit: usize) -> Result<Operator, CodeError> {
        let slot = self.code.qubit_modes(qubit)?[0];
        let d = self.layout.mode_dims()[slot];
        let n = self.code.rotation_order() as f64;
        let z = CMatrix::from_diagonal(&CVector::from_iterator(d, (0..d).map(|k| Complex64::from_polar(1.0, PI * k as f64 / n))));
        Ok(embed(&z, Slot::Mode(slot), &self.layout)?)
    }

    /// Logical X on `qubit` built from codeword dyads (acts as zero off the codespace).
    pub fn logical_x(&self, qubit: usize) -> Result<Operator, CodeError> {
        if qubit > 1 {
            return Err(CodeError::NoSuchQubit(qubit));
        }
        let x = pauli_x();
        let id = CMatrix::identity(2, 2);
        let u = if qubit == 0 { kron(&x, &id) } else { kron(&id, &x) };
        self.lift_full(&u, &CMatrix::identity(ANCILLA_DIM, ANCILLA_DIM))
    }

    pub fn cardinal_states(&self) -> Vec<CardinalState> {
        let singles = single_qubit_cardinals();
        let mut out = Vec::with_capacity(36);
        for (l0, a) in &singles {
            for (l1, b) in &singles {
                let logical = [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]];
                out.push(CardinalState {
                    label: format!("{l0},{l1}"),
                    logical,
                    ket: self.ket(&logical, Level::G),
                });
            }
        }
        out
    }

    /// Idealized syndrome check `M ⊗ 1_anc`.
    pub fn syndrome_projector(&self) -> Result<Operator, CodeError> {
        let md = self.layout.mode_space_dim();
        let m = match self.code {
            BosonicCode::Fock01 => CMatrix::identity(md, md),
            BosonicCode::DualRail => self.projector(),
            BosonicCode::Binomial | BosonicCode::FourCat { .. } => {
                let mut m = CMatrix::identity(md, md);
                for q in 0..2 {
                    let slot = self.code.qubit_modes(q)?[0];
                    let d = self.layout.mode_dims()[slot];
                    let even = CMatrix::from_diagonal(&CVector::from_iterator(
                        d,
                        (0..d).map(|k| if k % 2 == 0 { ONE } else { ZERO }),
                    ));
                    let block = mode_space_embed(&even, slot, &self.layout);
                    m = &m * block;
                }
                m
            }
        };
        Ok(Operator::new(self.layout.clone(), kron(&CMatrix::identity(ANCILLA_DIM, ANCILLA_DIM), &m))?)
    }
}

/// Single-mode matrix tensored with identities on the other modes (no ancilla factor).
pub fn mode_space_embed(op: &CMatrix, slot: usize, layout: &HilbertLayout) -> CMatrix {
    let mut m = CMatrix::identity(1, 1);
    for (i, &d) in layout.mode_dims().iter().enumerate() {
        let f = if i == slot { op.clone() } else { CMatrix::identity(d, d) };
        m = kron(&m, &f);
    }
    m
}

fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// `exp(-iθ/2 · P)` for an involution `P` (`P² = 1`).
fn pauli_rotation(p: &CMatrix, theta: f64) -> CMatrix {
    let n = p.nrows();
    CMatrix::identity(n, n) * c((theta / 2.0).cos(), 0.0) - p * c(0.0, (theta / 2.0).sin())
}

pub fn swap_matrix() -> CMatrix {
    let mut s = CMatrix::zeros(4, 4);
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        s[(i, j)] = ONE;
    }
    s
}

/// Two-qubit logical gates. Every rotation uses the convention `P(θ) = exp(-iθ/2 · P)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum LogicalGate {
    Identity,
    Zz { theta: f64 },
    Eswap { theta: f64 },
    Cphase { theta: f64 },
    Iswap { theta: f64 },
    Fsim { theta: f64, phi: f64 },
}

/// 4x4 logical unitary.
pub fn reference_unitary(gate: LogicalGate) -> CMatrix {
    let zz = |t: f64| pauli_rotation(&kron(&pauli_z(), &pauli_z()), t);
    let sw = |t: f64| pauli_rotation(&swap_matrix(), t);
    let zlocal = |t: f64| {
        let z = pauli_rotation(&pauli_z(), t);
        kron(&z, &z)
    };
    match gate {
        LogicalGate::Identity => CMatrix::identity(4, 4),
        LogicalGate::Zz { theta } => zz(theta),
        LogicalGate::Eswap { theta } => sw(theta),
        // fSim(0, θ); a diagonal controlled phase diag(1, 1, 1, e^{-iθ}) up to global phase
        LogicalGate::Cphase { theta } => zz(theta / 2.0) * zlocal(-theta / 2.0),
        LogicalGate::Iswap { theta } => sw(2.0 * theta) * zz(-theta),
        LogicalGate::Fsim { theta, phi } => sw(2.0 * theta) * zz(-theta + phi / 2.0) * zlocal(-phi / 2.0),
    }
}
