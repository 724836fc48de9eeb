// SPDX-License-Identifier: Apache-2.0
//! Truncated Fock spaces with a three-level ancilla, operator construction and the
//! dispersive-beamsplitter system Hamiltonian.
//!
//! Basis ordering: the ancilla slot is the most significant index, followed by the
//! bosonic modes in declaration order. Ancilla levels are `g = 0`, `e = 1`, `f = 2`.

use crate::linalg::{c, hermiticity_error, kron, unitarity_error, CMatrix, CVector, ONE};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const ANCILLA_DIM: usize = 3;
const MIN_MODES: usize = 2;
const MAX_MODES: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("invalid dimension {0}: truncation must be at least 2")]
    InvalidDimension(usize),
    #[error("layouts support {MIN_MODES} to {MAX_MODES} modes, got {0}")]
    ModeCount(usize),
    #[error("slot {0:?} does not exist in this layout")]
    NoSuchSlot(Slot),
    #[error("matrix is {got}x{got} but slot expects dimension {expected}")]
    SlotDimension { expected: usize, got: usize },
    #[error("operator layouts differ: {0:?} vs {1:?}")]
    LayoutMismatch(Vec<usize>, Vec<usize>),
    #[error("matrix shape {rows}x{cols} does not match layout dimension {dim}")]
    MatrixShape { rows: usize, cols: usize, dim: usize },
    #[error("mode pair uses the same slot twice ({0})")]
    InvalidPair(usize),
    #[error("photon numbers {photons:?} do not fit mode dims {dims:?}")]
    PhotonsOutOfRange { photons: Vec<usize>, dims: Vec<usize> },
    #[error("beamsplitter amplitude must be non-negative (absorb the sign into the phase), got {0}")]
    NegativeCoupling(f64),
    #[error("malformed operator encoding: {0}")]
    Encoding(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slot {
    Ancilla,
    Mode(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    G,
    E,
    F,
}

impl Level {
    pub fn index(self) -> usize {
        match self {
            Level::G => 0,
            Level::E => 1,
            Level::F => 2,
        }
    }

    pub const ALL: [Level; 3] = [Level::G, Level::E, Level::F];
}

/// A pair of distinct mode slots `(a, b)` on which the beamsplitter acts.
/// The dispersive coupling is carried by the first mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModePair(pub usize, pub usize);

impl Default for ModePair {
    fn default() -> Self {
        ModePair(0, 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertLayout {
    mode_dims: Vec<usize>,
}

impl HilbertLayout {
    pub fn new(mode_dims: Vec<usize>) -> Result<Self, FockError> {
        if !(MIN_MODES..=MAX_MODES).contains(&mode_dims.len()) {
            return Err(FockError::ModeCount(mode_dims.len()));
        }
        if let Some(&d) = mode_dims.iter().find(|&&d| d < 2) {
            return Err(FockError::InvalidDimension(d));
        }
        Ok(Self { mode_dims })
    }

    pub fn uniform(n_modes: usize, dim: usize) -> Result<Self, FockError> {
        Self::new(vec![dim; n_modes])
    }

    pub fn mode_dims(&self) -> &[usize] {
        &self.mode_dims
    }

    pub fn n_modes(&self) -> usize {
        self.mode_dims.len()
    }

    pub fn ancilla_dim(&self) -> usize {
        ANCILLA_DIM
    }

    /// Dimension of the bosonic part alone.
    pub fn mode_space_dim(&self) -> usize {
        self.mode_dims.iter().product()
    }

    pub fn dim(&self) -> usize {
        ANCILLA_DIM * self.mode_space_dim()
    }

    pub fn slot_dim(&self, slot: Slot) -> Result<usize, FockError> {
        match slot {
            Slot::Ancilla => Ok(ANCILLA_DIM),
            Slot::Mode(i) => self.mode_dims.get(i).copied().ok_or(FockError::NoSuchSlot(slot)),
        }
    }

    pub fn check_pair(&self, pair: ModePair) -> Result<(), FockError> {
        if pair.0 == pair.1 {
            return Err(FockError::InvalidPair(pair.0));
        }
        self.slot_dim(Slot::Mode(pair.0))?;
        self.slot_dim(Slot::Mode(pair.1))?;
        Ok(())
    }

    /// Index of the mode-space basis state with the given photon numbers.
    pub fn mode_index(&self, photons: &[usize]) -> Result<usize, FockError> {
        if photons.len() != self.n_modes() || photons.iter().zip(&self.mode_dims).any(|(n, d)| n >= d) {
            return Err(FockError::PhotonsOutOfRange {
                photons: photons.to_vec(),
                dims: self.mode_dims.clone(),
            });
        }
        Ok(photons.iter().zip(&self.mode_dims).fold(0, |acc, (n, d)| acc * d + n))
    }

    pub fn index(&self, level: Level, photons: &[usize]) -> Result<usize, FockError> {
        Ok(level.index() * self.mode_space_dim() + self.mode_index(photons)?)
    }

    /// Inverse of [`HilbertLayout::index`]: (ancilla level index, photon numbers).
    pub fn decode(&self, mut idx: usize) -> (usize, Vec<usize>) {
        let mut photons = vec![0; self.n_modes()];
        for (slot, &d) in self.mode_dims.iter().enumerate().rev() {
            photons[slot] = idx % d;
            idx /= d;
        }
        (idx, photons)
    }

    pub fn basis_ket(&self, level: Level, photons: &[usize]) -> Result<CVector, FockError> {
        let mut v = CVector::zeros(self.dim());
        v[self.index(level, photons)?] = ONE;
        Ok(v)
    }

    fn check_same(&self, other: &HilbertLayout) -> Result<(), FockError> {
        if self != other {
            return Err(FockError::LayoutMismatch(self.mode_dims.clone(), other.mode_dims.clone()));
        }
        Ok(())
    }
}

/// Dense operator on the full ancilla-plus-modes space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    layout: HilbertLayout,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(layout: HilbertLayout, matrix: CMatrix) -> Result<Self, FockError> {
        let dim = layout.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(FockError::MatrixShape { rows: matrix.nrows(), cols: matrix.ncols(), dim });
        }
        Ok(Self { layout, matrix })
    }

    pub fn zeros(layout: &HilbertLayout) -> Self {
        let d = layout.dim();
        Self { layout: layout.clone(), matrix: CMatrix::zeros(d, d) }
    }

    pub fn identity(layout: &HilbertLayout) -> Self {
        let d = layout.dim();
        Self { layout: layout.clone(), matrix: CMatrix::identity(d, d) }
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn dagger(&self) -> Self {
        Self { layout: self.layout.clone(), matrix: self.matrix.adjoint() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { layout: self.layout.clone(), matrix: &self.matrix * s }
    }

    pub fn add(&self, other: &Operator) -> Result<Self, FockError> {
        self.layout.check_same(&other.layout)?;
        Ok(Self { layout: self.layout.clone(), matrix: &self.matrix + &other.matrix })
    }

    pub fn sub(&self, other: &Operator) -> Result<Self, FockError> {
        self.layout.check_same(&other.layout)?;
        Ok(Self { layout: self.layout.clone(), matrix: &self.matrix - &other.matrix })
    }

    /// Operator product `self * other`.
    pub fn compose(&self, other: &Operator) -> Result<Self, FockError> {
        self.layout.check_same(&other.layout)?;
        Ok(Self { layout: self.layout.clone(), matrix: &self.matrix * &other.matrix })
    }

    pub fn commutator(&self, other: &Operator) -> Result<Self, FockError> {
        self.layout.check_same(&other.layout)?;
        let m = &self.matrix * &other.matrix - &other.matrix * &self.matrix;
        Ok(Self { layout: self.layout.clone(), matrix: m })
    }

    pub fn apply(&self, ket: &CVector) -> CVector {
        &self.matrix * ket
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.matrix)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn unitarity_error(&self) -> f64 {
        unitarity_error(&self.matrix)
    }

    /// `<bra| self |ket>` for basis labels.
    pub fn element(&self, bra: (Level, &[usize]), ket: (Level, &[usize])) -> Result<Complex64, FockError> {
        let r = self.layout.index(bra.0, bra.1)?;
        let c = self.layout.index(ket.0, ket.1)?;
        Ok(self.matrix[(r, c)])
    }
}

/// Single-mode annihilation operator on `dim` Fock levels.
pub fn ladder(dim: usize) -> Result<CMatrix, FockError> {
    if dim < 2 {
        return Err(FockError::InvalidDimension(dim));
    }
    let mut a = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = c((n as f64).sqrt(), 0.0);
    }
    Ok(a)
}

/// Tensor a single-slot matrix with identities on every other slot.
pub fn embed(op: &CMatrix, slot: Slot, layout: &HilbertLayout) -> Result<Operator, FockError> {
    let expected = layout.slot_dim(slot)?;
    if op.nrows() != expected || op.ncols() != expected {
        return Err(FockError::SlotDimension { expected, got: op.nrows() });
    }
    let factor = |s: Slot| -> CMatrix {
        if s == slot {
            op.clone()
        } else {
            let d = layout.slot_dim(s).expect("slot enumerated from layout");
            CMatrix::identity(d, d)
        }
    };
    let mut m = factor(Slot::Ancilla);
    for i in 0..layout.n_modes() {
        m = kron(&m, &factor(Slot::Mode(i)));
    }
    Operator::new(layout.clone(), m)
}

/// Annihilation operator of mode `i` on the full space.
pub fn annihilation(layout: &HilbertLayout, mode: usize) -> Result<Operator, FockError> {
    let d = layout.slot_dim(Slot::Mode(mode))?;
    embed(&ladder(d)?, Slot::Mode(mode), layout)
}

pub fn number(layout: &HilbertLayout, mode: usize) -> Result<Operator, FockError> {
    let d = layout.slot_dim(Slot::Mode(mode))?;
    let n = CMatrix::from_diagonal(&CVector::from_iterator(d, (0..d).map(|k| c(k as f64, 0.0))));
    embed(&n, Slot::Mode(mode), layout)
}

/// Ancilla-only 3x3 matrices.
pub mod ancilla {
    use super::*;

    pub fn projector(level: Level) -> CMatrix {
        let mut m = CMatrix::zeros(ANCILLA_DIM, ANCILLA_DIM);
        m[(level.index(), level.index())] = ONE;
        m
    }

    pub fn transition(to: Level, from: Level) -> CMatrix {
        let mut m = CMatrix::zeros(ANCILLA_DIM, ANCILLA_DIM);
        m[(to.index(), from.index())] = ONE;
        m
    }

    /// |g><g| - |f><f|
    pub fn sigma_z_gf() -> CMatrix {
        projector(Level::G) - projector(Level::F)
    }

    /// |f><g| + |g><f|
    pub fn sigma_x_gf() -> CMatrix {
        transition(Level::F, Level::G) + transition(Level::G, Level::F)
    }

    /// i|f><g| - i|g><f|
    pub fn sigma_y_gf() -> CMatrix {
        transition(Level::F, Level::G) * c(0.0, 1.0) - transition(Level::G, Level::F) * c(0.0, 1.0)
    }

    /// Transmon lowering operator |g><e| + sqrt(2)|e><f|.
    pub fn lowering() -> CMatrix {
        transition(Level::G, Level::E) + transition(Level::E, Level::F) * c(2f64.sqrt(), 0.0)
    }
}

pub fn ancilla_op(m: &CMatrix, layout: &HilbertLayout) -> Result<Operator, FockError> {
    embed(m, Slot::Ancilla, layout)
}

/// Schwinger angular-momentum operators of a mode pair.
#[derive(Clone, Debug)]
pub struct Schwinger {
    pub l_i: Operator,
    pub l_x: Operator,
    pub l_y: Operator,
    pub l_z: Operator,
}

pub fn angular_momentum(layout: &HilbertLayout, pair: ModePair) -> Result<Schwinger, FockError> {
    layout.check_pair(pair)?;
    let a = annihilation(layout, pair.0)?.into_matrix();
    let b = annihilation(layout, pair.1)?.into_matrix();
    let ad = a.adjoint();
    let bd = b.adjoint();
    let na = &ad * &a;
    let nb = &bd * &b;
    let hop = &ad * &b;
    let hop_back = &a * &bd;
    let half = c(0.5, 0.0);
    let op = |m: CMatrix| Operator::new(layout.clone(), m);
    Ok(Schwinger {
        l_i: op((&na + &nb) * half)?,
        l_x: op((&hop + &hop_back) * half)?,
        l_y: op((&hop - &hop_back) * c(0.0, -0.5))?,
        l_z: op((&na - &nb) * half)?,
    })
}

/// Knobs of the dispersive beamsplitter Hamiltonian. All rates in rad/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PumpParams {
    pub g: f64,
    pub varphi: f64,
    pub delta: f64,
    pub chi_f: f64,
    pub chi_e: f64,
}

impl PumpParams {
    pub fn new(g: f64, varphi: f64, delta: f64, chi_f: f64, chi_e: f64) -> Result<Self, FockError> {
        if g < 0.0 {
            return Err(FockError::NegativeCoupling(g));
        }
        Ok(Self { g, varphi, delta, chi_f, chi_e })
    }

    /// Beamsplitter-only parameters (no dispersive coupling).
    pub fn beamsplitter(g: f64, varphi: f64, delta: f64) -> Result<Self, FockError> {
        Self::new(g, varphi, delta, 0.0, 0.0)
    }
}

/// -a†a[(χf/2)|g><g| + (χf/2 - χe)|e><e| - (χf/2)|f><f|] on the first mode of the pair.
pub fn dispersive_term(chi_f: f64, chi_e: f64, layout: &HilbertLayout, mode: usize) -> Result<Operator, FockError> {
    let weights = CMatrix::from_diagonal(&CVector::from_vec(vec![
        c(chi_f / 2.0, 0.0),
        c(chi_f / 2.0 - chi_e, 0.0),
        c(-chi_f / 2.0, 0.0),
    ]));
    let anc = ancilla_op(&weights, layout)?;
    let n = number(layout, mode)?;
    Ok(anc.compose(&n)?.scale(c(-1.0, 0.0)))
}

/// (g/2)(e^{iφ}a†b + e^{-iφ}ab†) + Δ a†a
pub fn beamsplitter_term(
    g: f64,
    varphi: f64,
    delta: f64,
    layout: &HilbertLayout,
    pair: ModePair,
) -> Result<Operator, FockError> {
    layout.check_pair(pair)?;
    let a = annihilation(layout, pair.0)?.into_matrix();
    let b = annihilation(layout, pair.1)?.into_matrix();
    let phase = Complex64::from_polar(g / 2.0, varphi);
    let hop = a.adjoint() * &b * phase;
    let m = &hop + hop.adjoint() + a.adjoint() * &a * c(delta, 0.0);
    Operator::new(layout.clone(), m)
}

/// Full H_χBS in the symmetric g/f dispersive frame.
pub fn build_hamiltonian(params: &PumpParams, layout: &HilbertLayout, pair: ModePair) -> Result<Operator, FockError> {
    let bs = beamsplitter_term(params.g, params.varphi, params.delta, layout, pair)?;
    let disp = dispersive_term(params.chi_f, params.chi_e, layout, pair.0)?;
    bs.add(&disp)
}

/// Higher-order corrections to the dispersive Hamiltonian (rad/s).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NonlinearParams {
    pub k_a: f64,
    pub k_b: f64,
    pub chi_e_prime: f64,
    pub chi_f_prime: f64,
    pub chi_ab: f64,
}

impl NonlinearParams {
    pub fn is_zero(&self) -> bool {
        [self.k_a, self.k_b, self.chi_e_prime, self.chi_f_prime, self.chi_ab].iter().all(|&x| x == 0.0)
    }
}

/// -(Ka/2)a†a†aa - (Kb/2)b†b†bb + a†a†aa(χ'f|f><f| + χ'e|e><e|) + χab a†a b†b
pub fn build_nonlinear_terms(params: &NonlinearParams, layout: &HilbertLayout, pair: ModePair) -> Result<Operator, FockError> {
    layout.check_pair(pair)?;
    let a = annihilation(layout, pair.0)?.into_matrix();
    let b = annihilation(layout, pair.1)?.into_matrix();
    let ad = a.adjoint();
    let bd = b.adjoint();
    let kerr_a = &ad * &ad * &a * &a;
    let kerr_b = &bd * &bd * &b * &b;
    let anc = ancilla_op(
        &(ancilla::projector(Level::F) * c(params.chi_f_prime, 0.0) + ancilla::projector(Level::E) * c(params.chi_e_prime, 0.0)),
        layout,
    )?
    .into_matrix();
    let m = &kerr_a * c(-params.k_a / 2.0, 0.0)
        + &kerr_b * c(-params.k_b / 2.0, 0.0)
        + &kerr_a * anc
        + (&ad * &a) * (&bd * &b) * c(params.chi_ab, 0.0);
    Operator::new(layout.clone(), m)
}

/// Serialization: row-major complex entries as (re, im) float64 pairs.
#[derive(Serialize, Deserialize)]
struct OperatorRecord {
    ancilla_dim: usize,
    mode_dims: Vec<usize>,
    dim: usize,
    data: Vec<f64>,
}

const MAGIC: &[u8; 4] = b"EDOP";

impl Operator {
    fn row_major(&self) -> Vec<f64> {
        let d = self.dim();
        let mut out = Vec::with_capacity(2 * d * d);
        for r in 0..d {
            for col in 0..d {
                let z = self.matrix[(r, col)];
                out.push(z.re);
                out.push(z.im);
            }
        }
        out
    }

    fn from_row_major(layout: HilbertLayout, data: &[f64]) -> Result<Self, FockError> {
        let d = layout.dim();
        if data.len() != 2 * d * d {
            return Err(FockError::Encoding(format!("expected {} floats, found {}", 2 * d * d, data.len())));
        }
        let m = CMatrix::from_fn(d, d, |r, col| {
            let k = 2 * (r * d + col);
            c(data[k], data[k + 1])
        });
        Operator::new(layout, m)
    }

    pub fn to_json(&self) -> String {
        let rec = OperatorRecord {
            ancilla_dim: ANCILLA_DIM,
            mode_dims: self.layout.mode_dims.clone(),
            dim: self.dim(),
            data: self.row_major(),
        };
        serde_json::to_string(&rec).expect("plain numeric record serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, FockError> {
        let rec: OperatorRecord = serde_json::from_str(s).map_err(|e| FockError::Encoding(e.to_string()))?;
        if rec.ancilla_dim != ANCILLA_DIM {
            return Err(FockError::Encoding(format!("ancilla_dim {}", rec.ancilla_dim)));
        }
        let layout = HilbertLayout::new(rec.mode_dims)?;
        if layout.dim() != rec.dim {
            return Err(FockError::Encoding(format!("dim {} inconsistent with layout", rec.dim)));
        }
        Self::from_row_major(layout, &rec.data)
    }

    /// Binary layout: `EDOP`, u32 mode count, u32 per mode dim, then row-major (re, im) f64 pairs.
    /// All integers and floats little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 4 * self.layout.n_modes() + 16 * self.dim() * self.dim());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.layout.n_modes() as u32).to_le_bytes());
        for &d in &self.layout.mode_dims {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for x in self.row_major() {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FockError> {
        let bad = |m: &str| FockError::Encoding(m.to_string());
        if bytes.len() < 8 || &bytes[..4] != MAGIC {
            return Err(bad("missing header"));
        }
        let u32_at = |k: usize| -> Result<usize, FockError> {
            bytes
                .get(k..k + 4)
                .map(|s| u32::from_le_bytes(s.try_into().expect("4-byte slice")) as usize)
                .ok_or_else(|| bad("truncated header"))
        };
        let n = u32_at(4)?;
        let dims = (0..n).map(|i| u32_at(8 + 4 * i)).collect::<Result<Vec<_>, _>>()?;
        let layout = HilbertLayout::new(dims)?;
        let body = &bytes[8 + 4 * n..];
        if body.len() % 8 != 0 {
            return Err(bad("body is not a whole number of f64"));
        }
        let data: Vec<f64> = body.chunks_exact(8).map(|ch| f64::from_le_bytes(ch.try_into().expect("8-byte chunk"))).collect();
        Self::from_row_major(layout, &data)
    }
}

/// Embed a mode-space matrix (no ancilla) as `|level><level| ⊗ m` summed over the given levels.
pub fn with_ancilla(m: &CMatrix, anc: &CMatrix, layout: &HilbertLayout) -> Result<Operator, FockError> {
    let md = layout.mode_space_dim();
    if m.nrows() != md || m.ncols() != md {
        return Err(FockError::SlotDimension { expected: md, got: m.nrows() });
    }
    Operator::new(layout.clone(), kron(anc, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;
    use crate::units::{khz, mhz};
    use approx::assert_abs_diff_eq;

    fn lay(d: usize) -> HilbertLayout {
        HilbertLayout::uniform(2, d).unwrap()
    }

    #[test]
    fn ladder_entries() {
        let a = ladder(3).unwrap();
        assert_eq!(a[(0, 1)], ONE);
        assert_abs_diff_eq!(a[(1, 2)].re, 2f64.sqrt(), epsilon = 1e-15);
        let nonzero = a.iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
        assert_eq!(ladder(1), Err(FockError::InvalidDimension(1)));
    }

    #[test]
    fn number_operator_dim2() {
        let a = ladder(2).unwrap();
        let n = a.adjoint() * &a;
        assert_eq!(n, CMatrix::from_diagonal(&CVector::from_vec(vec![ZERO, ONE])));
    }

    #[test]
    fn truncated_commutator_corner() {
        let a = ladder(5).unwrap();
        let comm = &a * a.adjoint() - a.adjoint() * &a;
        for k in 0..4 {
            assert_abs_diff_eq!(comm[(k, k)].re, 1.0, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(comm[(4, 4)].re, -4.0, epsilon = 1e-14);
        assert_abs_diff_eq!((comm.clone() - CMatrix::from_diagonal(&comm.diagonal())).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn embed_lowers_mode_a() {
        let l = HilbertLayout::new(vec![4, 4]).unwrap();
        let a = annihilation(&l, 0).unwrap();
        let out = a.apply(&l.basis_ket(Level::G, &[1, 0]).unwrap());
        let expect = l.basis_ket(Level::G, &[0, 0]).unwrap();
        assert!((out - expect).norm() < 1e-15);
    }

    #[test]
    fn embed_identity_and_gf_projector() {
        let l = lay(3);
        let id = embed(&CMatrix::identity(3, 3), Slot::Mode(1), &l).unwrap();
        assert_eq!(id, Operator::identity(&l));
        let sz = ancilla_op(&ancilla::sigma_z_gf(), &l).unwrap();
        let sq = sz.compose(&sz).unwrap();
        let proj = ancilla_op(&(ancilla::projector(Level::G) + ancilla::projector(Level::F)), &l).unwrap();
        assert_eq!(sq, proj);
    }

    #[test]
    fn embed_rejects_wrong_size() {
        let l = lay(3);
        assert!(matches!(embed(&ladder(4).unwrap(), Slot::Mode(0), &l), Err(FockError::SlotDimension { .. })));
        assert!(matches!(embed(&ladder(3).unwrap(), Slot::Mode(5), &l), Err(FockError::NoSuchSlot(_))));
    }

    #[test]
    fn layout_validation() {
        assert!(HilbertLayout::new(vec![3]).is_err());
        assert!(HilbertLayout::new(vec![3, 3, 3, 3, 3]).is_err());
        assert!(HilbertLayout::new(vec![3, 1]).is_err());
        let l = HilbertLayout::new(vec![3, 4, 2]).unwrap();
        assert_eq!(l.dim(), 72);
        let idx = l.index(Level::F, &[2, 3, 1]).unwrap();
        assert_eq!(l.decode(idx), (2, vec![2, 3, 1]));
    }

    #[test]
    fn schwinger_examples() {
        let l = lay(4);
        let s = angular_momentum(&l, ModePair(0, 1)).unwrap();
        let out = s.l_x.apply(&l.basis_ket(Level::E, &[1, 0]).unwrap());
        let expect = l.basis_ket(Level::E, &[0, 1]).unwrap() * c(0.5, 0.0);
        assert!((out - expect).norm() < 1e-15);
        let out = s.l_i.apply(&l.basis_ket(Level::G, &[2, 1]).unwrap());
        let expect = l.basis_ket(Level::G, &[2, 1]).unwrap() * c(1.5, 0.0);
        assert!((out - expect).norm() < 1e-15);
        assert!(matches!(angular_momentum(&l, ModePair(1, 1)), Err(FockError::InvalidPair(1))));
    }

    #[test]
    fn schwinger_su2_algebra_below_truncation() {
        let d = 5;
        let l = lay(d);
        let s = angular_momentum(&l, ModePair(0, 1)).unwrap();
        let lhs = s.l_x.commutator(&s.l_y).unwrap();
        let rhs = s.l_z.scale(c(0.0, 1.0));
        // compare on states with total photon number below d - 1
        for col in 0..l.dim() {
            let (_, n) = l.decode(col);
            if n[0] + n[1] >= d - 1 {
                continue;
            }
            let diff = (lhs.matrix().column(col) - rhs.matrix().column(col)).norm();
            assert!(diff < 1e-12, "column {col}: {diff}");
        }
    }

    #[test]
    fn hamiltonian_examples() {
        let l = lay(3);
        let chi_f = mhz(-1.0);
        let chi_e = mhz(-0.5);
        let p = PumpParams::new(0.0, 0.0, 0.0, chi_f, chi_e).unwrap();
        let h = build_hamiltonian(&p, &l, ModePair(0, 1)).unwrap();
        let e = h.element((Level::F, &[1, 0]), (Level::F, &[1, 0])).unwrap();
        assert_abs_diff_eq!(e.re, chi_f / 2.0, epsilon = 1e-6);
        let e = h.element((Level::G, &[1, 0]), (Level::G, &[1, 0])).unwrap();
        assert_abs_diff_eq!(e.re, -chi_f / 2.0, epsilon = 1e-6);

        let (g, phi) = (mhz(0.8), 0.3);
        let p = PumpParams::new(g, phi, mhz(0.1), chi_f, chi_e).unwrap();
        let h = build_hamiltonian(&p, &l, ModePair(0, 1)).unwrap();
        let e = h.element((Level::G, &[1, 0]), (Level::G, &[0, 1])).unwrap();
        let want = Complex64::from_polar(g / 2.0, phi);
        assert_abs_diff_eq!((e - want).norm(), 0.0, epsilon = 1e-6);
        assert!(h.is_hermitian(1e-12));

        let p = PumpParams::new(0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let h = build_hamiltonian(&p, &l, ModePair(0, 1)).unwrap();
        assert_eq!(h.frobenius_norm(), 0.0);
        assert!(PumpParams::new(-1.0, 0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn hamiltonian_conserves_photons_and_commutes_with_sigma_z() {
        let d = 5;
        let l = lay(d);
        let p = PumpParams::new(mhz(0.9), 0.4, mhz(0.2), mhz(-1.0), mhz(-0.5)).unwrap();
        let h = build_hamiltonian(&p, &l, ModePair(0, 1)).unwrap();
        let ntot = number(&l, 0).unwrap().add(&number(&l, 1).unwrap()).unwrap();
        let comm = h.commutator(&ntot).unwrap();
        assert!(comm.frobenius_norm() < 1e-12 * h.frobenius_norm());
        let sz = ancilla_op(&ancilla::sigma_z_gf(), &l).unwrap();
        assert!(h.commutator(&sz).unwrap().frobenius_norm() < 1e-6);
    }

    #[test]
    fn nonlinear_examples() {
        let l = lay(3);
        let zero = build_nonlinear_terms(&NonlinearParams::default(), &l, ModePair(0, 1)).unwrap();
        assert_eq!(zero.frobenius_norm(), 0.0);
        let k = khz(2.0);
        let p = NonlinearParams { k_a: k, ..Default::default() };
        let h = build_nonlinear_terms(&p, &l, ModePair(0, 1)).unwrap();
        let e = h.element((Level::G, &[2, 0]), (Level::G, &[2, 0])).unwrap();
        assert_abs_diff_eq!(e.re, -k, epsilon = 1e-9);
        let p = NonlinearParams { chi_ab: 7.0, ..Default::default() };
        let h = build_nonlinear_terms(&p, &l, ModePair(0, 1)).unwrap();
        let e = h.element((Level::G, &[1, 1]), (Level::G, &[1, 1])).unwrap();
        assert_abs_diff_eq!(e.re, 7.0, epsilon = 1e-12);
        let p = NonlinearParams { chi_f_prime: 3.0, chi_e_prime: 5.0, ..Default::default() };
        let h = build_nonlinear_terms(&p, &l, ModePair(0, 1)).unwrap();
        assert_abs_diff_eq!(h.element((Level::F, &[2, 0]), (Level::F, &[2, 0])).unwrap().re, 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(h.element((Level::E, &[2, 0]), (Level::E, &[2, 0])).unwrap().re, 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(h.element((Level::G, &[2, 0]), (Level::G, &[2, 0])).unwrap().re, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn layout_mismatch_is_rejected() {
        let a = Operator::identity(&lay(3));
        let b = Operator::identity(&lay(4));
        assert!(matches!(a.add(&b), Err(FockError::LayoutMismatch(..))));
        assert!(matches!(a.compose(&b), Err(FockError::LayoutMismatch(..))));
    }

    #[test]
    fn serialization_round_trip() {
        let l = HilbertLayout::new(vec![2, 3]).unwrap();
        let p = PumpParams::new(1.3, 0.7, -0.2, 0.5, 0.1).unwrap();
        let h = build_hamiltonian(&p, &l, ModePair(0, 1)).unwrap();
        let back = Operator::from_json(&h.to_json()).unwrap();
        assert_eq!(back, h);
        let bytes = h.to_bytes();
        assert_eq!(&bytes[..4], b"EDOP");
        assert_eq!(bytes.len(), 8 + 8 + 16 * 18 * 18);
        // first entry row-major is H[0,0] real part
        let first = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
        assert_eq!(first, h.matrix()[(0, 0)].re);
        // second complex entry is H[0,1]
        let second_re = f64::from_le_bytes(bytes[32..40].try_into().unwrap());
        assert_eq!(second_re, h.matrix()[(0, 1)].re);
        assert_eq!(Operator::from_bytes(&bytes).unwrap(), h);
        assert!(Operator::from_bytes(b"nope").is_err());
    }
}
