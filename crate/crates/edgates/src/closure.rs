// SPDX-License-Identifier: Apache-2.0
//! Error closure: nested commutators of a Hamiltonian with hardware errors and
//! membership tests against a correctable-error span.
//!
//! Everything is decided numerically on a truncated space. Span tests only read a
//! [`Window`] of basis states that drops the top Fock levels of every mode, where the
//! truncated ladder operators break `[a, a†] = 1`, and drops the ancilla `e` level,
//! which is flagged separately through the gf manifold.

use crate::fock::{ancilla, ancilla_op, annihilation, FockError, HilbertLayout, Level, Operator};
use crate::linalg::{c, CMatrix, CVector, HermitianPropagator};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_MAX_DEPTH: usize = 6;
pub const DEFAULT_GUARD: usize = 2;
pub const DEFAULT_MODE_DIM: usize = 6;
/// Relative residual above which an operator is outside a span.
pub const SPAN_TOL: f64 = 1e-8;
/// Windowed commutators below this (relative to ‖H‖‖ε‖) are treated as zero.
const ZERO_TOL: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClosureError {
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error("window is empty for mode dims {dims:?} and cutoffs {cutoffs:?}")]
    EmptyWindow { dims: Vec<usize>, cutoffs: Vec<Option<usize>> },
    #[error("expected {expected} photon cutoffs, got {got}")]
    CutoffCount { expected: usize, got: usize },
    #[error("error sets live on different windows")]
    WindowMismatch,
    #[error("max_depth must be at least 1")]
    ZeroDepth,
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("cannot parse {expr:?} at offset {pos}: {msg}")]
    Parse { expr: String, pos: usize, msg: String },
}

type Result<T> = std::result::Result<T, ClosureError>;

/// Basis states read by span tests: ancilla in `g` or `f`, every mode at or below
/// its photon cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    layout: HilbertLayout,
    indices: Vec<usize>,
}

impl Window {
    /// Excludes the top `guard` Fock levels of every mode.
    pub fn guard_band(layout: &HilbertLayout, guard: usize) -> Result<Self> {
        let cutoffs: Vec<Option<usize>> = layout.mode_dims().iter().map(|&d| (d - 1).checked_sub(guard)).collect();
        if cutoffs.iter().any(Option::is_none) {
            return Err(ClosureError::EmptyWindow { dims: layout.mode_dims().to_vec(), cutoffs });
        }
        let cutoffs: Vec<usize> = cutoffs.into_iter().flatten().collect();
        Self::photon_cutoff(layout, &cutoffs)
    }

    /// Keeps modes with at most `cutoffs[i]` photons.
    pub fn photon_cutoff(layout: &HilbertLayout, cutoffs: &[usize]) -> Result<Self> {
        if cutoffs.len() != layout.n_modes() {
            return Err(ClosureError::CutoffCount { expected: layout.n_modes(), got: cutoffs.len() });
        }
        let keep_level = |l: usize| l == Level::G.index() || l == Level::F.index();
        let indices: Vec<usize> = (0..layout.dim())
            .filter(|&idx| {
                let (level, photons) = layout.decode(idx);
                keep_level(level) && photons.iter().zip(cutoffs).all(|(n, cut)| n <= cut)
            })
            .collect();
        Ok(Self { layout: layout.clone(), indices })
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    /// Number of basis states in the window.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Column-major vector of the windowed block of `op`.
    pub fn vectorize(&self, op: &Operator) -> Result<CVector> {
        if op.layout() != &self.layout {
            return Err(FockError::LayoutMismatch(op.layout().mode_dims().to_vec(), self.layout.mode_dims().to_vec()).into());
        }
        let m = op.matrix();
        let n = self.indices.len();
        Ok(CVector::from_iterator(
            n * n,
            self.indices.iter().flat_map(|&j| self.indices.iter().map(move |&i| m[(i, j)])),
        ))
    }
}

/// A set of error operators together with an orthonormal basis of their span,
/// measured on a [`Window`].
#[derive(Clone, Debug)]
pub struct ErrorSet {
    label: String,
    generators: Vec<Operator>,
    span_basis: Vec<CVector>,
    window: Window,
}

impl ErrorSet {
    pub fn new(label: impl Into<String>, generators: Vec<Operator>, window: &Window) -> Result<Self> {
        let mut set = Self::empty(label, window);
        for g in &generators {
            set.absorb(g, SPAN_TOL)?;
        }
        set.generators = generators;
        Ok(set)
    }

    /// Parses each entry with [`parse_operator`].
    pub fn from_exprs(label: impl Into<String>, exprs: &[&str], window: &Window) -> Result<Self> {
        let ops = exprs.iter().map(|e| parse_operator(e, window.layout())).collect::<Result<Vec<_>>>()?;
        Self::new(label, ops, window)
    }

    fn empty(label: impl Into<String>, window: &Window) -> Self {
        Self { label: label.into(), generators: Vec::new(), span_basis: Vec::new(), window: window.clone() }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn generators(&self) -> &[Operator] {
        &self.generators
    }

    pub fn span_basis(&self) -> &[CVector] {
        &self.span_basis
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn dim(&self) -> usize {
        self.span_basis.len()
    }

    /// Largest deviation of the basis Gram matrix from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, u) in self.span_basis.iter().enumerate() {
            for (j, v) in self.span_basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((u.dotc(v) - c(target, 0.0)).norm());
            }
        }
        worst
    }

    /// ‖v − Pv‖ / ‖v‖ for the windowed vector of `op`; zero operators give zero.
    pub fn residual(&self, op: &Operator) -> Result<f64> {
        let v = self.window.vectorize(op)?;
        Ok(self.residual_vec(&v))
    }

    pub fn contains(&self, op: &Operator) -> Result<bool> {
        Ok(self.residual(op)? <= SPAN_TOL)
    }

    /// True when both sets span the same subspace on a shared window.
    pub fn same_span(&self, other: &ErrorSet) -> Result<bool> {
        if self.window != other.window {
            return Err(ClosureError::WindowMismatch);
        }
        Ok(self.dim() == other.dim() && other.span_basis.iter().all(|v| self.residual_vec(v) <= SPAN_TOL))
    }

    fn residual_vec(&self, v: &CVector) -> f64 {
        let n = v.norm();
        if n == 0.0 {
            return 0.0;
        }
        self.orthogonalize(v / c(n, 0.0)).norm()
    }

    // Gram-Schmidt applied twice keeps the basis orthonormal to round-off.
    fn orthogonalize(&self, mut r: CVector) -> CVector {
        for _ in 0..2 {
            for u in &self.span_basis {
                let p = u.dotc(&r);
                r.axpy(-p, u, ONE_C);
            }
        }
        r
    }

    /// Adds the direction of `op` if it is new; returns whether it was.
    fn absorb(&mut self, op: &Operator, tol: f64) -> Result<bool> {
        let v = self.window.vectorize(op)?;
        let n = v.norm();
        if n == 0.0 {
            return Ok(false);
        }
        let r = self.orthogonalize(v / c(n, 0.0));
        let res = r.norm();
        if res <= tol {
            return Ok(false);
        }
        self.span_basis.push(r / c(res, 0.0));
        Ok(true)
    }
}

const ONE_C: Complex64 = Complex64::new(1.0, 0.0);

/// `AB − BA`.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    Ok(a.commutator(b)?)
}

#[derive(Clone, Debug)]
pub struct Extension {
    pub set: ErrorSet,
    /// Commutator layers evaluated.
    pub layers: usize,
    /// False when the last allowed layer still produced new directions.
    pub converged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosureOptions {
    pub mode_dim: usize,
    pub guard: usize,
    pub max_depth: usize,
    pub tol: f64,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        Self { mode_dim: DEFAULT_MODE_DIM, guard: DEFAULT_GUARD, max_depth: DEFAULT_MAX_DEPTH, tol: SPAN_TOL }
    }
}

impl ClosureOptions {
    fn validate(&self) -> Result<()> {
        if self.max_depth == 0 {
            return Err(ClosureError::ZeroDepth);
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(ClosureError::InvalidTolerance(self.tol));
        }
        Ok(())
    }
}

pub fn generate_extended_set(h: &Operator, hardware: &ErrorSet, max_depth: usize) -> Result<Extension> {
    extend(h, hardware, &ClosureOptions { max_depth, ..ClosureOptions::default() })
}

fn extend(h: &Operator, hardware: &ErrorSet, opts: &ClosureOptions) -> Result<Extension> {
    opts.validate()?;
    let window = &hardware.window;
    let mut set = ErrorSet::empty(format!("ext({})", hardware.label), window);
    let mut frontier = Vec::new();
    for g in &hardware.generators {
        if set.absorb(g, opts.tol)? {
            set.generators.push(g.clone());
            frontier.push(g.clone());
        }
    }
    let h_norm = h.frobenius_norm();
    let mut layers = 0;
    let mut converged = false;
    while layers < opts.max_depth {
        layers += 1;
        let mut next = Vec::new();
        for e in &frontier {
            let k = h.commutator(e)?;
            // Only the windowed block matters; truncation defects live outside it.
            let wn = window.vectorize(&k)?.norm();
            if wn <= ZERO_TOL * h_norm * e.frobenius_norm() {
                continue;
            }
            let k = k.scale(c(1.0 / wn, 0.0));
            if set.absorb(&k, opts.tol)? {
                set.generators.push(k.clone());
                next.push(k);
            }
        }
        if next.is_empty() {
            converged = true;
            break;
        }
        frontier = next;
    }
    Ok(Extension { set, layers, converged })
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub closed: bool,
    /// First extended-set element outside the correctable span.
    pub witness: Option<Operator>,
    pub witness_residual: f64,
    pub extended_dim: usize,
    pub layers: usize,
    pub converged: bool,
}

pub fn check_closure(h: &Operator, hardware: &ErrorSet, correctable: &ErrorSet, max_depth: usize) -> Result<Verdict> {
    check_closure_with(h, hardware, correctable, &ClosureOptions { max_depth, ..ClosureOptions::default() })
}

pub fn check_closure_with(h: &Operator, hardware: &ErrorSet, correctable: &ErrorSet, opts: &ClosureOptions) -> Result<Verdict> {
    if hardware.window != correctable.window {
        return Err(ClosureError::WindowMismatch);
    }
    let ext = extend(h, hardware, opts)?;
    let mut witness = None;
    let mut witness_residual = 0.0;
    for g in &ext.set.generators {
        let r = correctable.residual(g)?;
        if r > opts.tol {
            witness = Some(g.clone());
            witness_residual = r;
            break;
        }
    }
    Ok(Verdict {
        closed: ext.converged && witness.is_none(),
        witness,
        witness_residual,
        extended_dim: ext.set.dim(),
        layers: ext.layers,
        converged: ext.converged,
    })
}

/// Largest |eigenvalue| of a Hermitian operator.
pub fn spectral_norm(h: &Operator) -> f64 {
    HermitianPropagator::new(h.matrix()).eigenvalues().iter().fold(0.0, |m, e| m.max(e.abs()))
}

/// Residual of `e^{-iHt} ε e^{iHt}` against the correctable span.
pub fn bch_residual(h: &Operator, eps: &Operator, correctable: &ErrorSet, t: f64) -> Result<f64> {
    let u = HermitianPropagator::new(h.matrix()).at(t);
    let moved: CMatrix = &u * eps.matrix() * u.adjoint();
    correctable.residual(&Operator::new(h.layout().clone(), moved)?)
}

/// Parses sums of products of `a`..`d` (modes 0..3), daggers (`†` or `'`), `sz`
/// (σ_z on the gf manifold), real numbers, parentheses and integer powers, e.g.
/// `0.5 (a† b + a b†) + a†a sz` or `a†^2 + a^2`.
pub fn parse_operator(expr: &str, layout: &HilbertLayout) -> Result<Operator> {
    let mut p = Parser { chars: expr.chars().collect(), pos: 0, expr, layout };
    let op = p.sum()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(p.error("unexpected character"));
    }
    Ok(op)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    expr: &'a str,
    layout: &'a HilbertLayout,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ClosureError {
        ClosureError::Parse { expr: self.expr.to_string(), pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<Operator> {
        self.skip_ws();
        let mut sign = 1.0;
        if self.peek() == Some('-') {
            sign = -1.0;
            self.pos += 1;
        }
        let mut acc = self.product()?.scale(c(sign, 0.0));
        loop {
            self.skip_ws();
            let sign = match self.peek() {
                Some('+') => 1.0,
                Some('-') => -1.0,
                _ => return Ok(acc),
            };
            self.pos += 1;
            acc = acc.add(&self.product()?.scale(c(sign, 0.0)))?;
        }
    }

    fn product(&mut self) -> Result<Operator> {
        let mut acc: Option<Operator> = None;
        loop {
            self.skip_ws();
            if self.peek() == Some('*') {
                if acc.is_none() {
                    return Err(self.error("dangling '*'"));
                }
                self.pos += 1;
                self.skip_ws();
            }
            match self.peek() {
                Some(ch) if ch.is_ascii_alphanumeric() || ch == '(' || ch == '.' => {
                    let f = self.power()?;
                    acc = Some(match acc {
                        None => f,
                        Some(a) => a.compose(&f)?,
                    });
                }
                _ => return acc.ok_or_else(|| self.error("expected a factor")),
            }
        }
    }

    fn power(&mut self) -> Result<Operator> {
        let base = self.atom()?;
        self.skip_ws();
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|ch| ch.is_ascii_digit()) {
            self.pos += 1;
        }
        let k: u32 = self.chars[start..self.pos]
            .iter()
            .collect::<String>()
            .parse()
            .map_err(|_| self.error("expected an integer exponent"))?;
        let mut out = Operator::identity(self.layout);
        for _ in 0..k {
            out = out.compose(&base)?;
        }
        Ok(out)
    }

    fn atom(&mut self) -> Result<Operator> {
        let ch = self.peek().ok_or_else(|| self.error("unexpected end"))?;
        if ch == '(' {
            self.pos += 1;
            let inner = self.sum()?;
            self.skip_ws();
            if self.peek() != Some(')') {
                return Err(self.error("expected ')'"));
            }
            self.pos += 1;
            return Ok(inner);
        }
        if ch.is_ascii_digit() || ch == '.' {
            let start = self.pos;
            while self.peek().is_some_and(|ch| ch.is_ascii_digit() || ch == '.') {
                self.pos += 1;
            }
            let x: f64 = self.chars[start..self.pos]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| self.error("malformed number"))?;
            return Ok(Operator::identity(self.layout).scale(c(x, 0.0)));
        }
        if ch == 's' {
            if self.chars.get(self.pos + 1) != Some(&'z') {
                return Err(self.error("expected 'sz'"));
            }
            self.pos += 2;
            return Ok(ancilla_op(&ancilla::sigma_z_gf(), self.layout)?);
        }
        let mode = match ch {
            'a' => 0,
            'b' => 1,
            'c' => 2,
            'd' => 3,
            _ => return Err(self.error("unknown symbol")),
        };
        if mode >= self.layout.n_modes() {
            return Err(self.error("mode not present in layout"));
        }
        self.pos += 1;
        let op = annihilation(self.layout, mode)?;
        if matches!(self.peek(), Some('†') | Some('\'')) {
            self.pos += 1;
            return Ok(op.dagger());
        }
        Ok(op)
    }
}

/// Normal-ordered monomials of degree ≤ 2 in `a`, `b`, with and without `sz`.
const DICTIONARY: [&str; 15] =
    ["1", "a", "a†", "b", "b†", "a^2", "a†^2", "b^2", "b†^2", "a†a", "b†b", "a b", "a† b†", "a† b", "a b†"];

/// Writes `op` as a combination of low-order monomials, or reports that it is
/// outside their span.
pub fn describe(op: &Operator, window: &Window) -> Result<String> {
    let layout = window.layout();
    let mut names = Vec::new();
    let mut cols = Vec::new();
    for m in DICTIONARY {
        let base = parse_operator(m, layout)?;
        let sz = parse_operator("sz", layout)?;
        cols.push(window.vectorize(&base)?);
        names.push(m.to_string());
        cols.push(window.vectorize(&base.compose(&sz)?)?);
        names.push(if m == "1" { "sz".to_string() } else { format!("{m} sz") });
    }
    let a = CMatrix::from_columns(&cols);
    let v = window.vectorize(op)?;
    let scale = v.norm();
    if scale == 0.0 {
        return Ok("0".to_string());
    }
    let x = a.clone().svd(true, true).solve(&v, 1e-12).map_err(|e| ClosureError::Parse {
        expr: "dictionary".into(),
        pos: 0,
        msg: e.to_string(),
    })?;
    if (&a * &x - &v).norm() > SPAN_TOL * scale {
        return Ok("outside degree-2 monomials".to_string());
    }
    let mut out = String::new();
    for (coef, name) in x.iter().zip(&names) {
        if coef.norm() < 1e-9 * scale {
            continue;
        }
        out.push_str(&format_term(*coef, name, out.is_empty()));
    }
    Ok(out)
}

fn format_term(coef: Complex64, name: &str, first: bool) -> String {
    let mag = |x: f64| {
        if (x - x.round()).abs() < 1e-9 {
            format!("{}", x.round())
        } else {
            format!("{x:.4}")
        }
    };
    let is_one = name == "1";
    if coef.im.abs() < 1e-9 {
        let (sign, m) = (coef.re < 0.0, coef.re.abs());
        let lead = match (first, sign) {
            (true, false) => "",
            (true, true) => "-",
            (false, false) => " + ",
            (false, true) => " - ",
        };
        let body = if is_one {
            mag(m)
        } else if (m - 1.0).abs() < 1e-9 {
            name.to_string()
        } else {
            format!("{}{name}", mag(m))
        };
        format!("{lead}{body}")
    } else {
        let lead = if first { "" } else { " + " };
        let body = if is_one { String::new() } else { name.to_string() };
        format!("{lead}({}{}{}i){body}", mag(coef.re), if coef.im < 0.0 { "-" } else { "+" }, mag(coef.im.abs()))
    }
}

/// Candidate Hamiltonians and whether they close against single photon loss.
pub const TABLE_IV: [(&str, bool); 7] = [
    ("a†a", true),
    ("a + a†", true),
    ("a b† + a† b", true),
    ("a† b† + a b", false),
    ("a†^2 + a^2", false),
    ("a†a (b + b†)", false),
    ("(a + a†) b†b", false),
];

pub const HARDWARE: [&str; 2] = ["a", "b"];
pub const HARDWARE_SZ: [&str; 3] = ["a", "b", "sz"];
pub const CORRECTABLE: [&str; 4] = ["1", "a", "b", "a b"];
pub const CORRECTABLE_SZ: [&str; 8] = ["1", "a", "b", "a b", "sz", "a sz", "b sz", "a b sz"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureRow {
    pub hamiltonian: String,
    pub sigma_z: bool,
    pub commutator_with_a: String,
    pub expected_closed: bool,
    pub closed: bool,
    pub converged: bool,
    pub extended_dim: usize,
    pub witness: Option<String>,
}

impl ClosureRow {
    pub fn matches(&self) -> bool {
        self.closed == self.expected_closed
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub options: ClosureOptions,
    pub rows: Vec<ClosureRow>,
}

impl ClosureReport {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(ClosureRow::matches)
    }

    pub fn to_markdown(&self) -> String {
        let o = &self.options;
        let mut s = format!(
            "# Error closure against single photon loss\n\nmode_dim = {}, guard = {}, max_depth = {}, tol = {:e}\n\n",
            o.mode_dim, o.guard, o.max_depth, o.tol
        );
        s.push_str("| H | [H, a] | closed | expected | ext. dim | witness |\n|---|---|---|---|---|---|\n");
        for r in &self.rows {
            let mark = |b: bool| if b { "yes" } else { "no" };
            let h = if r.sigma_z { format!("({}) sz", r.hamiltonian) } else { r.hamiltonian.clone() };
            s.push_str(&format!(
                "| {h} | {} | {} | {} | {}{} | {} |\n",
                r.commutator_with_a,
                mark(r.closed),
                mark(r.expected_closed),
                r.extended_dim,
                if r.converged { "" } else { "+" },
                r.witness.as_deref().unwrap_or("")
            ));
        }
        s
    }
}

/// Hardware and correctable sets for a row, on the guard-band window of `layout`.
pub fn photon_loss_sets(layout: &HilbertLayout, guard: usize, sigma_z: bool) -> Result<(ErrorSet, ErrorSet)> {
    let window = Window::guard_band(layout, guard)?;
    let (hw, corr): (&[&str], &[&str]) = if sigma_z { (&HARDWARE_SZ, &CORRECTABLE_SZ) } else { (&HARDWARE, &CORRECTABLE) };
    Ok((ErrorSet::from_exprs("hardware", hw, &window)?, ErrorSet::from_exprs("correctable", corr, &window)?))
}

pub fn table_iv_report() -> Result<ClosureReport> {
    table_iv_report_with(&ClosureOptions::default())
}

pub fn table_iv_report_with(opts: &ClosureOptions) -> Result<ClosureReport> {
    opts.validate()?;
    let layout = HilbertLayout::uniform(2, opts.mode_dim)?;
    let cases: Vec<(&str, bool, bool)> =
        [false, true].iter().flat_map(|&sz| TABLE_IV.iter().map(move |&(h, exp)| (h, exp, sz))).collect();
    let rows = cases
        .par_iter()
        .map(|&(expr, expected_closed, sigma_z)| {
            let (hw, corr) = photon_loss_sets(&layout, opts.guard, sigma_z)?;
            let mut h = parse_operator(expr, &layout)?;
            if sigma_z {
                h = h.compose(&parse_operator("sz", &layout)?)?;
            }
            let a = parse_operator("a", &layout)?;
            let verdict = check_closure_with(&h, &hw, &corr, opts)?;
            let witness = verdict.witness.as_ref().map(|w| describe(w, hw.window())).transpose()?;
            Ok(ClosureRow {
                hamiltonian: expr.to_string(),
                sigma_z,
                commutator_with_a: describe(&commutator(&h, &a)?, hw.window())?,
                expected_closed,
                closed: verdict.closed,
                converged: verdict.converged,
                extended_dim: verdict.extended_dim,
                witness,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClosureReport { options: *opts, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lay() -> HilbertLayout {
        HilbertLayout::uniform(2, 6).unwrap()
    }

    fn op(s: &str) -> Operator {
        parse_operator(s, &lay()).unwrap()
    }

    fn close(x: &Operator, y: &Operator) -> bool {
        let w = Window::guard_band(&lay(), 2).unwrap();
        (w.vectorize(x).unwrap() - w.vectorize(y).unwrap()).norm() < 1e-12
    }

    #[test]
    fn parser_matches_direct_construction() {
        let l = lay();
        let a = annihilation(&l, 0).unwrap();
        let b = annihilation(&l, 1).unwrap();
        let bs = a.dagger().compose(&b).unwrap().add(&a.compose(&b.dagger()).unwrap()).unwrap();
        assert_eq!(op("a† b + a b'").matrix(), bs.matrix());
        assert_eq!(op("a*a").matrix(), op("a^2").matrix());
        assert_eq!(op("2 (a - a)").matrix(), Operator::zeros(&l).matrix());
        assert_eq!(op("-a").matrix(), a.scale(c(-1.0, 0.0)).matrix());
        for bad in ["", "a +", "x", "(a", "a^", "sq", "c"] {
            assert!(parse_operator(bad, &l).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn commutator_examples() {
        assert!(close(&commutator(&op("a† b + a b†"), &op("a")).unwrap(), &op("-b")));
        assert!(close(&commutator(&op("a† b + a b†"), &op("a b")).unwrap(), &op("-b^2 - a^2")));
        let h = op("a†a + 0.3 (a + a†)");
        assert_eq!(commutator(&h, &h).unwrap().frobenius_norm(), 0.0);
    }

    #[test]
    fn window_drops_guard_levels_and_e() {
        let w = Window::guard_band(&lay(), 2).unwrap();
        assert_eq!(w.len(), 2 * 4 * 4);
        assert!(Window::guard_band(&lay(), 6).is_err());
        assert!(Window::photon_cutoff(&lay(), &[1]).is_err());
    }

    #[test]
    fn basis_is_orthonormal() {
        let w = Window::guard_band(&lay(), 2).unwrap();
        let set = ErrorSet::from_exprs("c", &CORRECTABLE_SZ, &w).unwrap();
        assert_eq!(set.dim(), 8);
        assert!(set.orthonormality_error() < 1e-10);
        let dup = ErrorSet::from_exprs("d", &["a", "2 a", "a + b", "b"], &w).unwrap();
        assert_eq!(dup.dim(), 2);
        assert_eq!(dup.generators().len(), 4);
    }

    #[test]
    fn diagonal_pair_is_immediately_fixed() {
        let w = Window::guard_band(&lay(), 2).unwrap();
        let hw = ErrorSet::from_exprs("hw", &["sz", "b†b"], &w).unwrap();
        let ext = generate_extended_set(&op("a†a sz + b†b"), &hw, 6).unwrap();
        assert!(ext.converged);
        assert_eq!(ext.layers, 1);
        assert_eq!(ext.set.dim(), 2);
    }

    #[test]
    fn zero_depth_and_mismatched_windows_rejected() {
        let w = Window::guard_band(&lay(), 2).unwrap();
        let w1 = Window::guard_band(&lay(), 1).unwrap();
        let hw = ErrorSet::from_exprs("hw", &HARDWARE, &w).unwrap();
        let corr = ErrorSet::from_exprs("c", &CORRECTABLE, &w1).unwrap();
        assert!(matches!(generate_extended_set(&op("a†a"), &hw, 0), Err(ClosureError::ZeroDepth)));
        assert!(matches!(check_closure(&op("a†a"), &hw, &corr, 6), Err(ClosureError::WindowMismatch)));
    }

    #[test]
    fn describe_reads_back_monomials() {
        let w = Window::guard_band(&lay(), 2).unwrap();
        assert_eq!(describe(&op("-2 a†"), &w).unwrap(), "-2a†");
        assert_eq!(describe(&op("a b + a b† sz"), &w).unwrap(), "a b + a b† sz");
        assert_eq!(describe(&op("-1"), &w).unwrap(), "-1");
        assert_eq!(describe(&op("a^3"), &w).unwrap(), "outside degree-2 monomials");
    }
}
