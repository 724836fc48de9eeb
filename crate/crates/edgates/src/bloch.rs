// SPDX-License-Identifier: Apache-2.0
//! Operator Bloch sphere: Heisenberg-picture mode transforms of a (dispersive) beamsplitter.
//!
//! For a beamsplitter with amplitude `g`, phase `varphi` and detuning `delta` the mode
//! vector `(a, b)` evolves as `U†(a, b)ᵀU = e^{-iΔt/2} R_n(Ωt) (a, b)ᵀ`, where
//! `R_n(α) = cos(α/2) − i sin(α/2) n·σ`. The same 2x2 matrix is the Schrödinger-picture
//! propagator on the single-excitation states `(|1,0⟩, |0,1⟩)`.

use crate::fock::PumpParams;
use nalgebra::{Matrix2, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use thiserror::Error;

pub type Su2 = Matrix2<Complex64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BlochError {
    #[error("precession axis undefined for g = delta = 0")]
    DegenerateAxis,
    #[error("precession rate must be positive, got {0}")]
    InvalidOmega(f64),
    #[error("|delta_eff| = {delta} exceeds omega = {omega}")]
    DetuningExceedsRate { delta: f64, omega: f64 },
    #[error("dispersive shift chi must be nonzero")]
    ZeroChi,
    #[error("no real beamsplitter amplitude solves the alternate orbit condition for n = {0}")]
    NoSolution(u32),
    #[error("equator unreachable: need g > |chi|/2, got g = {g}, chi = {chi}")]
    UnreachableEquator { g: f64, chi: f64 },
    #[error("beamsplitter amplitude must be positive, got {0}")]
    InvalidCoupling(f64),
    #[error("trajectory needs at least 2 samples, got {0}")]
    TooFewSteps(usize),
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),
}

/// Which ancilla level conditions the mode evolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    G,
    F,
}

impl Branch {
    pub fn flipped(self) -> Self {
        match self {
            Branch::G => Branch::F,
            Branch::F => Branch::G,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Branch::G => "g",
            Branch::F => "f",
        }
    }

    /// Effective detuning seen by mode `a` in this branch.
    pub fn effective_detuning(self, delta: f64, chi: f64) -> f64 {
        match self {
            Branch::G => delta - chi / 2.0,
            Branch::F => delta + chi / 2.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecessionVector {
    pub n: [f64; 3],
    pub omega: f64,
    pub theta: f64,
    pub varphi: f64,
}

impl PrecessionVector {
    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::from(self.n)
    }
}

pub fn precession_vector(g: f64, varphi: f64, delta: f64) -> Result<PrecessionVector, BlochError> {
    let omega = g.hypot(delta);
    if omega == 0.0 {
        return Err(BlochError::DegenerateAxis);
    }
    let theta = g.atan2(delta);
    let (st, ct) = (g / omega, delta / omega);
    Ok(PrecessionVector {
        n: [st * varphi.cos(), -st * varphi.sin(), ct],
        omega,
        theta,
        varphi,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeTransform {
    pub su2: Su2,
    pub prefactor: Complex64,
    pub duration: f64,
}

impl ModeTransform {
    pub fn identity() -> Self {
        Self { su2: Su2::identity(), prefactor: Complex64::new(1.0, 0.0), duration: 0.0 }
    }

    /// Full 2x2 Heisenberg matrix `prefactor · su2`.
    pub fn matrix(&self) -> Su2 {
        self.su2 * self.prefactor
    }

    /// `later ∘ self`: apply `self` first, then `later`.
    pub fn then(&self, later: &ModeTransform) -> ModeTransform {
        ModeTransform {
            su2: later.su2 * self.su2,
            prefactor: later.prefactor * self.prefactor,
            duration: self.duration + later.duration,
        }
    }

    /// Image of the north pole: Bloch vector of the first column of `su2`.
    pub fn bloch_point(&self) -> [f64; 3] {
        let (u0, u1) = (self.su2[(0, 0)], self.su2[(1, 0)]);
        let cross = u0.conj() * u1;
        [2.0 * cross.re, 2.0 * cross.im, u0.norm_sqr() - u1.norm_sqr()]
    }

    pub fn det_error(&self) -> f64 {
        (self.su2.determinant() - Complex64::new(1.0, 0.0)).norm()
    }

    pub fn unitarity_error(&self) -> f64 {
        (self.su2.adjoint() * self.su2 - Su2::identity()).norm()
    }
}

fn pauli_dot(n: &[f64; 3]) -> Su2 {
    let i = Complex64::new(0.0, 1.0);
    Su2::new(
        Complex64::new(n[2], 0.0),
        Complex64::new(n[0], 0.0) - i * n[1],
        Complex64::new(n[0], 0.0) + i * n[1],
        Complex64::new(-n[2], 0.0),
    )
}

/// Rotation generated by a beamsplitter with the given `g`, `varphi`, `delta` for time `t`.
/// `chi_f`/`chi_e` in `params` are ignored.
pub fn mode_transform(params: &PumpParams, t: f64) -> Result<ModeTransform, BlochError> {
    raw_transform(params.g, params.varphi, params.delta, t)
}

fn raw_transform(g: f64, varphi: f64, delta: f64, t: f64) -> Result<ModeTransform, BlochError> {
    if t < 0.0 {
        return Err(BlochError::NegativeTime(t));
    }
    let prefactor = Complex64::from_polar(1.0, -delta * t / 2.0);
    let su2 = match precession_vector(g, varphi, delta) {
        Ok(pv) => {
            let half = pv.omega * t / 2.0;
            Su2::identity() * Complex64::new(half.cos(), 0.0) - pauli_dot(&pv.n) * Complex64::new(0.0, half.sin())
        }
        Err(_) => Su2::identity(),
    };
    Ok(ModeTransform { su2, prefactor, duration: t })
}

/// Mode transform for one ancilla branch of the dispersive beamsplitter.
pub fn branch_transform(params: &PumpParams, branch: Branch, t: f64) -> Result<ModeTransform, BlochError> {
    raw_transform(params.g, params.varphi, branch.effective_detuning(params.delta, params.chi_f), t)
}

/// `(|g⟩ transform, |f⟩ transform)` with Δ_eff = Δ′ ∓ χ/2.
pub fn conditional_transforms(params: &PumpParams, t: f64) -> Result<(ModeTransform, ModeTransform), BlochError> {
    Ok((branch_transform(params, Branch::G, t)?, branch_transform(params, Branch::F, t)?))
}

/// Phase picked up by each mode operator after one closed orbit, in `[0, 2π)`.
pub fn orbit_phase(delta_eff: f64, omega: f64) -> Result<f64, BlochError> {
    if omega <= 0.0 || !omega.is_finite() {
        return Err(BlochError::InvalidOmega(omega));
    }
    if delta_eff.abs() > omega * (1.0 + 1e-12) {
        return Err(BlochError::DetuningExceedsRate { delta: delta_eff, omega });
    }
    Ok((PI * (1.0 - delta_eff / omega)).rem_euclid(TAU))
}

/// Primitive operations with closed-form pump conditions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PumpTarget {
    CzzN1,
    CzzN2Fast,
    CzzN2Slow,
    Cswap,
    /// cSWAP with the |g⟩ trajectory completing `n` orbits.
    CswapAlt { n: u32 },
    /// 50:50 beamsplitter with the ancilla in |g⟩.
    Bs5050 { g: f64 },
    /// One half of the unconditional swap; duration is the time to reach the equator.
    Uswap { g: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PumpSolution {
    pub params: PumpParams,
    pub duration: f64,
}

/// Closed-form parameters for `target`. `chi` is the signed gf dispersive shift (rad/s);
/// `chi_e` is set to `chi / 2`.
pub fn solve_pump(target: PumpTarget, chi: f64) -> Result<PumpSolution, BlochError> {
    if chi == 0.0 || !chi.is_finite() {
        return Err(BlochError::ZeroChi);
    }
    let x = chi.abs();
    let params = |g: f64, delta: f64| PumpParams { g, varphi: 0.0, delta, chi_f: chi, chi_e: chi / 2.0 };
    let (p, duration) = match target {
        PumpTarget::CzzN1 => (params(3f64.sqrt() / 2.0 * x, 0.0), TAU / x),
        PumpTarget::CzzN2Fast => (params(15f64.sqrt() / 2.0 * x, 0.0), PI / x),
        PumpTarget::CzzN2Slow => (params(7f64.sqrt() / 6.0 * x, 0.0), 3.0 * PI / x),
        PumpTarget::Cswap => solve_pump(PumpTarget::CswapAlt { n: 1 }, chi).map(|s| (s.params, s.duration))?,
        PumpTarget::CswapAlt { n } => {
            if n == 0 {
                return Err(BlochError::NoSolution(n));
            }
            let g = x / ((4 * n * n - 1) as f64).sqrt();
            // f branch sits on the equator
            (params(g, -chi / 2.0), PI / g)
        }
        PumpTarget::Bs5050 { g } => {
            if g <= 0.0 {
                return Err(BlochError::InvalidCoupling(g));
            }
            // g branch sits on the equator
            (params(g, chi / 2.0), PI / (2.0 * g))
        }
        PumpTarget::Uswap { g } => (params(g, 0.0), equator_time(g, chi)?),
    };
    Ok(PumpSolution { params: p, duration })
}

/// Time for `a(t)` to reach the equator with Δ′ = 0, found by bisection on
/// `z(t) = cos²θ + sin²θ cos Ωt`.
pub fn equator_time(g: f64, chi: f64) -> Result<f64, BlochError> {
    let d = chi.abs() / 2.0;
    if g <= d {
        return Err(BlochError::UnreachableEquator { g, chi });
    }
    let omega = g.hypot(d);
    let (c2, s2) = ((d / omega).powi(2), (g / omega).powi(2));
    let z = |t: f64| c2 + s2 * (omega * t).cos();
    let (mut lo, mut hi) = (0.0, PI / omega);
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        if z(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub branch: Branch,
    pub xyz: [f64; 3],
}

/// Uniform samples of the Bloch point over `[0, duration]` for one branch.
pub fn sample_trajectory(
    params: &PumpParams,
    branch: Branch,
    duration: f64,
    nsteps: usize,
) -> Result<Vec<TrajectoryPoint>, BlochError> {
    if nsteps < 2 {
        return Err(BlochError::TooFewSteps(nsteps));
    }
    if duration < 0.0 {
        return Err(BlochError::NegativeTime(duration));
    }
    (0..nsteps)
        .map(|k| {
            let t = duration * k as f64 / (nsteps - 1) as f64;
            let m = branch_transform(params, branch, t)?;
            Ok(TrajectoryPoint { t, branch, xyz: m.bloch_point() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_hamiltonian, HilbertLayout, Level, ModePair};
    use crate::linalg::expm_hermitian;
    use crate::units::mhz;
    use approx::assert_abs_diff_eq;

    fn chi() -> f64 {
        mhz(-1.0)
    }

    fn close(a: &Su2, b: &Su2) -> f64 {
        (a - b).norm()
    }

    /// Oracle: the single-excitation block of the full-space propagator.
    fn full_space_block(p: &PumpParams, level: Level, t: f64, dim: usize) -> Su2 {
        let l = HilbertLayout::uniform(2, dim).unwrap();
        let h = build_hamiltonian(p, &l, ModePair(0, 1)).unwrap();
        let u = expm_hermitian(h.matrix(), t);
        let i10 = l.index(level, &[1, 0]).unwrap();
        let i01 = l.index(level, &[0, 1]).unwrap();
        let i00 = l.index(level, &[0, 0]).unwrap();
        let vac = u[(i00, i00)];
        Su2::new(u[(i10, i10)], u[(i10, i01)], u[(i01, i10)], u[(i01, i01)]) / vac
    }

    #[test]
    fn precession_examples() {
        let x = 2.0;
        let pv = precession_vector(3f64.sqrt() / 2.0 * x, 0.0, x / 2.0).unwrap();
        assert_abs_diff_eq!(pv.n[0], 3f64.sqrt() / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pv.n[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pv.n[2], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(pv.omega, x, epsilon = 1e-12);
        let pv = precession_vector(0.0, 0.3, 1.7).unwrap();
        assert_eq!(pv.n, [0.0, 0.0, 1.0]);
        assert_eq!(pv.omega, 1.7);
        let pv = precession_vector(1.2, 0.0, 1.2).unwrap();
        assert_abs_diff_eq!(pv.theta, PI / 4.0, epsilon = 1e-12);
        assert_eq!(precession_vector(0.0, 0.0, 0.0), Err(BlochError::DegenerateAxis));
        let pv = precession_vector(0.7, 1.1, -0.4).unwrap();
        assert_abs_diff_eq!(pv.as_vector().norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn transform_basics() {
        let p = PumpParams::beamsplitter(1.3, 0.4, 0.2).unwrap();
        let m = mode_transform(&p, 0.0).unwrap();
        assert_eq!(m.su2, Su2::identity());
        assert_eq!(m.prefactor, Complex64::new(1.0, 0.0));
        let g = 2.0;
        let p = PumpParams::beamsplitter(g, 0.0, 0.0).unwrap();
        let m = mode_transform(&p, PI / g).unwrap();
        let want = Su2::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, 0.0));
        assert!(close(&m.su2, &want) < 1e-12);
        assert!(mode_transform(&p, -1.0).is_err());
    }

    #[test]
    fn transform_matches_full_space_block() {
        let p = PumpParams::new(mhz(0.83), 0.61, mhz(0.27), chi(), chi() / 2.0).unwrap();
        let t = 0.41e-6;
        let (mg, mf) = conditional_transforms(&p, t).unwrap();
        assert!(close(&mg.matrix(), &full_space_block(&p, Level::G, t, 6)) < 1e-9);
        assert!(close(&mf.matrix(), &full_space_block(&p, Level::F, t, 6)) < 1e-9);
        assert!(mg.det_error() < 1e-10 && mg.unitarity_error() < 1e-10);
    }

    #[test]
    fn composition() {
        let p = PumpParams::beamsplitter(1.1, -0.3, 0.5).unwrap();
        let (t1, t2) = (0.7, 1.9);
        let a = mode_transform(&p, t1).unwrap();
        let b = mode_transform(&p, t2).unwrap();
        let ab = mode_transform(&p, t1 + t2).unwrap();
        let comp = a.then(&b);
        assert!(close(&comp.su2, &ab.su2) < 1e-10);
        assert!((comp.prefactor - ab.prefactor).norm() < 1e-10);
    }

    #[test]
    fn zero_chi_branches_coincide() {
        let p = PumpParams::new(0.9, 0.2, 0.1, 0.0, 0.0).unwrap();
        let (g, f) = conditional_transforms(&p, 3.0).unwrap();
        assert_eq!(g, f);
    }

    #[test]
    fn czz_branches_close_and_match_orbit_phase() {
        for chi in [chi(), -chi()] {
            let s = solve_pump(PumpTarget::CzzN1, chi).unwrap();
            let (mg, mf) = conditional_transforms(&s.params, s.duration).unwrap();
            assert!(close(&mg.su2, &(-Su2::identity())) < 1e-10);
            assert!(close(&mf.su2, &(-Su2::identity())) < 1e-10);
            for (branch, level, m) in [(Branch::G, Level::G, mg), (Branch::F, Level::F, mf)] {
                let de = branch.effective_detuning(0.0, chi);
                let phi = orbit_phase(de, s.params.g.hypot(de)).unwrap();
                let oracle = full_space_block(&s.params, level, s.duration, 6)[(0, 0)];
                assert!((oracle - Complex64::from_polar(1.0, phi)).norm() < 1e-9);
                assert!((m.matrix()[(0, 0)] - oracle).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn orbit_phase_examples() {
        assert_abs_diff_eq!(orbit_phase(2.0, 2.0).unwrap(), 0.0, epsilon = 1e-15);
        let x = mhz(1.0);
        assert_abs_diff_eq!(orbit_phase(x / 2.0, x).unwrap(), PI / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(orbit_phase(x / 2.0, 2.0 * x).unwrap(), 3.0 * PI / 4.0, epsilon = 1e-12);
        assert!(orbit_phase(1.0, 0.0).is_err());
        assert!(orbit_phase(3.0, 1.0).is_err());
    }

    #[test]
    fn orbit_phase_matches_fast_cjp4_oracle() {
        // positive chi so the f branch has delta_eff = chi/2
        let x = mhz(1.0);
        let s = solve_pump(PumpTarget::CzzN2Fast, x).unwrap();
        let oracle = full_space_block(&s.params, Level::F, s.duration, 6)[(0, 0)];
        let phi = orbit_phase(x / 2.0, 2.0 * x).unwrap();
        assert!((oracle - Complex64::from_polar(1.0, phi)).norm() < 1e-9);
    }

    #[test]
    fn table_values() {
        let x = chi().abs();
        let s = solve_pump(PumpTarget::CzzN1, chi()).unwrap();
        assert_abs_diff_eq!(s.params.g, 3f64.sqrt() / 2.0 * x, epsilon = 1e-6);
        assert_eq!(s.params.delta, 0.0);
        assert_abs_diff_eq!(s.duration, TAU / x, epsilon = 1e-18);
        let s = solve_pump(PumpTarget::Cswap, chi()).unwrap();
        assert_abs_diff_eq!(s.params.g, x / 3f64.sqrt(), epsilon = 1e-6);
        assert_abs_diff_eq!(s.params.delta.abs(), x / 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(s.duration, 3f64.sqrt() * PI / x, epsilon = 1e-18);
        let s = solve_pump(PumpTarget::CzzN2Fast, chi()).unwrap();
        assert_abs_diff_eq!(s.params.g, 15f64.sqrt() / 2.0 * x, epsilon = 1e-6);
        assert_abs_diff_eq!(s.duration, PI / x, epsilon = 1e-18);
        let s = solve_pump(PumpTarget::CzzN2Slow, chi()).unwrap();
        assert_abs_diff_eq!(s.params.g, 7f64.sqrt() / 6.0 * x, epsilon = 1e-6);
        assert_abs_diff_eq!(s.duration, 3.0 * PI / x, epsilon = 1e-18);
        assert_eq!(solve_pump(PumpTarget::CzzN1, 0.0), Err(BlochError::ZeroChi));
        assert_eq!(solve_pump(PumpTarget::CswapAlt { n: 0 }, chi()), Err(BlochError::NoSolution(0)));
    }

    #[test]
    fn precession_vectors_match_table() {
        let x = chi().abs();
        let cases: [(PumpTarget, [f64; 3], [f64; 3]); 4] = [
            (PumpTarget::Cswap, [0.5, 0.0, 3f64.sqrt() / 2.0], [1.0, 0.0, 0.0]),
            (PumpTarget::CzzN1, [3f64.sqrt() / 2.0, 0.0, 0.5], [3f64.sqrt() / 2.0, 0.0, -0.5]),
            (PumpTarget::CzzN2Slow, [7f64.sqrt() / 4.0, 0.0, 0.75], [7f64.sqrt() / 4.0, 0.0, -0.75]),
            (PumpTarget::CzzN2Fast, [15f64.sqrt() / 4.0, 0.0, 0.25], [15f64.sqrt() / 4.0, 0.0, -0.25]),
        ];
        for (target, ng, nf) in cases {
            // the tabulated axes correspond to the physical sign chi < 0
            let p = solve_pump(target, -x).unwrap().params;
            let vg = precession_vector(p.g, 0.0, Branch::G.effective_detuning(p.delta, p.chi_f)).unwrap();
            let vf = precession_vector(p.g, 0.0, Branch::F.effective_detuning(p.delta, p.chi_f)).unwrap();
            for k in 0..3 {
                assert_abs_diff_eq!(vg.n[k], ng[k], epsilon = 1e-12);
                assert_abs_diff_eq!(vf.n[k], nf[k], epsilon = 1e-12);
            }
        }
        let s = solve_pump(PumpTarget::Bs5050 { g: mhz(0.5) }, chi()).unwrap();
        let vg = precession_vector(s.params.g, 0.0, Branch::G.effective_detuning(s.params.delta, s.params.chi_f)).unwrap();
        assert_abs_diff_eq!(vg.n[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn cswap_branch_geometry() {
        for chi in [chi(), -chi()] {
            let s = solve_pump(PumpTarget::Cswap, chi).unwrap();
            let (mg, mf) = conditional_transforms(&s.params, s.duration).unwrap();
            assert_abs_diff_eq!(mf.su2[(0, 1)].norm(), 1.0, epsilon = 1e-10);
            assert!(close(&mg.su2, &(-Su2::identity())) < 1e-10);
        }
    }

    #[test]
    fn cswap_alternate_n2_oracle() {
        let s = solve_pump(PumpTarget::CswapAlt { n: 2 }, chi()).unwrap();
        assert_abs_diff_eq!(s.params.g, chi().abs() / 15f64.sqrt(), epsilon = 1e-6);
        let ug = full_space_block(&s.params, Level::G, s.duration, 6);
        let uf = full_space_block(&s.params, Level::F, s.duration, 6);
        assert_abs_diff_eq!(ug[(0, 1)].norm(), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(ug[(0, 0)].norm(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(uf[(0, 1)].norm(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn equator_time_matches_closed_form() {
        let chi = chi();
        for g in [0.6 * chi.abs(), chi.abs(), 3.0 * chi.abs()] {
            let t = equator_time(g, chi).unwrap();
            let d = chi.abs() / 2.0;
            let omega = g.hypot(d);
            let cot2 = (d / g).powi(2);
            let closed = (-cot2).acos() / omega;
            assert!((t - closed).abs() < 1e-12 * closed);
            let p = PumpParams::new(g, 0.0, 0.0, chi, chi / 2.0).unwrap();
            for b in [Branch::G, Branch::F] {
                assert_abs_diff_eq!(branch_transform(&p, b, t).unwrap().bloch_point()[2], 0.0, epsilon = 1e-9);
            }
        }
        let g = 1.7;
        assert_abs_diff_eq!(equator_time(g, 1e-300).unwrap(), PI / (2.0 * g), epsilon = 1e-12);
        assert!(matches!(equator_time(0.4, 1.0), Err(BlochError::UnreachableEquator { .. })));
    }

    #[test]
    fn trajectory_properties() {
        let s = solve_pump(PumpTarget::Cswap, chi()).unwrap();
        let pts = sample_trajectory(&s.params, Branch::F, s.duration, 101).unwrap();
        assert_eq!(pts[0].xyz, [0.0, 0.0, 1.0]);
        let end = pts.last().unwrap().xyz;
        assert_abs_diff_eq!(end[2], -1.0, epsilon = 1e-9);
        for p in &pts {
            let n = (p.xyz[0].powi(2) + p.xyz[1].powi(2) + p.xyz[2].powi(2)).sqrt();
            assert_abs_diff_eq!(n, 1.0, epsilon = 1e-12);
        }
        assert!(sample_trajectory(&s.params, Branch::F, 1.0, 1).is_err());
    }
}
