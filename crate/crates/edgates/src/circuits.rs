// SPDX-License-Identifier: Apache-2.0
//! Piecewise-constant control schedules for ancilla-controlled unitaries and gadgets.

use crate::bloch::{self, orbit_phase, Branch, BlochError, ModeTransform, PumpTarget, TrajectoryPoint};
use crate::codes::{BosonicCode, LogicalGate};
use crate::fock::{FockError, HilbertLayout, ModePair, Operator, PumpParams, Slot};
use crate::linalg::{CMatrix, CVector};
use crate::units::{mhz, ns, to_mhz, to_ns};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use thiserror::Error;

/// Default ancilla rotation length.
pub const DEFAULT_ROT_DURATION: f64 = 50e-9;

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("segment duration must be positive and finite, got {0}")]
    InvalidDuration(f64),
    #[error("schedules act on different mode pairs: {0:?} vs {1:?}")]
    PairMismatch(ModePair, ModePair),
    #[error("cZZ order must be 1 or 2, got {0}")]
    UnsupportedOrder(u32),
    #[error("ancilla rotation by {0} rad mixes the g and f branches; no single trajectory exists")]
    BranchMixing(f64),
    #[error("{gate} is not built natively for the {code} code")]
    UnsupportedGate { gate: String, code: &'static str },
    #[error("malformed timeline: {0}")]
    Timeline(#[from] serde_json::Error),
    #[error(transparent)]
    Bloch(#[from] BlochError),
    #[error(transparent)]
    Fock(#[from] FockError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SegmentKind {
    Beamsplitter(PumpParams),
    /// Constant drive `drive · σ_axis^{gf}`; rotates by `angle = 2 · drive · duration`.
    AncillaRotation { axis: Axis, angle: f64, drive: f64 },
    /// Free dispersive evolution with the beamsplitter off.
    Delay { chi_f: f64, chi_e: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub duration: f64,
}

fn check_duration(t: f64) -> Result<(), CircuitError> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(CircuitError::InvalidDuration(t))
    }
}

impl Segment {
    pub fn beamsplitter(params: PumpParams, duration: f64) -> Result<Self, CircuitError> {
        check_duration(duration)?;
        Ok(Self { kind: SegmentKind::Beamsplitter(params), duration })
    }

    pub fn rotation(axis: Axis, angle: f64, duration: f64) -> Result<Self, CircuitError> {
        check_duration(duration)?;
        Ok(Self {
            kind: SegmentKind::AncillaRotation { axis, angle, drive: angle / (2.0 * duration) },
            duration,
        })
    }

    pub fn delay(chi_f: f64, chi_e: f64, duration: f64) -> Result<Self, CircuitError> {
        check_duration(duration)?;
        Ok(Self { kind: SegmentKind::Delay { chi_f, chi_e }, duration })
    }

    /// Beamsplitter-equivalent parameters of a delay: in the idle frame referenced to |g⟩
    /// mode `a` picks up `e^{-iχ_f t}` with the ancilla in |f⟩ and nothing in |g⟩.
    pub fn delay_params(chi_f: f64, chi_e: f64) -> PumpParams {
        PumpParams { g: 0.0, varphi: 0.0, delta: chi_f / 2.0, chi_f, chi_e }
    }

    /// Pump parameters for beamsplitter and delay segments.
    pub fn pump_params(&self) -> Option<PumpParams> {
        match self.kind {
            SegmentKind::Beamsplitter(p) => Some(p),
            SegmentKind::Delay { chi_f, chi_e } => Some(Self::delay_params(chi_f, chi_e)),
            SegmentKind::AncillaRotation { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub segments: Vec<Segment>,
    /// φ of the deterministic rotation `e^{iφ(n_a + n_b)}` left on the pair, removed in software.
    pub frame_phase: f64,
    pub pair: ModePair,
}

impl Default for Schedule {
    fn default() -> Self {
        Self { segments: Vec::new(), frame_phase: 0.0, pair: ModePair::default() }
    }
}

impl Schedule {
    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// `e^{iφ(n_a + n_b)} ⊗ 1_anc` for the tracked frame.
    pub fn frame_operator(&self, layout: &HilbertLayout) -> Result<Operator, CircuitError> {
        Ok(frame_rotation(self.frame_phase, layout, self.pair)?)
    }

    pub fn to_timeline_json(&self) -> String {
        let tl = Timeline::from(self);
        serde_json::to_string_pretty(&tl).expect("timeline is plain data")
    }

    pub fn from_timeline_json(s: &str) -> Result<Self, CircuitError> {
        let tl: Timeline = serde_json::from_str(s)?;
        tl.into_schedule()
    }
}

/// `e^{iφ(n_a + n_b)}` on the given pair, identity on the ancilla and other modes.
pub fn frame_rotation(phi: f64, layout: &HilbertLayout, pair: ModePair) -> Result<Operator, FockError> {
    layout.check_pair(pair)?;
    let phase_diag = |d: usize| {
        CMatrix::from_diagonal(&CVector::from_iterator(d, (0..d).map(|k| Complex64::from_polar(1.0, phi * k as f64))))
    };
    let ra = crate::fock::embed(&phase_diag(layout.mode_dims()[pair.0]), Slot::Mode(pair.0), layout)?;
    let rb = crate::fock::embed(&phase_diag(layout.mode_dims()[pair.1]), Slot::Mode(pair.1), layout)?;
    ra.compose(&rb)
}

/// Concatenate schedules in time order. Frames add.
pub fn concat(schedules: &[Schedule]) -> Result<Schedule, CircuitError> {
    let mut out = match schedules.first() {
        Some(s) => Schedule { segments: Vec::new(), frame_phase: 0.0, pair: s.pair },
        None => return Ok(Schedule::default()),
    };
    for s in schedules {
        if s.pair != out.pair {
            return Err(CircuitError::PairMismatch(out.pair, s.pair));
        }
        out.segments.extend_from_slice(&s.segments);
        out.frame_phase = (out.frame_phase + s.frame_phase).rem_euclid(TAU);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CzzVariant {
    Fast,
    Slow,
}

/// Phase left on each mode by the closed |g⟩ trajectory of a pulse of length `t`.
fn g_branch_orbit_phase(p: &PumpParams, t: f64) -> Result<f64, BlochError> {
    let de = Branch::G.effective_detuning(p.delta, p.chi_f);
    let omega = p.g.hypot(de);
    let orbits = (omega * t / TAU).round();
    Ok((orbits * orbit_phase(de, omega)?).rem_euclid(TAU))
}

/// Single-pulse controlled joint parity. `n = 1` targets `e^{iπ(n_a+n_b)}`,
/// `n = 2` targets `e^{iπ/2 (n_a+n_b)}` (fast or slow orbit).
pub fn schedule_czz(n: u32, chi: f64, variant: CzzVariant) -> Result<Schedule, CircuitError> {
    let target = match (n, variant) {
        (1, _) => PumpTarget::CzzN1,
        (2, CzzVariant::Fast) => PumpTarget::CzzN2Fast,
        (2, CzzVariant::Slow) => PumpTarget::CzzN2Slow,
        _ => return Err(CircuitError::UnsupportedOrder(n)),
    };
    let sol = bloch::solve_pump(target, chi)?;
    Ok(Schedule {
        segments: vec![Segment::beamsplitter(sol.params, sol.duration)?],
        frame_phase: g_branch_orbit_phase(&sol.params, sol.duration)?,
        pair: ModePair::default(),
    })
}

/// Phase-nulling delay placed before and after the cSWAP pulse.
pub fn cswap_delay(chi: f64) -> Result<f64, CircuitError> {
    cswap_alt_delay(1, chi)
}

/// Delay for the cSWAP variant whose |g⟩ trajectory completes `n` orbits.
pub fn cswap_alt_delay(n: u32, chi: f64) -> Result<f64, CircuitError> {
    let sol = bloch::solve_pump(PumpTarget::CswapAlt { n }, chi)?;
    let alpha_g = g_branch_orbit_phase(&sol.params, sol.duration)?;
    let period = TAU / chi.abs();
    let t = (-(alpha_g + FRAC_PI_2) / chi).rem_euclid(period);
    Ok(if t == 0.0 { period } else { t })
}

/// Delay + cSWAP pulse + delay, leaving `1 ⊗ |g⟩⟨g| + SWAP ⊗ |f⟩⟨f|` up to the tracked frame.
pub fn schedule_cswap(chi: f64) -> Result<Schedule, CircuitError> {
    schedule_cswap_alt(1, chi)
}

/// [`schedule_cswap`] with `n` orbits on the |g⟩ branch (weaker coupling, longer pulse).
pub fn schedule_cswap_alt(n: u32, chi: f64) -> Result<Schedule, CircuitError> {
    let sol = bloch::solve_pump(PumpTarget::CswapAlt { n }, chi)?;
    let td = cswap_alt_delay(n, chi)?;
    let delay = Segment::delay(sol.params.chi_f, sol.params.chi_e, td)?;
    Ok(Schedule {
        segments: vec![delay, Segment::beamsplitter(sol.params, sol.duration)?, delay],
        frame_phase: g_branch_orbit_phase(&sol.params, sol.duration)?,
        pair: ModePair::default(),
    })
}

/// Unconditional swap: equator half-pulse, ancilla π-pulse, equator half-pulse.
/// Initial |g⟩ ends in |f⟩ and vice versa.
pub fn schedule_uswap(g: f64, chi: f64, rot_duration: f64) -> Result<Schedule, CircuitError> {
    let sol = bloch::solve_pump(PumpTarget::Uswap { g }, chi)?;
    let bs = Segment::beamsplitter(sol.params, sol.duration)?;
    Ok(Schedule {
        segments: vec![bs, Segment::rotation(Axis::X, PI, rot_duration)?, bs],
        frame_phase: 0.0,
        pair: ModePair::default(),
    })
}

/// Options for the exponentiation gadget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GadgetOptions {
    pub rot_duration: f64,
    /// Extra angle added to the opening Y rotation.
    pub over_rotation: f64,
}

impl Default for GadgetOptions {
    fn default() -> Self {
        Self { rot_duration: DEFAULT_ROT_DURATION, over_rotation: 0.0 }
    }
}

/// `Y(π/2) · inner · X(θ) · inner · Y(−π/2)`, giving `P(θ) ⊗ |g⟩⟨g| + P(−θ) ⊗ |f⟩⟨f|`
/// with `P(θ) = exp(−iθ/2 · P)` and `P` the operator controlled by `inner`.
pub fn schedule_exponentiation(inner: &Schedule, theta: f64, opts: GadgetOptions) -> Result<Schedule, CircuitError> {
    let t = opts.rot_duration;
    let mut segments = vec![Segment::rotation(Axis::Y, FRAC_PI_2 + opts.over_rotation, t)?];
    segments.extend_from_slice(&inner.segments);
    segments.push(Segment::rotation(Axis::X, theta, t)?);
    segments.extend_from_slice(&inner.segments);
    segments.push(Segment::rotation(Axis::Y, -FRAC_PI_2, t)?);
    Ok(Schedule { segments, frame_phase: (2.0 * inner.frame_phase).rem_euclid(TAU), pair: inner.pair })
}

/// `Y(π/2) · inner · Y(−π/2)`: maps `P = ±1` eigenstates to ancilla |g⟩ / |f⟩.
pub fn schedule_qnd_measurement(inner: &Schedule, rot_duration: f64) -> Result<Schedule, CircuitError> {
    let mut segments = vec![Segment::rotation(Axis::Y, FRAC_PI_2, rot_duration)?];
    segments.extend_from_slice(&inner.segments);
    segments.push(Segment::rotation(Axis::Y, -FRAC_PI_2, rot_duration)?);
    Ok(Schedule { segments, frame_phase: inner.frame_phase, pair: inner.pair })
}

/// Gadget settings shared by native gate schedules.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GateOptions {
    pub gadget: GadgetOptions,
    /// Orbit used by the n = 2 controlled parity.
    pub czz_variant: Option<CzzVariant>,
}

/// Native schedule for a logical gate: `ZZ(θ)` from the controlled joint parity of the
/// code, `eSWAP(θ)` from cSWAP on single-mode codes, identity as an empty schedule.
pub fn gate_schedule(code: BosonicCode, gate: LogicalGate, chi: f64, opts: GateOptions) -> Result<Schedule, CircuitError> {
    match gate {
        LogicalGate::Identity => Ok(Schedule::default()),
        LogicalGate::Zz { theta } => {
            let inner = schedule_czz(code.rotation_order(), chi, opts.czz_variant.unwrap_or(CzzVariant::Fast))?;
            schedule_exponentiation(&inner, theta, opts.gadget)
        }
        LogicalGate::Eswap { theta } if code.modes_per_qubit() == 1 => {
            schedule_exponentiation(&schedule_cswap(chi)?, theta, opts.gadget)
        }
        other => Err(CircuitError::UnsupportedGate { gate: format!("{other:?}"), code: code.label() }),
    }
}

/// Bloch-sphere trajectory of mode `a` through a schedule, starting in `branch`.
/// π rotations swap the branch; other rotation angles are rejected.
pub fn schedule_trajectory(
    schedule: &Schedule,
    branch: Branch,
    samples_per_segment: usize,
) -> Result<Vec<TrajectoryPoint>, CircuitError> {
    if samples_per_segment < 2 {
        return Err(BlochError::TooFewSteps(samples_per_segment).into());
    }
    let mut branch = branch;
    let mut acc = ModeTransform::identity();
    let mut t0 = 0.0;
    let mut out = vec![TrajectoryPoint { t: 0.0, branch, xyz: acc.bloch_point() }];
    for seg in &schedule.segments {
        match seg.pump_params() {
            Some(p) => {
                for k in 1..samples_per_segment {
                    let dt = seg.duration * k as f64 / (samples_per_segment - 1) as f64;
                    let m = acc.then(&bloch::branch_transform(&p, branch, dt)?);
                    out.push(TrajectoryPoint { t: t0 + dt, branch, xyz: m.bloch_point() });
                }
                acc = acc.then(&bloch::branch_transform(&p, branch, seg.duration)?);
            }
            None => {
                let SegmentKind::AncillaRotation { angle, .. } = seg.kind else { unreachable!() };
                let turns = angle / PI;
                if (turns - turns.round()).abs() > 1e-9 {
                    return Err(CircuitError::BranchMixing(angle));
                }
                if (turns.round() as i64).rem_euclid(2) == 1 {
                    branch = branch.flipped();
                }
                out.push(TrajectoryPoint { t: t0 + seg.duration, branch, xyz: acc.bloch_point() });
            }
        }
        t0 += seg.duration;
    }
    Ok(out)
}

// JSON timeline: rates as cyclic MHz (rate / 2π), durations in ns.

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum TimelineKind {
    Beamsplitter { g_mhz: f64, varphi: f64, delta_mhz: f64, chi_f_mhz: f64, chi_e_mhz: f64 },
    AncillaRotation { axis: Axis, angle: f64 },
    Delay { chi_f_mhz: f64, chi_e_mhz: f64 },
}

#[derive(Serialize, Deserialize)]
struct TimelineSegment {
    #[serde(flatten)]
    kind: TimelineKind,
    duration_ns: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Timeline {
    frame_phase: f64,
    pair: ModePair,
    total_ns: f64,
    segments: Vec<TimelineSegment>,
}

impl From<&Schedule> for Timeline {
    fn from(s: &Schedule) -> Self {
        let segments = s
            .segments
            .iter()
            .map(|seg| TimelineSegment {
                kind: match seg.kind {
                    SegmentKind::Beamsplitter(p) => TimelineKind::Beamsplitter {
                        g_mhz: to_mhz(p.g),
                        varphi: p.varphi,
                        delta_mhz: to_mhz(p.delta),
                        chi_f_mhz: to_mhz(p.chi_f),
                        chi_e_mhz: to_mhz(p.chi_e),
                    },
                    SegmentKind::AncillaRotation { axis, angle, .. } => TimelineKind::AncillaRotation { axis, angle },
                    SegmentKind::Delay { chi_f, chi_e } => {
                        TimelineKind::Delay { chi_f_mhz: to_mhz(chi_f), chi_e_mhz: to_mhz(chi_e) }
                    }
                },
                duration_ns: to_ns(seg.duration),
            })
            .collect();
        Timeline { frame_phase: s.frame_phase, pair: s.pair, total_ns: to_ns(s.duration()), segments }
    }
}

impl Timeline {
    fn into_schedule(self) -> Result<Schedule, CircuitError> {
        let segments = self
            .segments
            .into_iter()
            .map(|ts| {
                let t = ns(ts.duration_ns);
                match ts.kind {
                    TimelineKind::Beamsplitter { g_mhz, varphi, delta_mhz, chi_f_mhz, chi_e_mhz } => {
                        let p = PumpParams::new(mhz(g_mhz), varphi, mhz(delta_mhz), mhz(chi_f_mhz), mhz(chi_e_mhz))?;
                        Segment::beamsplitter(p, t)
                    }
                    TimelineKind::AncillaRotation { axis, angle } => Segment::rotation(axis, angle, t),
                    TimelineKind::Delay { chi_f_mhz, chi_e_mhz } => Segment::delay(mhz(chi_f_mhz), mhz(chi_e_mhz), t),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Schedule { segments, frame_phase: self.frame_phase, pair: self.pair })
    }
}
