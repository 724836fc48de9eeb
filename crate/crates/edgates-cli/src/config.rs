//! Versioned TOML experiment configuration. Keys carry their unit as a suffix
//! (`_mhz`, `_khz`, `_hz`, `_us`, `_ns`); values are converted to rad/s and s on use.

use crate::CliError;
use clap::ValueEnum;
use edgates::bloch::{Branch, PumpTarget};
use edgates::circuits::{CzzVariant, GadgetOptions, GateOptions};
use edgates::closure::{ClosureOptions, DEFAULT_GUARD, DEFAULT_MAX_DEPTH, DEFAULT_MODE_DIM, SPAN_TOL};
use edgates::codes::{BosonicCode, CodeName, LogicalGate, DEFAULT_CAT_ALPHA};
use edgates::dynamics::{Channel, Integrator, NoiseModel, PropagationOptions, ReadoutModel, DEFAULT_ETA_GE, DEFAULT_ETA_GG};
use edgates::metrics::{NonlinearScaling, DEFAULT_RATIOS};
use edgates::units::{hz, khz, mhz, ns, us};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;
use std::path::Path;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    #[serde(default)]
    pub gate: GateConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub readout: ReadoutConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonlinear: Option<NonlinearConfig>,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub integrator: Integrator,
    #[serde(default)]
    pub closure: ClosureConfig,
    #[serde(default)]
    pub trajectory: TrajectoryConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            gate: GateConfig::default(),
            noise: NoiseConfig::default(),
            readout: ReadoutConfig::default(),
            nonlinear: None,
            sweep: SweepConfig::default(),
            integrator: Integrator::default(),
            closure: ClosureConfig::default(),
            trajectory: TrajectoryConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    Identity,
    Zz,
    Eswap,
    Cphase,
    Iswap,
    Fsim,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateConfig {
    pub kind: GateKind,
    /// Radians.
    pub theta: f64,
    /// Radians, fSim only.
    pub phi: f64,
    pub code: CodeName,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Fock truncation per mode; a code-dependent default when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode_dim: Option<usize>,
    /// Signed gf dispersive shift.
    pub chi_mhz: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub czz_variant: Option<CzzVariant>,
    pub rot_duration_ns: f64,
    pub over_rotation: f64,
}

impl Default for GateConfig {
    fn default() -> Self {
        Self {
            kind: GateKind::Zz,
            theta: FRAC_PI_2,
            phi: 0.0,
            code: CodeName::DualRail,
            alpha: None,
            mode_dim: None,
            chi_mhz: -1.0,
            czz_variant: None,
            rot_duration_ns: 50.0,
            over_rotation: 0.0,
        }
    }
}

/// Coherence times; an absent key switches the channel off.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ancilla_t1_us: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ancilla_tphi_us: Option<f64>,
    /// Applied to every mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cavity_t1_us: Option<f64>,
}

/// Assignment probabilities for reading `g`. With no key set the readout is perfect;
/// otherwise missing entries take the defaults (`eta_gf = eta_ge²`).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReadoutConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_gg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_ge: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_gf: Option<f64>,
}

/// Nonlinear corrections quoted at `anchor_chi_mhz`, scaled with `χ_f²` except `chi_ab`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NonlinearConfig {
    pub anchor_chi_mhz: f64,
    pub chi_f_prime_khz: f64,
    pub chi_e_prime_khz: f64,
    pub kerr_khz: f64,
    pub chi_ab_hz: f64,
}

impl Default for NonlinearConfig {
    fn default() -> Self {
        Self { anchor_chi_mhz: -1.0, chi_f_prime_khz: 2.0, chi_e_prime_khz: 1.125, kerr_khz: 2.0, chi_ab_hz: 100.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Coherence,
    Chi,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    /// Coherence axis: one single-channel sweep per entry.
    pub channels: Vec<Channel>,
    /// Coherence axis: `T_coh / τ_gate`.
    pub ratios: Vec<f64>,
    /// χ axis: signed gf dispersive shifts.
    pub chi_mhz: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            axis: SweepAxis::Coherence,
            channels: Channel::ALL.to_vec(),
            ratios: DEFAULT_RATIOS.to_vec(),
            chi_mhz: vec![-0.4, -1.0, -2.0, -4.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClosureConfig {
    pub mode_dim: usize,
    pub guard: usize,
    pub max_depth: usize,
    pub tol: f64,
}

impl Default for ClosureConfig {
    fn default() -> Self {
        Self { mode_dim: DEFAULT_MODE_DIM, guard: DEFAULT_GUARD, max_depth: DEFAULT_MAX_DEPTH, tol: SPAN_TOL }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum TargetName {
    CzzN1,
    CzzN2Fast,
    CzzN2Slow,
    Cswap,
    CswapAlt,
    Bs5050,
    Uswap,
}

impl TargetName {
    pub const ALL: [TargetName; 7] = [
        TargetName::CzzN1,
        TargetName::CzzN2Fast,
        TargetName::CzzN2Slow,
        TargetName::Cswap,
        TargetName::CswapAlt,
        TargetName::Bs5050,
        TargetName::Uswap,
    ];

    pub fn label(self) -> &'static str {
        match self {
            TargetName::CzzN1 => "czz_n1",
            TargetName::CzzN2Fast => "czz_n2_fast",
            TargetName::CzzN2Slow => "czz_n2_slow",
            TargetName::Cswap => "cswap",
            TargetName::CswapAlt => "cswap_alt",
            TargetName::Bs5050 => "bs5050",
            TargetName::Uswap => "uswap",
        }
    }

    /// `n` is the orbit count for `cswap_alt`; `g` (rad/s) the coupling for `bs5050` and `uswap`.
    pub fn to_target(self, n: u32, g: f64) -> PumpTarget {
        match self {
            TargetName::CzzN1 => PumpTarget::CzzN1,
            TargetName::CzzN2Fast => PumpTarget::CzzN2Fast,
            TargetName::CzzN2Slow => PumpTarget::CzzN2Slow,
            TargetName::Cswap => PumpTarget::Cswap,
            TargetName::CswapAlt => PumpTarget::CswapAlt { n },
            TargetName::Bs5050 => PumpTarget::Bs5050 { g },
            TargetName::Uswap => PumpTarget::Uswap { g },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrajectoryConfig {
    pub target: TargetName,
    pub branch: Branch,
    pub nsteps: usize,
    /// Orbit count for `cswap_alt`.
    pub n: u32,
    /// Coupling for `bs5050` and `uswap`.
    pub g_mhz: f64,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self { target: TargetName::Cswap, branch: Branch::G, nsteps: 101, n: 2, g_mhz: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Used when `--out-dir` is not given.
    pub dir: String,
    /// When false, summaries also record wall-clock time.
    pub deterministic: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: "out".into(), deterministic: true }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {x}")))
    }
}

fn probability(name: &str, x: Option<f64>) -> Result<(), CliError> {
    match x {
        Some(p) if !(0.0..=1.0).contains(&p) => Err(invalid(format!("{name} must lie in [0, 1], got {p}"))),
        _ => Ok(()),
    }
}

impl ExperimentConfig {
    /// Reads TOML, or the `config` field of a JSON summary written by a previous run.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        let cfg: Self = if path.extension().is_some_and(|e| e == "json") {
            let mut v: serde_json::Value = serde_json::from_str(&text).map_err(|e| invalid(e.to_string()))?;
            let inner = v.get_mut("config").map(serde_json::Value::take).unwrap_or(v);
            serde_json::from_value(inner).map_err(|e| invalid(e.to_string()))?
        } else {
            Self::from_toml(&text)?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| invalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.version != CONFIG_VERSION {
            return Err(invalid(format!("unsupported config version {} (expected {CONFIG_VERSION})", self.version)));
        }
        let g = &self.gate;
        for (name, x) in [("gate.theta", g.theta), ("gate.phi", g.phi), ("gate.over_rotation", g.over_rotation)] {
            if !x.is_finite() {
                return Err(invalid(format!("{name} must be finite")));
            }
        }
        if g.chi_mhz == 0.0 || !g.chi_mhz.is_finite() {
            return Err(invalid("gate.chi_mhz must be nonzero and finite"));
        }
        positive("gate.rot_duration_ns", g.rot_duration_ns)?;
        self.code()?;
        if let Some(d) = g.mode_dim {
            if d < 2 {
                return Err(invalid("gate.mode_dim must be at least 2"));
            }
        }
        let n = &self.noise;
        for (name, t) in [("noise.ancilla_t1_us", n.ancilla_t1_us), ("noise.ancilla_tphi_us", n.ancilla_tphi_us), ("noise.cavity_t1_us", n.cavity_t1_us)] {
            if let Some(t) = t {
                positive(name, t)?;
            }
        }
        let r = &self.readout;
        probability("readout.eta_gg", r.eta_gg)?;
        probability("readout.eta_ge", r.eta_ge)?;
        probability("readout.eta_gf", r.eta_gf)?;
        self.readout_model().validate().map_err(|e| invalid(e.to_string()))?;
        if let Some(nl) = &self.nonlinear {
            if nl.anchor_chi_mhz == 0.0 || !nl.anchor_chi_mhz.is_finite() {
                return Err(invalid("nonlinear.anchor_chi_mhz must be nonzero and finite"));
            }
            for (name, x) in [("chi_f_prime_khz", nl.chi_f_prime_khz), ("chi_e_prime_khz", nl.chi_e_prime_khz), ("kerr_khz", nl.kerr_khz), ("chi_ab_hz", nl.chi_ab_hz)] {
                if !x.is_finite() {
                    return Err(invalid(format!("nonlinear.{name} must be finite")));
                }
            }
        }
        let s = &self.sweep;
        match s.axis {
            SweepAxis::Coherence => {
                if s.channels.is_empty() || s.ratios.is_empty() {
                    return Err(invalid("coherence sweeps need at least one channel and one ratio"));
                }
                for &r in &s.ratios {
                    positive("sweep.ratios", r)?;
                }
            }
            SweepAxis::Chi => {
                if s.chi_mhz.is_empty() {
                    return Err(invalid("chi sweeps need sweep.chi_mhz"));
                }
                if s.chi_mhz.iter().any(|&x| x == 0.0 || !x.is_finite()) {
                    return Err(invalid("sweep.chi_mhz entries must be nonzero and finite"));
                }
            }
        }
        match self.integrator {
            Integrator::Chebyshev { tol } | Integrator::Taylor { tol } => positive("integrator.tol", tol)?,
            Integrator::DormandPrince { rtol, atol } => {
                positive("integrator.rtol", rtol)?;
                positive("integrator.atol", atol)?;
            }
            Integrator::FixedTaylor { steps, order } => {
                if steps == 0 || order == 0 {
                    return Err(invalid("integrator.steps and integrator.order must be positive"));
                }
            }
        }
        let c = &self.closure;
        if c.mode_dim < 2 || c.max_depth == 0 || c.guard + 1 > c.mode_dim {
            return Err(invalid("closure needs mode_dim >= 2, max_depth >= 1 and guard < mode_dim"));
        }
        positive("closure.tol", c.tol)?;
        let t = &self.trajectory;
        if t.nsteps < 2 {
            return Err(invalid("trajectory.nsteps must be at least 2"));
        }
        positive("trajectory.g_mhz", t.g_mhz)?;
        if t.n == 0 {
            return Err(invalid("trajectory.n must be at least 1"));
        }
        Ok(())
    }

    /// Replaces every tolerance with `tol`.
    pub fn override_tol(&mut self, tol: f64) -> Result<(), CliError> {
        positive("--tol", tol)?;
        self.integrator = match self.integrator {
            Integrator::Chebyshev { .. } => Integrator::Chebyshev { tol },
            Integrator::Taylor { .. } => Integrator::Taylor { tol },
            Integrator::DormandPrince { atol, .. } => Integrator::DormandPrince { rtol: tol, atol },
            fixed @ Integrator::FixedTaylor { .. } => fixed,
        };
        self.closure.tol = tol;
        Ok(())
    }

    pub fn code(&self) -> Result<BosonicCode, CliError> {
        let alpha = match self.gate.code {
            CodeName::FourCat => Some(self.gate.alpha.unwrap_or(DEFAULT_CAT_ALPHA)),
            _ => self.gate.alpha,
        };
        BosonicCode::new(self.gate.code, alpha).map_err(|e| invalid(e.to_string()))
    }

    pub fn mode_dim(&self) -> usize {
        self.gate.mode_dim.unwrap_or(match self.gate.code {
            CodeName::Fock01 => 2,
            CodeName::DualRail => 3,
            CodeName::Binomial => 10,
            CodeName::FourCat => 14,
        })
    }

    pub fn chi(&self) -> f64 {
        mhz(self.gate.chi_mhz)
    }

    pub fn logical_gate(&self) -> LogicalGate {
        let (theta, phi) = (self.gate.theta, self.gate.phi);
        match self.gate.kind {
            GateKind::Identity => LogicalGate::Identity,
            GateKind::Zz => LogicalGate::Zz { theta },
            GateKind::Eswap => LogicalGate::Eswap { theta },
            GateKind::Cphase => LogicalGate::Cphase { theta },
            GateKind::Iswap => LogicalGate::Iswap { theta },
            GateKind::Fsim => LogicalGate::Fsim { theta, phi },
        }
    }

    pub fn gate_options(&self) -> GateOptions {
        GateOptions {
            gadget: GadgetOptions { rot_duration: ns(self.gate.rot_duration_ns), over_rotation: self.gate.over_rotation },
            czz_variant: self.gate.czz_variant,
        }
    }

    pub fn noise_model(&self, n_modes: usize) -> NoiseModel {
        let rate = |t: Option<f64>| t.map_or(0.0, |t| 1.0 / us(t));
        NoiseModel {
            gamma1_t: rate(self.noise.ancilla_t1_us),
            gammaphi_t: rate(self.noise.ancilla_tphi_us),
            gamma1_cav: vec![rate(self.noise.cavity_t1_us); n_modes],
        }
    }

    pub fn readout_model(&self) -> ReadoutModel {
        let r = &self.readout;
        if r.eta_gg.is_none() && r.eta_ge.is_none() && r.eta_gf.is_none() {
            return ReadoutModel::perfect();
        }
        let ge = r.eta_ge.unwrap_or(DEFAULT_ETA_GE);
        ReadoutModel::from_g_row(r.eta_gg.unwrap_or(DEFAULT_ETA_GG), ge, r.eta_gf.unwrap_or(ge * ge))
    }

    pub fn nonlinear_scaling(&self) -> Option<NonlinearScaling> {
        self.nonlinear.as_ref().map(|nl| NonlinearScaling {
            anchor_chi_f: mhz(nl.anchor_chi_mhz),
            chi_f_prime: khz(nl.chi_f_prime_khz),
            chi_e_prime: khz(nl.chi_e_prime_khz),
            kerr: khz(nl.kerr_khz),
            chi_ab: hz(nl.chi_ab_hz),
        })
    }

    pub fn propagation(&self) -> PropagationOptions {
        PropagationOptions { integrator: self.integrator, ..PropagationOptions::default() }
    }

    pub fn closure_options(&self) -> ClosureOptions {
        let c = &self.closure;
        ClosureOptions { mode_dim: c.mode_dim, guard: c.guard, max_depth: c.max_depth, tol: c.tol }
    }
}
