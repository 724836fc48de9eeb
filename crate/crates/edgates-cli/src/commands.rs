//! Subcommand implementations. Each writes its files into `out_dir` and returns the
//! data it wrote.

use crate::config::{ExperimentConfig, SweepAxis, TargetName};
use crate::CliError;
use edgates::bloch::{sample_trajectory, solve_pump};
use edgates::circuits::{gate_schedule, Schedule};
use edgates::closure::{table_iv_report_with, ClosureReport};
use edgates::codes::{BosonicCode, Codespace};
use edgates::dynamics::Channel;
use edgates::metrics::{
    chi_sweep, coherence_sweep, error_detected_infidelity, fit_power_law, fit_prefactor, fit_scaling, EvalOptions,
    Quantity, ScalingFit, SweepPoint,
};
use edgates::units::{mhz, to_mhz, to_ns, to_us};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::time::Instant;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(path.display().to_string(), e)
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(io_err(&path))
}

fn write_csv<T: Serialize>(dir: &Path, name: &str, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(name.into(), e.into_error()))?;
    write_text(dir, name, &String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_text(dir, name, &s)
}

fn elapsed(cfg: &ExperimentConfig, t0: Instant) -> Option<f64> {
    (!cfg.output.deterministic).then(|| t0.elapsed().as_secs_f64())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PumpRow {
    pub target: String,
    pub g_mhz: f64,
    pub varphi: f64,
    pub delta_mhz: f64,
    pub chi_f_mhz: f64,
    pub chi_e_mhz: f64,
    pub duration_ns: f64,
}

/// Closed-form pump conditions; `n` and `g_mhz` parameterize `cswap_alt` and the
/// coupling-limited targets.
pub fn cmd_pump_solve(targets: &[TargetName], chi: f64, n: u32, g_mhz: f64) -> Result<Vec<PumpRow>, CliError> {
    targets
        .iter()
        .map(|&t| {
            let s = solve_pump(t.to_target(n, mhz(g_mhz)), chi)?;
            let p = s.params;
            Ok(PumpRow {
                target: t.label().to_string(),
                g_mhz: to_mhz(p.g),
                varphi: p.varphi,
                delta_mhz: to_mhz(p.delta),
                chi_f_mhz: to_mhz(p.chi_f),
                chi_e_mhz: to_mhz(p.chi_e),
                duration_ns: to_ns(s.duration),
            })
        })
        .collect()
}

pub fn format_pump_table(rows: &[PumpRow]) -> String {
    let mut s = format!(
        "{:<12} {:>12} {:>8} {:>12} {:>10} {:>10} {:>12}\n",
        "target", "g/2pi MHz", "phase", "delta MHz", "chi_f MHz", "chi_e MHz", "duration ns"
    );
    for r in rows {
        s.push_str(&format!(
            "{:<12} {:>12.6} {:>8.4} {:>12.6} {:>10.4} {:>10.4} {:>12.3}\n",
            r.target, r.g_mhz, r.varphi, r.delta_mhz, r.chi_f_mhz, r.chi_e_mhz, r.duration_ns
        ));
    }
    s
}

struct Setup {
    code: BosonicCode,
    codespace: Codespace,
    schedule: Schedule,
}

fn setup(cfg: &ExperimentConfig) -> Result<Setup, CliError> {
    let code = cfg.code()?;
    let layout = code.layout(cfg.mode_dim())?;
    let codespace = Codespace::new(code, &layout)?;
    let schedule = gate_schedule(code, cfg.logical_gate(), cfg.chi(), cfg.gate_options())?;
    Ok(Setup { code, codespace, schedule })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateRow {
    pub label: String,
    pub fidelity: f64,
    pub success_prob: f64,
    pub ancilla_failure: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateSimSummary {
    pub config: ExperimentConfig,
    pub tau_gate_ns: f64,
    pub failure_prob: f64,
    pub ancilla_failure_prob: f64,
    pub ed_infidelity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_s: Option<f64>,
}

/// One gate under the configured noise and readout: per-state CSV, JSON summary and
/// the schedule timeline.
pub fn cmd_gate_sim(cfg: &ExperimentConfig, out_dir: &Path) -> Result<GateSimSummary, CliError> {
    let t0 = Instant::now();
    let s = setup(cfg)?;
    let noise = cfg.noise_model(s.codespace.layout().n_modes());
    let opts = EvalOptions { propagation: cfg.propagation(), nonlinear: cfg.nonlinear_scaling().map(|n| n.at(cfg.chi())) };
    let ev = error_detected_infidelity(&s.schedule, cfg.logical_gate(), &s.codespace, &noise, &cfg.readout_model(), &opts)?;
    let rows: Vec<StateRow> = ev
        .states
        .iter()
        .map(|st| StateRow {
            label: st.label.clone(),
            fidelity: st.fidelity,
            success_prob: st.success_prob,
            ancilla_failure: st.ancilla_failure,
        })
        .collect();
    write_csv(out_dir, "gate_sim.csv", &rows)?;
    write_text(out_dir, "schedule.json", &s.schedule.to_timeline_json())?;
    let summary = GateSimSummary {
        config: cfg.clone(),
        tau_gate_ns: to_ns(ev.tau_gate),
        failure_prob: ev.failure_prob,
        ancilla_failure_prob: ev.ancilla_failure_prob,
        ed_infidelity: ev.ed_infidelity,
        elapsed_s: elapsed(cfg, t0),
    };
    write_json(out_dir, "gate_sim.json", &summary)?;
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub channel: String,
    pub t_coh_us: f64,
    pub tau_gate_us: f64,
    pub failure: f64,
    pub infidelity: f64,
}

/// A fit, or why it could not be made (e.g. an identically zero infidelity).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FitOutcome {
    Fit(ScalingFit),
    Unavailable { reason: String },
}

impl FitOutcome {
    fn from(r: Result<ScalingFit, edgates::metrics::MetricsError>) -> Self {
        match r {
            Ok(f) => FitOutcome::Fit(f),
            Err(e) => FitOutcome::Unavailable { reason: e.to_string() },
        }
    }

    pub fn fit(&self) -> Option<&ScalingFit> {
        match self {
            FitOutcome::Fit(f) => Some(f),
            FitOutcome::Unavailable { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelFit {
    pub channel: String,
    pub failure: FitOutcome,
    pub infidelity: FitOutcome,
    /// Failure prefactor with the exponent held at 1.
    pub a1: Option<f64>,
    /// Infidelity prefactor with the exponent held at 2.
    pub a2: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiRow {
    pub chi_mhz: f64,
    pub tau_gate_us: f64,
    pub failure: f64,
    pub infidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiFit {
    /// Power law in |χ_f| (MHz).
    pub failure: FitOutcome,
    pub infidelity: FitOutcome,
    /// χ_f with the smallest error-detected infidelity.
    pub best_chi_mhz: f64,
    pub best_is_interior: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub config: ExperimentConfig,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub channel_fits: Vec<ChannelFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi_fit: Option<ChiFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_s: Option<f64>,
}

/// Single-channel coherence sweeps (`sweep.csv`) or a χ_f sweep (`chi_sweep.csv`), plus
/// fits in `sweep.json`.
pub fn cmd_sweep(cfg: &ExperimentConfig, out_dir: &Path) -> Result<SweepSummary, CliError> {
    let t0 = Instant::now();
    let s = setup(cfg)?;
    let gate = cfg.logical_gate();
    let readout = cfg.readout_model();
    let mut summary = SweepSummary { config: cfg.clone(), channel_fits: Vec::new(), chi_fit: None, elapsed_s: None };
    match cfg.sweep.axis {
        SweepAxis::Coherence => {
            let opts = EvalOptions { propagation: cfg.propagation(), nonlinear: cfg.nonlinear_scaling().map(|n| n.at(cfg.chi())) };
            let mut rows = Vec::new();
            for &channel in &cfg.sweep.channels {
                let pts = coherence_sweep(&s.schedule, gate, &s.codespace, channel, &cfg.sweep.ratios, &readout, &opts)?;
                rows.extend(pts.iter().map(|p| sweep_row(channel, p)));
                summary.channel_fits.push(channel_fit(channel, &pts));
            }
            write_csv(out_dir, "sweep.csv", &rows)?;
        }
        SweepAxis::Chi => {
            let chis: Vec<f64> = cfg.sweep.chi_mhz.iter().map(|&x| mhz(x)).collect();
            let noise = cfg.noise_model(s.codespace.layout().n_modes());
            let (code, gopts) = (s.code, cfg.gate_options());
            let pts = chi_sweep(
                |chi| gate_schedule(code, gate, chi, gopts),
                gate,
                &s.codespace,
                &noise,
                &chis,
                cfg.nonlinear_scaling(),
                &readout,
                cfg.propagation(),
            )?;
            let rows: Vec<ChiRow> = pts
                .iter()
                .zip(&cfg.sweep.chi_mhz)
                .map(|(p, &chi_mhz)| ChiRow {
                    chi_mhz,
                    tau_gate_us: to_us(p.tau_gate),
                    failure: p.failure_prob,
                    infidelity: p.ed_infidelity,
                })
                .collect();
            write_csv(out_dir, "chi_sweep.csv", &rows)?;
            let xy = |f: fn(&ChiRow) -> f64| rows.iter().map(|r| (r.chi_mhz.abs(), f(r))).collect::<Vec<_>>();
            let mut order: Vec<&ChiRow> = rows.iter().collect();
            order.sort_by(|a, b| a.chi_mhz.abs().total_cmp(&b.chi_mhz.abs()));
            let best = order
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.infidelity.total_cmp(&b.1.infidelity))
                .expect("validated non-empty");
            summary.chi_fit = Some(ChiFit {
                failure: FitOutcome::from(fit_power_law(&xy(|r| r.failure))),
                infidelity: FitOutcome::from(fit_power_law(&xy(|r| r.infidelity))),
                best_chi_mhz: best.1.chi_mhz,
                best_is_interior: best.0 > 0 && best.0 + 1 < order.len(),
            });
        }
    }
    summary.elapsed_s = elapsed(cfg, t0);
    write_json(out_dir, "sweep.json", &summary)?;
    Ok(summary)
}

fn sweep_row(channel: Channel, p: &SweepPoint) -> SweepRow {
    SweepRow {
        channel: channel.label().to_string(),
        t_coh_us: to_us(p.t_coh),
        tau_gate_us: to_us(p.tau_gate),
        failure: p.failure_prob,
        infidelity: p.ed_infidelity,
    }
}

fn channel_fit(channel: Channel, pts: &[SweepPoint]) -> ChannelFit {
    ChannelFit {
        channel: channel.label().to_string(),
        failure: FitOutcome::from(fit_scaling(pts, Quantity::Failure)),
        infidelity: FitOutcome::from(fit_scaling(pts, Quantity::Infidelity)),
        a1: fit_prefactor(pts, Quantity::Failure, 1).ok(),
        a2: fit_prefactor(pts, Quantity::Infidelity, 2).ok(),
    }
}

/// The candidate-Hamiltonian table as markdown, CSV and JSON.
pub fn cmd_closure(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ClosureReport, CliError> {
    let report = table_iv_report_with(&cfg.closure_options())?;
    write_text(out_dir, "closure.md", &report.to_markdown())?;
    write_csv(out_dir, "closure.csv", &report.rows)?;
    write_json(out_dir, "closure.json", &report)?;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t_ns: f64,
    pub branch: String,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Operator-Bloch-sphere samples of the configured primitive and branch.
pub fn cmd_bloch_traj(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<TrajectoryRow>, CliError> {
    let t = &cfg.trajectory;
    let sol = solve_pump(t.target.to_target(t.n, mhz(t.g_mhz)), cfg.chi())?;
    let rows: Vec<TrajectoryRow> = sample_trajectory(&sol.params, t.branch, sol.duration, t.nsteps)?
        .into_iter()
        .map(|p| TrajectoryRow { t_ns: to_ns(p.t), branch: p.branch.label().to_string(), x: p.xyz[0], y: p.xyz[1], z: p.xyz[2] })
        .collect();
    write_csv(out_dir, "trajectory.csv", &rows)?;
    Ok(rows)
}
