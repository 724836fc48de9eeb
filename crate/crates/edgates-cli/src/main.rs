use clap::{Parser, Subcommand};
use edgates::bloch::Branch;
use edgates::units::mhz;
use edgates_cli::config::TargetName;
use edgates_cli::{cmd_bloch_traj, cmd_closure, cmd_gate_sim, cmd_pump_solve, cmd_sweep, format_pump_table, CliError, ExperimentConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "edgates", version, about = "Error-detectable bosonic two-qubit gate simulations")]
struct Cli {
    /// TOML experiment config, or a JSON summary from an earlier run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Overrides the integrator and closure tolerances.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print closed-form pump conditions.
    PumpSolve {
        /// A single target; all of them when omitted.
        #[arg(long, value_enum)]
        target: Option<TargetName>,
        /// Signed gf dispersive shift (defaults to `gate.chi_mhz`).
        #[arg(long, allow_negative_numbers = true)]
        chi_mhz: Option<f64>,
        /// Orbit count for cswap_alt.
        #[arg(long, default_value_t = 2)]
        n: u32,
        /// Coupling for bs5050 and uswap.
        #[arg(long, default_value_t = 1.0)]
        g_mhz: f64,
    },
    /// Simulate one gate under the configured noise and readout.
    GateSim,
    /// Coherence or χ_f sweep with power-law fits.
    Sweep,
    /// Error-closure table for candidate Hamiltonians.
    Closure,
    /// Operator-Bloch-sphere trajectory of a primitive.
    BlochTraj {
        #[arg(long, value_enum)]
        target: Option<TargetName>,
        #[arg(long, value_parser = ["g", "f"])]
        branch: Option<String>,
        #[arg(long)]
        nsteps: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Workers(e.to_string()))?;
    }
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(tol) = cli.tol {
        cfg.override_tol(tol)?;
    }
    let out_dir = cli.out_dir.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    match cli.command {
        Command::PumpSolve { target, chi_mhz, n, g_mhz } => {
            let targets = target.map_or_else(|| TargetName::ALL.to_vec(), |t| vec![t]);
            let chi = chi_mhz.map_or(cfg.chi(), mhz);
            print!("{}", format_pump_table(&cmd_pump_solve(&targets, chi, n, g_mhz)?));
        }
        Command::GateSim => {
            let s = cmd_gate_sim(&cfg, &out_dir)?;
            println!(
                "tau_gate {:.3} ns  failure {:.6e}  ancilla_failure {:.6e}  ed_infidelity {:.6e}",
                s.tau_gate_ns, s.failure_prob, s.ancilla_failure_prob, s.ed_infidelity
            );
        }
        Command::Sweep => {
            let s = cmd_sweep(&cfg, &out_dir)?;
            for f in &s.channel_fits {
                let show = |o: &edgates_cli::FitOutcome| o.fit().map_or("n/a".to_string(), |f| format!("{:.3}", f.exponent));
                println!("{:<18} failure exponent {}  infidelity exponent {}", f.channel, show(&f.failure), show(&f.infidelity));
            }
            if let Some(c) = &s.chi_fit {
                println!("best chi_f {} MHz (interior: {})", c.best_chi_mhz, c.best_is_interior);
            }
        }
        Command::Closure => {
            let r = cmd_closure(&cfg, &out_dir)?;
            print!("{}", r.to_markdown());
            if !r.all_match() {
                eprintln!("warning: some verdicts differ from the expected table");
            }
        }
        Command::BlochTraj { target, branch, nsteps } => {
            if let Some(t) = target {
                cfg.trajectory.target = t;
            }
            if let Some(b) = branch {
                cfg.trajectory.branch = if b == "f" { Branch::F } else { Branch::G };
            }
            if let Some(n) = nsteps {
                cfg.trajectory.nsteps = n;
            }
            cfg.validate()?;
            let rows = cmd_bloch_traj(&cfg, &out_dir)?;
            let last = rows.last().expect("at least two samples");
            println!("{} samples, end point ({:.6}, {:.6}, {:.6})", rows.len(), last.x, last.y, last.z);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
