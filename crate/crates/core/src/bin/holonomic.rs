use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use holonomic::cli::{
    cmd_catalog, cmd_gate, cmd_synth, cmd_trajectory, cmd_verify, parse_target, BetaSweep,
    CliError, RunReport, SynthArgs, TrajectoryArgs, TrajectoryMode, VerifyArgs,
};
use holonomic::evolution::DEFAULT_STEPS;

/// Holonomic one-qubit gates from a driven two-level system.
#[derive(Parser)]
#[command(name = "holonomic", version)]
struct Cli {
    /// Print flat key=value lines instead of the human-readable report.
    #[arg(long, global = true)]
    machine: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Show the gate U_beta and the drive that produces it.
    Gate {
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
    },
    /// Propagate one period numerically and check the closed forms.
    Verify {
        #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["rabi", "detuning"])]
        beta: Option<f64>,
        /// Rabi frequency override (drive frequency fixed at 1).
        #[arg(long, allow_negative_numbers = true, requires = "detuning")]
        rabi: Option<f64>,
        /// Detuning override (drive frequency fixed at 1).
        #[arg(long, allow_negative_numbers = true, requires = "rabi")]
        detuning: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_STEPS)]
        steps: usize,
    },
    /// Search for a pulse sequence matching a target gate.
    Synth {
        /// NOT, H, S (phase), T, or a path to a matrix file.
        #[arg(long)]
        target: String,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 100)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompose the built-in sequences for NOT, H, S and T.
    Catalog,
    /// Bloch-sphere trajectories of U_beta|0> and U_beta|1>.
    Trajectory {
        /// Comma list (0,0.3,pi/2) or sweep start:stop:count.
        #[arg(long)]
        beta: BetaSweep,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// `time` for t in [0, T], `endpoint` for t = T only.
        #[arg(long, default_value = "time")]
        mode: TrajectoryMode,
        #[arg(long, default_value_t = DEFAULT_STEPS)]
        steps: usize,
        /// CSV destination; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(RunReport, Option<String>), CliError> {
    match cli.command {
        Command::Gate { beta } => cmd_gate(beta).map(|r| (r, None)),
        Command::Verify {
            beta,
            rabi,
            detuning,
            steps,
        } => cmd_verify(&VerifyArgs {
            beta,
            rabi,
            detuning,
            steps,
        })
        .map(|r| (r, None)),
        Command::Synth {
            target,
            length,
            restarts,
            seed,
            out,
        } => cmd_synth(&SynthArgs {
            target: parse_target(&target),
            length,
            restarts,
            seed,
            out,
        })
        .map(|r| (r, None)),
        Command::Catalog => cmd_catalog().map(|r| (r, None)),
        Command::Trajectory {
            beta,
            samples,
            mode,
            steps,
            out,
        } => {
            let to_stdout = out.is_none();
            let (r, csv) = cmd_trajectory(&TrajectoryArgs {
                betas: beta,
                samples,
                mode,
                steps,
                out,
            })?;
            Ok((r, to_stdout.then_some(csv)))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let machine = cli.machine;
    match run(cli) {
        Ok((report, csv)) => {
            let rendered = if machine {
                report.render_machine()
            } else {
                report.render_human()
            };
            match csv {
                Some(csv) => {
                    print!("{csv}");
                    eprint!("{rendered}");
                }
                None => print!("{rendered}"),
            }
            ExitCode::from(report.exit_code().code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_status().code() as u8)
        }
    }
}
