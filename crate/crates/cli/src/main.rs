use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

mod ops;
mod report;

/// Tabular stochastic games with costly information acquisition: validate
/// game files, compute values, check equilibria and search for them.
#[derive(Parser)]
#[command(name = "sgia", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a game file against the schema and structural constraints.
    Validate {
        input: PathBuf,
        /// Re-serialize the instance here in canonical form.
        #[arg(long, value_name = "PATH")]
        rewrite: Option<PathBuf>,
    },
    /// Dump dimensions and every positive-probability posterior.
    Inspect { input: PathBuf },
    /// Compute exact values of the embedded profile.
    Evaluate { input: PathBuf },
    /// Estimate the embedded profile's values by simulation.
    Simulate {
        input: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        episodes: usize,
        /// Episode length; defaults to the shortest horizon whose
        /// truncation bias stays below 1e-4.
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// History index episodes start from.
        #[arg(long, default_value_t = 0)]
        start: usize,
    },
    /// Check whether the embedded profile is an equilibrium.
    Verify {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = VerifyMode::Direct)]
        mode: VerifyMode,
    },
    /// Run the local admissibility certificate on the embedded profile.
    Admissibility {
        input: PathBuf,
        /// Designated type index; defaults to the last type of each agent.
        #[arg(long)]
        theta_hat: Option<usize>,
    },
    /// Search for equilibria.
    Solve {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = SolveModeArg::Penalty)]
        mode: SolveModeArg,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
        /// Action-mixture resolution for enumeration; 1 keeps pure actions.
        #[arg(long, default_value_t = 1)]
        grid: usize,
        /// Write the penalty iteration trace here as CSV.
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
    },
    /// Rewrite the embedded equilibrium into its revealed-state form.
    TransformPi {
        input: PathBuf,
        /// Write the transformed instance here as a loadable game file.
        #[arg(long, value_name = "PATH")]
        emit: Option<PathBuf>,
    },
    /// Iterate the excess-value update back to a signaling fixed point.
    RecoverPpme {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ReadingArg::Marginal)]
        reading: ReadingArg,
        #[arg(long, default_value_t = 500)]
        max_iters: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyMode {
    Direct,
    Opt,
    Gfpa,
    /// Run both program routes and require them to agree.
    Cross,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolveModeArg {
    Enumerate,
    Penalty,
    AdmissibilityNewton,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReadingArg {
    /// Update type rows with state-marginalized excesses.
    Marginal,
    /// Apply the excesses to each state's row separately.
    PerState,
}

fn main() -> ExitCode {
    ExitCode::from(ops::run(Cli::parse()))
}
