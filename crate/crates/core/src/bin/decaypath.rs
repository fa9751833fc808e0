use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use decaypath::io::{parse_operator, parse_property, parse_vector, run_command, Command, GridSpec, RunConfig, EXIT_USAGE};
use decaypath::scalar::ScalarFn;
use decaypath::stability::IterOptions;

#[derive(Parser, Debug)]
#[command(name = "decaypath", version, about = "Paths of decay and small-gain certificates for network gain operators")]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Convergence tolerance of the fixed-point iterations.
    #[arg(long, global = true, default_value_t = IterOptions::default().tol)]
    tol: f64,

    /// Iteration cap.
    #[arg(long, global = true, default_value_t = IterOptions::default().kmax)]
    kmax: usize,

    /// Log-spaced grid `a:b[:points]` (17 points per decade by default).
    #[arg(long, global = true)]
    grid: Option<GridSpec>,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Template truncation sizes, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    truncation: Vec<usize>,

    /// Strict-decay margin `ρ`, e.g. `linear:0.1`.
    #[arg(long, global = true)]
    rho: Option<ScalarFn>,

    /// Scaling function `ω`, e.g. `linear:0.9`.
    #[arg(long, global = true)]
    omega: Option<ScalarFn>,

    /// Directory for reports and tables.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Parse and check a network file.
    Validate { network: PathBuf },
    /// Iterate an operator from a starting vector.
    Simulate {
        network: PathBuf,
        /// `gamma`, `gamma-hat` or `gamma-r:<r>`.
        #[arg(long, default_value = "gamma-hat")]
        operator: String,
        /// Start vector, or one value for a constant vector.
        #[arg(long, default_value = "1")]
        start: String,
    },
    /// Certify or falsify a stability or small-gain property.
    Certify {
        network: PathBuf,
        /// One of sgc, uniform-sgc, max-robust-sgc, mbi, oplus-mbi, ugs, uges,
        /// order-contraction, point-of-decay.
        #[arg(long)]
        property: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Power of the operator for order-contraction.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Candidate vector for point-of-decay.
        #[arg(long)]
        point: Option<String>,
    },
    /// Build and verify a path table.
    Path {
        network: PathBuf,
        /// Bound `φ` for the upper fixed points.
        #[arg(long)]
        phi: Option<ScalarFn>,
        /// Tabulate the maximal fixed points instead of the minimal ones.
        #[arg(long)]
        upper: bool,
    },
    /// Composite Lyapunov checks on simulated trajectories.
    Lyapunov {
        network: PathBuf,
        /// Subsystem models and batch settings (JSON).
        #[arg(long)]
        system: PathBuf,
    },
}

fn config(cli: Cli) -> decaypath::error::Result<RunConfig> {
    let (command, network) = match cli.command {
        Sub::Validate { network } => (Command::Validate, network),
        Sub::Simulate { network, operator, start } => {
            (Command::Simulate { operator: parse_operator(&operator)?, start: parse_vector(&start)? }, network)
        }
        Sub::Certify { network, property, samples, k, point } => {
            let point = point.as_deref().map(parse_vector).transpose()?;
            (Command::Certify { property: parse_property(&property)?, samples, k, point }, network)
        }
        Sub::Path { network, phi, upper } => (Command::Path { phi, upper }, network),
        Sub::Lyapunov { network, system } => (Command::Lyapunov { system }, network),
    };
    let c = cli.common;
    Ok(RunConfig {
        command,
        network,
        tol: c.tol,
        kmax: c.kmax,
        grid: c.grid,
        seed: c.seed,
        truncation: c.truncation,
        rho: c.rho,
        omega: c.omega,
        out: c.out,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let outcome = config(cli).and_then(|c| run_command(&c));
    match outcome {
        Ok(out) => {
            let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&out.report).unwrap_or_default());
            for a in &out.artifacts {
                eprintln!("wrote {}", a.display());
            }
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
