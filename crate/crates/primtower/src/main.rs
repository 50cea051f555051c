use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use primtower::cli::{
    cmd_primitives, cmd_separability, cmd_verify_tower, PrimitivesConfig, SeparabilityConfig,
    TowerConfig,
};
use primtower::report::Format;

#[derive(Parser)]
#[command(
    name = "primtower",
    version,
    about = "Exact verification of the primitives adjunction tower on truncated tensor bialgebras"
)]
struct Cli {
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Primitive spaces of the free tensor bialgebra, with oracle cross-checks.
    Primitives {
        /// Number of generators.
        #[arg(long)]
        generators: usize,
        /// Field characteristic (0 or a prime).
        #[arg(long = "char", default_value_t = 0)]
        characteristic: u64,
        /// Degree cap.
        #[arg(long)]
        degree: u32,
    },
    /// End-to-end tower verification from a Lie-data or level-one object file.
    VerifyTower {
        /// Lie structure constants (JSON).
        #[arg(long, value_name = "FILE")]
        lie: Option<PathBuf>,
        /// Level-one object (JSON).
        #[arg(long, value_name = "FILE", conflicts_with = "lie")]
        b1: Option<PathBuf>,
        /// Degree cap (at least 2).
        #[arg(long)]
        degree: u32,
        /// Ideal-span slack for the stabilization check.
        #[arg(long, default_value_t = 2)]
        slack: u32,
        /// Negative control: corrupt one structure constant (seeded).
        #[arg(long, value_name = "SEED")]
        corrupt_bracket: Option<u64>,
        /// Negative control: corrupt one structure-map value (seeded).
        #[arg(long, value_name = "SEED")]
        corrupt_mu0: Option<u64>,
    },
    /// Degree-one retraction and naturality on seeded random letter maps.
    Separability {
        /// Number of generators.
        #[arg(long)]
        generators: usize,
        /// Field characteristic (0 or a prime).
        #[arg(long = "char", default_value_t = 0)]
        characteristic: u64,
        /// Degree cap.
        #[arg(long)]
        degree: u32,
        /// Number of random letter maps.
        #[arg(long, default_value_t = 20)]
        trials: u32,
        /// Seed for the random sweep.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.format {
        OutputFormat::Text => Format::Text,
        OutputFormat::Json => Format::Json,
    };
    let result = match cli.command {
        Command::Primitives {
            generators,
            characteristic,
            degree,
        } => cmd_primitives(&PrimitivesConfig {
            generators,
            characteristic,
            degree,
        }),
        Command::VerifyTower {
            lie,
            b1,
            degree,
            slack,
            corrupt_bracket,
            corrupt_mu0,
        } => cmd_verify_tower(&TowerConfig {
            lie,
            b1,
            degree,
            slack,
            corrupt_bracket,
            corrupt_mu0,
        }),
        Command::Separability {
            generators,
            characteristic,
            degree,
            trials,
            seed,
        } => cmd_separability(&SeparabilityConfig {
            generators,
            characteristic,
            degree,
            trials,
            seed,
        }),
    };
    match result {
        Ok(report) => {
            print!("{}", report.emit(format));
            if report.has_failure() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
