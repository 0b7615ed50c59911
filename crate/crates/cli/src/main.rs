use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;

use commands::Overrides;

/// Characteristic functions with prescribed support and their n-th root families.
#[derive(Parser)]
#[command(name = "cnroots", version)]
struct Cli {
    /// Worker threads for the parallel parts (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output directory. Falls back to the config's `output`, then
    /// $CNROOTS_OUT, then the working directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Override a tolerance from the config, e.g. `--tol power=1e-9`
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    tol: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a config and print comp(S) and rho
    Validate { config: PathBuf },

    /// Write blueprint.json
    Build { config: PathBuf },

    /// Write the family manifest with its distinctness certificate
    Family {
        config: PathBuf,
        #[arg(long)]
        n: Option<u32>,
        /// Largest family size to enumerate
        #[arg(long)]
        cap: Option<u64>,
    },

    /// Run the check battery on family members and write report.json
    Verify {
        config: PathBuf,
        #[arg(long)]
        n: Option<u32>,
        /// Only this member, e.g. `1,2` (default: the whole family)
        #[arg(long)]
        omega: Option<String>,
    },

    /// Extract per-component phase constants g/f from two curve files
    Phase {
        config: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        n: Option<u32>,
    },

    /// Rotate a sampled f by roots of unity per component and filter by
    /// positive definiteness
    Explore {
        config: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        cap: Option<u64>,
    },

    /// Write the density and characteristic function curves of one member
    Density {
        config: PathBuf,
        #[arg(long)]
        n: Option<u32>,
        /// Member to export (default: f itself)
        #[arg(long)]
        omega: Option<String>,
    },

    /// Draw from one member's law
    Sample {
        config: PathBuf,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        omega: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        /// Overrides the config's seed
        #[arg(long)]
        seed: Option<u64>,
    },

    /// Write the periodic triangle-wave pair and their atom tables
    Classic {
        /// Highest harmonic kept in the atom tables
        #[arg(long, default_value_t = 1000)]
        max_harmonic: u32,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    let overrides = Overrides {
        out: cli.out,
        tol: cli.tol,
    };
    let result = match cli.command {
        Command::Validate { config } => commands::validate(&config, &overrides),
        Command::Build { config } => commands::build(&config, &overrides),
        Command::Family { config, n, cap } => commands::family(&config, &overrides, n, cap),
        Command::Verify { config, n, omega } => {
            commands::verify(&config, &overrides, n, omega.as_deref())
        }
        Command::Phase { config, f, g, n } => commands::phase(&config, &overrides, &f, &g, n),
        Command::Explore { config, f, n, cap } => {
            commands::explore(&config, &overrides, &f, n, cap)
        }
        Command::Density { config, n, omega } => {
            commands::density(&config, &overrides, n, omega.as_deref())
        }
        Command::Sample {
            config,
            n,
            omega,
            count,
            seed,
        } => commands::sample(&config, &overrides, n, omega.as_deref(), count, seed),
        Command::Classic { max_harmonic, step } => {
            commands::classic(&overrides, max_harmonic, step)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{failure}");
            ExitCode::from(failure.code())
        }
    }
}
