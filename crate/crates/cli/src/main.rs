use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ulcov::config::{load_config, Settings};
use ulcov::error::CliError;
use ulcov::figures::reproduce_figure;
use ulcov::sweep::{run_sweep, write_csv};

macro_rules! key_args {
    ($($field:ident),* $(,)?) => {
        /// Configuration keys; each overrides the config file.
        #[derive(Args, Debug, Default)]
        struct KeyArgs {
            $(
                #[arg(long, value_name = "VALUE", allow_hyphen_values = true)]
                $field: Option<String>,
            )*
        }

        impl KeyArgs {
            fn pairs(&self) -> Vec<(&'static str, String)> {
                let mut v = Vec::new();
                $(
                    if let Some(x) = &self.$field {
                        v.push((stringify!($field), x.clone()));
                    }
                )*
                v
            }
        }
    };
}

key_args!(
    mode,
    sweep,
    grid,
    lambda,
    epsilon,
    threshold_db,
    ase,
    p0_dbm,
    noise_dbm,
    d1_km,
    r1_km,
    r2_km,
    alpha_los,
    alpha_nlos,
    intercept_los_db,
    intercept_nlos_db,
    profile,
    fading,
    ricean_k_db,
    ue_density_ratio,
    drops,
    seed,
    out,
);

#[derive(Parser, Debug)]
#[command(
    name = "ulcov",
    version,
    about = "Uplink coverage and area spectral efficiency sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one sweep and write CSV to `out` (stdout when unset).
    Sweep {
        /// `key=value` file; `#` starts a comment.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        keys: KeyArgs,
    },
    /// Reproduce a reference figure (fig1 to fig6) as CSV files.
    Figure {
        id: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[command(flatten)]
        keys: KeyArgs,
    },
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Sweep { config, keys } => {
            let cfg = load_config(config.as_deref(), &keys.pairs())?;
            let rows = run_sweep(&cfg)?;
            match &cfg.out {
                Some(path) => {
                    let f = std::fs::File::create(path)?;
                    write_csv(io::BufWriter::new(f), &rows)?;
                }
                None => {
                    let mut out = io::stdout().lock();
                    write_csv(&mut out, &rows)?;
                    out.flush()?;
                }
            }
        }
        Command::Figure { id, out_dir, keys } => {
            let mut overrides = Settings::new();
            for (k, v) in keys.pairs() {
                overrides.set(k, v)?;
            }
            for p in reproduce_figure(&id, &overrides, &out_dir)? {
                eprintln!("wrote {}", p.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
