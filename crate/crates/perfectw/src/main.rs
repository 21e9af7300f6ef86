//! Thin command-line front end; all logic lives in [`perfectw::cli`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use perfectw::cli::{
    self, default_loss_grid, parse_config, parse_ratio_list, write_state_file, DesignArgs,
    Document, EvolveArgs, LossSweepArgs, NonlocalityArgs, OutputFormat,
};
use perfectw::error::{Error, Result};

#[derive(Parser)]
#[command(
    name = "perfectw",
    version,
    about = "Perfect W-state generation in coupled-waveguide lattices: \
             design, propagation, loss, and nonlocality data"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Write the result table to this file instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Output format: csv or json
    #[arg(long, global = true)]
    format: Option<String>,
    /// Flat key-value config file mirroring flag names; flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the lattice, generation length, and geometry for a target
    /// asymmetry
    Design {
        /// Asymmetry parameter of the target state (> 0)
        #[arg(long)]
        s: Option<f64>,
        /// Characteristic coupling strength in cm⁻¹
        #[arg(long)]
        k: Option<f64>,
        /// Separation-law fit parameter d₀ (give with --d1)
        #[arg(long)]
        d0: Option<f64>,
        /// Separation-law fit parameter d₁ (give with --d0)
        #[arg(long)]
        d1: Option<f64>,
        /// Number of recurrence positions to report
        #[arg(long)]
        recurrences: Option<usize>,
    },
    /// Tabulate center-injection probabilities along the lattice
    Evolve {
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        k: Option<f64>,
        /// Propagation range in cm (defaults to the generation length)
        #[arg(long)]
        z_max: Option<f64>,
        /// Grid points over [0, z-max]
        #[arg(long)]
        points: Option<usize>,
        /// Use the fine default grid suitable for contour rasters
        #[arg(long)]
        contour: bool,
        /// Also write the state at z-max to this state file
        #[arg(long)]
        state_out: Option<PathBuf>,
        /// Apply the compensating middle-guide phase to the exported state
        #[arg(long)]
        compensate: bool,
    },
    /// Sweep generation fidelity against the photon loss ratio β/k
    LossSweep {
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        k: Option<f64>,
        /// Comma-separated β/k grid, e.g. 0,0.02,0.05,0.1
        #[arg(long)]
        beta_over_k: Option<String>,
    },
    /// Hardy ladder and Bell-CH certificate for a three-mode state
    Nonlocality {
        /// Certify the built-in perfect W-state for this asymmetry
        #[arg(long)]
        s: Option<f64>,
        /// …or load amplitudes from a state file
        #[arg(long)]
        state_file: Option<PathBuf>,
        /// K-basis mixing angle in radians (defaults to the Hardy angle)
        #[arg(long)]
        alpha: Option<f64>,
    },
}

/// Flag < config < default resolution for one key.
struct Settings {
    config: BTreeMap<String, String>,
}

impl Settings {
    fn load(path: Option<&Path>) -> Result<Self> {
        let config = match path {
            Some(p) => parse_config(p)?,
            None => BTreeMap::new(),
        };
        Ok(Settings { config })
    }

    fn lookup<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.config.get(key) {
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                Error::InvalidInput {
                    field: key.to_string(),
                    message: format!("bad config value {raw:?}"),
                }
            }),
            None => Ok(None),
        }
    }

    fn require<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<T> {
        self.lookup(key, flag)?.ok_or_else(|| Error::InvalidInput {
            field: key.to_string(),
            message: format!("missing required parameter --{key}"),
        })
    }

    fn or_default<T: FromStr>(&self, key: &str, flag: Option<T>, default: T) -> Result<T> {
        Ok(self.lookup(key, flag)?.unwrap_or(default))
    }

    /// Store-true flags: set on the command line, or `key = true` in the
    /// config file.
    fn flag(&self, key: &str, set: bool) -> bool {
        set || self.config.get(key).map(|v| v == "true").unwrap_or(false)
    }
}

/// The characteristic coupling of femtosecond-written lattices, cm⁻¹.
const DEFAULT_K: f64 = 0.37;

fn emit(doc: &Document, format: OutputFormat, output: Option<&Path>) -> Result<()> {
    let text = doc.render(format);
    match output {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| Error::Io {
                path: path.display().to_string(),
                source: e,
            })?;
            println!("wrote {} rows to {}", doc.rows.len(), path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let settings = Settings::load(cli.global.config.as_deref())?;
    let format: OutputFormat = settings
        .lookup("format", cli.global.format)?
        .map(|name: String| name.parse())
        .transpose()?
        .unwrap_or_default();
    let output = match cli.global.output {
        Some(p) => Some(p),
        None => settings
            .lookup::<String>("output", None)?
            .map(PathBuf::from),
    };

    match cli.command {
        Command::Design {
            s,
            k,
            d0,
            d1,
            recurrences,
        } => {
            let args = DesignArgs {
                s: settings.require("s", s)?,
                k: settings.or_default("k", k, DEFAULT_K)?,
                d0: settings.lookup("d0", d0)?,
                d1: settings.lookup("d1", d1)?,
                recurrences: settings.or_default("recurrences", recurrences, 4)?,
            };
            emit(&cli::run_design(&args)?, format, output.as_deref())
        }
        Command::Evolve {
            s,
            k,
            z_max,
            points,
            contour,
            state_out,
            compensate,
        } => {
            let s = settings.require("s", s)?;
            let k = settings.or_default("k", k, DEFAULT_K)?;
            let z_max = match settings.lookup("z-max", z_max)? {
                Some(z) => z,
                None => perfectw::design::physical_length(perfectw::design::kz_for(s)?, k)?,
            };
            let default_points = if settings.flag("contour", contour) { 2001 } else { 201 };
            let args = EvolveArgs {
                s,
                k,
                z_max,
                points: settings.or_default("points", points, default_points)?,
                compensate: settings.flag("compensate", compensate),
            };
            let out = cli::run_evolve(&args)?;
            if let Some(path) = state_out
                .or_else(|| settings.config.get("state-out").map(PathBuf::from))
            {
                write_state_file(&path, &out.final_state)?;
            }
            emit(&out.document, format, output.as_deref())
        }
        Command::LossSweep { s, k, beta_over_k } => {
            let grid = match settings.lookup::<String>("beta-over-k", beta_over_k)? {
                Some(list) => parse_ratio_list(&list)?,
                None => default_loss_grid(),
            };
            let args = LossSweepArgs {
                s: settings.require("s", s)?,
                k: settings.or_default("k", k, DEFAULT_K)?,
                beta_over_k: grid,
            };
            emit(&cli::run_loss_sweep(&args)?, format, output.as_deref())
        }
        Command::Nonlocality {
            s,
            state_file,
            alpha,
        } => {
            let args = NonlocalityArgs {
                s: settings.lookup("s", s)?,
                state_file: state_file
                    .map(|p| p.display().to_string())
                    .or_else(|| settings.config.get("state-file").cloned()),
                alpha: settings.lookup("alpha", alpha)?,
            };
            emit(&cli::run_nonlocality(&args)?, format, output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
