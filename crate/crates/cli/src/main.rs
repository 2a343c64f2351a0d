//! `eolink` — scenario runner for the transducer and photonic-link models.
//!
//! Every subcommand reads one TOML scenario config, emits plot-ready CSV and
//! TOML reports into the output directory, and records a manifest with the
//! semantic config hash, the seed (when one is used) and the tool version.
//! Outputs are byte-identical for identical configs and seeds.
//!
//! Exit codes: 0 success, 1 usage/config error, 2 domain error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use config::LoadedConfig;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Domain(_) => 2,
        }
    }

    /// Single-line machine-parsable rendering.
    fn render(&self) -> String {
        let (kind, msg) = match self {
            CliError::Usage(m) => ("usage", m),
            CliError::Domain(m) => ("domain", m),
        };
        format!("error: {kind}: {}", msg.replace('\n', "; "))
    }
}

#[derive(Parser)]
#[command(
    name = "eolink",
    version,
    about = "Cavity electro-optic transducer and photonic-link analyses"
)]
struct Cli {
    /// Scenario configuration file
    #[arg(short, long, global = true, default_value = "eolink.toml")]
    config: PathBuf,
    /// Output directory (overrides [output].dir; default "out")
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transduction efficiency vs on-chip pump power
    Efficiency,
    /// Four-port scattering spectra with calibrated efficiency report
    Spectra,
    /// Peak/background efficiency estimate from a spectra CSV
    Calibrate,
    /// Output noise spectra and mode occupancies
    Noise,
    /// Vernier pairing and DC-voltage matching plan
    Match,
    /// Link-budget table across technologies
    Budget,
    /// Cascaded fridge-to-fridge M2O2M spectrum
    Link,
    /// QPSK constellation over the link
    Qpsk,
    /// Local-oscillator interference fringe with sine fit
    Fringe,
    /// Electro-optic coupling rate from field-profile files
    Geo,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Efficiency => "efficiency",
            Command::Spectra => "spectra",
            Command::Calibrate => "calibrate",
            Command::Noise => "noise",
            Command::Match => "match",
            Command::Budget => "budget",
            Command::Link => "link",
            Command::Qpsk => "qpsk",
            Command::Fringe => "fringe",
            Command::Geo => "geo",
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let loaded = LoadedConfig::load(&cli.config)?;
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| {
            loaded
                .config
                .output
                .as_ref()
                .and_then(|o| o.dir.as_ref())
                .map(|d| loaded.resolve(d))
        })
        .unwrap_or_else(|| PathBuf::from("out"));

    let result = match cli.command {
        Command::Efficiency => commands::efficiency_cmd(&loaded),
        Command::Spectra => commands::spectra_cmd(&loaded),
        Command::Calibrate => commands::calibrate_cmd(&loaded),
        Command::Noise => commands::noise_cmd(&loaded),
        Command::Match => commands::match_cmd(&loaded),
        Command::Budget => commands::budget_cmd(&loaded),
        Command::Link => commands::link_cmd(&loaded),
        Command::Qpsk => commands::qpsk_cmd(&loaded),
        Command::Fringe => commands::fringe_cmd(&loaded),
        Command::Geo => commands::geo_cmd(&loaded),
    }?;

    let written = output::commit(
        &out_dir,
        cli.command.name(),
        &loaded.semantic_hash(),
        &result,
    )?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successes, everything else is usage
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprintln!("error: usage: {}", e.to_string().replace('\n', "; "));
                    ExitCode::from(1)
                }
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.render());
            ExitCode::from(e.exit_code())
        }
    }
}
