use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qkd_decoy_cli::config::{parse_config_text, RunConfig};
use qkd_decoy_cli::{run, CliError};

/// Secure key rate vs distance for decoy-state BB84, no-decoy SARG04 and
/// nonorthogonal decoy-state QKD.
#[derive(Parser, Debug)]
#[command(name = "qkd-decoy", version)]
struct Args {
    /// key = value config file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// Parameter preset (gys)
    #[arg(long)]
    preset: Option<String>,
    /// bb84-decoy, sarg04-no-decoy, nonorthogonal-decoy or all (comma-separated)
    #[arg(long)]
    protocol: Option<String>,
    /// Signal mean photon number(s), comma-separated; "optimal" for sarg04-no-decoy
    #[arg(long)]
    mu: Option<String>,
    /// Weakest decoy intensity
    #[arg(long)]
    nu3: Option<String>,
    /// Fiber loss, dB/km
    #[arg(long)]
    alpha: Option<String>,
    /// Receiver detection efficiency
    #[arg(long)]
    eta_bob: Option<String>,
    /// Background yield per pulse
    #[arg(long)]
    y0: Option<String>,
    /// Detector misalignment error
    #[arg(long)]
    edet: Option<String>,
    /// Error-correction inefficiency
    #[arg(long)]
    fec: Option<String>,
    /// start:stop:step in km
    #[arg(long)]
    distance: Option<String>,
    /// Output directory for the CSV files
    #[arg(long)]
    out: Option<String>,
}

impl Args {
    fn flag_pairs(&self) -> Vec<(String, String)> {
        [
            ("preset", &self.preset),
            ("protocol", &self.protocol),
            ("mu", &self.mu),
            ("nu3", &self.nu3),
            ("alpha", &self.alpha),
            ("eta_bob", &self.eta_bob),
            ("y0", &self.y0),
            ("edet", &self.edet),
            ("fec", &self.fec),
            ("distance", &self.distance),
            ("out", &self.out),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
        .collect()
    }
}

fn load(args: &Args) -> Result<RunConfig, CliError> {
    let mut pairs = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            parse_config_text(&text)?
        }
        None => Vec::new(),
    };
    pairs.extend(args.flag_pairs());
    RunConfig::from_pairs(&pairs)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = load(&args).and_then(|config| run(&config));
    match result {
        Ok(summaries) => {
            for s in summaries {
                println!("{}", s.line());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qkd-decoy: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
