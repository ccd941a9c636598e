//! Rate-vs-distance sweeps written as CSV, one file per protocol.

pub mod config;

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::PathBuf;

use qkd_decoy::analysis::{
    max_secure_distance, sweep, IntensityPolicy, MuChoice, RateModel, SweepSpec,
};
use qkd_decoy::rates::{KeyRatePoint, Protocol};
use qkd_decoy::AnalysisError;
use thiserror::Error;

use config::{MuValue, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("intensity constraint violated: {0}")]
    Constraint(String),
    #[error("{0}")]
    Analysis(AnalysisError),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Constraint(_) => 3,
            CliError::Analysis(_) | CliError::Io { .. } => 1,
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Bounds(b) => CliError::Constraint(b.to_string()),
            AnalysisError::Model(m) => CliError::Config(m.to_string()),
            e @ (AnalysisError::InvalidRange { .. } | AnalysisError::OptimalMuUnsupported) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Analysis(other),
        }
    }
}

/// Signal intensity used when none is configured.
pub fn default_mu(protocol: Protocol) -> MuValue {
    match protocol {
        Protocol::Bb84Decoy => MuValue::Fixed(0.48),
        Protocol::Sarg04NoDecoy => MuValue::Optimal,
        Protocol::NonorthogonalDecoy => MuValue::Fixed(0.30),
    }
}

/// Outcome of one (protocol, mu) curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSummary {
    pub protocol: Protocol,
    pub mu: MuValue,
    /// `Ok(d)` for a cutoff, `Err(reason)` when none could be located.
    pub max_distance_km: Result<f64, String>,
}

impl CurveSummary {
    pub fn line(&self) -> String {
        let mu = match self.mu {
            MuValue::Fixed(m) => format!("{m}"),
            MuValue::Optimal => "optimal".into(),
        };
        match &self.max_distance_km {
            Ok(d) => format!("{} mu={mu}: max secure distance {d:.1} km", self.protocol),
            Err(reason) => format!("{} mu={mu}: {reason}", self.protocol),
        }
    }
}

fn models(config: &RunConfig, protocol: Protocol) -> Vec<(MuValue, RateModel)> {
    let mus = config
        .mu
        .clone()
        .unwrap_or_else(|| vec![default_mu(protocol)]);
    mus.into_iter()
        .map(|mu| {
            let choice = match mu {
                MuValue::Fixed(m) => MuChoice::Fixed(m),
                MuValue::Optimal => MuChoice::Optimal,
            };
            let model = RateModel::new(protocol, choice, config.params)
                .with_intensities(IntensityPolicy::Auto { nu3: config.nu3 });
            (mu, model)
        })
        .collect()
}

/// CSV body: header plus one row per point, 12 significant digits.
pub fn format_csv(points: &[KeyRatePoint]) -> String {
    let mut out = String::from("distance_km,mu,rate\n");
    for p in points {
        let _ = writeln!(out, "{:.11e},{:.11e},{:.11e}", p.distance_km, p.mu, p.rate);
    }
    out
}

pub fn csv_path(config: &RunConfig, protocol: Protocol) -> PathBuf {
    config.out.join(format!("{protocol}.csv"))
}

/// Validates every curve, sweeps them, writes the CSVs and returns the
/// per-curve cutoff summaries.
pub fn run(config: &RunConfig) -> Result<Vec<CurveSummary>, CliError> {
    let plan: Vec<(Protocol, Vec<(MuValue, RateModel)>)> = config
        .protocols
        .iter()
        .map(|&p| (p, models(config, p)))
        .collect();
    for (_, curves) in &plan {
        for (_, model) in curves {
            model.validate()?;
        }
    }

    fs::create_dir_all(&config.out).map_err(|source| CliError::Io {
        path: config.out.clone(),
        source,
    })?;

    let mut summaries = Vec::new();
    for (protocol, curves) in plan {
        let mut points = Vec::new();
        for (mu, model) in curves {
            points.extend(sweep(&SweepSpec {
                model,
                range: config.range,
            })?);
            let max_distance_km = match max_secure_distance(&model) {
                Ok(d) => Ok(d),
                Err(e @ (AnalysisError::NeverSecure { .. } | AnalysisError::NoCutoff { .. })) => {
                    Err(e.to_string())
                }
                Err(e) => return Err(e.into()),
            };
            summaries.push(CurveSummary {
                protocol,
                mu,
                max_distance_km,
            });
        }
        let path = csv_path(config, protocol);
        fs::write(&path, format_csv(&points)).map_err(|source| CliError::Io { path, source })?;
    }
    Ok(summaries)
}
