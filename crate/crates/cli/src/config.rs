//! Run configuration: a flat `key = value` file, overridden by flags.

use std::path::PathBuf;

use qkd_decoy::analysis::{DistanceRange, DEFAULT_NU3};
use qkd_decoy::model::ChannelParams;
use qkd_decoy::rates::Protocol;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuValue {
    Fixed(f64),
    Optimal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// `distance_km` is unused; the sweep range sets it.
    pub params: ChannelParams,
    pub protocols: Vec<Protocol>,
    /// `None` picks each protocol's default.
    pub mu: Option<Vec<MuValue>>,
    pub nu3: f64,
    pub range: DistanceRange,
    pub out: PathBuf,
}

pub const KEYS: [&str; 11] = [
    "preset", "protocol", "mu", "nu3", "alpha", "eta_bob", "y0", "edet", "fec", "distance", "out",
];

impl RunConfig {
    pub fn preset(name: &str) -> Result<Self, CliError> {
        match name {
            "gys" => Ok(Self {
                params: ChannelParams::gys(0.0),
                protocols: Protocol::ALL.to_vec(),
                mu: None,
                nu3: DEFAULT_NU3,
                range: DistanceRange::default(),
                out: PathBuf::from("."),
            }),
            other => Err(CliError::Config(format!("unknown preset '{other}'"))),
        }
    }

    /// Builds the config from `(key, value)` pairs, file entries first and
    /// flag entries after, so later entries win. The preset, wherever it
    /// appears, is applied before everything else.
    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self, CliError> {
        for (key, _) in pairs {
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!("unknown key '{key}'")));
            }
        }
        let preset = pairs
            .iter()
            .rev()
            .find(|(k, _)| k == "preset")
            .map_or("gys", |(_, v)| v.as_str());
        let mut config = Self::preset(preset)?;
        for (key, value) in pairs.iter().filter(|(k, _)| k != "preset") {
            config.set(key, value)?;
        }
        config
            .params
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(config)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let p = &mut self.params;
        match key {
            "protocol" => self.protocols = parse_protocols(value)?,
            "mu" => self.mu = Some(parse_mu(value)?),
            "nu3" => self.nu3 = parse_f64(key, value)?,
            "alpha" => p.alpha_db_per_km = parse_f64(key, value)?,
            "eta_bob" => p.eta_bob = parse_f64(key, value)?,
            "y0" => p.y0 = parse_f64(key, value)?,
            "edet" => p.e_det = parse_f64(key, value)?,
            "fec" => p.f_ec = parse_f64(key, value)?,
            "distance" => self.range = parse_range(value)?,
            "out" => self.out = PathBuf::from(value),
            other => return Err(CliError::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }
}

/// Parses `key = value` lines. `#` starts a comment; blank lines are skipped.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "line {}: expected key = value, got '{line}'",
                lineno + 1
            )));
        };
        let key = key.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!(
                "line {}: unknown key '{key}'",
                lineno + 1
            )));
        }
        pairs.push((key, value.trim().to_string()));
    }
    Ok(pairs)
}

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Config(format!("{key}: '{value}' is not a number")))
}

fn parse_protocols(value: &str) -> Result<Vec<Protocol>, CliError> {
    let mut out = Vec::new();
    for item in value.split(',').map(str::trim) {
        if item == "all" {
            out.extend(Protocol::ALL);
        } else {
            out.push(item.parse().map_err(CliError::Config)?);
        }
    }
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(CliError::Config("protocol list is empty".into()));
    }
    Ok(out)
}

fn parse_mu(value: &str) -> Result<Vec<MuValue>, CliError> {
    value
        .split(',')
        .map(str::trim)
        .map(|item| {
            if item == "optimal" {
                Ok(MuValue::Optimal)
            } else {
                parse_f64("mu", item).map(MuValue::Fixed)
            }
        })
        .collect()
}

fn parse_range(value: &str) -> Result<DistanceRange, CliError> {
    let parts: Vec<&str> = value.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(CliError::Config(format!(
            "distance: expected start:stop:step, got '{value}'"
        )));
    };
    let start = parse_f64("distance", start)?;
    let stop = parse_f64("distance", stop)?;
    let step = parse_f64("distance", step)?;
    DistanceRange::new(start, stop, step).map_err(|e| CliError::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(items: &[(&str, &str)]) -> Vec<(String, String)> {
        items
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn gys_preset_values() {
        let c = RunConfig::from_pairs(&pairs(&[("preset", "gys")])).unwrap();
        assert_eq!(c.params.alpha_db_per_km, 0.21);
        assert_eq!(c.params.e_det, 0.033);
        assert_eq!(c.params.y0, 1.7e-6);
        assert_eq!(c.params.eta_bob, 0.045);
        assert_eq!(c.params.f_ec, 1.22);
    }

    #[test]
    fn later_entries_win() {
        let c = RunConfig::from_pairs(&pairs(&[
            ("alpha", "0.3"),
            ("alpha", "0.2"),
            ("preset", "gys"),
        ]))
        .unwrap();
        assert_eq!(c.params.alpha_db_per_km, 0.2);
    }

    #[test]
    fn file_text_parsing() {
        let text = "# GYS run\npreset = gys\n\nmu = 0.30, 0.48  # two curves\neta-bob=0.05\n";
        let p = parse_config_text(text).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p[2].0, "eta_bob");
        let c = RunConfig::from_pairs(&p).unwrap();
        assert_eq!(c.mu, Some(vec![MuValue::Fixed(0.30), MuValue::Fixed(0.48)]));
        assert_eq!(c.params.eta_bob, 0.05);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_config_text("colour = blue").is_err());
        assert!(parse_config_text("just words").is_err());
        assert!(RunConfig::from_pairs(&pairs(&[("preset", "bogus")])).is_err());
        assert!(RunConfig::from_pairs(&pairs(&[("distance", "0:10")])).is_err());
        assert!(RunConfig::from_pairs(&pairs(&[("distance", "10:0:1")])).is_err());
        assert!(RunConfig::from_pairs(&pairs(&[("edet", "0.7")])).is_err());
        assert!(RunConfig::from_pairs(&pairs(&[("protocol", "b92")])).is_err());
        assert!(RunConfig::from_pairs(&pairs(&[("mu", "abc")])).is_err());
    }

    #[test]
    fn protocol_lists() {
        assert_eq!(parse_protocols("all").unwrap(), Protocol::ALL.to_vec());
        assert_eq!(
            parse_protocols("nonorthogonal-decoy,bb84-decoy").unwrap(),
            vec![Protocol::Bb84Decoy, Protocol::NonorthogonalDecoy]
        );
    }
}
