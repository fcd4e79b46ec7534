//! Experiment files.
//!
//! ```toml
//! input = "../data/breast_cancer_wisconsin.csv"
//! label_col = "class"
//!
//! [federation]
//! num_clients = 2
//! client_dthr = 0.19
//! server_dthr = 0.17
//! seed = 7
//! ```
//!
//! Every `[federation]` key is optional. A relative `input` is resolved
//! against the directory holding the file.

use std::path::{Path, PathBuf};

use fedpnn_core::dataset::{self, LabelColumn, LabeledDataset};
use fedpnn_core::federation::FederationConfig;
use serde::Deserialize;

use crate::args::ExperimentArgs;
use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    pub input: Option<PathBuf>,
    pub label_col: Option<String>,
    #[serde(default)]
    pub federation: FederationConfig,
}

impl ExperimentFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Runtime(format!("cannot read config {}: {e}", path.display())))?;
        let mut file = Self::parse(&text)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        if let (Some(input), Some(dir)) = (&file.input, path.parent()) {
            if input.is_relative() {
                file.input = Some(dir.join(input));
            }
        }
        Ok(file)
    }
}

/// A fully resolved experiment: data location plus validated settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub input: PathBuf,
    pub label_col: LabelColumn,
    pub federation: FederationConfig,
}

impl Experiment {
    /// Merges the optional config file with command-line overrides.
    pub fn resolve(args: &ExperimentArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => ExperimentFile::load(path)?,
            None => ExperimentFile::default(),
        };
        let input = args
            .input
            .clone()
            .or(file.input)
            .ok_or_else(|| CliError::Validation("no input CSV: pass --input or set `input` in the config".into()))?;
        let label_col = args.label_col.clone().or(file.label_col).unwrap_or_else(|| "last".into());
        let mut cfg = file.federation;
        if let Some(k) = args.clients {
            cfg.num_clients = k;
        }
        if let Some(b) = args.server_frac {
            cfg.b_percent = b;
        }
        if let Some(v) = args.client_dthr {
            cfg.client_dthr = v;
            cfg.client_dthrs.clear();
        }
        if let Some(v) = args.server_dthr {
            cfg.server_dthr = v;
        }
        if let Some(v) = args.sigma {
            cfg.sigma = v;
        }
        if let Some(v) = args.seed {
            cfg.seed = v;
        }
        if let Some(s) = args.sharding {
            cfg.client_sharding = s.into();
        }
        cfg.validate().map_err(|e| CliError::Validation(e.to_string()))?;
        Ok(Self { input, label_col: label_col.parse().expect("infallible"), federation: cfg })
    }

    pub fn load_data(&self) -> Result<LabeledDataset, CliError> {
        load_dataset(&self.input, &self.label_col)
    }
}

pub fn load_dataset(path: &Path, label_col: &LabelColumn) -> Result<LabeledDataset, CliError> {
    dataset::load_csv(path, label_col).map_err(|e| CliError::Runtime(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use fedpnn_core::dataset::ShardingMode;

    #[test]
    fn defaults_fill_missing_keys() {
        let f = ExperimentFile::parse("input = \"x.csv\"\n[federation]\nnum_clients = 3\nsharding_typo = 1\n");
        assert!(matches!(f, Err(CliError::Validation(_))));
        let f = ExperimentFile::parse("input = \"x.csv\"\n[federation]\nnum_clients = 3\n").unwrap();
        assert_eq!(f.federation.num_clients, 3);
        assert_eq!(f.federation.b_percent, 10.0);
        assert_eq!(f.federation.sigma, 0.1);
        assert_eq!(f.federation.train_frac, 0.8);
        assert_eq!(f.federation.multiplier, 2.0);
        assert_eq!(f.federation.client_sharding, ShardingMode::SimpleRandom);
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.toml");
        std::fs::write(&path, "input = \"d.csv\"\n[federation]\nseed = 4\nclient_dthr = 0.3\nclient_sharding = \"stratified\"\n")
            .unwrap();
        let args = ExperimentArgs { config: Some(path), seed: Some(9), ..Default::default() };
        let exp = Experiment::resolve(&args).unwrap();
        assert_eq!(exp.input, dir.path().join("d.csv"));
        assert_eq!(exp.federation.seed, 9);
        assert_eq!(exp.federation.client_dthr, 0.3);
        assert_eq!(exp.federation.client_sharding, ShardingMode::Stratified);
        assert_eq!(exp.label_col, LabelColumn::Last);
    }

    #[test]
    fn missing_input_and_bad_values_are_validation_errors() {
        assert!(matches!(Experiment::resolve(&ExperimentArgs::default()), Err(CliError::Validation(_))));
        let args = ExperimentArgs { input: Some("a.csv".into()), clients: Some(0), ..Default::default() };
        assert!(matches!(Experiment::resolve(&args), Err(CliError::Validation(_))));
    }
}
