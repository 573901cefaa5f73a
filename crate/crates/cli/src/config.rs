//! JSON configuration file, merged under command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use ppg2ecg::eval::FailurePolicy;
use ppg2ecg::model::{DiscriminatorConfig, GeneratorConfig};
use ppg2ecg::training::{GeneratorLoss, Objective, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub data: Option<PathBuf>,
    pub split_seed: Option<u64>,
    pub seeds: Option<String>,
    pub baseline: Option<bool>,
    pub policy: Option<FailurePolicy>,
    #[serde(default)]
    pub train: TrainOverrides,
}

/// Any subset of [`TrainConfig`] fields; the rest come from the
/// defaults for the chosen objective.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainOverrides {
    pub objective: Option<Objective>,
    pub generator: Option<GeneratorConfig>,
    pub discriminator: Option<DiscriminatorConfig>,
    pub generator_loss: Option<GeneratorLoss>,
    pub lr_g: Option<f64>,
    pub lr_d: Option<f64>,
    pub betas: Option<(f64, f64)>,
    pub batch_size: Option<usize>,
    pub d_update_period: Option<u64>,
    pub epochs: Option<usize>,
    pub lr_constant_epochs: Option<usize>,
    pub lambda_freq: Option<f64>,
    pub seed: Option<u64>,
    pub drop_last: Option<bool>,
}

impl TrainOverrides {
    pub fn from_config(c: &TrainConfig) -> Self {
        TrainOverrides {
            objective: Some(c.objective),
            generator: Some(c.generator.clone()),
            discriminator: Some(c.discriminator.clone()),
            generator_loss: Some(c.generator_loss),
            lr_g: Some(c.lr_g),
            lr_d: Some(c.lr_d),
            betas: Some(c.betas),
            batch_size: Some(c.batch_size),
            d_update_period: Some(c.d_update_period),
            epochs: Some(c.epochs),
            lr_constant_epochs: Some(c.lr_constant_epochs),
            lambda_freq: Some(c.lambda_freq),
            seed: Some(c.seed),
            drop_last: Some(c.drop_last),
        }
    }

    /// Later values win.
    pub fn merge(self, over: TrainOverrides) -> Self {
        TrainOverrides {
            objective: over.objective.or(self.objective),
            generator: over.generator.or(self.generator),
            discriminator: over.discriminator.or(self.discriminator),
            generator_loss: over.generator_loss.or(self.generator_loss),
            lr_g: over.lr_g.or(self.lr_g),
            lr_d: over.lr_d.or(self.lr_d),
            betas: over.betas.or(self.betas),
            batch_size: over.batch_size.or(self.batch_size),
            d_update_period: over.d_update_period.or(self.d_update_period),
            epochs: over.epochs.or(self.epochs),
            lr_constant_epochs: over.lr_constant_epochs.or(self.lr_constant_epochs),
            lambda_freq: over.lambda_freq.or(self.lambda_freq),
            seed: over.seed.or(self.seed),
            drop_last: over.drop_last.or(self.drop_last),
        }
    }

    pub fn resolve(&self) -> CliResult<TrainConfig> {
        let base = TrainConfig::standard(self.objective.unwrap_or(Objective::GanPlusFreq));
        let c = TrainConfig {
            objective: base.objective,
            generator: self.generator.clone().unwrap_or(base.generator),
            discriminator: self.discriminator.clone().unwrap_or(base.discriminator),
            generator_loss: self.generator_loss.unwrap_or(base.generator_loss),
            lr_g: self.lr_g.unwrap_or(base.lr_g),
            lr_d: self.lr_d.unwrap_or(base.lr_d),
            betas: self.betas.unwrap_or(base.betas),
            batch_size: self.batch_size.unwrap_or(base.batch_size),
            d_update_period: self.d_update_period.unwrap_or(base.d_update_period),
            epochs: self.epochs.unwrap_or(base.epochs),
            lr_constant_epochs: self.lr_constant_epochs.unwrap_or(base.lr_constant_epochs),
            lambda_freq: self.lambda_freq.unwrap_or(base.lambda_freq),
            seed: self.seed.unwrap_or(base.seed),
            drop_last: self.drop_last.unwrap_or(base.drop_last),
        };
        c.validate()?;
        Ok(c)
    }
}

pub fn load(path: Option<&Path>) -> CliResult<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// `"3"`, `"0..30"` (inclusive) or `"1,4,9"`.
pub fn parse_seeds(s: &str) -> CliResult<Vec<u64>> {
    let bad = || CliError::input(format!("cannot parse seed list {s:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if b < a {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|v| v.trim().parse().map_err(|_| bad())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_lists() {
        assert_eq!(parse_seeds("0..30").unwrap().len(), 31);
        assert_eq!(parse_seeds("4").unwrap(), vec![4]);
        assert_eq!(parse_seeds("1, 4,9").unwrap(), vec![1, 4, 9]);
        assert!(parse_seeds("5..2").is_err());
        assert!(parse_seeds("x").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = TrainOverrides { epochs: Some(3), lr_g: Some(1e-3), ..Default::default() };
        let flags = TrainOverrides { epochs: Some(7), ..Default::default() };
        let c = TrainOverrides { lr_constant_epochs: Some(1), ..file.merge(flags) }.resolve().unwrap();
        assert_eq!((c.epochs, c.lr_g), (7, 1e-3));
        assert_eq!(c.objective, Objective::GanPlusFreq);
    }

    #[test]
    fn full_config_round_trips() {
        let c = TrainConfig::standard(Objective::Gan);
        let back = TrainOverrides::from_config(&c).resolve().unwrap();
        assert_eq!(back, c);
    }
}
