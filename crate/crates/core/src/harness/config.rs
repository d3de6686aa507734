use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::acopt::AcOptConfig;
use crate::envs::{grid44_env, grid44_features, grid44_features_current_state, six_node_env, RoutingEnv, WeightedGraph};
use crate::error::{Error, Result};
use crate::fa::{FaConfig, FeatureMap};
use crate::qlearn::QLearnConfig;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvChoice {
    SixNode,
    Grid44,
    /// Edge-list graph file; relative paths resolve against the config file.
    Custom(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Acopt,
    Qlearn,
    AcoptFa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureChoice {
    /// One-hot state and state-action features.
    Tabular,
    /// Grid coordinates with the action block taken at the successor node.
    Grid,
    /// Grid coordinates with the action block taken at the current node.
    GridCurrentState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub env: EnvChoice,
    pub algorithm: Algorithm,
    /// Overrides the environment's own discount when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discount: Option<f64>,
    #[serde(default = "default_runs")]
    pub num_runs: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Feature map for `acopt_fa`; grid features on the grid, tabular elsewhere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<FeatureChoice>,
    #[serde(default)]
    pub acopt: AcOptConfig,
    #[serde(default)]
    pub qlearn: QLearnConfig,
    #[serde(default)]
    pub fa: FaConfig,
}

fn default_runs() -> usize {
    50
}

const PRESETS: [(&str, &str); 5] = [
    ("six-node-acopt", include_str!("../../presets/six-node-acopt.toml")),
    ("six-node-qlearn", include_str!("../../presets/six-node-qlearn.toml")),
    ("grid44-acopt", include_str!("../../presets/grid44-acopt.toml")),
    ("grid44-qlearn", include_str!("../../presets/grid44-qlearn.toml")),
    ("grid44-acopt-fa", include_str!("../../presets/grid44-acopt-fa.toml")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|p| p.0)
}

/// One of the bundled experiment configurations.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let (_, text) = PRESETS
        .iter()
        .find(|p| p.0 == name)
        .ok_or_else(|| {
            Error::config(
                "preset",
                format!(
                    "unknown preset `{name}` (known: {})",
                    preset_names().collect::<Vec<_>>().join(", ")
                ),
            )
        })?;
    ExperimentConfig::parse(text, name)
}

impl ExperimentConfig {
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Parse {
            source_name: source_name.to_string(),
            message: e.message().to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a config file; a custom environment path is resolved against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::parse(&text, &path.display().to_string())?;
        if let EnvChoice::Custom(p) = &mut config.env {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(config)
    }

    /// A preset name or a path to a config file.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        if preset_names().any(|n| n == name_or_path) {
            preset(name_or_path)
        } else {
            Self::load(Path::new(name_or_path))
        }
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("experiment configs serialize")
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_runs == 0 {
            return Err(Error::config("num_runs", "must be at least 1"));
        }
        if let Some(beta) = self.discount {
            if !(beta > 0.0 && beta < 1.0) {
                return Err(Error::config("discount", "must lie in (0, 1)"));
            }
        }
        match self.algorithm {
            Algorithm::Acopt => self.acopt.validate(),
            Algorithm::Qlearn => self.qlearn.validate(),
            Algorithm::AcoptFa => {
                if matches!(self.features, Some(FeatureChoice::Grid | FeatureChoice::GridCurrentState))
                    && self.env != EnvChoice::Grid44
                {
                    return Err(Error::config("features", "grid features need env = \"grid44\""));
                }
                self.fa.validate()
            }
        }
    }

    /// Builds the environment, checking that a custom path exists.
    pub fn build_env(&self) -> Result<RoutingEnv> {
        let env = match &self.env {
            EnvChoice::SixNode => six_node_env(),
            EnvChoice::Grid44 => grid44_env(self.discount.unwrap_or(0.9))?,
            EnvChoice::Custom(path) => {
                if !path.exists() {
                    return Err(Error::config("env.custom", format!("{} does not exist", path.display())));
                }
                WeightedGraph::load(path)?.to_env(self.discount.unwrap_or(0.8))?
            }
        };
        match self.discount {
            Some(beta) if beta != env.mdp().discount() => env.with_discount(beta),
            _ => Ok(env),
        }
    }

    pub fn build_features(&self, env: &RoutingEnv) -> FeatureMap {
        let choice = self.features.unwrap_or(match self.env {
            EnvChoice::Grid44 => FeatureChoice::Grid,
            _ => FeatureChoice::Tabular,
        });
        match choice {
            FeatureChoice::Tabular => FeatureMap::tabular(env.mdp()),
            FeatureChoice::Grid => grid44_features(),
            FeatureChoice::GridCurrentState => grid44_features_current_state(),
        }
    }

    pub fn env_name(&self) -> String {
        match &self.env {
            EnvChoice::SixNode => "six_node".to_string(),
            EnvChoice::Grid44 => "grid44".to_string(),
            EnvChoice::Custom(p) => p.display().to_string(),
        }
    }
}
