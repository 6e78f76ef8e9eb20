//! Dataset manifests and run configuration.
//!
//! A manifest is a small TOML file naming a triple file plus the fold count
//! and seed of its cross-validation protocol. It may also pin training
//! hyperparameters. Values resolve as: command-line flag, then manifest,
//! then built-in default.
//!
//! ```toml
//! name = "umls"
//! triples = "umls.tsv"      # relative to the manifest's directory
//! closed_world = false      # true: `triples` lists positives only (3 columns)
//! folds = 10
//! seed = 0
//!
//! # optional
//! form = "bilinear"
//! dim_d = 10
//! dim_p = 10
//! lr = 0.01
//! margin = 1.0
//! epochs = 500
//! patience = 10             # or "inf"
//! batch = 32
//! corruption = "both"     # lhs, rhs, both or all
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sme_core::{CorruptionMode, Dictionary, Form, ModelSpec, TrainConfig, TripleSet};

use crate::error::{AppError, Result};

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub name: Option<String>,
    pub triples: PathBuf,
    #[serde(default)]
    pub closed_world: bool,
    pub folds: Option<usize>,
    pub seed: Option<u64>,
    pub form: Option<String>,
    pub dim_d: Option<usize>,
    pub dim_p: Option<usize>,
    pub lr: Option<f64>,
    pub margin: Option<f64>,
    pub epochs: Option<usize>,
    pub patience: Option<Patience>,
    pub batch: Option<usize>,
    pub corruption: Option<String>,
}

/// Early-stopping patience; `Never` disables early stopping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Patience {
    Epochs(usize),
    Never(NeverTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
pub enum NeverTag {
    #[serde(rename = "inf")]
    Inf,
}

impl Patience {
    pub fn to_option(self) -> Option<usize> {
        match self {
            Patience::Epochs(n) => Some(n),
            Patience::Never(_) => None,
        }
    }
}

impl std::str::FromStr for Patience {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "inf" | "none" => Ok(Patience::Never(NeverTag::Inf)),
            n => n
                .parse()
                .map(Patience::Epochs)
                .map_err(|_| format!("expected an epoch count or `inf`, got `{n}`")),
        }
    }
}

/// A manifest together with the directory its relative paths resolve
/// against.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRef {
    pub manifest: Manifest,
    pub base: PathBuf,
}

impl DatasetRef {
    /// Reads `path` as a manifest when it ends in `.toml` or `.manifest`;
    /// any other path is taken to be a triple file with default protocol
    /// settings.
    pub fn open(path: &Path) -> Result<Self> {
        let base = path.parent().map(Path::to_owned).unwrap_or_default();
        let is_manifest = matches!(
            path.extension().and_then(|e| e.to_str()),
            Some("toml" | "manifest")
        );
        if !is_manifest {
            if !path.exists() {
                return Err(AppError::Usage(format!(
                    "dataset file {} does not exist",
                    path.display()
                )));
            }
            return Ok(Self {
                manifest: Manifest {
                    triples: PathBuf::from(path.file_name().unwrap_or_default()),
                    ..Manifest::default()
                },
                base,
            });
        }
        let text = fs::read_to_string(path).map_err(|e| {
            AppError::Usage(format!("cannot read manifest {}: {e}", path.display()))
        })?;
        let manifest: Manifest = toml::from_str(&text)
            .map_err(|e| AppError::Usage(format!("invalid manifest {}: {e}", path.display())))?;
        Ok(Self { manifest, base })
    }

    pub fn triples_path(&self) -> PathBuf {
        self.base.join(&self.manifest.triples)
    }

    pub fn name(&self) -> String {
        self.manifest.name.clone().unwrap_or_else(|| {
            self.manifest
                .triples
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        })
    }

    pub fn load(&self) -> Result<(Dictionary, TripleSet)> {
        if self.manifest.closed_world {
            load_closed_world(&self.triples_path())
        } else {
            load_triples(&self.triples_path())
        }
    }
}

/// Reads and parses a labelled triple file; errors carry the file path.
pub fn load_triples(path: &Path) -> Result<(Dictionary, TripleSet)> {
    load_with(path, sme_core::parse_triples)
}

/// Reads a list of positives and expands it to its closed world.
pub fn load_closed_world(path: &Path) -> Result<(Dictionary, TripleSet)> {
    load_with(path, sme_core::parse_closed_world)
}

fn load_with(
    path: &Path,
    parse: fn(&str) -> sme_core::Result<(Dictionary, TripleSet)>,
) -> Result<(Dictionary, TripleSet)> {
    let text = fs::read_to_string(path).map_err(|source| AppError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse(&text).map_err(|source| AppError::Data {
        path: path.to_owned(),
        source,
    })
}

/// Hyperparameter overrides supplied on the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub form: Option<Form>,
    pub dim_d: Option<usize>,
    pub dim_p: Option<usize>,
    pub lr: Option<f64>,
    pub margin: Option<f64>,
    pub epochs: Option<usize>,
    pub patience: Option<Patience>,
    pub batch: Option<usize>,
    pub corruption: Option<CorruptionMode>,
    pub folds: Option<usize>,
    pub seed: Option<u64>,
}

/// Fully resolved settings for a training or evaluation run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spec: ModelSpec,
    pub train: TrainConfig,
    pub folds: usize,
}

impl RunConfig {
    pub fn resolve(manifest: &Manifest, flags: &Overrides) -> Result<Self> {
        let parse_err = |e: sme_core::Error| AppError::Usage(e.to_string());
        let form = match (flags.form, &manifest.form) {
            (Some(f), _) => f,
            (None, Some(s)) => s.parse().map_err(parse_err)?,
            (None, None) => {
                return Err(AppError::Usage(
                    "model form not given (use --form linear|bilinear)".into(),
                ))
            }
        };
        let corruption = match (flags.corruption, &manifest.corruption) {
            (Some(c), _) => c,
            (None, Some(s)) => s.parse().map_err(parse_err)?,
            (None, None) => CorruptionMode::Both,
        };
        let defaults = TrainConfig::default();
        let base_spec = ModelSpec::new(form);
        let spec = ModelSpec {
            form,
            dim_d: flags.dim_d.or(manifest.dim_d).unwrap_or(base_spec.dim_d),
            dim_p: flags.dim_p.or(manifest.dim_p).unwrap_or(base_spec.dim_p),
        };
        let train = TrainConfig {
            learning_rate: flags.lr.or(manifest.lr).unwrap_or(defaults.learning_rate),
            margin: flags.margin.or(manifest.margin).unwrap_or(defaults.margin),
            epochs_max: flags
                .epochs
                .or(manifest.epochs)
                .unwrap_or(defaults.epochs_max),
            batch_size: flags
                .batch
                .or(manifest.batch)
                .unwrap_or(defaults.batch_size),
            corruption,
            patience: match flags.patience.or(manifest.patience) {
                Some(p) => p.to_option(),
                None => defaults.patience,
            },
            seed: flags.seed.or(manifest.seed).unwrap_or(defaults.seed),
        };
        let config = Self {
            spec,
            train,
            folds: flags.folds.or(manifest.folds).unwrap_or(10),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let usage = |e: sme_core::Error| AppError::Usage(e.to_string());
        self.spec.validate().map_err(usage)?;
        self.train.validate().map_err(usage)?;
        if self.folds < 2 {
            return Err(AppError::Usage(format!(
                "fold count must be at least 2, got {}",
                self.folds
            )));
        }
        Ok(())
    }
}
