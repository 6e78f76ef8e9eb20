//! Text and JSON renderings of cross-validation results.
//!
//! JSON keys: `dataset`, `form`, `per_fold_auc`, `mean`, `std`, `spread`,
//! `config` (with `dim_d`, `dim_p`, `lr`, `margin`, `epochs`, `patience`,
//! `batch`, `corruption`, `folds`, `seed`). Floats are written in shortest
//! round-trip form, so reloading reproduces every value exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sme_core::{EvalReport, PrPoint};

use crate::config::RunConfig;
use crate::error::{AppError, Result};

pub const SPREAD_NOTE: &str = "sample standard deviation over folds";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub dim_d: usize,
    pub dim_p: usize,
    pub lr: f64,
    pub margin: f64,
    pub epochs: usize,
    /// `null` when early stopping is disabled.
    pub patience: Option<usize>,
    pub batch: usize,
    pub corruption: String,
    pub folds: usize,
    pub seed: u64,
}

impl From<&RunConfig> for ConfigEcho {
    fn from(c: &RunConfig) -> Self {
        Self {
            dim_d: c.spec.dim_d,
            dim_p: c.spec.dim_p,
            lr: c.train.learning_rate,
            margin: c.train.margin,
            epochs: c.train.epochs_max,
            patience: c.train.patience,
            batch: c.train.batch_size,
            corruption: c.train.corruption.name().to_owned(),
            folds: c.folds,
            seed: c.train.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub dataset: String,
    pub form: String,
    pub per_fold_auc: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub spread: String,
    pub config: ConfigEcho,
}

impl ReportFile {
    pub fn new(dataset: &str, config: &RunConfig, report: &EvalReport) -> Self {
        Self {
            dataset: dataset.to_owned(),
            form: config.spec.form.name().to_owned(),
            per_fold_auc: report.fold_auc.clone(),
            mean: report.mean,
            std: report.std,
            spread: SPREAD_NOTE.to_owned(),
            config: config.into(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let c = &self.config;
        let patience = c.patience.map_or("inf".to_owned(), |p| p.to_string());
        writeln!(
            s,
            "# AUC-PR link prediction report; ± is the {}",
            self.spread
        )
        .unwrap();
        writeln!(
            s,
            "dataset={} form={} folds={} seed={} dim_d={} dim_p={} lr={} margin={} epochs={} patience={} batch={} corruption={}",
            self.dataset, self.form, c.folds, c.seed, c.dim_d, c.dim_p, c.lr, c.margin, c.epochs,
            patience, c.batch, c.corruption
        )
        .unwrap();
        for (i, auc) in self.per_fold_auc.iter().enumerate() {
            writeln!(s, "fold={i} auc={auc}").unwrap();
        }
        writeln!(s, "mean={} std={}", self.mean, self.std).unwrap();
        writeln!(s, "summary: {:.3} ± {:.3}", self.mean, self.std).unwrap();
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| AppError::Report(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| AppError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }
}

/// Tab-separated `fold recall precision` rows.
pub fn curves_tsv(curves: &[Vec<PrPoint>]) -> String {
    let mut s = String::from("fold\trecall\tprecision\n");
    for (fold, curve) in curves.iter().enumerate() {
        for p in curve {
            writeln!(s, "{fold}\t{}\t{}", p.recall, p.precision).unwrap();
        }
    }
    s
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| AppError::Io {
        path: path.to_owned(),
        source,
    })
}
