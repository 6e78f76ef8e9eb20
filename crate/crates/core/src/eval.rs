//! Scoring, precision-recall curves and cross-validated evaluation.

use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{Dictionary, FoldSplit, TripleSet};
use crate::error::{Error, Result};
use crate::model::{apply_contracted, Model, Params, SymbolId, Triple};
use crate::tensor::{dot_unchecked, mode3_contract};
use crate::trainer::{fold_seed, train, ModelSpec, TrainConfig, TrainHooks, TrainTrace};

/// Parallel scores and binary labels; higher score means "more likely true".
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredSet {
    scores: Vec<f64>,
    labels: Vec<bool>,
}

impl ScoredSet {
    pub fn new(scores: Vec<f64>, labels: Vec<bool>) -> Result<Self> {
        crate::error::check_len("ScoredSet", scores.len(), labels.len())?;
        Ok(Self { scores, labels })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// A point of the precision-recall curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint {
    pub recall: f64,
    pub precision: f64,
}

/// Precision-recall curve with tied scores collapsed into one threshold.
///
/// Starts at `(recall 0, precision 1)` and adds one point per distinct score,
/// visiting thresholds from the highest score down.
pub fn pr_curve(s: &ScoredSet) -> Result<Vec<PrPoint>> {
    let positives = s.labels.iter().filter(|&&l| l).count();
    if positives == 0 {
        return Err(Error::UndefinedMetric("no positive labels"));
    }
    if positives == s.len() {
        return Err(Error::UndefinedMetric("no negative labels"));
    }
    if s.scores.iter().any(|x| x.is_nan()) {
        return Err(Error::NonFinite("NaN score".into()));
    }

    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s.scores[b].total_cmp(&s.scores[a]));

    let total = positives as f64;
    let mut curve = Vec::with_capacity(s.len() + 1);
    curve.push(PrPoint {
        recall: 0.0,
        precision: 1.0,
    });
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let threshold = s.scores[order[i]];
        while i < order.len() && s.scores[order[i]] == threshold {
            if s.labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        curve.push(PrPoint {
            recall: tp as f64 / total,
            precision: tp as f64 / (tp + fp) as f64,
        });
    }
    Ok(curve)
}

/// Trapezoidal area under a curve, integrating precision over recall.
pub fn curve_area(curve: &[PrPoint]) -> f64 {
    curve
        .windows(2)
        .map(|w| (w[1].recall - w[0].recall) * (w[0].precision + w[1].precision) / 2.0)
        .sum()
}

/// Area under the precision-recall curve.
pub fn auc_pr(s: &ScoredSet) -> Result<f64> {
    pr_curve(s).map(|c| curve_area(&c))
}

/// Caches `g_left` and `g_right` outputs for every `(relation, symbol)` pair
/// so scoring a triple costs one dot product. Cached values are produced by
/// the same arithmetic as [`Model::energy`], so scores match it exactly.
pub struct Scorer<'a> {
    model: &'a Model,
    p: usize,
    left: Vec<Option<Vec<f64>>>,
    right: Vec<Option<Vec<f64>>>,
}

impl<'a> Scorer<'a> {
    pub fn new(model: &'a Model) -> Self {
        let n = model.embeddings.len();
        Self {
            model,
            p: model.params.dims().1,
            left: vec![None; n],
            right: vec![None; n],
        }
    }

    fn prepare(&mut self, rel: SymbolId) -> Result<()> {
        self.model.embeddings.check_id(rel)?;
        if self.left[rel].is_some() {
            return Ok(());
        }
        let emb = &self.model.embeddings;
        let e_rel = emb.row(rel)?;
        let n = emb.len();
        let mut left = Vec::with_capacity(n * self.p);
        let mut right = Vec::with_capacity(n * self.p);
        match &self.model.params {
            Params::Linear(_) => {
                for s in 0..n {
                    left.extend(self.model.params.g_left(emb.row(s)?, e_rel)?);
                    right.extend(self.model.params.g_right(emb.row(s)?, e_rel)?);
                }
            }
            Params::Bilinear(bp) => {
                let m_l = mode3_contract(&bp.w_l, e_rel)?;
                let m_r = mode3_contract(&bp.w_r, e_rel)?;
                for s in 0..n {
                    left.extend(apply_contracted(&m_l, emb.row(s)?, &bp.b_l)?);
                    right.extend(apply_contracted(&m_r, emb.row(s)?, &bp.b_r)?);
                }
            }
        }
        self.left[rel] = Some(left);
        self.right[rel] = Some(right);
        Ok(())
    }

    /// `-energy(t)`.
    pub fn score(&mut self, t: Triple) -> Result<f64> {
        let emb = &self.model.embeddings;
        emb.check_id(t.lhs)?;
        emb.check_id(t.rhs)?;
        self.prepare(t.rel)?;
        let p = self.p;
        let (Some(left), Some(right)) = (&self.left[t.rel], &self.right[t.rel]) else {
            unreachable!("prepared above");
        };
        let u = &left[t.lhs * p..(t.lhs + 1) * p];
        let v = &right[t.rhs * p..(t.rhs + 1) * p];
        let energy = -dot_unchecked(u, v);
        Ok(-energy)
    }
}

/// Scores every record with `-energy`, copying labels through.
pub fn score_set(model: &Model, triples: &TripleSet) -> Result<ScoredSet> {
    let mut scorer = Scorer::new(model);
    let mut scores = Vec::with_capacity(triples.len());
    let mut labels = Vec::with_capacity(triples.len());
    for r in triples.records() {
        scores.push(scorer.score(r.triple)?);
        labels.push(r.label);
    }
    ScoredSet::new(scores, labels)
}

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

/// Result of training and testing on one fold.
#[derive(Debug, Clone)]
pub struct FoldOutcome {
    pub fold: usize,
    pub auc: f64,
    pub curve: Vec<PrPoint>,
    pub trace: TrainTrace,
    pub model: Model,
}

/// Per-fold AUC values with their mean and sample standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub fold_auc: Vec<f64>,
    pub curves: Vec<Vec<PrPoint>>,
    pub mean: f64,
    pub std: f64,
}

impl EvalReport {
    pub fn from_outcomes(outcomes: &[FoldOutcome]) -> Self {
        let fold_auc: Vec<f64> = outcomes.iter().map(|o| o.auc).collect();
        let (mean, std) = mean_and_sample_std(&fold_auc);
        Self {
            fold_auc,
            curves: outcomes.iter().map(|o| o.curve.clone()).collect(),
            mean,
            std,
        }
    }
}

/// Mean and sample (n − 1) standard deviation; the deviation of fewer than
/// two values is reported as 0.
pub fn mean_and_sample_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, libm::sqrt(ss / (n - 1.0)))
}

/// Trains a fresh model on fold `fold`'s training records (early stopping on
/// its validation fold) and measures AUC-PR on its test fold.
pub fn run_fold(
    dict: &Dictionary,
    records: &TripleSet,
    split: &FoldSplit,
    fold: usize,
    spec: ModelSpec,
    config: &TrainConfig,
    hooks: &mut dyn TrainHooks,
) -> Result<FoldOutcome> {
    let data = split.fold(records, fold)?;
    let fold_config = TrainConfig {
        seed: fold_seed(config.seed, fold),
        ..config.clone()
    };
    let (model, trace) = train(dict, spec, &data.train, &data.valid, &fold_config, hooks)?;
    let scored = score_set(&model, &data.test)?;
    let curve = pr_curve(&scored)?;
    Ok(FoldOutcome {
        fold,
        auc: curve_area(&curve),
        curve,
        trace,
        model,
    })
}

/// Runs every fold in order and aggregates the test AUCs.
pub fn cross_validate(
    dict: &Dictionary,
    records: &TripleSet,
    split: &FoldSplit,
    spec: ModelSpec,
    config: &TrainConfig,
    hooks: &mut dyn TrainHooks,
) -> Result<EvalReport> {
    let outcomes = (0..split.k())
        .map(|i| run_fold(dict, records, split, i, spec, config, hooks))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalReport::from_outcomes(&outcomes))
}
