//! Margin ranking SGD over corrupted triples.
//!
//! Each epoch visits the positive training triples in a fresh random order,
//! pairs every positive with one corruption, and takes mini-batch gradient
//! steps on `max(0, margin + E(pos) − E(neg))`. Embedding rows are projected
//! back onto the unit sphere at the end of the epoch, the model is scored on
//! the validation set, and the best-scoring snapshot is kept.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{positives_of, Dictionary, TripleSet};
use crate::error::{Error, Result};
use crate::eval::{auc_pr, score_set};
use crate::model::{backward, Form, Model, Params, SymbolId, Triple};
use crate::tensor;

/// Which slot of a positive triple is replaced when corrupting it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorruptionMode {
    Lhs,
    Rhs,
    /// Left or right with equal probability.
    Both,
    /// Left, relation or right with equal probability.
    All,
}

impl core::str::FromStr for CorruptionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lhs" => Ok(Self::Lhs),
            "rhs" => Ok(Self::Rhs),
            "both" => Ok(Self::Both),
            "all" => Ok(Self::All),
            other => Err(Error::Config(format!(
                "unknown corruption mode `{other}` (expected lhs, rhs, both or all)"
            ))),
        }
    }
}

impl CorruptionMode {
    pub fn name(self) -> &'static str {
        match self {
            Self::Lhs => "lhs",
            Self::Rhs => "rhs",
            Self::Both => "both",
            Self::All => "all",
        }
    }
}

/// Model architecture: form plus embedding (`d`) and transformed (`p`)
/// dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelSpec {
    pub form: Form,
    pub dim_d: usize,
    pub dim_p: usize,
}

impl ModelSpec {
    pub fn new(form: Form) -> Self {
        Self {
            form,
            dim_d: 10,
            dim_p: 10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim_d == 0 || self.dim_p == 0 {
            return Err(Error::Config("dimensions must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub margin: f64,
    pub epochs_max: usize,
    pub batch_size: usize,
    pub corruption: CorruptionMode,
    /// Epochs without validation improvement before stopping; `None` never
    /// stops early.
    pub patience: Option<usize>,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            margin: 1.0,
            epochs_max: 500,
            batch_size: 32,
            corruption: CorruptionMode::Both,
            patience: Some(10),
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(self.margin > 0.0 && self.margin.is_finite()) {
            return Err(Error::Config(format!(
                "margin must be positive, got {}",
                self.margin
            )));
        }
        if self.epochs_max == 0 {
            return Err(Error::Config("epochs_max must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        Ok(())
    }
}

/// Seed used for fold `fold` of a cross-validation run seeded with `seed`.
pub fn fold_seed(seed: u64, fold: usize) -> u64 {
    seed.wrapping_add((fold as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    pub loss: f64,
    pub val_auc: f64,
    pub secs: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainTrace {
    pub epochs: Vec<EpochRecord>,
    /// Epoch whose snapshot was returned.
    pub best_epoch: usize,
}

/// Clock and progress callbacks for [`train`]; the core crate has no clock
/// of its own.
pub trait TrainHooks {
    /// Seconds since an arbitrary origin.
    fn now(&self) -> f64 {
        0.0
    }

    fn on_epoch(&mut self, _record: &EpochRecord) {}
}

/// Hooks that do nothing; epoch durations are reported as zero.
pub struct NoHooks;

impl TrainHooks for NoHooks {}

/// Replaces the lhs or rhs of `t` with a uniformly drawn entity different
/// from the current one. `entities` must be sorted ascending.
pub fn corrupt<R: Rng + ?Sized>(
    t: Triple,
    mode: CorruptionMode,
    entities: &[SymbolId],
    rng: &mut R,
) -> Result<Triple> {
    if entities.len() < 2 {
        return Err(Error::Config(
            "corruption needs at least two entities".into(),
        ));
    }
    let left = match mode {
        CorruptionMode::Lhs => true,
        CorruptionMode::Rhs => false,
        CorruptionMode::Both | CorruptionMode::All => rng.gen_bool(0.5),
    };
    let replacement = draw_other(if left { t.lhs } else { t.rhs }, entities, rng);
    Ok(if left {
        Triple {
            lhs: replacement,
            ..t
        }
    } else {
        Triple {
            rhs: replacement,
            ..t
        }
    })
}

/// Like [`corrupt`], but [`CorruptionMode::All`] first picks the lhs,
/// relation or rhs slot uniformly; a relation slot is refilled from
/// `relations` (sorted ascending). Other modes ignore `relations`.
pub fn corrupt_triple<R: Rng + ?Sized>(
    t: Triple,
    mode: CorruptionMode,
    entities: &[SymbolId],
    relations: &[SymbolId],
    rng: &mut R,
) -> Result<Triple> {
    if mode == CorruptionMode::All && relations.len() >= 2 && rng.gen_range(0..3) == 0 {
        return Ok(Triple {
            rel: draw_other(t.rel, relations, rng),
            ..t
        });
    }
    corrupt(t, mode, entities, rng)
}

fn draw_other<R: Rng + ?Sized>(current: SymbolId, pool: &[SymbolId], rng: &mut R) -> SymbolId {
    match pool.binary_search(&current) {
        Ok(pos) => {
            let i = rng.gen_range(0..pool.len() - 1);
            pool[if i >= pos { i + 1 } else { i }]
        }
        Err(_) => pool[rng.gen_range(0..pool.len())],
    }
}

/// `max(0, margin + e_pos − e_neg)`.
pub fn ranking_loss(e_pos: f64, e_neg: f64, margin: f64) -> f64 {
    let raw = margin + e_pos - e_neg;
    if raw > 0.0 {
        raw
    } else {
        0.0
    }
}

/// One mini-batch update. Gradients of every pair are taken at the current
/// parameters and summed, then `learning_rate` times the sum is subtracted.
/// Pairs already separated by the margin contribute nothing. Returns the
/// mean loss of the batch before the update.
pub fn sgd_step(
    batch: &[(Triple, Triple)],
    model: &mut Model,
    config: &TrainConfig,
) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::Config("empty batch".into()));
    }
    let (d, p) = model.params.dims();
    let mut grad: Option<Params> = None;
    let mut rows: BTreeMap<SymbolId, Vec<f64>> = BTreeMap::new();
    let mut total = 0.0;

    for &(pos, neg) in batch {
        let e_pos = model.energy(pos)?;
        let e_neg = model.energy(neg)?;
        let loss = ranking_loss(e_pos, e_neg, config.margin);
        if !loss.is_finite() || !e_pos.is_finite() || !e_neg.is_finite() {
            return Err(Error::NonFinite(format!(
                "loss {loss} for energies {e_pos} / {e_neg}"
            )));
        }
        total += loss;
        if loss == 0.0 {
            continue;
        }
        let g = grad.get_or_insert_with(|| Params::zeros(model.form(), d, p));
        for (triple, sign) in [(pos, 1.0), (neg, -1.0)] {
            let (_, [g_lhs, g_rel, g_rhs]) =
                backward(triple, &model.embeddings, &model.params, sign, g)?;
            for (id, row) in [
                (triple.lhs, g_lhs),
                (triple.rel, g_rel),
                (triple.rhs, g_rhs),
            ] {
                match rows.get_mut(&id) {
                    Some(acc) => tensor::axpy(1.0, &row, acc)?,
                    None => {
                        rows.insert(id, row);
                    }
                }
            }
        }
    }

    if let Some(g) = grad {
        if !g.all_finite() || !rows.values().all(|r| tensor::all_finite(r)) {
            return Err(Error::NonFinite("gradient has non-finite entries".into()));
        }
        model.params.add_scaled(-config.learning_rate, &g)?;
        for (id, row) in &rows {
            tensor::axpy(-config.learning_rate, row, model.embeddings.row_mut(*id)?)?;
        }
    }
    Ok(total / batch.len() as f64)
}

/// Draws negatives for one training run.
#[derive(Debug, Clone)]
pub struct Corruptor {
    pub mode: CorruptionMode,
    /// Sorted non-relation ids.
    pub entities: Vec<SymbolId>,
    /// Sorted relation ids.
    pub relations: Vec<SymbolId>,
}

impl Corruptor {
    pub fn new(dict: &Dictionary, mode: CorruptionMode) -> Self {
        Self {
            mode,
            entities: dict.entity_ids(),
            relations: (0..dict.len()).filter(|&i| dict.is_relation(i)).collect(),
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, t: Triple, rng: &mut R) -> Result<Triple> {
        corrupt_triple(t, self.mode, &self.entities, &self.relations, rng)
    }
}

/// Runs one epoch over `positives` and returns the mean ranking loss.
pub fn run_epoch<R: Rng + ?Sized>(
    model: &mut Model,
    positives: &[Triple],
    corruptor: &Corruptor,
    config: &TrainConfig,
    rng: &mut R,
) -> Result<f64> {
    let mut order: Vec<Triple> = positives.to_vec();
    order.shuffle(rng);
    let mut total = 0.0;
    let mut batch = Vec::with_capacity(config.batch_size);
    for chunk in order.chunks(config.batch_size) {
        batch.clear();
        for &t in chunk {
            batch.push((t, corruptor.draw(t, rng)?));
        }
        total += sgd_step(&batch, model, config)? * chunk.len() as f64;
    }
    model.embeddings.normalize_rows();
    Ok(total / order.len() as f64)
}

/// Trains a freshly initialized model on the positives of `train`, early
/// stopping on AUC-PR over `valid`, and returns the best snapshot.
pub fn train(
    dict: &Dictionary,
    spec: ModelSpec,
    train: &TripleSet,
    valid: &TripleSet,
    config: &TrainConfig,
    hooks: &mut dyn TrainHooks,
) -> Result<(Model, TrainTrace)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let model = Model::random(
        spec.form,
        spec.dim_d,
        spec.dim_p,
        dict.relation_flags().to_vec(),
        &mut rng,
    );
    train_model(model, dict, train, valid, config, &mut rng, hooks)
}

/// Like [`train`] but starting from an existing model.
pub fn train_model<R: Rng + ?Sized>(
    mut model: Model,
    dict: &Dictionary,
    train: &TripleSet,
    valid: &TripleSet,
    config: &TrainConfig,
    rng: &mut R,
    hooks: &mut dyn TrainHooks,
) -> Result<(Model, TrainTrace)> {
    config.validate()?;
    if valid.is_empty() {
        return Err(Error::Config("validation set is empty".into()));
    }
    let positives: Vec<Triple> = positives_of(train).triples().collect();
    if positives.is_empty() {
        return Err(Error::Config("no positive training triples".into()));
    }
    let corruptor = Corruptor::new(dict, config.corruption);

    let mut trace = TrainTrace::default();
    let mut best: Option<(f64, Model)> = None;
    let mut stale = 0;
    for epoch in 1..=config.epochs_max {
        let start = hooks.now();
        let loss = run_epoch(&mut model, &positives, &corruptor, config, rng)?;
        let val_auc = auc_pr(&score_set(&model, valid)?)?;
        let record = EpochRecord {
            epoch,
            loss,
            val_auc,
            secs: hooks.now() - start,
        };
        hooks.on_epoch(&record);
        trace.epochs.push(record);

        if best.as_ref().is_none_or(|(b, _)| val_auc > *b) {
            best = Some((val_auc, model.clone()));
            trace.best_epoch = epoch;
            stale = 0;
        } else {
            stale += 1;
            if config.patience.is_some_and(|p| stale >= p) {
                break;
            }
        }
    }
    let (_, model) = best.expect("at least one epoch ran");
    Ok((model, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn all_mode_touches_every_slot() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let entities = [0, 1, 2, 4];
        let relations = [3, 5];
        let t = Triple::new(0, 3, 1);
        let mut slots = [0usize; 3];
        for _ in 0..3000 {
            let c =
                corrupt_triple(t, CorruptionMode::All, &entities, &relations, &mut rng).unwrap();
            let changed = [c.lhs != t.lhs, c.rel != t.rel, c.rhs != t.rhs];
            assert_eq!(changed.iter().filter(|&&x| x).count(), 1);
            if c.rel != t.rel {
                assert_eq!(c.rel, 5);
            }
            for (s, ch) in slots.iter_mut().zip(changed) {
                *s += ch as usize;
            }
        }
        assert!(slots.iter().all(|&n| (900..1100).contains(&n)), "{slots:?}");
        // a single relation type leaves only entity slots
        let c = corrupt_triple(t, CorruptionMode::All, &entities, &[3], &mut rng).unwrap();
        assert_eq!(c.rel, 3);
    }

    #[test]
    fn loss_values() {
        assert_eq!(ranking_loss(-2.0, -1.0, 1.0), 0.0);
        assert_eq!(ranking_loss(0.3, 0.3, 1.0), 1.0);
        assert_eq!(ranking_loss(0.5, -0.25, 1.0), 1.75);
    }

    #[test]
    fn corrupt_replaces_requested_slot() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let entities = [0, 1, 3, 4, 5];
        let t = Triple::new(0, 2, 3);
        for _ in 0..100 {
            let c = corrupt(t, CorruptionMode::Rhs, &entities, &mut rng).unwrap();
            assert_eq!((c.lhs, c.rel), (0, 2));
            assert_ne!(c.rhs, 3);
            assert!(entities.contains(&c.rhs));
            let c = corrupt(t, CorruptionMode::Lhs, &entities, &mut rng).unwrap();
            assert_eq!((c.rel, c.rhs), (2, 3));
            assert_ne!(c.lhs, 0);
            let c = corrupt(t, CorruptionMode::Both, &entities, &mut rng).unwrap();
            assert!((c.lhs != 0) ^ (c.rhs != 3));
        }
    }

    #[test]
    fn corrupt_forced_choice_and_degenerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = Triple::new(0, 2, 1);
        for _ in 0..20 {
            assert_eq!(
                corrupt(t, CorruptionMode::Rhs, &[0, 1], &mut rng)
                    .unwrap()
                    .rhs,
                0
            );
        }
        assert!(matches!(
            corrupt(t, CorruptionMode::Rhs, &[0], &mut rng),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        for bad in [
            TrainConfig {
                epochs_max: 0,
                ..Default::default()
            },
            TrainConfig {
                batch_size: 0,
                ..Default::default()
            },
            TrainConfig {
                margin: 0.0,
                ..Default::default()
            },
            TrainConfig {
                learning_rate: -1.0,
                ..Default::default()
            },
        ] {
            assert!(matches!(bad.validate(), Err(Error::Config(_))));
        }
    }

    #[test]
    fn fold_seeds_differ() {
        assert_eq!(fold_seed(7, 0), 7);
        assert_ne!(fold_seed(7, 1), fold_seed(7, 2));
    }
}
