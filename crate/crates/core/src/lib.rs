#![no_std]

//! Semantic matching energy model for multi-relational data.
//!
//! Entities and relation types share one embedding space. The energy of a
//! triple `(lhs, rel, rhs)` compares relation-dependent transforms of its
//! two arguments, and training pushes observed triples below random
//! corruptions of them. Link prediction quality is measured as the area
//! under the precision-recall curve over held-out labelled triples.
//!
//! The crate needs only `alloc`; file formats, clocks and the command-line
//! front end live in the `sme` crate.

extern crate alloc;

pub mod dataset;
pub mod error;
pub mod eval;
pub mod model;
pub mod tensor;
pub mod trainer;

pub use dataset::{
    closed_world, make_folds, parse_closed_world, parse_triples, parse_triples_into, positives_of,
    DictPolicy, Dictionary, FoldData, FoldSplit, Record, TripleSet,
};
pub use error::{Error, Result};
pub use eval::{
    auc_pr, cross_validate, pr_curve, run_fold, score_set, EvalReport, FoldOutcome, PrPoint,
    ScoredSet, Scorer,
};
pub use model::{
    energy, energy_gradients, BilinearParams, EmbeddingTable, EnergyGradients, Form, LinearParams,
    Model, Params, SymbolId, Triple,
};
pub use tensor::{Matrix, Tensor3};
pub use trainer::{
    corrupt, corrupt_triple, ranking_loss, sgd_step, train, CorruptionMode, Corruptor, EpochRecord,
    ModelSpec, NoHooks, TrainConfig, TrainHooks, TrainTrace,
};
