//! Implementations of the `inspect`, `train`, `eval` and `score`
//! subcommands.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use sme_core::{
    cross_validate, make_folds, run_fold, trainer::fold_seed, Dictionary, EpochRecord, EvalReport,
    FoldOutcome, FoldSplit, TrainHooks, TrainTrace, Triple, TripleSet,
};

use crate::config::{DatasetRef, Overrides, RunConfig};
use crate::error::{AppError, Result};
use crate::model_file::{self, SavedModel};
use crate::report::{self, ReportFile};

/// Verbosity from `SME_LOG`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LogLevel {
    Quiet,
    Info,
    Debug,
}

impl LogLevel {
    pub fn from_env() -> Result<Self> {
        match std::env::var("SME_LOG") {
            Err(_) => Ok(LogLevel::Info),
            Ok(v) => match v.as_str() {
                "quiet" => Ok(LogLevel::Quiet),
                "info" | "" => Ok(LogLevel::Info),
                "debug" => Ok(LogLevel::Debug),
                other => Err(AppError::Usage(format!(
                    "SME_LOG must be quiet, info or debug, got `{other}`"
                ))),
            },
        }
    }
}

/// Writes `epoch=… loss=… val_auc=… secs=…` lines, optionally prefixed with
/// the fold index.
pub struct TraceHooks<'a> {
    start: Instant,
    fold: Option<usize>,
    level: LogLevel,
    out: &'a Mutex<Box<dyn Write + Send>>,
}

impl<'a> TraceHooks<'a> {
    pub fn new(
        fold: Option<usize>,
        level: LogLevel,
        out: &'a Mutex<Box<dyn Write + Send>>,
    ) -> Self {
        Self {
            start: Instant::now(),
            fold,
            level,
            out,
        }
    }
}

pub fn trace_line(r: &EpochRecord) -> String {
    format!(
        "epoch={} loss={:.6} val_auc={:.6} secs={:.3}",
        r.epoch, r.loss, r.val_auc, r.secs
    )
}

impl TrainHooks for TraceHooks<'_> {
    fn now(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    fn on_epoch(&mut self, record: &EpochRecord) {
        if self.level == LogLevel::Quiet {
            return;
        }
        let line = match self.fold {
            Some(f) => format!("fold={f} {}", trace_line(record)),
            None => trace_line(record),
        };
        let mut out = self.out.lock().unwrap();
        let _ = writeln!(out, "{line}");
        let _ = out.flush();
    }
}

pub fn stdout_sink() -> Mutex<Box<dyn Write + Send>> {
    Mutex::new(Box::new(std::io::stdout()))
}

// ---------------------------------------------------------------------------
// inspect
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetStats {
    pub entities: usize,
    pub relations: usize,
    pub records: usize,
    pub positives: usize,
}

impl DatasetStats {
    pub fn of(dict: &Dictionary, ts: &TripleSet) -> Self {
        Self {
            entities: dict.entity_count(),
            relations: dict.relation_count(),
            records: ts.len(),
            positives: ts.positive_count(),
        }
    }

    pub fn valid_percent(&self) -> f64 {
        100.0 * self.positives as f64 / self.records as f64
    }

    /// `entities=… relations=… records=… valid=…%` with the percentage to
    /// three significant digits.
    pub fn line(&self) -> String {
        format!(
            "entities={} relations={} records={} valid={}%",
            self.entities,
            self.relations,
            self.records,
            three_significant(self.valid_percent())
        )
    }
}

/// Rounds to three significant digits and drops trailing zeros.
pub fn three_significant(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (2 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}

pub fn inspect(dataset: &Path) -> Result<DatasetStats> {
    let (dict, ts) = DatasetRef::open(dataset)?.load()?;
    Ok(DatasetStats::of(&dict, &ts))
}

// ---------------------------------------------------------------------------
// train / eval
// ---------------------------------------------------------------------------

struct Prepared {
    name: String,
    dict: Dictionary,
    records: TripleSet,
    split: FoldSplit,
    config: RunConfig,
}

fn prepare(dataset: &Path, flags: &Overrides) -> Result<Prepared> {
    let data = DatasetRef::open(dataset)?;
    let config = RunConfig::resolve(&data.manifest, flags)?;
    let (dict, records) = data.load()?;
    let split = make_folds(&records, config.folds, config.train.seed)?;
    Ok(Prepared {
        name: data.name(),
        dict,
        records,
        split,
        config,
    })
}

/// Trains on fold `fold` (its train records, early stopping on its
/// validation fold) and writes the best model to `out`.
pub fn train(
    dataset: &Path,
    flags: &Overrides,
    fold: usize,
    out: &Path,
    level: LogLevel,
    sink: &Mutex<Box<dyn Write + Send>>,
) -> Result<TrainTrace> {
    let p = prepare(dataset, flags)?;
    if level == LogLevel::Debug {
        eprintln!("dataset={} config={:?}", p.name, p.config);
    }
    let data = p.split.fold(&p.records, fold)?;
    let config = sme_core::TrainConfig {
        seed: fold_seed(p.config.train.seed, fold),
        ..p.config.train.clone()
    };
    let mut hooks = TraceHooks::new(None, level, sink);
    let (model, trace) = sme_core::train(
        &p.dict,
        p.config.spec,
        &data.train,
        &data.valid,
        &config,
        &mut hooks,
    )?;
    model_file::save(
        out,
        &SavedModel {
            dictionary: p.dict,
            model,
        },
    )?;
    Ok(trace)
}

/// Where `eval` writes its outputs.
#[derive(Debug, Clone, Default)]
pub struct EvalOutputs {
    /// Writes `<prefix>.txt` and `<prefix>.json`.
    pub prefix: Option<PathBuf>,
    /// Also writes `<prefix>.pr.tsv` with every fold's PR curve.
    pub curves: bool,
}

/// Cross-validates the configured model. With `jobs > 1` folds run on
/// separate threads; each fold is still deterministic.
pub fn eval(
    dataset: &Path,
    flags: &Overrides,
    jobs: usize,
    outputs: &EvalOutputs,
    level: LogLevel,
    sink: &Mutex<Box<dyn Write + Send>>,
) -> Result<(ReportFile, EvalReport)> {
    let p = prepare(dataset, flags)?;
    if level == LogLevel::Debug {
        eprintln!("dataset={} config={:?}", p.name, p.config);
    }
    let report = if jobs <= 1 {
        let mut hooks = TraceHooks::new(None, level, sink);
        cross_validate(
            &p.dict,
            &p.records,
            &p.split,
            p.config.spec,
            &p.config.train,
            &mut hooks,
        )?
    } else {
        EvalReport::from_outcomes(&parallel_folds(&p, jobs, level, sink)?)
    };
    let file = ReportFile::new(&p.name, &p.config, &report);
    if let Some(prefix) = &outputs.prefix {
        report::write(&with_suffix(prefix, ".txt"), &file.to_text())?;
        report::write(&with_suffix(prefix, ".json"), &file.to_json())?;
        if outputs.curves {
            report::write(
                &with_suffix(prefix, ".pr.tsv"),
                &report::curves_tsv(&report.curves),
            )?;
        }
    }
    Ok((file, report))
}

fn parallel_folds(
    p: &Prepared,
    jobs: usize,
    level: LogLevel,
    sink: &Mutex<Box<dyn Write + Send>>,
) -> Result<Vec<FoldOutcome>> {
    let k = p.split.k();
    let results: Vec<Result<FoldOutcome>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs.min(k))
            .map(|worker| {
                scope.spawn(move || {
                    (worker..k)
                        .step_by(jobs)
                        .map(|fold| {
                            let mut hooks = TraceHooks::new(Some(fold), level, sink);
                            run_fold(
                                &p.dict,
                                &p.records,
                                &p.split,
                                fold,
                                p.config.spec,
                                &p.config.train,
                                &mut hooks,
                            )
                            .map_err(AppError::from)
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("fold worker panicked"))
            .collect()
    });
    let mut outcomes = results.into_iter().collect::<Result<Vec<_>>>()?;
    outcomes.sort_by_key(|o| o.fold);
    Ok(outcomes)
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

/// Resolves symbol names against the model's dictionary.
pub fn resolve_triple(dict: &Dictionary, names: &[String; 3]) -> Result<Triple> {
    let id = |s: &String| dict.id(s).ok_or_else(|| AppError::UnknownSymbol(s.clone()));
    Ok(Triple::new(id(&names[0])?, id(&names[1])?, id(&names[2])?))
}

/// `-energy` of every triple.
pub fn score(model_path: &Path, triples: &[[String; 3]]) -> Result<Vec<f64>> {
    let saved = model_file::load(model_path)?;
    triples
        .iter()
        .map(|names| {
            let t = resolve_triple(&saved.dictionary, names)?;
            Ok(saved.model.score(t)?)
        })
        .collect()
}

/// Parses `lhs<TAB>rel<TAB>rhs` lines (a fourth label column is ignored).
pub fn parse_score_input(text: &str) -> Result<Vec<[String; 3]>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| {
            let f: Vec<&str> = l.trim_end_matches('\r').split('\t').collect();
            if f.len() < 3 || f.len() > 4 {
                return Err(AppError::Usage(format!(
                    "stdin line {}: expected lhs<TAB>rel<TAB>rhs",
                    i + 1
                )));
            }
            Ok([f[0].to_owned(), f[1].to_owned(), f[2].to_owned()])
        })
        .collect()
}
