//! Symbol dictionaries, labelled triple sets and cross-validation folds.
//!
//! The text format is one record per line, `lhs<TAB>rel<TAB>rhs<TAB>label`
//! with `label` in `{0, 1}`. Blank lines and lines starting with `#` are
//! skipped. An unlabelled three-column list of positives can instead be
//! expanded to its closed world with [`parse_closed_world`].

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{SymbolId, Triple};

/// Bijection between symbol strings and ids `0..len`, with the subset of ids
/// that are relation types.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dictionary {
    symbols: Vec<String>,
    index: BTreeMap<String, SymbolId>,
    relations: Vec<bool>,
}

impl Dictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rebuilds a dictionary from its ordered symbol list and relation flags.
    pub fn from_parts(symbols: Vec<String>, relations: Vec<bool>) -> Result<Self> {
        if symbols.len() != relations.len() {
            return Err(Error::Integrity(format!(
                "{} symbols but {} relation flags",
                symbols.len(),
                relations.len()
            )));
        }
        let mut index = BTreeMap::new();
        for (id, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), id).is_some() {
                return Err(Error::Integrity(format!("duplicate symbol `{s}`")));
            }
        }
        Ok(Self {
            symbols,
            index,
            relations,
        })
    }

    /// Returns the id of `symbol`, registering it if unseen.
    pub fn intern(&mut self, symbol: &str) -> SymbolId {
        if let Some(&id) = self.index.get(symbol) {
            return id;
        }
        let id = self.symbols.len();
        self.symbols.push(symbol.to_string());
        self.index.insert(symbol.to_string(), id);
        self.relations.push(false);
        id
    }

    pub fn mark_relation(&mut self, id: SymbolId) {
        self.relations[id] = true;
    }

    pub fn id(&self, symbol: &str) -> Option<SymbolId> {
        self.index.get(symbol).copied()
    }

    pub fn symbol(&self, id: SymbolId) -> Option<&str> {
        self.symbols.get(id).map(String::as_str)
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn is_relation(&self, id: SymbolId) -> bool {
        self.relations.get(id).copied().unwrap_or(false)
    }

    pub fn relation_flags(&self) -> &[bool] {
        &self.relations
    }

    pub fn relation_count(&self) -> usize {
        self.relations.iter().filter(|&&r| r).count()
    }

    /// Ids that are not relation types; corruption samples from these.
    pub fn entity_ids(&self) -> Vec<SymbolId> {
        (0..self.len()).filter(|&id| !self.relations[id]).collect()
    }

    pub fn entity_count(&self) -> usize {
        self.len() - self.relation_count()
    }
}

/// One observed cell: a triple and whether it holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Record {
    pub triple: Triple,
    pub label: bool,
}

/// Labelled triples without duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TripleSet {
    records: Vec<Record>,
}

impl TripleSet {
    /// Fails with an integrity error if a triple occurs twice.
    pub fn new(records: Vec<Record>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for r in &records {
            if !seen.insert(r.triple) {
                return Err(Error::Integrity(format!(
                    "duplicate triple ({}, {}, {})",
                    r.triple.lhs, r.triple.rel, r.triple.rhs
                )));
            }
        }
        Ok(Self { records })
    }

    /// Builds a set of positive records from bare triples.
    pub fn positives(triples: impl IntoIterator<Item = Triple>) -> Result<Self> {
        Self::new(
            triples
                .into_iter()
                .map(|triple| Record {
                    triple,
                    label: true,
                })
                .collect(),
        )
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn positive_count(&self) -> usize {
        self.records.iter().filter(|r| r.label).count()
    }

    pub fn triples(&self) -> impl Iterator<Item = Triple> + '_ {
        self.records.iter().map(|r| r.triple)
    }

    fn subset(&self, indices: impl IntoIterator<Item = usize>) -> Self {
        Self {
            records: indices.into_iter().map(|i| self.records[i]).collect(),
        }
    }
}

/// Records with label 1, in their original order.
pub fn positives_of(ts: &TripleSet) -> TripleSet {
    TripleSet {
        records: ts.records.iter().copied().filter(|r| r.label).collect(),
    }
}

/// How the parser treats symbols missing from the dictionary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DictPolicy {
    /// Register unseen symbols.
    Extend,
    /// Reject unseen symbols.
    Frozen,
}

/// Parses a triple file into a fresh dictionary and triple set.
pub fn parse_triples(text: &str) -> Result<(Dictionary, TripleSet)> {
    let mut dict = Dictionary::new();
    let ts = parse_triples_into(text, &mut dict, DictPolicy::Extend)?;
    Ok((dict, ts))
}

/// Parses a triple file against `dict`. Every symbol in the relation column
/// is marked as a relation type.
pub fn parse_triples_into(
    text: &str,
    dict: &mut Dictionary,
    policy: DictPolicy,
) -> Result<TripleSet> {
    parse_lines(text, dict, policy, true)
}

/// Parses an unlabelled `lhs<TAB>rel<TAB>rhs` list and expands it to the
/// closed world: every (lhs, rel, rhs) over the listed entities and relation
/// types, labelled positive when listed.
pub fn parse_closed_world(text: &str) -> Result<(Dictionary, TripleSet)> {
    let mut dict = Dictionary::new();
    let listed = parse_lines(text, &mut dict, DictPolicy::Extend, false)?;
    let ts = closed_world(&dict, &listed);
    Ok((dict, ts))
}

/// All `relation × entity × entity` triples in id order, labelled positive
/// when `listed` holds them as positives.
pub fn closed_world(dict: &Dictionary, listed: &TripleSet) -> TripleSet {
    let positives: BTreeSet<Triple> = positives_of(listed).triples().collect();
    let entities = dict.entity_ids();
    let mut records = Vec::new();
    for rel in (0..dict.len()).filter(|&i| dict.is_relation(i)) {
        for &lhs in &entities {
            for &rhs in &entities {
                let triple = Triple::new(lhs, rel, rhs);
                records.push(Record {
                    triple,
                    label: positives.contains(&triple),
                });
            }
        }
    }
    TripleSet { records }
}

fn parse_lines(
    text: &str,
    dict: &mut Dictionary,
    policy: DictPolicy,
    labelled: bool,
) -> Result<TripleSet> {
    let fields_expected = if labelled { 4 } else { 3 };
    let mut records = Vec::new();
    let mut seen = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != fields_expected {
            return Err(parse_err(format!(
                "expected {fields_expected} tab-separated fields, found {}",
                fields.len()
            )));
        }
        let label = match fields.get(3) {
            None | Some(&"1") => true,
            Some(&"0") => false,
            Some(other) => return Err(parse_err(format!("label must be 0 or 1, found `{other}`"))),
        };
        let mut ids = [0; 3];
        for (slot, (&name, id)) in ["lhs", "rel", "rhs"]
            .iter()
            .zip(fields[..3].iter().zip(ids.iter_mut()))
        {
            if name.is_empty() {
                return Err(parse_err(format!("empty {slot} symbol")));
            }
            *id = match policy {
                DictPolicy::Extend => dict.intern(name),
                DictPolicy::Frozen => dict
                    .id(name)
                    .ok_or_else(|| parse_err(format!("symbol `{name}` not in dictionary")))?,
            };
        }
        if policy == DictPolicy::Extend {
            dict.mark_relation(ids[1]);
        }
        let triple = Triple::new(ids[0], ids[1], ids[2]);
        if !seen.insert(triple) {
            return Err(Error::Integrity(format!(
                "line {line_no}: duplicate triple ({}, {}, {})",
                fields[0], fields[1], fields[2]
            )));
        }
        records.push(Record { triple, label });
    }
    if records.is_empty() {
        return Err(Error::Integrity("no records in triple file".into()));
    }
    Ok(TripleSet { records })
}

/// Serializes records back to the text format.
pub fn write_triples(dict: &Dictionary, ts: &TripleSet) -> Result<String> {
    let mut out = String::new();
    for r in ts.records() {
        let name = |id| {
            dict.symbol(id).ok_or(Error::UnknownId {
                id,
                len: dict.len(),
            })
        };
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            name(r.triple.lhs)?,
            name(r.triple.rel)?,
            name(r.triple.rhs)?,
            u8::from(r.label)
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

/// A seeded partition of a triple set into `k` near-equal folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldSplit {
    k: usize,
    assignment: Vec<usize>,
    folds: Vec<Vec<usize>>,
}

/// Train, validation and test records of one cross-validation run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldData {
    pub train: TripleSet,
    pub valid: TripleSet,
    pub test: TripleSet,
}

/// Shuffles record indices with a seeded permutation and slices them into
/// `k` folds; the first `len % k` folds receive one extra record.
pub fn make_folds(ts: &TripleSet, k: usize, seed: u64) -> Result<FoldSplit> {
    let n = ts.len();
    if k < 2 {
        return Err(Error::Config(format!(
            "fold count must be at least 2, got {k}"
        )));
    }
    if k > n {
        return Err(Error::Config(format!(
            "fold count {k} exceeds record count {n}"
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let (base, extra) = (n / k, n % k);
    let mut assignment = alloc::vec![0; n];
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        let mut members = perm[start..start + size].to_vec();
        members.sort_unstable();
        for &i in &members {
            assignment[i] = f;
        }
        folds.push(members);
        start += size;
    }
    Ok(FoldSplit {
        k,
        assignment,
        folds,
    })
}

impl FoldSplit {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Fold index of every record, in record order.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        self.folds.iter().map(Vec::len).collect()
    }

    /// Run `i`: test is fold `i`, validation is fold `(i + 1) mod k` and the
    /// remaining folds train. With `k = 2` there is no third fold, so the
    /// training fold doubles as the validation set.
    pub fn fold(&self, ts: &TripleSet, i: usize) -> Result<FoldData> {
        if i >= self.k {
            return Err(Error::Config(format!(
                "fold {i} out of range for {} folds",
                self.k
            )));
        }
        if ts.len() != self.assignment.len() {
            return Err(Error::Config(
                "fold split built for a different triple set".into(),
            ));
        }
        let valid_fold = (i + 1) % self.k;
        let test = ts.subset(self.folds[i].iter().copied());
        let valid = ts.subset(self.folds[valid_fold].iter().copied());
        let train = if self.k == 2 {
            valid.clone()
        } else {
            ts.subset(
                (0..ts.len())
                    .filter(|&r| self.assignment[r] != i && self.assignment[r] != valid_fold),
            )
        };
        Ok(FoldData { train, valid, test })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const SAMPLE: &str = "# comment\na\tlikes\tb\t1\nb\tlikes\ta\t0\n\na\thates\tc\t1\n";

    #[test]
    fn parse_sample() {
        let (dict, ts) = parse_triples(SAMPLE).unwrap();
        assert_eq!(dict.symbols(), &["a", "likes", "b", "hates", "c"]);
        assert_eq!(dict.relation_count(), 2);
        assert_eq!(dict.entity_count(), 3);
        assert!(dict.is_relation(1) && dict.is_relation(3));
        assert_eq!(ts.len(), 3);
        assert_eq!(ts.positive_count(), 2);
        assert_eq!(ts.records()[1].triple, Triple::new(2, 1, 0));
    }

    #[test]
    fn closed_world_expansion() {
        let (dict, ts) = parse_closed_world("a\tr\tb\nb\ts\tc\n\nc\tr\tc\n").unwrap();
        assert_eq!(dict.entity_count(), 3);
        assert_eq!(dict.relation_count(), 2);
        assert_eq!(ts.len(), 2 * 3 * 3);
        assert_eq!(ts.positive_count(), 3);
        let c = dict.id("c").unwrap();
        let r = dict.id("r").unwrap();
        assert!(ts
            .records()
            .iter()
            .any(|x| x.label && x.triple == Triple::new(c, r, c)));
        assert!(matches!(
            parse_closed_world("a\tr\tb\t1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_closed_world("a\tr\tb\na\tr\tb\n"),
            Err(Error::Integrity(_))
        ));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_triples("a\tr\tb\t1\na\tr\tb\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_triples("a\tr\tb\t2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_triples("a\t\tb\t1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_triples("a\tr\tb\t1\na\tr\tb\t0\n").unwrap_err();
        assert!(matches!(err, Error::Integrity(_)));
        assert!(matches!(
            parse_triples("# only\n"),
            Err(Error::Integrity(_))
        ));
    }

    #[test]
    fn frozen_policy_rejects_unknown() {
        let (mut dict, _) = parse_triples(SAMPLE).unwrap();
        assert!(parse_triples_into("a\tlikes\tc\t1\n", &mut dict, DictPolicy::Frozen).is_ok());
        let err = parse_triples_into("a\tlikes\tz\t1\n", &mut dict, DictPolicy::Frozen);
        assert!(matches!(err, Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn write_then_parse_roundtrip() {
        let (dict, ts) = parse_triples(SAMPLE).unwrap();
        let text = write_triples(&dict, &ts).unwrap();
        let (dict2, ts2) = parse_triples(&text).unwrap();
        assert_eq!(dict, dict2);
        assert_eq!(ts, ts2);
    }

    #[test]
    fn positives_filter_keeps_order() {
        let records: Vec<Record> = (0..10)
            .map(|i| Record {
                triple: Triple::new(i, 0, i),
                label: matches!(i, 2 | 5 | 7),
            })
            .collect();
        let ts = TripleSet::new(records).unwrap();
        let pos: Vec<_> = positives_of(&ts).triples().map(|t| t.lhs).collect();
        assert_eq!(pos, [2, 5, 7]);

        let zeros = TripleSet::new(vec![Record {
            triple: Triple::new(0, 1, 2),
            label: false,
        }])
        .unwrap();
        assert!(positives_of(&zeros).is_empty());
    }

    fn toy(n: usize) -> TripleSet {
        TripleSet::new(
            (0..n)
                .map(|i| Record {
                    triple: Triple::new(i, 0, 0),
                    label: i % 2 == 0,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn folds_partition_and_balance() {
        let ts = toy(4);
        let split = make_folds(&ts, 2, 9).unwrap();
        assert_eq!(split.fold_sizes(), [2, 2]);

        let ts = toy(103);
        let split = make_folds(&ts, 10, 1).unwrap();
        let sizes = split.fold_sizes();
        assert_eq!(sizes.iter().sum::<usize>(), 103);
        assert!(sizes.iter().all(|&s| s == 10 || s == 11));
        assert_eq!(split, make_folds(&ts, 10, 1).unwrap());
        assert_ne!(
            split.assignment(),
            make_folds(&ts, 10, 2).unwrap().assignment()
        );

        let mut tested = alloc::vec![0; ts.len()];
        for i in 0..10 {
            let data = split.fold(&ts, i).unwrap();
            assert_eq!(data.train.len() + data.valid.len() + data.test.len(), 103);
            for t in data.test.triples() {
                tested[t.lhs] += 1;
            }
        }
        assert!(tested.iter().all(|&c| c == 1));
    }

    #[test]
    fn two_folds_train_on_other_fold() {
        let ts = toy(6);
        let split = make_folds(&ts, 2, 3).unwrap();
        let data = split.fold(&ts, 0).unwrap();
        assert_eq!(data.train, data.valid);
        assert_eq!(data.train.len() + data.test.len(), 6);
    }

    #[test]
    fn fold_config_errors() {
        let ts = toy(3);
        assert!(matches!(make_folds(&ts, 4, 0), Err(Error::Config(_))));
        assert!(matches!(make_folds(&ts, 1, 0), Err(Error::Config(_))));
        assert!(make_folds(&ts, 2, 0).unwrap().fold(&ts, 2).is_err());
    }
}
