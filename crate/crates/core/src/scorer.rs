//! Micro-averaged precision, recall and F1 for NER and relation extraction,
//! overall and per lexical-overlap partition.
//!
//! A mention is correct when both boundaries and its type match. A relation
//! is correct under [`MatchSetting::RelBoundaries`] when its type and both
//! argument spans match, and under [`MatchSetting::RelStrict`] when the
//! argument entity types match as well.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::corpus::{CaseMode, Mention, Relation, Sentence, Split};
use crate::error::{AlignmentError, Error, Result};
use crate::partition::{MentionPartition, RelationPartition, TrainIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MatchSetting {
    Ner,
    RelBoundaries,
    RelStrict,
}

impl MatchSetting {
    pub const ALL: [MatchSetting; 3] = [
        MatchSetting::Ner,
        MatchSetting::RelBoundaries,
        MatchSetting::RelStrict,
    ];

    pub fn label(self) -> &'static str {
        match self {
            MatchSetting::Ner => "ner",
            MatchSetting::RelBoundaries => "boundaries",
            MatchSetting::RelStrict => "strict",
        }
    }

    pub fn is_relation(self) -> bool {
        !matches!(self, MatchSetting::Ner)
    }

    /// Partition labels reported for this setting, in display order.
    pub fn partition_labels(self) -> Vec<&'static str> {
        match self {
            MatchSetting::Ner => MentionPartition::ALL.iter().map(|p| p.label()).collect(),
            _ => RelationPartition::ALL.iter().map(|p| p.label()).collect(),
        }
    }
}

impl fmt::Display for MatchSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for MatchSetting {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ner" => Ok(MatchSetting::Ner),
            "boundaries" | "rel-boundaries" => Ok(MatchSetting::RelBoundaries),
            "strict" | "rel-strict" => Ok(MatchSetting::RelStrict),
            other => Err(format!(
                "unknown setting '{other}' (expected ner, boundaries or strict)"
            )),
        }
    }
}

impl Serialize for MatchSetting {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NerKey {
    pub start: usize,
    pub end: usize,
    pub entity_type: String,
}

pub fn ner_key(mention: &Mention) -> NerKey {
    NerKey {
        start: mention.start,
        end: mention.end,
        entity_type: mention.entity_type.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationKey {
    pub head: (usize, usize),
    pub tail: (usize, usize),
    pub relation_type: String,
    /// Head and tail entity types; present only under the strict setting.
    pub argument_types: Option<(String, String)>,
}

/// Comparison key of a relation. `setting` must be a relation setting; NER
/// is treated as strict.
pub fn relation_key(
    sentence: &Sentence,
    relation: &Relation,
    setting: MatchSetting,
) -> RelationKey {
    let head = sentence.head(relation);
    let tail = sentence.tail(relation);
    RelationKey {
        head: head.span(),
        tail: tail.span(),
        relation_type: relation.relation_type.clone(),
        argument_types: match setting {
            MatchSetting::RelBoundaries => None,
            _ => Some((head.entity_type.clone(), tail.entity_type.clone())),
        },
    }
}

/// True-positive, false-positive and false-negative counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct PrfCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl PrfCounts {
    pub fn new(tp: u64, fp: u64, fn_: u64) -> Self {
        Self { tp, fp, fn_ }
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    pub fn gold(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn predicted(&self) -> u64 {
        self.tp + self.fp
    }
}

impl std::ops::Add for PrfCounts {
    type Output = PrfCounts;

    fn add(self, rhs: Self) -> Self {
        PrfCounts::new(self.tp + rhs.tp, self.fp + rhs.fp, self.fn_ + rhs.fn_)
    }
}

impl std::ops::AddAssign for PrfCounts {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl std::iter::Sum for PrfCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(PrfCounts::default(), |a, b| a + b)
    }
}

impl Serialize for PrfCounts {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("PrfCounts", 6)?;
        s.serialize_field("tp", &self.tp)?;
        s.serialize_field("fp", &self.fp)?;
        s.serialize_field("fn", &self.fn_)?;
        s.serialize_field("precision", &self.precision())?;
        s.serialize_field("recall", &self.recall())?;
        s.serialize_field("f1", &self.f1())?;
        s.end()
    }
}

/// Counts of two key sets. Keys must already be scoped to their sentence.
pub fn micro_prf<K: Ord>(gold: &BTreeSet<K>, pred: &BTreeSet<K>) -> PrfCounts {
    let tp = gold.intersection(pred).count() as u64;
    PrfCounts::new(tp, pred.len() as u64 - tp, gold.len() as u64 - tp)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SettingReport {
    pub setting: MatchSetting,
    pub overall: PrfCounts,
    /// Per-partition counts keyed by partition label; every label of the
    /// setting is present.
    pub partitions: BTreeMap<&'static str, PrfCounts>,
}

impl SettingReport {
    fn empty(setting: MatchSetting) -> Self {
        Self {
            setting,
            overall: PrfCounts::default(),
            partitions: setting
                .partition_labels()
                .into_iter()
                .map(|l| (l, PrfCounts::default()))
                .collect(),
        }
    }

    pub fn partition(&self, label: &str) -> PrfCounts {
        self.partitions.get(label).copied().unwrap_or_default()
    }

    /// Partition rows in display order.
    pub fn ordered_partitions(&self) -> Vec<(&'static str, PrfCounts)> {
        self.setting
            .partition_labels()
            .into_iter()
            .map(|l| (l, self.partition(l)))
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EvalReport {
    pub case_mode: CaseMode,
    pub settings: Vec<SettingReport>,
}

impl EvalReport {
    pub fn setting(&self, setting: MatchSetting) -> Option<&SettingReport> {
        self.settings.iter().find(|s| s.setting == setting)
    }
}

/// Pairs every gold sentence with the predicted sentence of the same id.
/// Ids must match one-to-one and paired sentences must have identical tokens.
pub fn align<'a>(gold: &'a Split, pred: &'a Split) -> Result<Vec<(&'a Sentence, &'a Sentence)>> {
    let by_id: HashMap<&str, &Sentence> = pred.iter().map(|s| (s.id.as_str(), s)).collect();
    let gold_ids: BTreeSet<&str> = gold.iter().map(|s| s.id.as_str()).collect();
    let mut err = AlignmentError::default();
    let mut pairs = Vec::with_capacity(gold.len());
    for g in gold {
        match by_id.get(g.id.as_str()) {
            None => err.missing.push(g.id.clone()),
            Some(p) if p.tokens != g.tokens => err.token_mismatch.push(g.id.clone()),
            Some(p) => pairs.push((g, *p)),
        }
    }
    err.extra = pred
        .iter()
        .filter(|s| !gold_ids.contains(s.id.as_str()))
        .map(|s| s.id.clone())
        .collect();
    if err.is_empty() {
        Ok(pairs)
    } else {
        Err(Error::Alignment(err))
    }
}

fn labelled_keys(
    index: &TrainIndex,
    sentence: &Sentence,
    setting: MatchSetting,
) -> BTreeMap<(Option<NerKey>, Option<RelationKey>), &'static str> {
    let case_mode = index.case_mode();
    match setting {
        MatchSetting::Ner => sentence
            .mentions
            .iter()
            .map(|m| {
                let label = index
                    .partition_mention(&sentence.mention_surface(m, case_mode))
                    .label();
                ((Some(ner_key(m)), None), label)
            })
            .collect(),
        _ => sentence
            .relations
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let label = index.partition_sentence_relation(sentence, i).label();
                ((None, Some(relation_key(sentence, r, setting))), label)
            })
            .collect(),
    }
}

fn score_sentence(
    index: &TrainIndex,
    gold: &Sentence,
    pred: &Sentence,
    setting: MatchSetting,
    into: &mut SettingReport,
) {
    let gold_keys = labelled_keys(index, gold, setting);
    let pred_keys = labelled_keys(index, pred, setting);
    let mut bump = |label: &'static str, counts: PrfCounts| {
        into.overall += counts;
        *into.partitions.entry(label).or_default() += counts;
    };
    for (key, &label) in &gold_keys {
        if pred_keys.contains_key(key) {
            bump(label, PrfCounts::new(1, 0, 0));
        } else {
            bump(label, PrfCounts::new(0, 0, 1));
        }
    }
    for (key, &label) in &pred_keys {
        if !gold_keys.contains_key(key) {
            bump(label, PrfCounts::new(0, 1, 0));
        }
    }
}

/// Scores `pred` against `gold` for each requested setting.
///
/// Gold items contribute their tp/fn to their own partition; unmatched
/// predictions contribute fp to the partition of their own surfaces.
pub fn evaluate(
    index: &TrainIndex,
    gold: &Split,
    pred: &Split,
    settings: &[MatchSetting],
) -> Result<EvalReport> {
    let pairs = align(gold, pred)?;
    let mut report = EvalReport {
        case_mode: index.case_mode(),
        settings: settings.iter().map(|&s| SettingReport::empty(s)).collect(),
    };
    for setting_report in &mut report.settings {
        let setting = setting_report.setting;
        for (g, p) in &pairs {
            score_sentence(index, g, p, setting, setting_report);
        }
    }
    Ok(report)
}
