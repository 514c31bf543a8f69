//! Head/tail swap perturbation and reverse-relation scoring.
//!
//! For an asymmetric relation between two arguments of the same entity type,
//! the argument spans are exchanged inside the token sequence so that the
//! sentence now expresses the inverse direction. A model that still predicts
//! the original direction (`rev_gold`) is reproducing a triple it saw in
//! training rather than reading the sentence.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{CaseMode, Mention, Relation, Sentence, Split, SurfaceKey};
use crate::error::{Error, Result};
use crate::partition::{RelationPartition, TrainIndex};
use crate::scorer::{
    align, micro_prf, ner_key, relation_key, MatchSetting, PrfCounts, RelationKey,
};

pub const SWAP_SUFFIX: &str = "#swap";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapConfig {
    pub relation_type: String,
    /// Entity type both arguments must carry.
    pub required_entity_type: String,
    pub case_mode: CaseMode,
}

impl SwapConfig {
    pub fn new(relation_type: impl Into<String>, required_entity_type: impl Into<String>) -> Self {
        Self {
            relation_type: relation_type.into(),
            required_entity_type: required_entity_type.into(),
            case_mode: CaseMode::default(),
        }
    }
}

/// A typed argument located by span, independent of any mention list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpanArg {
    pub start: usize,
    pub end: usize,
    #[serde(rename = "type")]
    pub entity_type: String,
}

impl From<&Mention> for SpanArg {
    fn from(m: &Mention) -> Self {
        SpanArg {
            start: m.start,
            end: m.end,
            entity_type: m.entity_type.clone(),
        }
    }
}

/// Relation-shaped triple addressed by argument spans.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpanTriple {
    pub head: SpanArg,
    pub tail: SpanArg,
    #[serde(rename = "type")]
    pub relation_type: String,
}

impl SpanTriple {
    pub fn of(sentence: &Sentence, relation: &Relation) -> Self {
        SpanTriple {
            head: sentence.head(relation).into(),
            tail: sentence.tail(relation).into(),
            relation_type: relation.relation_type.clone(),
        }
    }

    pub fn strict_key(&self) -> RelationKey {
        RelationKey {
            head: (self.head.start, self.head.end),
            tail: (self.tail.start, self.tail.end),
            relation_type: self.relation_type.clone(),
            argument_types: Some((self.head.entity_type.clone(), self.tail.entity_type.clone())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapRecord {
    pub source_id: String,
    pub swapped: Sentence,
    /// Index of the swapped target relation in `swapped.relations`.
    pub target_relation_index: usize,
    /// The original head-to-tail direction, located at the arguments' new
    /// spans. No longer expressed by the swapped sentence.
    pub rev_gold: SpanTriple,
}

impl SwapRecord {
    pub fn gold(&self) -> SpanTriple {
        SpanTriple::of(
            &self.swapped,
            &self.swapped.relations[self.target_relation_index],
        )
    }

    pub fn map_entry(&self) -> SwapMapEntry {
        SwapMapEntry {
            source_id: self.source_id.clone(),
            swapped_id: self.swapped.id.clone(),
            target_relation_index: self.target_relation_index,
            rev_gold: self.rev_gold.clone(),
        }
    }
}

/// One entry of the sidecar map file linking swapped sentences to sources.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapMapEntry {
    pub rev_gold: SpanTriple,
    pub source_id: String,
    pub swapped_id: String,
    pub target_relation_index: usize,
}

/// Why a relation cannot be swapped, or `None` when it can.
fn ineligibility(
    sentence: &Sentence,
    relation_index: usize,
    required_type: Option<&str>,
) -> Option<String> {
    let Some(target) = sentence.relations.get(relation_index) else {
        return Some(format!("no relation at index {relation_index}"));
    };
    let same_type = sentence
        .relations
        .iter()
        .filter(|r| r.relation_type == target.relation_type)
        .count();
    if same_type != 1 {
        return Some(format!(
            "{same_type} relations of type {} in sentence",
            target.relation_type
        ));
    }
    let (head, tail) = (sentence.head(target), sentence.tail(target));
    if head.entity_type != tail.entity_type {
        return Some(format!(
            "argument types differ ({} vs {})",
            head.entity_type, tail.entity_type
        ));
    }
    if let Some(required) = required_type {
        if head.entity_type != required {
            return Some(format!(
                "arguments are {} but {required} is required",
                head.entity_type
            ));
        }
    }
    if head.overlaps(tail) {
        return Some("argument spans overlap".into());
    }
    let clash = sentence
        .mentions
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != target.head && i != target.tail)
        .any(|(_, m)| m.overlaps(head) || m.overlaps(tail));
    if clash {
        return Some("another mention overlaps an argument".into());
    }
    None
}

/// Sentences with exactly one relation of the configured type whose
/// arguments both carry the required entity type, are disjoint, and overlap
/// no other mention.
pub fn select_swappable<'a>(split: &'a Split, config: &SwapConfig) -> Vec<(&'a Sentence, usize)> {
    split
        .iter()
        .filter_map(|s| {
            let idx = s
                .relations
                .iter()
                .position(|r| r.relation_type == config.relation_type)?;
            ineligibility(s, idx, Some(&config.required_entity_type))
                .is_none()
                .then_some((s, idx))
        })
        .collect()
}

/// Id of the swapped copy; swapping a swapped sentence restores the source id.
fn swapped_id(id: &str) -> String {
    match id.strip_suffix(SWAP_SUFFIX) {
        Some(source) => source.to_owned(),
        None => format!("{id}{SWAP_SUFFIX}"),
    }
}

/// Position map for exchanging the disjoint spans `a` (earlier) and `b`.
struct Exchange {
    a: (usize, usize),
    b: (usize, usize),
}

impl Exchange {
    fn position(&self, p: usize) -> usize {
        let ((a_start, a_end), (b_start, b_end)) = (self.a, self.b);
        if p < a_start || p >= b_end {
            p
        } else if p < a_end {
            p + b_end - a_end
        } else if p < b_start {
            p + (b_end - b_start) - (a_end - a_start)
        } else {
            p - b_start + a_start
        }
    }

    fn span(&self, start: usize, end: usize) -> (usize, usize) {
        (self.position(start), self.position(end - 1) + 1)
    }
}

pub fn swap_sentence(sentence: &Sentence, relation_index: usize) -> Result<SwapRecord> {
    if let Some(reason) = ineligibility(sentence, relation_index, None) {
        return Err(Error::Eligibility {
            sentence_id: sentence.id.clone(),
            relation_index,
            reason,
        });
    }
    let target = &sentence.relations[relation_index];
    let (head, tail) = (sentence.head(target), sentence.tail(target));
    let (a, b) = if head.start < tail.start {
        (head, tail)
    } else {
        (tail, head)
    };
    let exchange = Exchange {
        a: a.span(),
        b: b.span(),
    };

    let mut tokens = vec![String::new(); sentence.tokens.len()];
    for (p, token) in sentence.tokens.iter().enumerate() {
        tokens[exchange.position(p)] = token.clone();
    }
    let mentions = sentence
        .mentions
        .iter()
        .map(|m| {
            let (start, end) = exchange.span(m.start, m.end);
            Mention::new(start, end, m.entity_type.clone())
        })
        .collect();
    let mut relations = sentence.relations.clone();
    // The former tail now occupies the head's position and is read first.
    relations[relation_index] =
        Relation::new(target.tail, target.head, target.relation_type.clone());

    let swapped = Sentence {
        id: swapped_id(&sentence.id),
        tokens,
        mentions,
        relations,
    };
    let rev_gold = SpanTriple::of(&swapped, target);
    Ok(SwapRecord {
        source_id: sentence.id.clone(),
        swapped,
        target_relation_index: relation_index,
        rev_gold,
    })
}

/// Swaps every eligible sentence of `split`.
pub fn generate_swaps(split: &Split, config: &SwapConfig) -> Result<Vec<SwapRecord>> {
    select_swappable(split, config)
        .into_iter()
        .map(|(s, i)| swap_sentence(s, i))
        .collect()
}

/// Rebuilds records from a swapped split and its sidecar map.
pub fn records_from_map(entries: &[SwapMapEntry], swapped: &Split) -> Result<Vec<SwapRecord>> {
    let mut missing = Vec::new();
    let mut records = Vec::with_capacity(entries.len());
    for e in entries {
        match swapped.get(&e.swapped_id) {
            Some(s) if e.target_relation_index < s.relations.len() => records.push(SwapRecord {
                source_id: e.source_id.clone(),
                swapped: s.clone(),
                target_relation_index: e.target_relation_index,
                rev_gold: e.rev_gold.clone(),
            }),
            _ => missing.push(e.swapped_id.clone()),
        }
    }
    if missing.is_empty() {
        Ok(records)
    } else {
        Err(Error::Alignment(crate::error::AlignmentError {
            missing,
            ..Default::default()
        }))
    }
}

/// Which of the two directions a model predicted on a swapped sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwapOutcome {
    SwappedOnly,
    OriginalOnly,
    Both,
    Neither,
}

impl SwapOutcome {
    pub const ALL: [SwapOutcome; 4] = [
        SwapOutcome::SwappedOnly,
        SwapOutcome::OriginalOnly,
        SwapOutcome::Both,
        SwapOutcome::Neither,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SwapOutcome::SwappedOnly => "swapped-only",
            SwapOutcome::OriginalOnly => "original-only",
            SwapOutcome::Both => "both",
            SwapOutcome::Neither => "neither",
        }
    }

    fn from_hits(swapped: bool, original: bool) -> Self {
        match (swapped, original) {
            (true, false) => SwapOutcome::SwappedOnly,
            (false, true) => SwapOutcome::OriginalOnly,
            (true, true) => SwapOutcome::Both,
            (false, false) => SwapOutcome::Neither,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SentenceOutcome {
    pub source_id: String,
    pub swapped_id: String,
    pub outcome: SwapOutcome,
    /// Overlap partition of the original triple against train, when a train
    /// index was supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub original_partition: Option<RelationPartition>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwapReport {
    pub relation_type: String,
    pub sentences: u64,
    pub ner: PrfCounts,
    /// Strict scores against the swapped gold, target relation type only.
    pub re: PrfCounts,
    /// Strict scores against the original direction, target relation type only.
    pub rev_re: PrfCounts,
    pub outcome_counts: BTreeMap<&'static str, u64>,
    pub outcomes: Vec<SentenceOutcome>,
}

type Scoped<K> = (String, K);

fn typed_relation_keys(sentence: &Sentence, relation_type: &str) -> BTreeSet<Scoped<RelationKey>> {
    sentence
        .relations
        .iter()
        .filter(|r| r.relation_type == relation_type)
        .map(|r| {
            (
                sentence.id.clone(),
                relation_key(sentence, r, MatchSetting::RelStrict),
            )
        })
        .collect()
}

/// Scores predictions on swapped sentences with strict RE and revRE,
/// restricted to `config.relation_type`.
pub fn score_swap(
    records: &[SwapRecord],
    pred: &Split,
    config: &SwapConfig,
    index: Option<&TrainIndex>,
) -> Result<SwapReport> {
    let swapped: Split = records.iter().map(|r| r.swapped.clone()).collect();
    let pairs = align(&swapped, pred)?;
    let mut sorted: Vec<(&SwapRecord, &Sentence)> = records
        .iter()
        .zip(pairs.into_iter().map(|(_, p)| p))
        .collect();
    sorted.sort_by(|x, y| x.0.source_id.cmp(&y.0.source_id));

    let rel = config.relation_type.as_str();
    let (mut gold, mut rev, mut predicted) = (BTreeSet::new(), BTreeSet::new(), BTreeSet::new());
    let (mut gold_ner, mut pred_ner) = (BTreeSet::new(), BTreeSet::new());
    let mut outcomes = Vec::with_capacity(sorted.len());
    for (record, p) in sorted {
        let id = &record.swapped.id;
        let sentence_gold = typed_relation_keys(&record.swapped, rel);
        let rev_key = (id.clone(), record.rev_gold.strict_key());
        let sentence_pred = typed_relation_keys(p, rel);
        let target_key = (id.clone(), record.gold().strict_key());

        outcomes.push(SentenceOutcome {
            source_id: record.source_id.clone(),
            swapped_id: id.clone(),
            outcome: SwapOutcome::from_hits(
                sentence_pred.contains(&target_key),
                sentence_pred.contains(&rev_key),
            ),
            original_partition: index.map(|ix| {
                let head = arg_surface(&record.swapped, &record.rev_gold.head, ix.case_mode());
                let tail = arg_surface(&record.swapped, &record.rev_gold.tail, ix.case_mode());
                ix.partition_relation(&head, &record.rev_gold.relation_type, &tail)
            }),
        });

        gold.extend(sentence_gold);
        rev.insert(rev_key);
        predicted.extend(sentence_pred);
        gold_ner.extend(
            record
                .swapped
                .mentions
                .iter()
                .map(|m| (id.clone(), ner_key(m))),
        );
        pred_ner.extend(p.mentions.iter().map(|m| (id.clone(), ner_key(m))));
    }

    let mut outcome_counts: BTreeMap<&'static str, u64> =
        SwapOutcome::ALL.iter().map(|o| (o.label(), 0)).collect();
    for o in &outcomes {
        *outcome_counts.entry(o.outcome.label()).or_default() += 1;
    }
    Ok(SwapReport {
        relation_type: config.relation_type.clone(),
        sentences: records.len() as u64,
        ner: micro_prf(&gold_ner, &pred_ner),
        re: micro_prf(&gold, &predicted),
        rev_re: micro_prf(&rev, &predicted),
        outcome_counts,
        outcomes,
    })
}

fn arg_surface(sentence: &Sentence, arg: &SpanArg, case_mode: CaseMode) -> SurfaceKey {
    SurfaceKey::from_tokens(&sentence.tokens[arg.start..arg.end], case_mode)
}
