//! Train-set lexical index and the Seen/Unseen, Exact/Partial/New partitions.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::corpus::{CaseMode, Sentence, Split, SurfaceKey};

/// Argument position inside a relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Head,
    Tail,
}

pub type LabelCounts = BTreeMap<String, u64>;

/// Aggregated surface-form statistics of a training split.
///
/// Only annotated mentions and relations contribute; raw text occurrences of
/// a string outside annotations are ignored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrainIndex {
    case_mode: CaseMode,
    mention_counts: BTreeMap<SurfaceKey, LabelCounts>,
    triple_counts: BTreeMap<(SurfaceKey, String, SurfaceKey), u64>,
    positional_counts: BTreeMap<(String, Role, SurfaceKey), u64>,
    pair_counts: BTreeMap<(SurfaceKey, SurfaceKey), LabelCounts>,
    typepair_counts: BTreeMap<(String, String), LabelCounts>,
    max_mention_tokens: usize,
}

impl TrainIndex {
    /// An index with no entries, as built from an empty train split.
    pub fn empty(case_mode: CaseMode) -> Self {
        Self {
            case_mode,
            ..Self::default()
        }
    }

    pub fn build(train: &Split, case_mode: CaseMode) -> Self {
        let mut index = Self::empty(case_mode);
        for sentence in train {
            index.add_sentence(sentence);
        }
        index
    }

    fn add_sentence(&mut self, sentence: &Sentence) {
        let surfaces: Vec<SurfaceKey> = sentence
            .mentions
            .iter()
            .map(|m| sentence.mention_surface(m, self.case_mode))
            .collect();
        for (m, surface) in sentence.mentions.iter().zip(&surfaces) {
            *self
                .mention_counts
                .entry(surface.clone())
                .or_default()
                .entry(m.entity_type.clone())
                .or_default() += 1;
            self.max_mention_tokens = self.max_mention_tokens.max(m.len());
        }
        for r in &sentence.relations {
            let (head, tail) = (&surfaces[r.head], &surfaces[r.tail]);
            let ty = &r.relation_type;
            *self
                .triple_counts
                .entry((head.clone(), ty.clone(), tail.clone()))
                .or_default() += 1;
            *self
                .positional_counts
                .entry((ty.clone(), Role::Head, head.clone()))
                .or_default() += 1;
            *self
                .positional_counts
                .entry((ty.clone(), Role::Tail, tail.clone()))
                .or_default() += 1;
            *self
                .pair_counts
                .entry((head.clone(), tail.clone()))
                .or_default()
                .entry(ty.clone())
                .or_default() += 1;
            let types = (
                sentence.head(r).entity_type.clone(),
                sentence.tail(r).entity_type.clone(),
            );
            *self
                .typepair_counts
                .entry(types)
                .or_default()
                .entry(ty.clone())
                .or_default() += 1;
        }
    }

    pub fn case_mode(&self) -> CaseMode {
        self.case_mode
    }

    pub fn is_empty(&self) -> bool {
        self.mention_counts.is_empty() && self.triple_counts.is_empty()
    }

    /// Longest annotated train mention, in tokens.
    pub fn max_mention_tokens(&self) -> usize {
        self.max_mention_tokens
    }

    pub fn mention_counts(&self) -> &BTreeMap<SurfaceKey, LabelCounts> {
        &self.mention_counts
    }

    pub fn triple_counts(&self) -> &BTreeMap<(SurfaceKey, String, SurfaceKey), u64> {
        &self.triple_counts
    }

    pub fn positional_counts(&self) -> &BTreeMap<(String, Role, SurfaceKey), u64> {
        &self.positional_counts
    }

    pub fn pair_counts(&self) -> &BTreeMap<(SurfaceKey, SurfaceKey), LabelCounts> {
        &self.pair_counts
    }

    pub fn typepair_counts(&self) -> &BTreeMap<(String, String), LabelCounts> {
        &self.typepair_counts
    }

    pub fn mention_types(&self, surface: &SurfaceKey) -> Option<&LabelCounts> {
        self.mention_counts.get(surface)
    }

    pub fn pair_types(&self, head: &SurfaceKey, tail: &SurfaceKey) -> Option<&LabelCounts> {
        // BTreeMap cannot be queried by a tuple of references.
        self.pair_counts.get(&(head.clone(), tail.clone()))
    }

    pub fn typepair_types(&self, head_type: &str, tail_type: &str) -> Option<&LabelCounts> {
        self.typepair_counts
            .get(&(head_type.to_owned(), tail_type.to_owned()))
    }

    pub fn triple_count(&self, head: &SurfaceKey, relation_type: &str, tail: &SurfaceKey) -> u64 {
        self.triple_counts
            .get(&(head.clone(), relation_type.to_owned(), tail.clone()))
            .copied()
            .unwrap_or(0)
    }

    pub fn positional_count(&self, relation_type: &str, role: Role, surface: &SurfaceKey) -> u64 {
        self.positional_counts
            .get(&(relation_type.to_owned(), role, surface.clone()))
            .copied()
            .unwrap_or(0)
    }

    pub fn partition_mention(&self, surface: &SurfaceKey) -> MentionPartition {
        if self.mention_counts.contains_key(surface) {
            MentionPartition::Seen
        } else {
            MentionPartition::Unseen
        }
    }

    pub fn partition_relation(
        &self,
        head: &SurfaceKey,
        relation_type: &str,
        tail: &SurfaceKey,
    ) -> RelationPartition {
        if self.triple_count(head, relation_type, tail) > 0 {
            RelationPartition::ExactMatch
        } else if self.positional_count(relation_type, Role::Head, head) > 0
            || self.positional_count(relation_type, Role::Tail, tail) > 0
        {
            RelationPartition::PartialMatch
        } else {
            RelationPartition::New
        }
    }

    /// Partition of the `relation_index`-th relation of a validated sentence.
    pub fn partition_sentence_relation(
        &self,
        sentence: &Sentence,
        relation_index: usize,
    ) -> RelationPartition {
        let r = &sentence.relations[relation_index];
        let head = sentence.mention_surface(sentence.head(r), self.case_mode);
        let tail = sentence.mention_surface(sentence.tail(r), self.case_mode);
        self.partition_relation(&head, &r.relation_type, &tail)
    }

    pub fn partition_sentence_mention(
        &self,
        sentence: &Sentence,
        mention_index: usize,
    ) -> MentionPartition {
        self.partition_mention(
            &sentence.mention_surface(&sentence.mentions[mention_index], self.case_mode),
        )
    }
}

/// Label with the highest count; ties go to the lexicographically smallest
/// label. `None` for an empty map.
pub fn majority_label(counts: &LabelCounts) -> Option<&str> {
    // BTreeMap iterates in ascending key order, so a strict `>` keeps the
    // smallest label among equal counts.
    let mut best: Option<(&str, u64)> = None;
    for (label, &count) in counts {
        if best.is_none_or(|(_, c)| count > c) {
            best = Some((label.as_str(), count));
        }
    }
    best.map(|(label, _)| label)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MentionPartition {
    Seen,
    Unseen,
}

impl MentionPartition {
    pub const ALL: [MentionPartition; 2] = [MentionPartition::Seen, MentionPartition::Unseen];

    pub fn label(self) -> &'static str {
        match self {
            MentionPartition::Seen => "seen",
            MentionPartition::Unseen => "unseen",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationPartition {
    ExactMatch,
    PartialMatch,
    New,
}

impl RelationPartition {
    pub const ALL: [RelationPartition; 3] = [
        RelationPartition::ExactMatch,
        RelationPartition::PartialMatch,
        RelationPartition::New,
    ];

    pub fn label(self) -> &'static str {
        match self {
            RelationPartition::ExactMatch => "exact",
            RelationPartition::PartialMatch => "partial",
            RelationPartition::New => "new",
        }
    }
}

macro_rules! label_impls {
    ($($ty:ty),*) => {$(
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.label())
            }
        }

        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.serialize_str(self.label())
            }
        }
    )*};
}

label_impls!(MentionPartition, RelationPartition);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SentencePartitions {
    pub id: String,
    /// Label of each gold mention, by mention index.
    pub mentions: Vec<MentionPartition>,
    /// Label of each gold relation, by relation index.
    pub relations: Vec<RelationPartition>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tally {
    pub total: u64,
    pub counts: BTreeMap<&'static str, u64>,
    /// `count / total`, or 0 when `total` is 0.
    pub proportions: BTreeMap<&'static str, f64>,
}

impl Tally {
    fn from_labels<'a>(
        labels: impl IntoIterator<Item = &'static str>,
        observed: impl Iterator<Item = &'a str>,
    ) -> Self {
        let mut counts: BTreeMap<&'static str, u64> = labels.into_iter().map(|l| (l, 0)).collect();
        let mut total = 0;
        for label in observed {
            if let Some(c) = counts.get_mut(label) {
                *c += 1;
            }
            total += 1;
        }
        let proportions = counts
            .iter()
            .map(|(&l, &c)| {
                (
                    l,
                    if total == 0 {
                        0.0
                    } else {
                        c as f64 / total as f64
                    },
                )
            })
            .collect();
        Tally {
            total,
            counts,
            proportions,
        }
    }

    pub fn proportion(&self, label: &str) -> f64 {
        self.proportions.get(label).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionSummary {
    pub mentions: Tally,
    pub relations: Tally,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionReport {
    pub case_mode: CaseMode,
    pub sentences: Vec<SentencePartitions>,
    pub summary: PartitionSummary,
}

pub fn partition_split(index: &TrainIndex, split: &Split) -> PartitionReport {
    let sentences: Vec<SentencePartitions> = split
        .iter()
        .map(|s| SentencePartitions {
            id: s.id.clone(),
            mentions: (0..s.mentions.len())
                .map(|i| index.partition_sentence_mention(s, i))
                .collect(),
            relations: (0..s.relations.len())
                .map(|i| index.partition_sentence_relation(s, i))
                .collect(),
        })
        .collect();
    let summary = PartitionSummary {
        mentions: Tally::from_labels(
            MentionPartition::ALL.map(MentionPartition::label),
            sentences
                .iter()
                .flat_map(|s| s.mentions.iter().map(|p| p.label())),
        ),
        relations: Tally::from_labels(
            RelationPartition::ALL.map(RelationPartition::label),
            sentences
                .iter()
                .flat_map(|s| s.relations.iter().map(|p| p.label())),
        ),
    };
    PartitionReport {
        case_mode: index.case_mode(),
        sentences,
        summary,
    }
}
