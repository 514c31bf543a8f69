//! Canonical data model for annotated corpora and prediction files.
//!
//! A [`Sentence`] is pre-tokenized text with typed token spans ([`Mention`])
//! and typed directed links between them ([`Relation`]). Gold data and model
//! predictions share this model, and therefore one validator.
//!
//! Spans are half-open token ranges: `start` inclusive, `end` exclusive.

mod formats;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use formats::{load_split, parse_split, write_canonical, InputFormat};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mention {
    pub start: usize,
    pub end: usize,
    pub entity_type: String,
}

impl Mention {
    pub fn new(start: usize, end: usize, entity_type: impl Into<String>) -> Self {
        Self {
            start,
            end,
            entity_type: entity_type.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn span(&self) -> (usize, usize) {
        (self.start, self.end)
    }

    pub fn overlaps(&self, other: &Mention) -> bool {
        self.start < other.end && other.start < self.end
    }
}

/// A directed, typed link from `head` to `tail`, both indices into the
/// owning sentence's mention list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    pub head: usize,
    pub tail: usize,
    pub relation_type: String,
}

impl Relation {
    pub fn new(head: usize, tail: usize, relation_type: impl Into<String>) -> Self {
        Self {
            head,
            tail,
            relation_type: relation_type.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub id: String,
    pub tokens: Vec<String>,
    pub mentions: Vec<Mention>,
    pub relations: Vec<Relation>,
}

impl Sentence {
    pub fn new<S: Into<String>>(
        id: impl Into<String>,
        tokens: impl IntoIterator<Item = S>,
    ) -> Self {
        Self {
            id: id.into(),
            tokens: tokens.into_iter().map(Into::into).collect(),
            mentions: Vec::new(),
            relations: Vec::new(),
        }
    }

    pub fn with_mention(mut self, start: usize, end: usize, entity_type: &str) -> Self {
        self.mentions.push(Mention::new(start, end, entity_type));
        self
    }

    pub fn with_relation(mut self, head: usize, tail: usize, relation_type: &str) -> Self {
        self.relations
            .push(Relation::new(head, tail, relation_type));
        self
    }

    /// Surface key of an arbitrary span of this sentence.
    pub fn surface(&self, start: usize, end: usize, case_mode: CaseMode) -> Result<SurfaceKey> {
        surface_form(self, (start, end), case_mode)
    }

    /// Surface key of a mention already known to be valid for this sentence.
    pub fn mention_surface(&self, mention: &Mention, case_mode: CaseMode) -> SurfaceKey {
        SurfaceKey::from_tokens(&self.tokens[mention.start..mention.end], case_mode)
    }

    pub fn head(&self, relation: &Relation) -> &Mention {
        &self.mentions[relation.head]
    }

    pub fn tail(&self, relation: &Relation) -> &Mention {
        &self.mentions[relation.tail]
    }
}

/// An ordered list of sentences, e.g. a train or test file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Split {
    pub sentences: Vec<Sentence>,
}

impl Split {
    pub fn new(sentences: Vec<Sentence>) -> Self {
        Self { sentences }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Sentence> {
        self.sentences.iter()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(|s| s.tokens.len()).sum()
    }

    pub fn mention_count(&self) -> usize {
        self.sentences.iter().map(|s| s.mentions.len()).sum()
    }

    pub fn relation_count(&self) -> usize {
        self.sentences.iter().map(|s| s.relations.len()).sum()
    }

    pub fn get(&self, id: &str) -> Option<&Sentence> {
        self.sentences.iter().find(|s| s.id == id)
    }
}

impl FromIterator<Sentence> for Split {
    fn from_iter<I: IntoIterator<Item = Sentence>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Split {
    type Item = &'a Sentence;
    type IntoIter = std::slice::Iter<'a, Sentence>;

    fn into_iter(self) -> Self::IntoIter {
        self.sentences.iter()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub train: Split,
    pub dev: Option<Split>,
    pub test: Split,
}

/// How surface forms are compared when measuring lexical overlap.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseMode {
    #[default]
    Sensitive,
    Fold,
}

impl FromStr for CaseMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "sensitive" => Ok(CaseMode::Sensitive),
            "fold" => Ok(CaseMode::Fold),
            other => Err(format!(
                "unknown case mode '{other}' (expected sensitive or fold)"
            )),
        }
    }
}

impl fmt::Display for CaseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseMode::Sensitive => "sensitive",
            CaseMode::Fold => "fold",
        })
    }
}

/// Normalized surface form of a span: its tokens joined by single spaces,
/// lowercased per token under [`CaseMode::Fold`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SurfaceKey(String);

impl SurfaceKey {
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S], case_mode: CaseMode) -> Self {
        let mut key = String::new();
        for (i, token) in tokens.iter().enumerate() {
            if i > 0 {
                key.push(' ');
            }
            match case_mode {
                CaseMode::Sensitive => key.push_str(token.as_ref()),
                CaseMode::Fold => key.push_str(&token.as_ref().to_lowercase()),
            }
        }
        SurfaceKey(key)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SurfaceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SurfaceKey {
    fn from(s: &str) -> Self {
        SurfaceKey(s.to_owned())
    }
}

pub fn surface_form(
    sentence: &Sentence,
    span: (usize, usize),
    case_mode: CaseMode,
) -> Result<SurfaceKey> {
    let (start, end) = span;
    let len = sentence.tokens.len();
    if start >= end || end > len {
        return Err(Error::Range { start, end, len });
    }
    Ok(SurfaceKey::from_tokens(
        &sentence.tokens[start..end],
        case_mode,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    EmptyId,
    DuplicateId,
    MentionRange,
    EmptyEntityType,
    DuplicateMention,
    RelationIndex,
    SelfRelation,
    EmptyRelationType,
    DuplicateRelation,
    CrossSentenceRelation,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = serde_json::to_value(self).expect("unit variant serializes");
        f.write_str(name.as_str().unwrap_or_default())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub sentence_id: String,
    pub kind: ViolationKind,
    /// Path of the offending field, e.g. `entities[2].end`.
    pub field: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(self))
        }
    }

    fn push(&mut self, sentence_id: &str, kind: ViolationKind, field: String, detail: String) {
        self.violations.push(Violation {
            sentence_id: sentence_id.to_owned(),
            kind,
            field,
            detail,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(first) = self.violations.first() else {
            return write!(f, "no violations");
        };
        write!(
            f,
            "validation failed: sentence '{}', field {}: {} ({})",
            first.sentence_id, first.field, first.detail, first.kind
        )?;
        if self.violations.len() > 1 {
            write!(f, " and {} more violation(s)", self.violations.len() - 1)?;
        }
        Ok(())
    }
}

/// Checks every structural invariant of a split. Never fails; problems are
/// returned as data.
pub fn validate(split: &Split) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut ids = HashSet::new();
    for sentence in split {
        if sentence.id.is_empty() {
            report.push(
                &sentence.id,
                ViolationKind::EmptyId,
                "id".into(),
                "sentence id is empty".into(),
            );
        } else if !ids.insert(sentence.id.as_str()) {
            report.push(
                &sentence.id,
                ViolationKind::DuplicateId,
                "id".into(),
                format!("sentence id '{}' occurs more than once", sentence.id),
            );
        }
        validate_sentence(sentence, &mut report);
    }
    report
}

fn validate_sentence(sentence: &Sentence, report: &mut ValidationReport) {
    let id = sentence.id.as_str();
    let len = sentence.tokens.len();
    let mut seen_mentions = BTreeSet::new();
    for (i, m) in sentence.mentions.iter().enumerate() {
        if m.start >= m.end || m.end > len {
            report.push(
                id,
                ViolationKind::MentionRange,
                format!("entities[{i}].end"),
                format!("span ({}, {}) invalid for {len} tokens", m.start, m.end),
            );
        }
        if m.entity_type.is_empty() {
            report.push(
                id,
                ViolationKind::EmptyEntityType,
                format!("entities[{i}].type"),
                "entity type is empty".into(),
            );
        }
        if !seen_mentions.insert((m.start, m.end, m.entity_type.as_str())) {
            report.push(
                id,
                ViolationKind::DuplicateMention,
                format!("entities[{i}]"),
                format!(
                    "mention ({}, {}, {}) is annotated twice",
                    m.start, m.end, m.entity_type
                ),
            );
        }
    }

    let n = sentence.mentions.len();
    let mut seen_relations = BTreeSet::new();
    for (i, r) in sentence.relations.iter().enumerate() {
        for (field, idx) in [("head", r.head), ("tail", r.tail)] {
            if idx >= n {
                report.push(
                    id,
                    ViolationKind::RelationIndex,
                    format!("relations[{i}].{field}"),
                    format!("mention index {idx} out of range ({n} mentions)"),
                );
            }
        }
        if r.head == r.tail {
            report.push(
                id,
                ViolationKind::SelfRelation,
                format!("relations[{i}]"),
                format!("head and tail are both mention {}", r.head),
            );
        }
        if r.relation_type.is_empty() {
            report.push(
                id,
                ViolationKind::EmptyRelationType,
                format!("relations[{i}].type"),
                "relation type is empty".into(),
            );
        }
        if !seen_relations.insert((r.head, r.tail, r.relation_type.as_str())) {
            report.push(
                id,
                ViolationKind::DuplicateRelation,
                format!("relations[{i}]"),
                format!(
                    "relation ({}, {}, {}) is annotated twice",
                    r.head, r.tail, r.relation_type
                ),
            );
        }
    }
}
