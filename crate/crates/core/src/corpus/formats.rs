//! Readers and writers for the supported file formats.
//!
//! * `canonical`: JSON array of `{id, tokens, entities: [{start, end, type}],
//!   relations: [{head, tail, type}]}` records, `end` exclusive.
//! * `spert`: the same shape as emitted by span-based joint extraction
//!   codebases; the `id` may be missing, in which case `orig_id` or the
//!   record position is used.
//! * `scierc`: JSON lines, one document per line, with sentence-partitioned
//!   tokens and document-level inclusive `ner` / `relations` offsets.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{validate, Mention, Relation, Sentence, Split, ValidationReport, ViolationKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum InputFormat {
    #[default]
    Canonical,
    SciErc,
    Spert,
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "canonical" => Ok(InputFormat::Canonical),
            "scierc" | "scierc-jsonl" => Ok(InputFormat::SciErc),
            "spert" | "spert-json" => Ok(InputFormat::Spert),
            other => Err(format!(
                "unknown input format '{other}' (expected canonical, scierc or spert)"
            )),
        }
    }
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputFormat::Canonical => "canonical",
            InputFormat::SciErc => "scierc",
            InputFormat::Spert => "spert",
        })
    }
}

// Field order is alphabetical so that serialization emits sorted keys.
#[derive(Serialize, Deserialize)]
struct WireSentence {
    entities: Vec<WireMention>,
    id: String,
    relations: Vec<WireRelation>,
    tokens: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct WireMention {
    end: usize,
    start: usize,
    #[serde(rename = "type")]
    entity_type: String,
}

#[derive(Serialize, Deserialize)]
struct WireRelation {
    head: usize,
    tail: usize,
    #[serde(rename = "type")]
    relation_type: String,
}

#[derive(Deserialize)]
struct SpertSentence {
    #[serde(default)]
    id: Option<serde_json::Value>,
    #[serde(default)]
    orig_id: Option<serde_json::Value>,
    tokens: Vec<String>,
    #[serde(default)]
    entities: Vec<WireMention>,
    #[serde(default)]
    relations: Vec<WireRelation>,
}

/// Document-level inclusive offsets: (start, end, type) and
/// (head start, head end, tail start, tail end, type).
type SciErcMention = (usize, usize, String);
type SciErcRelation = (usize, usize, usize, usize, String);

#[derive(Deserialize)]
struct SciErcDocument {
    doc_key: serde_json::Value,
    sentences: Vec<Vec<String>>,
    #[serde(default)]
    ner: Vec<Vec<SciErcMention>>,
    #[serde(default)]
    relations: Vec<Vec<SciErcRelation>>,
}

impl From<WireSentence> for Sentence {
    fn from(w: WireSentence) -> Self {
        Sentence {
            id: w.id,
            tokens: w.tokens,
            mentions: w.entities.into_iter().map(Mention::from).collect(),
            relations: w.relations.into_iter().map(Relation::from).collect(),
        }
    }
}

impl From<WireMention> for Mention {
    fn from(w: WireMention) -> Self {
        Mention::new(w.start, w.end, w.entity_type)
    }
}

impl From<WireRelation> for Relation {
    fn from(w: WireRelation) -> Self {
        Relation::new(w.head, w.tail, w.relation_type)
    }
}

impl From<&Sentence> for WireSentence {
    fn from(s: &Sentence) -> Self {
        WireSentence {
            entities: s
                .mentions
                .iter()
                .map(|m| WireMention {
                    end: m.end,
                    start: m.start,
                    entity_type: m.entity_type.clone(),
                })
                .collect(),
            id: s.id.clone(),
            relations: s
                .relations
                .iter()
                .map(|r| WireRelation {
                    head: r.head,
                    tail: r.tail,
                    relation_type: r.relation_type.clone(),
                })
                .collect(),
            tokens: s.tokens.clone(),
        }
    }
}

/// Reads and validates a split from disk.
pub fn load_split(path: impl AsRef<Path>, format: InputFormat) -> Result<Split> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_split(&text, format, &path.display().to_string())
}

/// Parses and validates a split from an in-memory document. `source_name`
/// only labels error messages.
pub fn parse_split(text: &str, format: InputFormat, source_name: &str) -> Result<Split> {
    let split = match format {
        InputFormat::Canonical => parse_canonical(text, source_name)?,
        InputFormat::Spert => parse_spert(text, source_name)?,
        InputFormat::SciErc => parse_scierc(text, source_name)?,
    };
    validate(&split).into_result()?;
    Ok(split)
}

/// Serializes a split in normalized canonical form: sorted keys, two-space
/// indentation, trailing newline.
pub fn write_canonical(split: &Split) -> String {
    let wire: Vec<WireSentence> = split.iter().map(WireSentence::from).collect();
    let mut out = serde_json::to_string_pretty(&wire).expect("canonical records always serialize");
    out.push('\n');
    out
}

fn json_error(source_name: &str, err: serde_json::Error) -> Error {
    Error::Format {
        source_name: source_name.to_owned(),
        position: format!("line {}, column {}", err.line(), err.column()),
        message: err.to_string(),
    }
}

fn parse_canonical(text: &str, source_name: &str) -> Result<Split> {
    let records: Vec<WireSentence> =
        serde_json::from_str(text).map_err(|e| json_error(source_name, e))?;
    Ok(records.into_iter().map(Sentence::from).collect())
}

fn id_string(value: &serde_json::Value) -> String {
    match value {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn parse_spert(text: &str, source_name: &str) -> Result<Split> {
    let records: Vec<SpertSentence> =
        serde_json::from_str(text).map_err(|e| json_error(source_name, e))?;
    Ok(records
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let id =
                r.id.as_ref()
                    .or(r.orig_id.as_ref())
                    .map(id_string)
                    .unwrap_or_else(|| i.to_string());
            Sentence::from(WireSentence {
                entities: r.entities,
                id,
                relations: r.relations,
                tokens: r.tokens,
            })
        })
        .collect())
}

fn parse_scierc(text: &str, source_name: &str) -> Result<Split> {
    let mut sentences = Vec::new();
    let mut report = ValidationReport::default();
    for (line_idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = line_idx + 1;
        let doc: SciErcDocument = serde_json::from_str(line).map_err(|e| Error::Format {
            source_name: source_name.to_owned(),
            position: format!("line {line_no}, column {}", e.column()),
            message: e.to_string(),
        })?;
        let n = doc.sentences.len();
        let fmt_err = |what: &str, len: usize| Error::Format {
            source_name: source_name.to_owned(),
            position: format!("line {line_no}"),
            message: format!("document has {n} sentences but {len} {what} lists"),
        };
        if !doc.ner.is_empty() && doc.ner.len() != n {
            return Err(fmt_err("ner", doc.ner.len()));
        }
        if !doc.relations.is_empty() && doc.relations.len() != n {
            return Err(fmt_err("relations", doc.relations.len()));
        }
        split_document(doc, &mut sentences, &mut report);
    }
    report.into_result()?;
    Ok(Split::new(sentences))
}

/// Splits one document into sentence records, rebasing inclusive
/// document-level offsets to sentence-local half-open spans.
fn split_document(doc: SciErcDocument, out: &mut Vec<Sentence>, report: &mut ValidationReport) {
    let doc_key = id_string(&doc.doc_key);
    let mut offset = 0;
    for (i, tokens) in doc.sentences.into_iter().enumerate() {
        let id = format!("{doc_key}:{i}");
        let len = tokens.len();
        let in_sentence = |s: usize, e: usize| s >= offset && e < offset + len && s <= e;
        let mut sentence = Sentence::new(id.clone(), tokens);

        for (j, (s, e, ty)) in doc.ner.get(i).into_iter().flatten().enumerate() {
            if !in_sentence(*s, *e) {
                report.push(
                    &id,
                    ViolationKind::MentionRange,
                    format!("ner[{i}][{j}]"),
                    format!(
                        "document span [{s}, {e}] lies outside sentence tokens [{offset}, {})",
                        offset + len
                    ),
                );
                continue;
            }
            sentence
                .mentions
                .push(Mention::new(s - offset, e + 1 - offset, ty.clone()));
        }

        for (j, (hs, he, ts, te, ty)) in doc.relations.get(i).into_iter().flatten().enumerate() {
            if !in_sentence(*hs, *he) || !in_sentence(*ts, *te) {
                report.push(
                    &id,
                    ViolationKind::CrossSentenceRelation,
                    format!("relations[{i}][{j}]"),
                    format!("argument spans [{hs}, {he}] / [{ts}, {te}] are not both inside the sentence"),
                );
                continue;
            }
            let find = |s: usize, e: usize| {
                sentence
                    .mentions
                    .iter()
                    .position(|m| m.start == s - offset && m.end == e + 1 - offset)
            };
            match (find(*hs, *he), find(*ts, *te)) {
                (Some(head), Some(tail)) => {
                    sentence
                        .relations
                        .push(Relation::new(head, tail, ty.clone()))
                }
                _ => report.push(
                    &id,
                    ViolationKind::RelationIndex,
                    format!("relations[{i}][{j}]"),
                    format!("argument spans [{hs}, {he}] / [{ts}, {te}] do not match any ner span"),
                ),
            }
        }

        offset += len;
        out.push(sentence);
    }
}
