//! Entity and relation consistency statistics of an evaluation split with
//! respect to a training split, plus plain corpus counts.
//!
//! All means are taken over annotation instances, not unique surfaces.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::corpus::{CaseMode, Corpus, Mention, Split};
use crate::error::{Error, Result};
use crate::partition::{LabelCounts, TrainIndex};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntityStats {
    /// Number of evaluated mention instances.
    pub mentions: u64,
    /// Number of those whose surface was annotated in train.
    pub seen: u64,
    #[serde(rename = "eLen")]
    pub e_len: f64,
    #[serde(rename = "eCon")]
    pub e_con: f64,
    /// `None` when no evaluated mention is seen.
    #[serde(rename = "eConStar")]
    pub e_con_star: Option<f64>,
    #[serde(rename = "eLex")]
    pub e_lex: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationStats {
    pub relations: u64,
    #[serde(rename = "rCon")]
    pub r_con: f64,
    #[serde(rename = "aCon")]
    pub a_con: f64,
    #[serde(rename = "aLen")]
    pub a_len: f64,
    #[serde(rename = "aDist")]
    pub a_dist: f64,
}

/// Share of `label` among all counts, 0 when the key was never observed.
fn consistency(counts: Option<&LabelCounts>, label: &str) -> f64 {
    let Some(counts) = counts else { return 0.0 };
    let total: u64 = counts.values().sum();
    if total == 0 {
        return 0.0;
    }
    counts.get(label).copied().unwrap_or(0) as f64 / total as f64
}

/// Token gap between two spans; 0 when they overlap or nest.
pub fn argument_distance(a: &Mention, b: &Mention) -> usize {
    let (earlier, later) = if (a.start, a.end) <= (b.start, b.end) {
        (a, b)
    } else {
        (b, a)
    };
    later.start.saturating_sub(earlier.end)
}

pub fn entity_stats(index: &TrainIndex, eval: &Split) -> Result<EntityStats> {
    let case_mode = index.case_mode();
    let (mut n, mut seen, mut len_sum, mut con_sum) = (0u64, 0u64, 0u64, 0.0f64);
    for sentence in eval {
        for m in &sentence.mentions {
            n += 1;
            len_sum += m.len() as u64;
            if let Some(counts) = index.mention_types(&sentence.mention_surface(m, case_mode)) {
                seen += 1;
                con_sum += consistency(Some(counts), &m.entity_type);
            }
        }
    }
    if n == 0 {
        return Err(Error::EmptyInput("evaluation split has no mentions"));
    }
    Ok(EntityStats {
        mentions: n,
        seen,
        e_len: len_sum as f64 / n as f64,
        e_con: con_sum / n as f64,
        e_con_star: (seen > 0).then(|| con_sum / seen as f64),
        e_lex: seen as f64 / n as f64,
    })
}

pub fn relation_stats(index: &TrainIndex, eval: &Split) -> Result<RelationStats> {
    let case_mode = index.case_mode();
    let (mut n, mut r_sum, mut a_sum, mut len_sum, mut dist_sum) =
        (0u64, 0.0f64, 0.0f64, 0u64, 0u64);
    for sentence in eval {
        for r in &sentence.relations {
            let (head, tail) = (sentence.head(r), sentence.tail(r));
            let head_surface = sentence.mention_surface(head, case_mode);
            let tail_surface = sentence.mention_surface(tail, case_mode);
            n += 1;
            r_sum += consistency(
                index.pair_types(&head_surface, &tail_surface),
                &r.relation_type,
            );
            a_sum += consistency(
                index.typepair_types(&head.entity_type, &tail.entity_type),
                &r.relation_type,
            );
            len_sum += (head.len() + tail.len()) as u64;
            dist_sum += argument_distance(head, tail) as u64;
        }
    }
    if n == 0 {
        return Err(Error::EmptyInput("evaluation split has no relations"));
    }
    let n_f = n as f64;
    Ok(RelationStats {
        relations: n,
        r_con: r_sum / n_f,
        a_con: a_sum / n_f,
        a_len: len_sum as f64 / n_f,
        a_dist: dist_sum as f64 / n_f,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitSummary {
    pub name: String,
    pub sentences: u64,
    pub tokens: u64,
    pub mentions: u64,
    pub relations: u64,
    pub entity_types: Vec<String>,
    pub relation_types: Vec<String>,
}

impl SplitSummary {
    pub fn of(name: impl Into<String>, split: &Split) -> Self {
        let entity_types: BTreeSet<&str> = split
            .iter()
            .flat_map(|s| s.mentions.iter().map(|m| m.entity_type.as_str()))
            .collect();
        let relation_types: BTreeSet<&str> = split
            .iter()
            .flat_map(|s| s.relations.iter().map(|r| r.relation_type.as_str()))
            .collect();
        SplitSummary {
            name: name.into(),
            sentences: split.len() as u64,
            tokens: split.token_count() as u64,
            mentions: split.mention_count() as u64,
            relations: split.relation_count() as u64,
            entity_types: entity_types.into_iter().map(str::to_owned).collect(),
            relation_types: relation_types.into_iter().map(str::to_owned).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusSummary {
    pub splits: Vec<SplitSummary>,
}

pub fn corpus_summary(corpus: &Corpus) -> CorpusSummary {
    let mut splits = vec![SplitSummary::of("train", &corpus.train)];
    if let Some(dev) = &corpus.dev {
        splits.push(SplitSummary::of("dev", dev));
    }
    splits.push(SplitSummary::of("test", &corpus.test));
    CorpusSummary { splits }
}

/// Consistency statistics of one evaluated split. A section is `None` when
/// the split has no instances of that kind.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitStats {
    pub name: String,
    pub entities: Option<EntityStats>,
    pub relations: Option<RelationStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    pub case_mode: CaseMode,
    pub summary: CorpusSummary,
    pub splits: Vec<SplitStats>,
}

fn optional<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::EmptyInput(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Statistics of each named evaluation split against `train`.
pub fn stats_report(
    train: &Split,
    evals: &[(String, &Split)],
    case_mode: CaseMode,
) -> Result<StatsReport> {
    let index = TrainIndex::build(train, case_mode);
    let mut summary = vec![SplitSummary::of("train", train)];
    let mut splits = Vec::with_capacity(evals.len());
    for (name, split) in evals {
        summary.push(SplitSummary::of(name.clone(), split));
        splits.push(SplitStats {
            name: name.clone(),
            entities: optional(entity_stats(&index, split))?,
            relations: optional(relation_stats(&index, split))?,
        });
    }
    Ok(StatsReport {
        case_mode,
        summary: CorpusSummary { splits: summary },
        splits,
    })
}
