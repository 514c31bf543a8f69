//! Retention baseline: tags any test surface exactly present in the training
//! annotations with its majority training label.
//!
//! Mentions are found by a left-to-right, longest-match-first scan that never
//! emits overlapping spans, so nested train mentions cannot both be
//! predicted. Relations are predicted for every ordered pair of predicted
//! mentions whose surface pair was related in train, regardless of where the
//! two mentions sit in the sentence.

use crate::corpus::{validate, CaseMode, Mention, Relation, Sentence, Split, SurfaceKey};
use crate::error::Result;
use crate::partition::{majority_label, TrainIndex};

pub fn predict_mentions(index: &TrainIndex, sentence: &Sentence) -> Vec<Mention> {
    let case_mode = index.case_mode();
    let n = sentence.tokens.len();
    let longest = index.max_mention_tokens();
    let mut mentions = Vec::new();
    let mut start = 0;
    while start < n {
        let max_len = longest.min(n - start);
        let hit = (1..=max_len).rev().find_map(|len| {
            let surface = SurfaceKey::from_tokens(&sentence.tokens[start..start + len], case_mode);
            index
                .mention_types(&surface)
                .and_then(majority_label)
                .map(|ty| Mention::new(start, start + len, ty))
        });
        match hit {
            Some(m) => {
                start = m.end;
                mentions.push(m);
            }
            None => start += 1,
        }
    }
    mentions
}

/// Relations among `mentions` (indices refer to that slice), at most one per
/// ordered pair.
pub fn predict_relations(
    index: &TrainIndex,
    sentence: &Sentence,
    mentions: &[Mention],
) -> Vec<Relation> {
    let case_mode = index.case_mode();
    let surfaces: Vec<SurfaceKey> = mentions
        .iter()
        .map(|m| sentence.mention_surface(m, case_mode))
        .collect();
    let mut relations = Vec::new();
    for (head, head_surface) in surfaces.iter().enumerate() {
        for (tail, tail_surface) in surfaces.iter().enumerate() {
            if head == tail {
                continue;
            }
            if let Some(ty) = index
                .pair_types(head_surface, tail_surface)
                .and_then(majority_label)
            {
                relations.push(Relation::new(head, tail, ty));
            }
        }
    }
    relations
}

/// Predictions for a single sentence, carrying the input id and tokens.
pub fn predict_sentence(index: &TrainIndex, sentence: &Sentence) -> Sentence {
    let mentions = predict_mentions(index, sentence);
    let relations = predict_relations(index, sentence, &mentions);
    Sentence {
        id: sentence.id.clone(),
        tokens: sentence.tokens.clone(),
        mentions,
        relations,
    }
}

/// Builds the index from `train` and predicts every sentence of `input`.
pub fn run_retention(train: &Split, input: &Split, case_mode: CaseMode) -> Result<Split> {
    validate(train).into_result()?;
    validate(input).into_result()?;
    let index = TrainIndex::build(train, case_mode);
    Ok(input.iter().map(|s| predict_sentence(&index, s)).collect())
}
