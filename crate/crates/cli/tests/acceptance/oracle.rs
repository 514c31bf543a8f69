//! Naive reference implementations. They share no code with the library
//! beyond the plain data types, and trade speed for obviousness.

use std::collections::{BTreeMap, BTreeSet};

use num::{BigInt, BigRational, Zero};
use rexo_core::{CaseMode, Sentence, Split};

pub fn surface(s: &Sentence, start: usize, end: usize, case: CaseMode) -> String {
    let text = s.tokens[start..end].join(" ");
    match case {
        CaseMode::Sensitive => text,
        CaseMode::Fold => text.to_lowercase(),
    }
}

fn arg_surfaces(s: &Sentence, r: usize, case: CaseMode) -> (String, String) {
    let rel = &s.relations[r];
    let (h, t) = (&s.mentions[rel.head], &s.mentions[rel.tail]);
    (
        surface(s, h.start, h.end, case),
        surface(s, t.start, t.end, case),
    )
}

pub fn mention_label(train: &Split, text: &str, case: CaseMode) -> &'static str {
    for s in train {
        for m in &s.mentions {
            if surface(s, m.start, m.end, case) == text {
                return "seen";
            }
        }
    }
    "unseen"
}

pub fn relation_label(
    train: &Split,
    head: &str,
    rel: &str,
    tail: &str,
    case: CaseMode,
) -> &'static str {
    let mut partial = false;
    for s in train {
        for (i, r) in s.relations.iter().enumerate() {
            if r.relation_type != rel {
                continue;
            }
            let (h, t) = arg_surfaces(s, i, case);
            if h == head && t == tail {
                return "exact";
            }
            if h == head || t == tail {
                partial = true;
            }
        }
    }
    if partial {
        "partial"
    } else {
        "new"
    }
}

pub fn sentence_mention_labels(train: &Split, s: &Sentence, case: CaseMode) -> Vec<&'static str> {
    s.mentions
        .iter()
        .map(|m| mention_label(train, &surface(s, m.start, m.end, case), case))
        .collect()
}

pub fn sentence_relation_labels(train: &Split, s: &Sentence, case: CaseMode) -> Vec<&'static str> {
    (0..s.relations.len())
        .map(|i| {
            let (h, t) = arg_surfaces(s, i, case);
            relation_label(train, &h, &s.relations[i].relation_type, &t, case)
        })
        .collect()
}

/// A scoring item: sentence id, then a flat tuple of the compared fields.
pub type Item = (String, Vec<String>);

/// Items of one sentence with their partition label. `setting` is one of
/// "ner", "boundaries", "strict".
pub fn items(
    train: &Split,
    s: &Sentence,
    setting: &str,
    case: CaseMode,
) -> Vec<(Item, &'static str)> {
    if setting == "ner" {
        let labels = sentence_mention_labels(train, s, case);
        return s
            .mentions
            .iter()
            .zip(labels)
            .map(|(m, l)| {
                let fields = vec![
                    m.start.to_string(),
                    m.end.to_string(),
                    m.entity_type.clone(),
                ];
                ((s.id.clone(), fields), l)
            })
            .collect();
    }
    let labels = sentence_relation_labels(train, s, case);
    s.relations
        .iter()
        .zip(labels)
        .map(|(r, l)| {
            let (h, t) = (&s.mentions[r.head], &s.mentions[r.tail]);
            let mut fields = vec![
                h.start.to_string(),
                h.end.to_string(),
                t.start.to_string(),
                t.end.to_string(),
                r.relation_type.clone(),
            ];
            if setting == "strict" {
                fields.push(h.entity_type.clone());
                fields.push(t.entity_type.clone());
            }
            ((s.id.clone(), fields), l)
        })
        .collect()
}

/// (tp, fp, fn)
pub type Counts = (u64, u64, u64);

/// Counts by set intersection.
pub fn set_counts<K: Ord>(gold: &BTreeSet<K>, pred: &BTreeSet<K>) -> Counts {
    let tp = gold.intersection(pred).count() as u64;
    (tp, pred.len() as u64 - tp, gold.len() as u64 - tp)
}

/// Overall and per-partition (tp, fp, fn) for one setting.
pub fn score(
    train: &Split,
    gold: &Split,
    pred: &Split,
    setting: &str,
    case: CaseMode,
) -> (Counts, BTreeMap<&'static str, Counts>) {
    let collect = |split: &Split| -> BTreeMap<Item, &'static str> {
        split
            .iter()
            .flat_map(|s| items(train, s, setting, case))
            .collect()
    };
    let g = collect(gold);
    let p = collect(pred);
    let gold_set: BTreeSet<&Item> = g.keys().collect();
    let pred_set: BTreeSet<&Item> = p.keys().collect();
    let overall = set_counts(&gold_set, &pred_set);

    let mut parts: BTreeMap<&'static str, Counts> = BTreeMap::new();
    for (item, label) in &g {
        let e = parts.entry(label).or_default();
        if p.contains_key(item) {
            e.0 += 1;
        } else {
            e.2 += 1;
        }
    }
    for (item, label) in &p {
        if !g.contains_key(item) {
            parts.entry(label).or_default().1 += 1;
        }
    }
    (overall, parts)
}

pub fn prf(tp: u64, fp: u64, fn_: u64) -> (f64, f64, f64) {
    let div = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let p = div(tp, tp + fp);
    let r = div(tp, tp + fn_);
    let f = if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    };
    (p, r, f)
}

pub struct ExactEntity {
    pub e_con: BigRational,
    pub e_con_star: Option<BigRational>,
    pub e_lex: BigRational,
}

fn ratio(a: u64, b: u64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// Entity consistency statistics in exact rational arithmetic.
pub fn exact_entity_stats(train: &Split, eval: &Split, case: CaseMode) -> Option<ExactEntity> {
    let (mut n, mut seen) = (0u64, 0u64);
    let mut con = BigRational::zero();
    for s in eval {
        for m in &s.mentions {
            n += 1;
            let text = surface(s, m.start, m.end, case);
            let (mut total, mut same) = (0u64, 0u64);
            for t in train {
                for tm in &t.mentions {
                    if surface(t, tm.start, tm.end, case) == text {
                        total += 1;
                        same += u64::from(tm.entity_type == m.entity_type);
                    }
                }
            }
            if total > 0 {
                seen += 1;
                con += ratio(same, total);
            }
        }
    }
    if n == 0 {
        return None;
    }
    Some(ExactEntity {
        e_con: con.clone() / BigInt::from(n),
        e_con_star: (seen > 0).then(|| con / BigInt::from(seen)),
        e_lex: ratio(seen, n),
    })
}
