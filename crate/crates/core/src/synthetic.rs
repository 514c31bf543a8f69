//! Random corpus generators for property tests, acceptance runs and
//! benchmarks.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::corpus::{Mention, Relation, Sentence, Split};

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub max_sentences: usize,
    pub max_tokens: usize,
    pub vocab_size: usize,
    pub entity_types: usize,
    pub relation_types: usize,
    pub max_mentions: usize,
    pub max_mention_tokens: usize,
    pub max_relations: usize,
    /// Allow overlapping and nested mentions.
    pub nested: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            max_sentences: 20,
            max_tokens: 12,
            vocab_size: 10,
            entity_types: 6,
            relation_types: 6,
            max_mentions: 5,
            max_mention_tokens: 3,
            max_relations: 4,
            nested: true,
        }
    }
}

fn random_mentions<R: Rng + ?Sized>(rng: &mut R, len: usize, cfg: &SynthConfig) -> Vec<Mention> {
    let mut out: Vec<Mention> = Vec::new();
    let mut seen = BTreeSet::new();
    for _ in 0..rng.gen_range(0..=cfg.max_mentions) {
        let span = rng.gen_range(1..=cfg.max_mention_tokens.min(len));
        let start = rng.gen_range(0..=len - span);
        let m = Mention::new(
            start,
            start + span,
            format!("T{}", rng.gen_range(0..cfg.entity_types)),
        );
        if !cfg.nested && out.iter().any(|o| o.overlaps(&m)) {
            continue;
        }
        if seen.insert(m.clone()) {
            out.push(m);
        }
    }
    out
}

fn random_relations<R: Rng + ?Sized>(
    rng: &mut R,
    mentions: usize,
    cfg: &SynthConfig,
) -> Vec<Relation> {
    let mut out = Vec::new();
    if mentions < 2 {
        return out;
    }
    let mut seen = BTreeSet::new();
    for _ in 0..rng.gen_range(0..=cfg.max_relations) {
        let head = rng.gen_range(0..mentions);
        let tail = rng.gen_range(0..mentions);
        if head == tail {
            continue;
        }
        let r = Relation::new(
            head,
            tail,
            format!("R{}", rng.gen_range(0..cfg.relation_types)),
        );
        if seen.insert(r.clone()) {
            out.push(r);
        }
    }
    out
}

pub fn random_sentence<R: Rng + ?Sized>(rng: &mut R, id: String, cfg: &SynthConfig) -> Sentence {
    let len = rng.gen_range(1..=cfg.max_tokens);
    let tokens = (0..len)
        .map(|_| {
            let w = rng.gen_range(0..cfg.vocab_size);
            if rng.gen_bool(0.2) {
                format!("W{w}")
            } else {
                format!("w{w}")
            }
        })
        .collect();
    let mentions = random_mentions(rng, len, cfg);
    let relations = random_relations(rng, mentions.len(), cfg);
    Sentence {
        id,
        tokens,
        mentions,
        relations,
    }
}

/// A valid split of up to `cfg.max_sentences` sentences with ids
/// `{prefix}{n}`.
pub fn random_split<R: Rng + ?Sized>(rng: &mut R, prefix: &str, cfg: &SynthConfig) -> Split {
    let n = rng.gen_range(0..=cfg.max_sentences);
    (0..n)
        .map(|i| random_sentence(rng, format!("{prefix}{i}"), cfg))
        .collect()
}

/// Noisy predictions for `gold`: drops, retypes, and invents annotations
/// while keeping ids and tokens.
pub fn random_predictions<R: Rng + ?Sized>(rng: &mut R, gold: &Split, cfg: &SynthConfig) -> Split {
    gold.iter()
        .map(|g| {
            let mut mentions: Vec<Mention> = Vec::new();
            for m in &g.mentions {
                let roll: f64 = rng.gen();
                if roll < 0.2 {
                    continue;
                }
                let mut m = m.clone();
                if roll < 0.35 {
                    m.entity_type = format!("T{}", rng.gen_range(0..cfg.entity_types));
                }
                if !mentions.contains(&m) {
                    mentions.push(m);
                }
            }
            for m in random_mentions(rng, g.tokens.len(), cfg) {
                if rng.gen_bool(0.3) && !mentions.contains(&m) {
                    mentions.push(m);
                }
            }
            // Keep gold relations whose arguments survived unchanged.
            let mut relations: Vec<Relation> = g
                .relations
                .iter()
                .filter(|_| rng.gen_bool(0.8))
                .filter_map(|r| {
                    let head = mentions.iter().position(|m| m == g.head(r))?;
                    let tail = mentions.iter().position(|m| m == g.tail(r))?;
                    Some(Relation::new(head, tail, r.relation_type.clone()))
                })
                .collect();
            for r in random_relations(rng, mentions.len(), cfg) {
                if rng.gen_bool(0.5) && !relations.contains(&r) {
                    relations.push(r);
                }
            }
            Sentence {
                id: g.id.clone(),
                tokens: g.tokens.clone(),
                mentions,
                relations,
            }
        })
        .collect()
}

fn push_filler<R: Rng + ?Sized>(rng: &mut R, tokens: &mut Vec<String>, min: usize) {
    for _ in 0..rng.gen_range(min..min + 4) {
        tokens.push(format!("w{}", rng.gen_range(0..50)));
    }
}

fn push_name<R: Rng + ?Sized>(rng: &mut R, tokens: &mut Vec<String>, ty: &str) -> Mention {
    let start = tokens.len();
    for _ in 0..rng.gen_range(1..=3) {
        tokens.push(format!("N{}", rng.gen_range(0..20)));
    }
    Mention::new(start, tokens.len(), ty)
}

/// A sentence that is swappable for `relation`/`entity_type`: two disjoint
/// arguments of random length, plus distractor mentions and relations that
/// do not touch them.
pub fn swappable_sentence<R: Rng + ?Sized>(
    rng: &mut R,
    id: String,
    relation: &str,
    entity_type: &str,
) -> Sentence {
    let mut tokens = Vec::new();
    push_filler(rng, &mut tokens, 0);
    let first = push_name(rng, &mut tokens, entity_type);
    push_filler(rng, &mut tokens, 0);
    let distractor = rng
        .gen_bool(0.5)
        .then(|| push_name(rng, &mut tokens, "Other"));
    push_filler(rng, &mut tokens, 1);
    let second = push_name(rng, &mut tokens, entity_type);
    push_filler(rng, &mut tokens, 0);

    let mut mentions = vec![first, second];
    let mut relations = if rng.gen_bool(0.5) {
        vec![Relation::new(0, 1, relation)]
    } else {
        vec![Relation::new(1, 0, relation)]
    };
    if let Some(d) = distractor {
        mentions.push(d);
        relations.push(Relation::new(2, 0, format!("Not{relation}")));
    }
    if rng.gen_bool(0.5) {
        mentions.reverse();
        let n = mentions.len();
        for r in &mut relations {
            r.head = n - 1 - r.head;
            r.tail = n - 1 - r.tail;
        }
    }
    Sentence {
        id,
        tokens,
        mentions,
        relations,
    }
}

const PEOPLE: [&str; 12] = [
    "John Smith",
    "Mary",
    "Lee Harvey Oswald",
    "Kennedy",
    "Sirhan",
    "Robert Kennedy",
    "Anna Lee",
    "Booth",
    "Lincoln",
    "Ray",
    "King",
    "Hinckley",
];
const PLACES: [&str; 10] = [
    "Dallas",
    "Texas",
    "Paris",
    "France",
    "Memphis",
    "Tennessee",
    "Los Angeles",
    "California",
    "Washington",
    "Ford Theater",
];
const ORGS: [&str; 6] = ["CIA", "FBI", "Acme Corp", "the Senate", "NASA", "Reuters"];

struct Template {
    relation: &'static str,
    head: &'static [&'static str],
    head_type: &'static str,
    words: &'static [&'static str],
    tail: &'static [&'static str],
    tail_type: &'static str,
}

const TEMPLATES: [Template; 5] = [
    Template {
        relation: "Kill",
        head: &PEOPLE,
        head_type: "Peop",
        words: &["shot", "and", "killed"],
        tail: &PEOPLE,
        tail_type: "Peop",
    },
    Template {
        relation: "Located_In",
        head: &PLACES,
        head_type: "Loc",
        words: &["is", "a", "city", "in"],
        tail: &PLACES,
        tail_type: "Loc",
    },
    Template {
        relation: "Work_For",
        head: &PEOPLE,
        head_type: "Peop",
        words: &["is", "a", "spokesman", "for"],
        tail: &ORGS,
        tail_type: "Org",
    },
    Template {
        relation: "OrgBased_In",
        head: &ORGS,
        head_type: "Org",
        words: &["has", "offices", "in"],
        tail: &PLACES,
        tail_type: "Loc",
    },
    Template {
        relation: "Live_In",
        head: &PEOPLE,
        head_type: "Peop",
        words: &["lives", "in"],
        tail: &PLACES,
        tail_type: "Loc",
    },
];

/// News-style sentences with the entity and relation inventory of a small
/// people/places/organizations corpus. Every sentence carries one relation
/// and sometimes a trailing location mention.
pub fn news_like_split<R: Rng + ?Sized>(rng: &mut R, prefix: &str, sentences: usize) -> Split {
    (0..sentences)
        .map(|i| {
            let t = &TEMPLATES[rng.gen_range(0..TEMPLATES.len())];
            let head = *t.head.choose(rng).expect("non-empty pool");
            let mut tail = *t.tail.choose(rng).expect("non-empty pool");
            while tail == head {
                tail = *t.tail.choose(rng).expect("non-empty pool");
            }
            let mut s = Sentence::new(format!("{prefix}{i}"), Vec::<String>::new());
            let push = |s: &mut Sentence, text: &str, ty: Option<&str>| {
                let start = s.tokens.len();
                s.tokens.extend(text.split(' ').map(str::to_owned));
                if let Some(ty) = ty {
                    s.mentions.push(Mention::new(start, s.tokens.len(), ty));
                }
            };
            if rng.gen_bool(0.3) {
                push(&mut s, "Yesterday ,", None);
            }
            push(&mut s, head, Some(t.head_type));
            push(&mut s, &t.words.join(" "), None);
            push(&mut s, tail, Some(t.tail_type));
            s.relations.push(Relation::new(0, 1, t.relation));
            if rng.gen_bool(0.3) {
                push(&mut s, "in", None);
                push(
                    &mut s,
                    PLACES.choose(rng).expect("non-empty pool"),
                    Some("Loc"),
                );
            }
            push(&mut s, ".", None);
            s
        })
        .collect()
}
