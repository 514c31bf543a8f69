//! Seeded fixtures shared by the benchmarks in `benches/`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rexo_core::swap::SwapConfig;
use rexo_core::synthetic::{news_like_split, random_predictions, swappable_sentence, SynthConfig};
use rexo_core::Split;

pub struct Fixture {
    pub train: Split,
    pub test: Split,
    pub pred: Split,
    pub swappable: Split,
    pub swap: SwapConfig,
}

/// A news-style train/test pair with `sentences` test sentences and four
/// times as many train sentences.
pub fn fixture(sentences: usize) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(sentences as u64);
    let train = news_like_split(&mut rng, "train", sentences * 4);
    let test = news_like_split(&mut rng, "test", sentences);
    let cfg = SynthConfig {
        entity_types: 3,
        relation_types: 5,
        ..SynthConfig::default()
    };
    let pred = random_predictions(&mut rng, &test, &cfg);
    let swappable = (0..sentences)
        .map(|i| swappable_sentence(&mut rng, format!("w{i}"), "Kill", "Peop"))
        .collect();
    Fixture {
        train,
        test,
        pred,
        swappable,
        swap: SwapConfig::new("Kill", "Peop"),
    }
}
