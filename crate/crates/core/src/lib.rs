//! Lexical-overlap analysis for end-to-end entity and relation extraction.
//!
//! The crate separates what a model *retains* from training data from what it
//! *extracts* from context:
//!
//! * [`partition`] indexes the training annotations and labels every test
//!   mention Seen/Unseen and every relation Exact/Partial/New.
//! * [`scorer`] computes micro P/R/F1 for NER and for relations under the
//!   Boundaries and Strict settings, overall and per partition.
//! * [`retention`] is a baseline that only ever predicts what it saw in train.
//! * [`stats`] measures label consistency and argument shape of a split.
//! * [`swap`] exchanges relation heads and tails in the text and scores the
//!   original (no longer expressed) direction alongside the new one.
//!
//! ```
//! use rexo_core::{corpus::{CaseMode, Sentence, Split}, partition::TrainIndex, scorer};
//!
//! let train = Split::new(vec![Sentence::new("t", ["John", "killed", "Mary"])
//!     .with_mention(0, 1, "Peop")
//!     .with_mention(2, 3, "Peop")
//!     .with_relation(0, 1, "Kill")]);
//! let index = TrainIndex::build(&train, CaseMode::Sensitive);
//! let report = scorer::evaluate(&index, &train, &train, &scorer::MatchSetting::ALL).unwrap();
//! assert_eq!(report.settings[2].partition("exact").f1(), 1.0);
//! ```

pub mod corpus;
pub mod error;
pub mod partition;
pub mod report;
pub mod retention;
pub mod scorer;
pub mod stats;
pub mod swap;
pub mod synthetic;

pub use corpus::{CaseMode, Corpus, Mention, Relation, Sentence, Split, SurfaceKey};
pub use error::{Error, Result};
pub use partition::{MentionPartition, RelationPartition, TrainIndex};
pub use scorer::{EvalReport, MatchSetting, PrfCounts};
