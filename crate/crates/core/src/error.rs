use std::path::PathBuf;

use crate::corpus::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Input did not parse under the requested format.
    #[error("{source_name}: format error at {position}: {message}")]
    Format {
        source_name: String,
        position: String,
        message: String,
    },

    #[error("{0}")]
    Validation(ValidationReport),

    /// Gold and predicted splits do not describe the same sentences.
    #[error("{0}")]
    Alignment(AlignmentError),

    #[error("span ({start}, {end}) is out of range for a sentence of {len} tokens")]
    Range {
        start: usize,
        end: usize,
        len: usize,
    },

    #[error("relation {relation_index} of sentence '{sentence_id}' is not swappable: {reason}")]
    Eligibility {
        sentence_id: String,
        relation_index: usize,
        reason: String,
    },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}

/// Id-level disagreement between two splits that must align one-to-one.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AlignmentError {
    /// Ids present in the reference split but absent from the other one.
    pub missing: Vec<String>,
    /// Ids present only in the other split.
    pub extra: Vec<String>,
    /// Ids present in both whose token sequences differ.
    pub token_mismatch: Vec<String>,
}

impl AlignmentError {
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty() && self.token_mismatch.is_empty()
    }
}

impl std::fmt::Display for AlignmentError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "sentence ids do not align")?;
        let groups = [
            ("missing", &self.missing),
            ("unexpected", &self.extra),
            ("token mismatch", &self.token_mismatch),
        ];
        for (label, ids) in groups {
            if !ids.is_empty() {
                write!(f, "; {label}: {}", ids.join(", "))?;
            }
        }
        Ok(())
    }
}
