//! CTC decoding and CTC segmentation over posterior matrices.

mod decode;
mod io;
mod posterior;
mod segment;

use thiserror::Error;

pub use decode::{
    ctc_label_log_probability, ctc_label_probability, greedy_decode, prefix_beam_search, Hypothesis,
};
pub use io::{read_ctcp, read_json, read_posteriors, write_ctcp, write_json};
pub use posterior::PosteriorMatrix;
pub use segment::{block_timestamps, ctc_segment, Segmentation, TokenSpan};

#[derive(Debug, Error)]
pub enum CtcError {
    #[error("posterior matrix has no frames")]
    NoFrames,
    #[error("vocabulary needs at least 2 entries, found {0}")]
    VocabTooSmall(usize),
    #[error("blank index {blank} out of range for vocabulary of {vocab}")]
    BlankOutOfRange { blank: usize, vocab: usize },
    #[error("frame {frame} has {found} values, expected {expected}")]
    RowWidth {
        frame: usize,
        found: usize,
        expected: usize,
    },
    #[error("frame {frame}: probabilities sum to {sum}, expected 1")]
    NotNormalized { frame: usize, sum: f64 },
    #[error("frame duration must be positive, got {0}")]
    BadFrameDuration(f64),
    #[error("token `{0}` is not in the vocabulary")]
    UnknownToken(String),
    #[error("token sequence contains the blank symbol at position {0}")]
    BlankToken(usize),
    #[error("token sequence is empty")]
    NoTokens,
    #[error("cannot align {tokens} tokens to {frames} frames")]
    InfeasibleAlignment { tokens: usize, frames: usize },
    #[error("{spans} spans for {tokens} tokens")]
    SpanCountMismatch { spans: usize, tokens: usize },
    #[error("token sequence yields no subtitle blocks")]
    NoBlocksError,
    #[error("malformed posterior file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Word-boundary prefix used by SentencePiece vocabularies.
pub const WORD_BOUNDARY: char = '\u{2581}';

/// Turns a line of space-separated vocabulary pieces back into text. Lines
/// using the `▁` word-boundary convention are glued and re-spaced; other lines
/// are returned unchanged.
pub fn detokenize_line(line: &str) -> String {
    if !line.contains(WORD_BOUNDARY) {
        return line.to_string();
    }
    line.split_whitespace()
        .collect::<String>()
        .replace(WORD_BOUNDARY, " ")
        .trim()
        .to_string()
}
