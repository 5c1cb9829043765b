//! Timed subtitles from CTC posteriors.
//!
//! The crate turns un-timed caption and subtitle text (annotated with
//! `<eol>`/`<eob>` markers) into SubRip files:
//!
//! * [`ctc`] decodes posterior matrices and aligns a known token sequence to
//!   them, yielding one time interval per caption block.
//! * [`project`] carries caption block times over to the translated subtitle
//!   blocks through a block-masked edit-distance alignment, with two
//!   boundary-projection baselines for comparison.
//! * [`srt`] reads and writes `.srt` files, [`conformity`] measures
//!   characters-per-line and characters-per-second compliance.
//!
//! The CTC routines are generic over the floating point type used for log
//! probabilities. [`Posteriors`] and [`Posteriors32`] are the concrete
//! instantiations most callers want.

pub mod conformity;
pub mod ctc;
pub mod project;
pub mod scalar;
pub mod srt;
pub mod subtitle;

pub use conformity::{ConformityReport, ConformityThresholds};
pub use ctc::{Hypothesis, PosteriorMatrix, TokenSpan};
pub use project::{BlockMask, Method, ProjectionResult, Provenance};
pub use scalar::LogFloat;
pub use subtitle::{
    char_count, parse_marked, render_marked, Block, SegmentedText, SubtitleBlock, SubtitleDocument,
    TimeMs,
};

/// Posterior matrix with double precision log probabilities.
pub type Posteriors = PosteriorMatrix<f64>;
/// Posterior matrix with single precision log probabilities.
pub type Posteriors32 = PosteriorMatrix<f32>;
/// Span of an aligned token, double precision score.
pub type Span = TokenSpan<f64>;
/// Decoded hypothesis with a double precision score.
pub type Hyp = Hypothesis<f64>;
