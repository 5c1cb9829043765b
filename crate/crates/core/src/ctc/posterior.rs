use crate::scalar::{log_sum, LogFloat};
use crate::subtitle::{EOB, EOL};

use super::CtcError;

/// Tolerance on `Σ exp(row) == 1`.
pub const ROW_SUM_TOLERANCE: f64 = 1e-4;

/// Per-frame natural-log probabilities over a vocabulary that includes a blank.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorMatrix<F> {
    log_probs: Vec<F>,
    frames: usize,
    vocab: Vec<String>,
    blank: usize,
    frame_duration_ms: f64,
}

impl<F: LogFloat> PosteriorMatrix<F> {
    /// Validates shape, blank index, frame duration and row normalisation.
    pub fn new(
        rows: Vec<Vec<F>>,
        vocab: Vec<String>,
        blank: usize,
        frame_duration_ms: f64,
    ) -> Result<Self, CtcError> {
        let width = vocab.len();
        let mut flat = Vec::with_capacity(rows.len() * width);
        for (frame, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(CtcError::RowWidth {
                    frame,
                    found: row.len(),
                    expected: width,
                });
            }
            flat.extend_from_slice(row);
        }
        Self::from_flat(flat, rows.len(), vocab, blank, frame_duration_ms)
    }

    /// Row-major `frames × vocab.len()` values.
    pub fn from_flat(
        log_probs: Vec<F>,
        frames: usize,
        vocab: Vec<String>,
        blank: usize,
        frame_duration_ms: f64,
    ) -> Result<Self, CtcError> {
        if frames == 0 {
            return Err(CtcError::NoFrames);
        }
        if vocab.len() < 2 {
            return Err(CtcError::VocabTooSmall(vocab.len()));
        }
        if blank >= vocab.len() {
            return Err(CtcError::BlankOutOfRange {
                blank,
                vocab: vocab.len(),
            });
        }
        if !(frame_duration_ms.is_finite() && frame_duration_ms > 0.0) {
            return Err(CtcError::BadFrameDuration(frame_duration_ms));
        }
        if log_probs.len() != frames * vocab.len() {
            return Err(CtcError::Format(format!(
                "expected {} values, found {}",
                frames * vocab.len(),
                log_probs.len()
            )));
        }
        let m = PosteriorMatrix {
            log_probs,
            frames,
            vocab,
            blank,
            frame_duration_ms,
        };
        for frame in 0..m.frames {
            let sum = log_sum(m.row(frame).iter().copied()).exp().to_f64_lossy();
            if sum.is_nan() || (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(CtcError::NotNormalized { frame, sum });
            }
        }
        Ok(m)
    }

    /// Log-softmax of each row of `scores`; convenient for synthetic inputs.
    pub fn from_scores(
        scores: Vec<Vec<F>>,
        vocab: Vec<String>,
        blank: usize,
        frame_duration_ms: f64,
    ) -> Result<Self, CtcError> {
        let rows = scores
            .into_iter()
            .map(|row| {
                let z = log_sum(row.iter().copied());
                row.into_iter().map(|x| x - z).collect()
            })
            .collect();
        Self::new(rows, vocab, blank, frame_duration_ms)
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn blank(&self) -> usize {
        self.blank
    }

    pub fn frame_duration_ms(&self) -> f64 {
        self.frame_duration_ms
    }

    pub fn row(&self, frame: usize) -> &[F] {
        let v = self.vocab.len();
        &self.log_probs[frame * v..(frame + 1) * v]
    }

    #[inline]
    pub fn log_prob(&self, frame: usize, token: usize) -> F {
        self.log_probs[frame * self.vocab.len() + token]
    }

    pub fn as_flat(&self) -> &[F] {
        &self.log_probs
    }

    pub fn token_id(&self, token: &str) -> Option<usize> {
        self.vocab.iter().position(|v| v == token)
    }

    pub fn is_marker(&self, token: usize) -> bool {
        self.vocab.get(token).is_some_and(|t| t == EOB || t == EOL)
    }

    /// Maps whitespace-separated tokens to vocabulary ids. Markers may be
    /// glued to neighbouring tokens (`word<eob>`).
    pub fn tokenize(&self, text: &str) -> Result<Vec<usize>, CtcError> {
        let spaced = text
            .replace(EOB, &format!(" {EOB} "))
            .replace(EOL, &format!(" {EOL} "));
        spaced
            .split_whitespace()
            .map(|tok| {
                self.token_id(tok)
                    .ok_or_else(|| CtcError::UnknownToken(tok.to_string()))
            })
            .collect()
    }

    /// Converts every value to another float type.
    pub fn cast<G: LogFloat>(&self) -> PosteriorMatrix<G> {
        PosteriorMatrix {
            log_probs: self
                .log_probs
                .iter()
                .map(|x| G::from_f64_lossy(x.to_f64_lossy()))
                .collect(),
            frames: self.frames,
            vocab: self.vocab.clone(),
            blank: self.blank,
            frame_duration_ms: self.frame_duration_ms,
        }
    }
}
