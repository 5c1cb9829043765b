//! CTC segmentation: align a known token sequence to a posterior matrix.
//!
//! The trellis `k(t, j)` holds the best log score of a path that has consumed
//! `j` tokens by frame `t`. State 0 only emits blank. A token state either
//! stays (emitting blank or repeating the token, whichever is likelier) or is
//! entered from the previous state by emitting the token. The alignment is
//! recovered by backtracking from the frame where the final token is most
//! probable, so trailing audio after the last token is allowed.

use crate::scalar::LogFloat;
use crate::subtitle::{TimeMs, EOB};

use super::{CtcError, PosteriorMatrix};

/// Frames attributed to one token of the aligned sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenSpan<F> {
    /// Position in the token sequence.
    pub token: usize,
    pub start_frame: usize,
    /// Last frame at which the token (rather than blank) was emitted.
    pub end_frame: usize,
    /// Path log-probability over `start_frame..=end_frame`.
    pub score: F,
}

/// Result of [`ctc_segment`].
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation<F> {
    pub spans: Vec<TokenSpan<F>>,
    /// Score of the best path, `k(end_frame, L)`.
    pub path_score: F,
    /// Frame at which the best path consumes the last token.
    pub end_frame: usize,
}

const STAY: u8 = 1;
const EMIT: u8 = 2;

pub fn ctc_segment<F: LogFloat>(
    p: &PosteriorMatrix<F>,
    tokens: &[usize],
) -> Result<Segmentation<F>, CtcError> {
    let frames = p.frames();
    let len = tokens.len();
    if len == 0 {
        return Err(CtcError::NoTokens);
    }
    if let Some(&t) = tokens.iter().find(|&&t| t >= p.vocab_size()) {
        return Err(CtcError::UnknownToken(format!("#{t}")));
    }
    if let Some(pos) = tokens.iter().position(|&t| t == p.blank()) {
        return Err(CtcError::BlankToken(pos));
    }
    if len > frames {
        return Err(CtcError::InfeasibleAlignment {
            tokens: len,
            frames,
        });
    }

    let width = len + 1;
    let blank = p.blank();
    let neg = F::neg_infinity();
    let mut score = vec![neg; frames * width];
    let mut flags = vec![0u8; frames * width];
    let at = |t: usize, j: usize| t * width + j;

    score[at(0, 0)] = p.log_prob(0, blank);
    score[at(0, 1)] = p.log_prob(0, tokens[0]);
    flags[at(0, 1)] = EMIT;
    for t in 1..frames {
        let lp_blank = p.log_prob(t, blank);
        score[at(t, 0)] = score[at(t - 1, 0)] + lp_blank;
        flags[at(t, 0)] = STAY;
        for j in 1..width.min(t + 2) {
            let lp_tok = p.log_prob(t, tokens[j - 1]);
            let (stay_emit, repeats) = if lp_tok >= lp_blank {
                (lp_tok, true)
            } else {
                (lp_blank, false)
            };
            let stay = score[at(t - 1, j)] + stay_emit;
            let advance = score[at(t - 1, j - 1)] + lp_tok;
            if stay >= advance || advance.is_nan() {
                score[at(t, j)] = stay;
                flags[at(t, j)] = STAY | if repeats { EMIT } else { 0 };
            } else {
                score[at(t, j)] = advance;
                flags[at(t, j)] = EMIT;
            }
        }
    }

    let mut end_frame = 0;
    for t in 1..frames {
        if score[at(t, len)] > score[at(end_frame, len)] {
            end_frame = t;
        }
    }
    let path_score = score[at(end_frame, len)];
    if path_score == neg || path_score.is_nan() {
        return Err(CtcError::InfeasibleAlignment {
            tokens: len,
            frames,
        });
    }

    let mut start = vec![0usize; len];
    let mut last: Vec<Option<usize>> = vec![None; len];
    let (mut j, mut t) = (len, end_frame);
    while j > 0 {
        let f = flags[at(t, j)];
        if f & EMIT != 0 {
            last[j - 1].get_or_insert(t);
        }
        if f & STAY == 0 {
            start[j - 1] = t;
            j -= 1;
        }
        if t == 0 {
            break;
        }
        t -= 1;
    }
    debug_assert_eq!(j, 0, "backtrack must consume every token");

    let spans = (0..len)
        .map(|i| {
            let end = last[i].unwrap_or(start[i]).max(start[i]);
            let mut s = p.log_prob(start[i], tokens[i]);
            for f in start[i] + 1..=end {
                s = s + p.log_prob(f, tokens[i]).max(p.log_prob(f, blank));
            }
            TokenSpan {
                token: i,
                start_frame: start[i],
                end_frame: end,
                score: s,
            }
        })
        .collect();

    Ok(Segmentation {
        spans,
        path_score,
        end_frame,
    })
}

fn frame_time(frame: usize, frame_ms: f64) -> TimeMs {
    TimeMs((frame as f64 * frame_ms).round() as u64)
}

/// One `(start, end)` interval per subtitle block.
///
/// A block starts at the first frame of its first non-marker token and ends
/// one frame after the last emission of its `<eob>`; a trailing block without
/// `<eob>` ends one frame after its last token. Groups of markers with no text
/// between them do not form blocks, matching [`crate::parse_marked`].
pub fn block_timestamps<F: LogFloat>(
    p: &PosteriorMatrix<F>,
    spans: &[TokenSpan<F>],
    tokens: &[usize],
) -> Result<Vec<(TimeMs, TimeMs)>, CtcError> {
    if spans.len() != tokens.len() {
        return Err(CtcError::SpanCountMismatch {
            spans: spans.len(),
            tokens: tokens.len(),
        });
    }
    let eob = p.token_id(EOB);
    let dur = p.frame_duration_ms();
    let mut out = Vec::new();
    let mut first_content: Option<usize> = None;
    for (i, &tok) in tokens.iter().enumerate() {
        let closes = Some(tok) == eob || i + 1 == tokens.len();
        if first_content.is_none() && !p.is_marker(tok) {
            first_content = Some(i);
        }
        if closes {
            if let Some(first) = first_content.take() {
                out.push((
                    frame_time(spans[first].start_frame, dur),
                    frame_time(spans[i].end_frame + 1, dur),
                ));
            }
        }
    }
    if out.is_empty() {
        return Err(CtcError::NoBlocksError);
    }
    Ok(out)
}
