//! Projection of caption block times onto translated subtitle blocks.
//!
//! [`project_levenshtein`] keeps the target segmentation and aligns the two
//! block masks: a target boundary paired with a caption boundary inherits its
//! time, an unpaired one is placed proportionally to the characters of the
//! caption block it falls in. [`project_sbp`] and [`project_sbp_nblocks`] are
//! boundary-projection baselines that re-segment the target instead.

mod align;
mod mask;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::subtitle::{char_count, Block, SegmentedText, SubtitleDocument, SubtitleError, TimeMs};

pub use align::{levenshtein_align, AlignmentPath, EditStep};
pub use mask::{mask_blocks, masked_block_len, BlockMask, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProjectionError {
    #[error("document has no blocks")]
    EmptyDocument,
    #[error("block mask must be non-empty, use only C/B and end with B")]
    InvalidMask,
    #[error(transparent)]
    Subtitle(#[from] SubtitleError),
}

/// How a target block's end time was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Copied from a caption block end.
    Matched,
    /// Placed proportionally inside a caption block.
    Interpolated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionResult {
    pub document: SubtitleDocument,
    /// One entry per target block, describing its end boundary.
    pub provenance: Vec<Provenance>,
}

impl ProjectionResult {
    pub fn matched(&self) -> usize {
        self.provenance
            .iter()
            .filter(|&&p| p == Provenance::Matched)
            .count()
    }

    pub fn interpolated(&self) -> usize {
        self.provenance.len() - self.matched()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Method {
    #[default]
    Levenshtein,
    Sbp,
    SbpNBlocks,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Levenshtein, Method::Sbp, Method::SbpNBlocks];

    pub fn name(self) -> &'static str {
        match self {
            Method::Levenshtein => "levenshtein",
            Method::Sbp => "sbp",
            Method::SbpNBlocks => "sbp-nblocks",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown projection method `{s}`"))
    }
}

/// Runs the selected method. `Sbp` ignores the target's own segmentation.
pub fn project(
    method: Method,
    caption: &SubtitleDocument,
    target: &SegmentedText,
) -> Result<ProjectionResult, ProjectionError> {
    match method {
        Method::Levenshtein => project_levenshtein(caption, target),
        Method::Sbp => project_sbp(caption, &target.plain_text()),
        Method::SbpNBlocks => project_sbp_nblocks(caption, target),
    }
}

/// `start + (end - start) * k / n`, rounded half up to the millisecond.
fn interpolate(start: TimeMs, end: TimeMs, k: usize, n: usize) -> TimeMs {
    let span = end.0.saturating_sub(start.0) as u128;
    let (k, n) = (k.min(n) as u128, n.max(1) as u128);
    TimeMs(start.0 + ((2 * span * k + n) / (2 * n)) as u64)
}

/// Makes starts non-decreasing and ends no earlier than their start or the
/// previous end. Only has an effect for captions with overlapping cues.
fn monotone(mut times: Vec<(TimeMs, TimeMs)>) -> Vec<(TimeMs, TimeMs)> {
    for i in 0..times.len() {
        if i > 0 {
            times[i].0 = times[i].0.max(times[i - 1].0);
            times[i].1 = times[i].1.max(times[i - 1].1);
        }
        times[i].1 = times[i].1.max(times[i].0);
    }
    times
}

fn build(
    blocks: Vec<Block>,
    times: Vec<(TimeMs, TimeMs)>,
    provenance: Vec<Provenance>,
) -> Result<ProjectionResult, ProjectionError> {
    let times = monotone(times);
    let document = SubtitleDocument::from_timed(
        blocks
            .into_iter()
            .zip(times)
            .map(|(lines, (s, e))| (s, e, lines)),
    )?;
    Ok(ProjectionResult {
        document,
        provenance,
    })
}

/// Keeps the target segmentation and derives its times from the alignment of
/// the caption and target block masks.
pub fn project_levenshtein(
    caption: &SubtitleDocument,
    target: &SegmentedText,
) -> Result<ProjectionResult, ProjectionError> {
    let cap = caption.blocks();
    let src = mask_blocks(&caption.to_segmented())?;
    let tgt = mask_blocks(target)?;
    let sizes = src.block_sizes();
    let path = levenshtein_align(&src, &tgt);

    // (end, provenance, caption block whose end was copied)
    let mut bounds: Vec<(TimeMs, Provenance, Option<usize>)> = Vec::with_capacity(target.len());
    let (mut block, mut consumed) = (0usize, 0usize);
    for step in path.steps() {
        match *step {
            EditStep::Match(Symbol::C) | EditStep::Delete(Symbol::C) => consumed += 1,
            EditStep::Insert(Symbol::C) => {}
            EditStep::Match(Symbol::B) => {
                bounds.push((cap[block].end, Provenance::Matched, Some(block)));
                block += 1;
                consumed = 0;
            }
            EditStep::Delete(Symbol::B) => {
                block += 1;
                consumed = 0;
            }
            EditStep::Insert(Symbol::B) => {
                let c = &cap[block];
                let t = interpolate(c.start, c.end, consumed, sizes[block]);
                bounds.push((t, Provenance::Interpolated, None));
            }
        }
    }

    let mut times = Vec::with_capacity(bounds.len());
    let mut start = cap[0].start;
    for &(end, _, matched) in &bounds {
        times.push((start, end));
        start = match matched {
            Some(j) if j + 1 < cap.len() => cap[j + 1].start,
            _ => end,
        };
    }
    let provenance = bounds.iter().map(|b| b.1).collect();
    build(target.blocks().to_vec(), times, provenance)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Delimiter {
    Line,
    Block,
}

/// Source boundary projection: re-segments unsegmented target text by
/// placing each caption `<eol>`/`<eob>` at the first target space preceded by
/// at least as many characters as precede the delimiter in the caption. Caption
/// block times are then copied onto the target blocks in order.
pub fn project_sbp(
    caption: &SubtitleDocument,
    target_plain: &str,
) -> Result<ProjectionResult, ProjectionError> {
    let cap = caption.blocks();
    if cap.is_empty() {
        return Err(ProjectionError::EmptyDocument);
    }
    let words: Vec<&str> = target_plain.split_whitespace().collect();
    if words.is_empty() {
        return Err(ProjectionError::EmptyDocument);
    }

    // character offsets in the caption's space-joined plain text
    let mut delimiters = Vec::new();
    let mut count = 0usize;
    for (b, block) in cap.iter().enumerate() {
        for (l, line) in block.lines.iter().enumerate() {
            count += char_count(line);
            if l + 1 < block.lines.len() {
                delimiters.push((count, Delimiter::Line));
                count += 1;
            }
        }
        if b + 1 < cap.len() {
            delimiters.push((count, Delimiter::Block));
            count += 1;
        }
    }

    // gap g sits after words[g]; offsets[g] = characters before it
    let mut offsets = Vec::with_capacity(words.len().saturating_sub(1));
    let mut acc = 0usize;
    for (g, w) in words.iter().enumerate().take(words.len() - 1) {
        acc += char_count(w) + usize::from(g > 0);
        offsets.push(acc);
    }
    let mut gaps: Vec<Option<Delimiter>> = vec![None; offsets.len()];
    let mut next_gap = 0;
    for (at, kind) in delimiters {
        match (next_gap..offsets.len()).find(|&g| offsets[g] >= at) {
            Some(g) => {
                gaps[g] = Some(kind);
                next_gap = g + 1;
            }
            // target exhausted: the remaining boundaries collapse onto its end
            None => break,
        }
    }

    let mut blocks: Vec<Block> = Vec::new();
    let mut block: Block = Vec::new();
    let mut line: Vec<&str> = Vec::new();
    for (i, w) in words.iter().enumerate() {
        line.push(w);
        match gaps.get(i).copied().flatten() {
            Some(Delimiter::Line) => block.push(std::mem::take(&mut line).join(" ")),
            Some(Delimiter::Block) => {
                block.push(std::mem::take(&mut line).join(" "));
                blocks.push(std::mem::take(&mut block));
            }
            None => {}
        }
    }
    if !line.is_empty() {
        block.push(line.join(" "));
    }
    if !block.is_empty() {
        blocks.push(block);
    }

    let last = blocks.len() - 1;
    let times = (0..blocks.len())
        .map(|i| {
            let end = if i == last {
                cap[cap.len() - 1].end
            } else {
                cap[i].end
            };
            (cap[i].start, end)
        })
        .collect();
    let provenance = vec![Provenance::Matched; blocks.len()];
    build(blocks, times, provenance)
}

/// Keeps the target segmentation and copies caption times one-to-one when both
/// have the same number of blocks; otherwise falls back to [`project_sbp`].
pub fn project_sbp_nblocks(
    caption: &SubtitleDocument,
    target: &SegmentedText,
) -> Result<ProjectionResult, ProjectionError> {
    if caption.is_empty() || target.is_empty() {
        return Err(ProjectionError::EmptyDocument);
    }
    if caption.len() != target.len() {
        return project_sbp(caption, &target.plain_text());
    }
    let provenance = vec![Provenance::Matched; target.len()];
    build(target.blocks().to_vec(), caption.boundaries(), provenance)
}
