//! Timed and un-timed subtitle values, marker-annotated text, character counts.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// End-of-line marker inside a block.
pub const EOL: &str = "<eol>";
/// End-of-block marker.
pub const EOB: &str = "<eob>";

/// Largest time an SRT clock can show: 99:59:59,999.
pub const SRT_MAX_MS: u64 = 99 * 3_600_000 + 59 * 60_000 + 59 * 1000 + 999;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubtitleError {
    #[error("{blocks} blocks but {boundaries} time boundaries")]
    BoundaryCountMismatch { blocks: usize, boundaries: usize },
    #[error("block {0}: times are not monotone")]
    NonMonotoneTimes(usize),
    #[error("block {0} has no text lines")]
    EmptyBlock(usize),
    #[error("block {block}: line {line} is blank or contains a line break")]
    InvalidLine { block: usize, line: usize },
    #[error("block {block}: expected index {expected}, found {found}")]
    IndexGap {
        block: usize,
        expected: u32,
        found: u32,
    },
}

/// Milliseconds since the start of the media.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct TimeMs(pub u64);

impl TimeMs {
    pub const ZERO: TimeMs = TimeMs(0);

    pub fn from_secs_f64(secs: f64) -> TimeMs {
        TimeMs((secs * 1000.0).round().max(0.0) as u64)
    }

    pub fn as_millis(self) -> u64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / 1000.0
    }
}

impl From<u64> for TimeMs {
    fn from(ms: u64) -> Self {
        TimeMs(ms)
    }
}

/// Formats as `HH:MM:SS,mmm`. Hours above 99 are printed in full.
impl fmt::Display for TimeMs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ms = self.0 % 1000;
        let s = (self.0 / 1000) % 60;
        let m = (self.0 / 60_000) % 60;
        let h = self.0 / 3_600_000;
        write!(f, "{h:02}:{m:02}:{s:02},{ms:03}")
    }
}

/// Lines of one block of un-timed text.
pub type Block = Vec<String>;

fn valid_line(line: &str) -> bool {
    !line.trim().is_empty() && !line.contains(['\n', '\r'])
}

/// Text segmented into blocks and lines, without times.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SegmentedText {
    blocks: Vec<Block>,
}

impl SegmentedText {
    /// Builds from explicit blocks. Every block needs at least one line; lines
    /// must be non-blank, free of line breaks, and must not contain markers.
    pub fn new(blocks: Vec<Block>) -> Result<Self, SubtitleError> {
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(SubtitleError::EmptyBlock(b + 1));
            }
            for (l, line) in block.iter().enumerate() {
                if !valid_line(line) || line.contains(EOL) || line.contains(EOB) {
                    return Err(SubtitleError::InvalidLine {
                        block: b + 1,
                        line: l + 1,
                    });
                }
            }
        }
        Ok(SegmentedText { blocks })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn into_blocks(self) -> Vec<Block> {
        self.blocks
    }

    /// All lines joined by single spaces, markers dropped.
    pub fn plain_text(&self) -> String {
        self.blocks
            .iter()
            .flatten()
            .map(String::as_str)
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Splits marker-annotated text into blocks (on `<eob>`) and lines (on
/// `<eol>`). Lines are trimmed; line breaks inside a line become spaces; empty
/// lines and blocks produced by repeated markers are dropped.
pub fn parse_marked(text: &str) -> SegmentedText {
    let blocks = text
        .split(EOB)
        .map(|block| {
            block
                .split(EOL)
                .map(|line| line.replace(['\r', '\n'], " ").trim().to_string())
                .filter(|line| !line.is_empty())
                .collect::<Block>()
        })
        .filter(|block| !block.is_empty())
        .collect();
    SegmentedText { blocks }
}

/// Inverse of [`parse_marked`]: lines joined by ` <eol> `, each block
/// terminated by ` <eob>`, blocks separated by a single space.
pub fn render_marked(seg: &SegmentedText) -> String {
    seg.blocks
        .iter()
        .map(|block| format!("{} {EOB}", block.join(&format!(" {EOL} "))))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Number of Unicode scalar values, spaces included.
pub fn char_count(text: &str) -> usize {
    text.chars().count()
}

/// Characters of a multi-line block; the line breaks themselves count zero.
pub fn block_char_count<S: AsRef<str>>(lines: &[S]) -> usize {
    lines.iter().map(|l| char_count(l.as_ref())).sum()
}

/// One cue: index, display interval and text lines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubtitleBlock {
    pub index: u32,
    pub start: TimeMs,
    pub end: TimeMs,
    pub lines: Vec<String>,
}

impl SubtitleBlock {
    pub fn char_count(&self) -> usize {
        block_char_count(&self.lines)
    }

    pub fn duration_ms(&self) -> u64 {
        self.end.0.saturating_sub(self.start.0)
    }
}

/// Ordered timed blocks; the in-memory form of an SRT file.
///
/// Indices run 1..n, every block satisfies `start <= end`, and block starts
/// never decrease.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct SubtitleDocument {
    blocks: Vec<SubtitleBlock>,
}

impl SubtitleDocument {
    pub fn new(blocks: Vec<SubtitleBlock>) -> Result<Self, SubtitleError> {
        let mut prev_start = TimeMs::ZERO;
        for (i, block) in blocks.iter().enumerate() {
            let n = i + 1;
            if block.index as usize != n {
                return Err(SubtitleError::IndexGap {
                    block: n,
                    expected: n as u32,
                    found: block.index,
                });
            }
            if block.lines.is_empty() {
                return Err(SubtitleError::EmptyBlock(n));
            }
            if let Some(l) = block.lines.iter().position(|l| !valid_line(l)) {
                return Err(SubtitleError::InvalidLine {
                    block: n,
                    line: l + 1,
                });
            }
            if block.start > block.end || block.start < prev_start {
                return Err(SubtitleError::NonMonotoneTimes(n));
            }
            prev_start = block.start;
        }
        Ok(SubtitleDocument { blocks })
    }

    /// Numbers the cues 1..n and validates them.
    pub fn from_timed<I>(cues: I) -> Result<Self, SubtitleError>
    where
        I: IntoIterator<Item = (TimeMs, TimeMs, Vec<String>)>,
    {
        let blocks = cues
            .into_iter()
            .enumerate()
            .map(|(i, (start, end, lines))| SubtitleBlock {
                index: i as u32 + 1,
                start,
                end,
                lines,
            })
            .collect();
        Self::new(blocks)
    }

    pub fn blocks(&self) -> &[SubtitleBlock] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Drops the times.
    pub fn to_segmented(&self) -> SegmentedText {
        SegmentedText {
            blocks: self.blocks.iter().map(|b| b.lines.clone()).collect(),
        }
    }

    pub fn boundaries(&self) -> Vec<(TimeMs, TimeMs)> {
        self.blocks.iter().map(|b| (b.start, b.end)).collect()
    }
}

/// Pairs each block of `seg` with a time interval.
pub fn attach_times(
    seg: &SegmentedText,
    boundaries: &[(TimeMs, TimeMs)],
) -> Result<SubtitleDocument, SubtitleError> {
    if seg.len() != boundaries.len() {
        return Err(SubtitleError::BoundaryCountMismatch {
            blocks: seg.len(),
            boundaries: boundaries.len(),
        });
    }
    SubtitleDocument::from_timed(
        seg.blocks
            .iter()
            .zip(boundaries)
            .map(|(lines, &(start, end))| (start, end, lines.clone())),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seg(blocks: &[&[&str]]) -> SegmentedText {
        SegmentedText::new(
            blocks
                .iter()
                .map(|b| b.iter().map(|s| s.to_string()).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn parse_single_block() {
        let s = parse_marked("This is a block <eob>");
        assert_eq!(s, seg(&[&["This is a block"]]));
    }

    #[test]
    fn parse_lines_and_implied_final_eob() {
        assert_eq!(
            parse_marked("a <eol> b <eob> c"),
            seg(&[&["a", "b"], &["c"]])
        );
        assert_eq!(
            parse_marked("a<eol>b<eob>c<eob>"),
            seg(&[&["a", "b"], &["c"]])
        );
    }

    #[test]
    fn parse_empty_and_collapsed_markers() {
        assert!(parse_marked("").is_empty());
        assert!(parse_marked("  <eob> <eob>").is_empty());
        assert_eq!(
            parse_marked("a <eob> <eob> <eol> b <eol><eol> c"),
            seg(&[&["a"], &["b", "c"]])
        );
        // markers are case sensitive
        assert_eq!(parse_marked("a <EOB> b"), seg(&[&["a <EOB> b"]]));
    }

    #[test]
    fn parse_turns_newlines_into_spaces() {
        assert_eq!(parse_marked("a\nb <eob>\nc"), seg(&[&["a b"], &["c"]]));
    }

    #[test]
    fn render_examples() {
        assert_eq!(
            render_marked(&seg(&[&["a", "b"], &["c"]])),
            "a <eol> b <eob> c <eob>"
        );
        assert_eq!(render_marked(&seg(&[&["x"]])), "x <eob>");
        assert_eq!(render_marked(&SegmentedText::default()), "");
    }

    #[test]
    fn segmented_text_rejects_bad_lines() {
        assert!(SegmentedText::new(vec![vec![]]).is_err());
        assert!(SegmentedText::new(vec![vec!["a <eob>".into()]]).is_err());
        assert!(SegmentedText::new(vec![vec![" ".into()]]).is_err());
        assert!(SegmentedText::new(vec![vec!["a\nb".into()]]).is_err());
    }

    #[test]
    fn attach_times_examples() {
        let s = seg(&[&["a"], &["b"]]);
        let doc = attach_times(
            &s,
            &[(TimeMs(0), TimeMs(1000)), (TimeMs(1000), TimeMs(2000))],
        )
        .unwrap();
        assert_eq!(doc.len(), 2);
        assert_eq!(doc.blocks()[1].index, 2);
        assert_eq!(doc.blocks()[1].start, TimeMs(1000));

        assert_eq!(
            attach_times(&s, &[(TimeMs(0), TimeMs(1000))]),
            Err(SubtitleError::BoundaryCountMismatch {
                blocks: 2,
                boundaries: 1
            })
        );
        assert_eq!(
            attach_times(
                &s,
                &[(TimeMs(2000), TimeMs(1000)), (TimeMs(2000), TimeMs(3000))]
            ),
            Err(SubtitleError::NonMonotoneTimes(1))
        );
        assert_eq!(
            attach_times(
                &s,
                &[(TimeMs(500), TimeMs(1000)), (TimeMs(100), TimeMs(3000))]
            ),
            Err(SubtitleError::NonMonotoneTimes(2))
        );
    }

    #[test]
    fn char_count_examples() {
        assert_eq!(char_count("Hello world"), 11);
        assert_eq!(char_count(""), 0);
        assert_eq!(block_char_count(&["ab", "cd"]), 4);
        assert_eq!(char_count("né"), 2);
    }

    #[test]
    fn time_display() {
        assert_eq!(TimeMs(0).to_string(), "00:00:00,000");
        assert_eq!(TimeMs(1500).to_string(), "00:00:01,500");
        assert_eq!(TimeMs(SRT_MAX_MS).to_string(), "99:59:59,999");
    }

    fn line_strategy() -> impl Strategy<Value = String> {
        "[a-zA-Zé0-9,.!?' ]{0,12}[a-zA-Z]"
            .prop_map(|s| s.trim().to_string())
            .prop_filter("non-empty", |s| !s.is_empty())
    }

    fn seg_strategy() -> impl Strategy<Value = SegmentedText> {
        prop::collection::vec(prop::collection::vec(line_strategy(), 1..4), 0..6)
            .prop_map(|b| SegmentedText::new(b).unwrap())
    }

    proptest! {
        #[test]
        fn parse_inverts_render(s in seg_strategy()) {
            prop_assert_eq!(parse_marked(&render_marked(&s)), s);
        }

        #[test]
        fn attach_times_keeps_text(s in seg_strategy()) {
            let bounds: Vec<_> = (0..s.len() as u64).map(|i| (TimeMs(i * 100), TimeMs(i * 100 + 50))).collect();
            let doc = attach_times(&s, &bounds).unwrap();
            prop_assert_eq!(doc.to_segmented(), s);
        }

        #[test]
        fn char_count_is_additive(a in ".{0,20}", b in ".{0,20}") {
            prop_assert_eq!(char_count(&format!("{a}{b}")), char_count(&a) + char_count(&b));
        }
    }
}
