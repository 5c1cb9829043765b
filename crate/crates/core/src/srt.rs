//! SubRip (`.srt`) reading and canonical writing.
//!
//! Input may carry a UTF-8 BOM, CRLF line endings, a period instead of a comma
//! before the milliseconds, and non-consecutive cue numbers. Output is always
//! the canonical form: no BOM, LF endings, cues numbered 1..n, one blank line
//! between cues and a single trailing newline.

use std::fmt::Write as _;

use thiserror::Error;

use crate::subtitle::{SubtitleBlock, SubtitleDocument, TimeMs, SRT_MAX_MS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SrtError {
    #[error("input is not valid UTF-8 (byte {0})")]
    InvalidUtf8(usize),
    #[error("cue {0}: malformed cue number")]
    IndexParseError(usize),
    #[error("cue {0}: malformed time line")]
    TimeParseError(usize),
    #[error("cue {0}: no text")]
    EmptyCueError(usize),
    #[error("cue {0}: times are not monotone")]
    NonMonotoneTimes(usize),
    #[error("time {0} ms exceeds 99:59:59,999")]
    TimeRangeError(u64),
}

/// A parsed file plus what had to be fixed up on the way in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSrt {
    pub document: SubtitleDocument,
    /// Cue numbers in the file were not 1..n and have been renumbered.
    pub reindexed: bool,
}

fn parse_time(s: &str) -> Option<TimeMs> {
    let (hms, frac) = s.rsplit_once([',', '.'])?;
    let mut parts = hms.split(':');
    let (h, m, sec) = (parts.next()?, parts.next()?, parts.next()?);
    if parts.next().is_some() {
        return None;
    }
    let digits = |x: &str, min: usize, max: usize| {
        (x.len() >= min && x.len() <= max && x.bytes().all(|b| b.is_ascii_digit()))
            .then(|| x.parse::<u64>().ok())
            .flatten()
    };
    let h = digits(h, 1, 2)?;
    let m = digits(m, 2, 2)?;
    let sec = digits(sec, 2, 2)?;
    let ms = digits(frac, 3, 3)?;
    if m > 59 || sec > 59 {
        return None;
    }
    Some(TimeMs(((h * 60 + m) * 60 + sec) * 1000 + ms))
}

fn parse_timing(line: &str) -> Option<(TimeMs, TimeMs)> {
    let (start, rest) = line.split_once("-->")?;
    // anything after the end time (position hints) is ignored
    let end = rest.split_whitespace().next()?;
    Some((parse_time(start.trim())?, parse_time(end)?))
}

/// Parses a complete `.srt` file.
pub fn parse_srt(raw: &[u8]) -> Result<ParsedSrt, SrtError> {
    let text = std::str::from_utf8(raw).map_err(|e| SrtError::InvalidUtf8(e.valid_up_to()))?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);

    let text = text.replace("\r\n", "\n").replace('\r', "\n");
    let mut lines = text.split('\n').peekable();
    let mut blocks = Vec::new();
    let mut reindexed = false;
    let mut prev_start = TimeMs::ZERO;

    loop {
        while lines.peek().is_some_and(|l| l.trim().is_empty()) {
            lines.next();
        }
        let Some(first) = lines.next() else { break };
        let cue = blocks.len() + 1;

        let timing_line = if first.contains("-->") {
            // cue number missing altogether
            reindexed = true;
            first
        } else {
            let index: u64 = first
                .trim()
                .parse()
                .map_err(|_| SrtError::IndexParseError(cue))?;
            if index != cue as u64 {
                reindexed = true;
            }
            lines.next().ok_or(SrtError::TimeParseError(cue))?
        };
        let (start, end) = parse_timing(timing_line).ok_or(SrtError::TimeParseError(cue))?;
        if start > end || start < prev_start {
            return Err(SrtError::NonMonotoneTimes(cue));
        }
        prev_start = start;

        let mut text_lines = Vec::new();
        while let Some(l) = lines.next_if(|l| !l.trim().is_empty()) {
            text_lines.push(l.to_string());
        }
        if text_lines.is_empty() {
            return Err(SrtError::EmptyCueError(cue));
        }
        blocks.push(SubtitleBlock {
            index: cue as u32,
            start,
            end,
            lines: text_lines,
        });
    }

    let document = SubtitleDocument::new(blocks).expect("parser upholds document invariants");
    Ok(ParsedSrt {
        document,
        reindexed,
    })
}

/// Writes the canonical form of `doc`.
pub fn emit_srt(doc: &SubtitleDocument) -> Result<Vec<u8>, SrtError> {
    let mut out = String::new();
    for (i, block) in doc.blocks().iter().enumerate() {
        for t in [block.start, block.end] {
            if t.0 > SRT_MAX_MS {
                return Err(SrtError::TimeRangeError(t.0));
            }
        }
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "{}\n{} --> {}", i + 1, block.start, block.end);
        for line in &block.lines {
            out.push_str(line);
            out.push('\n');
        }
    }
    Ok(out.into_bytes())
}
