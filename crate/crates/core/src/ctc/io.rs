//! Posterior file encodings.
//!
//! `.ctcp` (little endian):
//!
//! ```text
//! "CTCP" | u32 version=1 | u32 T | u32 V | u32 blank | f32 frame_ms
//! | u32 vocab_len | vocab_len bytes of '\n'-joined UTF-8 tokens
//! | T*V f32 log-probabilities, row-major by frame
//! ```
//!
//! `.json`: `{"frame_duration_ms", "blank_index", "vocab", "log_probs"}`, where
//! `null` in `log_probs` stands for a log-probability of `-inf`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::scalar::LogFloat;

use super::{CtcError, PosteriorMatrix};

const MAGIC: &[u8; 4] = b"CTCP";
const VERSION: u32 = 1;

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8], CtcError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| CtcError::Format(format!("truncated while reading {what}")))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self, what: &str) -> Result<u32, CtcError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn f32(&mut self, what: &str) -> Result<f32, CtcError> {
        Ok(f32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
}

pub fn read_ctcp<F: LogFloat>(bytes: &[u8]) -> Result<PosteriorMatrix<F>, CtcError> {
    let mut cur = Cursor { buf: bytes, pos: 0 };
    if cur.take(4, "magic")? != MAGIC {
        return Err(CtcError::Format("bad magic bytes".into()));
    }
    let version = cur.u32("version")?;
    if version != VERSION {
        return Err(CtcError::Format(format!("unsupported version {version}")));
    }
    let frames = cur.u32("frame count")? as usize;
    let width = cur.u32("vocabulary size")? as usize;
    let blank = cur.u32("blank index")? as usize;
    let frame_ms = cur.f32("frame duration")?;
    let vocab_len = cur.u32("vocabulary length")? as usize;
    let blob = cur.take(vocab_len, "vocabulary")?;
    let blob = std::str::from_utf8(blob)
        .map_err(|_| CtcError::Format("vocabulary is not UTF-8".into()))?;
    let vocab: Vec<String> = if blob.is_empty() {
        Vec::new()
    } else {
        blob.split('\n').map(str::to_string).collect()
    };
    if vocab.len() != width {
        return Err(CtcError::Format(format!(
            "header says {width} vocabulary entries, blob has {}",
            vocab.len()
        )));
    }
    let count = frames
        .checked_mul(width)
        .filter(|&n| n.checked_mul(4).is_some_and(|b| b <= bytes.len()))
        .ok_or_else(|| CtcError::Format("matrix larger than file".into()))?;
    let data = cur.take(count * 4, "log-probabilities")?;
    if cur.pos != bytes.len() {
        return Err(CtcError::Format(format!(
            "{} trailing bytes",
            bytes.len() - cur.pos
        )));
    }
    let values = data
        .chunks_exact(4)
        .map(|c| F::from_f32_lossy(f32::from_le_bytes(c.try_into().unwrap())))
        .collect();
    PosteriorMatrix::from_flat(values, frames, vocab, blank, frame_ms as f64)
}

pub fn write_ctcp<F: LogFloat>(m: &PosteriorMatrix<F>) -> Vec<u8> {
    let blob = m.vocab().join("\n");
    let mut out = Vec::with_capacity(28 + blob.len() + m.as_flat().len() * 4);
    out.extend_from_slice(MAGIC);
    for v in [
        VERSION,
        m.frames() as u32,
        m.vocab_size() as u32,
        m.blank() as u32,
    ] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&(m.frame_duration_ms() as f32).to_le_bytes());
    out.extend_from_slice(&(blob.len() as u32).to_le_bytes());
    out.extend_from_slice(blob.as_bytes());
    for x in m.as_flat() {
        out.extend_from_slice(&(x.to_f64_lossy() as f32).to_le_bytes());
    }
    out
}

#[derive(Serialize, Deserialize)]
struct JsonPosteriors {
    frame_duration_ms: f64,
    blank_index: usize,
    vocab: Vec<String>,
    log_probs: Vec<Vec<Option<f64>>>,
}

pub fn read_json<F: LogFloat>(bytes: &[u8]) -> Result<PosteriorMatrix<F>, CtcError> {
    let j: JsonPosteriors =
        serde_json::from_slice(bytes).map_err(|e| CtcError::Format(e.to_string()))?;
    let rows = j
        .log_probs
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| x.map_or(F::neg_infinity(), F::from_f64_lossy))
                .collect()
        })
        .collect();
    PosteriorMatrix::new(rows, j.vocab, j.blank_index, j.frame_duration_ms)
}

pub fn write_json<F: LogFloat>(m: &PosteriorMatrix<F>) -> String {
    let j = JsonPosteriors {
        frame_duration_ms: m.frame_duration_ms(),
        blank_index: m.blank(),
        vocab: m.vocab().to_vec(),
        log_probs: (0..m.frames())
            .map(|t| {
                m.row(t)
                    .iter()
                    .map(|x| Some(x.to_f64_lossy()).filter(|v| v.is_finite()))
                    .collect()
            })
            .collect(),
    };
    serde_json::to_string_pretty(&j).expect("plain data serialises")
}

/// Reads `.ctcp` or `.json` depending on the file extension.
pub fn read_posteriors<F: LogFloat>(path: &Path) -> Result<PosteriorMatrix<F>, CtcError> {
    let bytes = std::fs::read(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => read_json(&bytes),
        Some("ctcp") => read_ctcp(&bytes),
        other => Err(CtcError::Format(format!(
            "unknown posterior extension {:?} (expected .ctcp or .json)",
            other.unwrap_or("")
        ))),
    }
}
