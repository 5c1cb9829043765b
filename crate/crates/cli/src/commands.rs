//! One function per subcommand, operating on single files. Each returns the
//! text destined for standard output plus the exit status it implies.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use log::{debug, info, warn};
use subtile::conformity::{self, ConformityThresholds};
use subtile::ctc::{self, CtcError};
use subtile::project::{self, Method};
use subtile::srt::{emit_srt, parse_srt};
use subtile::{Posteriors, SegmentedText, SubtitleDocument};

use crate::error::{exit, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Table,
}

/// Result of one command on one input.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

/// Writes through a temporary file in the destination directory, so readers
/// never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(CliError::io(path))?;
    tmp.write_all(bytes).map_err(CliError::io(path))?;
    tmp.persist(path).map_err(|e| CliError::io(path)(e.error))?;
    Ok(())
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(CliError::io(path))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    String::from_utf8(read(path)?).map_err(|_| CliError::input(path, "not valid UTF-8"))
}

pub fn load_posteriors(path: &Path) -> Result<Posteriors, CliError> {
    ctc::read_posteriors(path).map_err(|source| CliError::Posteriors {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_srt(path: &Path) -> Result<SubtitleDocument, CliError> {
    let parsed = parse_srt(&read(path)?).map_err(|source| CliError::Srt {
        path: path.to_path_buf(),
        source,
    })?;
    if parsed.reindexed {
        warn!(
            "{}: cue numbers were not 1..n and have been renumbered",
            path.display()
        );
    }
    Ok(parsed.document)
}

pub fn load_marked(path: &Path) -> Result<SegmentedText, CliError> {
    Ok(subtile::parse_marked(&read_text(path)?))
}

/// Aligns marked caption text to the posteriors and returns the timed caption.
pub fn time_caption(
    posteriors: &Posteriors,
    caption_text: &str,
    caption_path: &Path,
) -> Result<SubtitleDocument, CliError> {
    let tokens = posteriors
        .tokenize(caption_text)
        .map_err(|e| CliError::input(caption_path, e))?;
    if tokens.is_empty() {
        return Err(CliError::input(caption_path, "caption has no tokens"));
    }
    let seg = ctc::ctc_segment(posteriors, &tokens).map_err(|e| match e {
        CtcError::InfeasibleAlignment { .. } => CliError::Alignment(e),
        other => CliError::input(caption_path, other),
    })?;
    debug!(
        "{}: best path score {:.4}, last token at frame {}",
        caption_path.display(),
        seg.path_score,
        seg.end_frame
    );
    let times = ctc::block_timestamps(posteriors, &seg.spans, &tokens)
        .map_err(|e| CliError::input(caption_path, e))?;
    let blocks = subtile::parse_marked(caption_text)
        .into_blocks()
        .into_iter()
        .map(|lines| lines.iter().map(|l| ctc::detokenize_line(l)).collect())
        .collect();
    let seg = SegmentedText::new(blocks).map_err(|e| CliError::input(caption_path, e))?;
    Ok(subtile::subtitle::attach_times(&seg, &times)?)
}

pub fn segment(posteriors: &Path, caption: &Path, out: &Path) -> Result<Outcome, CliError> {
    let p = load_posteriors(posteriors)?;
    let text = read_text(caption)?;
    let doc = time_caption(&p, &text, caption)?;
    write_srt(out, &doc)?;
    info!("{}: {} caption blocks", out.display(), doc.len());
    Ok(Outcome::default())
}

fn write_srt(out: &Path, doc: &SubtitleDocument) -> Result<(), CliError> {
    let bytes = emit_srt(doc).map_err(|source| CliError::Srt {
        path: out.to_path_buf(),
        source,
    })?;
    write_atomic(out, &bytes)
}

fn counts_line(r: &project::ProjectionResult) -> String {
    format!(
        "matched={} interpolated={}\n",
        r.matched(),
        r.interpolated()
    )
}

pub fn project(
    caption: &Path,
    target: &Path,
    method: Method,
    out: &Path,
) -> Result<Outcome, CliError> {
    let cap = load_srt(caption)?;
    let tgt = load_marked(target)?;
    let r = project::project(method, &cap, &tgt)?;
    write_srt(out, &r.document)?;
    Ok(Outcome {
        stdout: counts_line(&r),
        code: exit::OK,
    })
}

pub fn decode(posteriors: &Path, beam: usize, n_best: usize) -> Result<Outcome, CliError> {
    let p = load_posteriors(posteriors)?;
    let hyps = ctc::prefix_beam_search(&p, beam);
    let mut stdout = String::new();
    for h in hyps.iter().take(n_best.max(1)) {
        let _ = writeln!(stdout, "{:.6}\t{}", h.log_prob, h.text(p.vocab()));
    }
    Ok(Outcome {
        stdout,
        code: exit::OK,
    })
}

pub fn render_report(
    doc: &SubtitleDocument,
    t: &ConformityThresholds,
    format: Format,
) -> Result<Outcome, CliError> {
    let r = conformity::report(doc, t)?;
    let mut stdout = match format {
        Format::Json => r.to_json(),
        Format::Table => r.to_table(),
    };
    if !stdout.ends_with('\n') {
        stdout.push('\n');
    }
    Ok(Outcome {
        stdout,
        code: if r.is_conforming() {
            exit::OK
        } else {
            exit::VIOLATIONS
        },
    })
}

pub fn conformity(
    srt: &Path,
    t: &ConformityThresholds,
    format: Format,
) -> Result<Outcome, CliError> {
    render_report(&load_srt(srt)?, t, format)
}

pub struct PipelineInputs<'a> {
    pub posteriors: &'a Path,
    pub caption: &'a Path,
    pub target: &'a Path,
}

/// segment, project, emit, then report conformity of the written file.
pub fn pipeline(
    inputs: &PipelineInputs<'_>,
    method: Method,
    out: &Path,
    t: &ConformityThresholds,
    format: Format,
) -> Result<Outcome, CliError> {
    let p = load_posteriors(inputs.posteriors)?;
    let caption_text = read_text(inputs.caption)?;
    let tgt = load_marked(inputs.target)?;
    let cap = time_caption(&p, &caption_text, inputs.caption)?;
    let r = project::project(method, &cap, &tgt)?;
    write_srt(out, &r.document)?;
    info!("{}: {}", out.display(), counts_line(&r).trim_end());
    render_report(&r.document, t, format)
}
