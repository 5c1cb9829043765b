//! Directory mode: inputs are paired by file stem and run on a bounded pool.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::commands::Outcome;
use crate::error::CliError;

pub const POSTERIOR_EXT: &[&str] = &["ctcp", "json"];
pub const MARKED_EXT: &[&str] = &["txt"];
pub const SRT_EXT: &[&str] = &["srt"];

/// One input argument of a command together with the extensions it accepts.
pub struct Slot<'a> {
    pub path: &'a Path,
    pub ext: &'a [&'a str],
}

impl<'a> Slot<'a> {
    pub fn new(path: &'a Path, ext: &'a [&'a str]) -> Self {
        Slot { path, ext }
    }
}

/// One unit of batch work: the stem and the matching file in every slot.
#[derive(Debug, Clone)]
pub struct Job {
    pub stem: String,
    pub inputs: Vec<PathBuf>,
}

fn listing(dir: &Path, ext: &[&str]) -> Result<BTreeMap<String, PathBuf>, CliError> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).map_err(CliError::io(dir))? {
        let path = entry.map_err(CliError::io(dir))?.path();
        if !path.is_file() {
            continue;
        }
        let Some(e) = path.extension().and_then(|e| e.to_str()) else {
            continue;
        };
        if !ext.contains(&e) {
            continue;
        }
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        if let Some(prev) = out.insert(stem.to_string(), path.clone()) {
            return Err(CliError::input(
                &path,
                format!("same stem as {}", prev.display()),
            ));
        }
    }
    Ok(out)
}

/// Returns `None` when every slot is a plain file, the job list when every
/// slot is a directory, and an error for a mix of the two. Jobs follow the
/// stems of the first slot in sorted order; a stem missing from another slot
/// leaves that input as a path that does not exist, which fails the job alone.
pub fn plan(slots: &[Slot<'_>]) -> Result<Option<Vec<Job>>, CliError> {
    let dirs = slots.iter().filter(|s| s.path.is_dir()).count();
    if dirs == 0 {
        return Ok(None);
    }
    if dirs != slots.len() {
        return Err(CliError::Usage(
            "inputs must be all files or all directories".to_string(),
        ));
    }
    let listings = slots
        .iter()
        .map(|s| listing(s.path, s.ext))
        .collect::<Result<Vec<_>, _>>()?;
    let jobs = listings[0]
        .keys()
        .map(|stem| Job {
            stem: stem.clone(),
            inputs: listings
                .iter()
                .zip(slots)
                .map(|(l, s)| {
                    l.get(stem)
                        .cloned()
                        .unwrap_or_else(|| s.path.join(format!("{stem}.{}", s.ext[0])))
                })
                .collect(),
        })
        .collect();
    Ok(Some(jobs))
}

pub fn prepare_out_dir(out: &Path) -> Result<(), CliError> {
    if out.is_file() {
        return Err(CliError::Usage(format!(
            "{} must be a directory in batch mode",
            out.display()
        )));
    }
    std::fs::create_dir_all(out).map_err(CliError::io(out))
}

/// Runs `work` on every job with at most `jobs` workers. Results come back in
/// job order regardless of scheduling.
pub fn run<F>(
    jobs: &[Job],
    workers: usize,
    work: F,
) -> Result<Vec<Result<Outcome, CliError>>, CliError>
where
    F: Fn(&Job) -> Result<Outcome, CliError> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(pool.install(|| jobs.par_iter().map(&work).collect()))
}
