mod batch;
mod commands;
mod error;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use subtile::conformity::ConformityThresholds;
use subtile::project::Method;

use batch::{Job, Slot, MARKED_EXT, POSTERIOR_EXT, SRT_EXT};
use commands::{Format, Outcome, PipelineInputs};
use error::{exit, CliError};

/// Timestamps for captions and subtitles from CTC posteriors.
///
/// Any command whose inputs are directories runs in batch mode: files are
/// paired by stem, `--out` names a directory, and results are reported in
/// filename order.
#[derive(Parser, Debug)]
#[command(name = "subtile", version)]
struct Cli {
    /// Worker threads for batch mode.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Force-align marked caption text to posteriors and write a timed SRT.
    Segment {
        #[arg(long)]
        posteriors: PathBuf,
        /// Caption text with <eol>/<eob> markers, tokens separated by spaces.
        #[arg(long)]
        caption: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Carry timestamps from a timed caption SRT onto marked subtitle text.
    Project {
        #[arg(long)]
        caption: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Levenshtein)]
        method: MethodArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Beam-search decode a posterior file.
    Decode {
        #[arg(long)]
        posteriors: PathBuf,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
        beam: u32,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        n_best: u32,
    },
    /// Report CPL, CPS and lines-per-block conformity of an SRT file.
    Conformity {
        srt: PathBuf,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// segment, project and conformity in one run.
    Pipeline {
        #[arg(long)]
        posteriors: PathBuf,
        #[arg(long)]
        caption: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Levenshtein)]
        method: MethodArg,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        report: ReportArgs,
    },
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[arg(long, default_value_t = ConformityThresholds::DEFAULT_MAX_CPL)]
    max_cpl: usize,
    #[arg(long, default_value_t = ConformityThresholds::DEFAULT_MAX_CPS)]
    max_cps: f64,
    #[arg(long, default_value_t = ConformityThresholds::DEFAULT_MAX_LINES)]
    max_lines: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
}

impl ReportArgs {
    fn thresholds(&self) -> Result<ConformityThresholds, CliError> {
        Ok(ConformityThresholds::new(
            self.max_cpl,
            self.max_cps,
            self.max_lines,
        )?)
    }

    fn format(&self) -> Format {
        match self.format {
            FormatArg::Json => Format::Json,
            FormatArg::Table => Format::Table,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MethodArg {
    Levenshtein,
    Sbp,
    SbpNblocks,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Levenshtein => Method::Levenshtein,
            MethodArg::Sbp => Method::Sbp,
            MethodArg::SbpNblocks => Method::SbpNBlocks,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Json,
    Table,
}

fn out_file(out: &Path, job: &Job) -> PathBuf {
    out.join(format!("{}.srt", job.stem))
}

type Reported = (Option<String>, Result<Outcome, CliError>);

/// Runs `single` directly when every slot is a file, otherwise once per job.
fn dispatch<S, B>(
    slots: &[Slot<'_>],
    out: Option<&Path>,
    workers: usize,
    single: S,
    each: B,
) -> Result<Vec<Reported>, CliError>
where
    S: FnOnce() -> Result<Outcome, CliError>,
    B: Fn(&Job) -> Result<Outcome, CliError> + Sync,
{
    let Some(jobs) = batch::plan(slots)? else {
        return Ok(vec![(None, single())]);
    };
    if let Some(out) = out {
        batch::prepare_out_dir(out)?;
    }
    let results = batch::run(&jobs, workers, each)?;
    Ok(jobs
        .into_iter()
        .map(|j| Some(j.stem))
        .zip(results)
        .collect())
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    let workers = cli.jobs as usize;
    let results = match &cli.command {
        Command::Segment {
            posteriors,
            caption,
            out,
        } => dispatch(
            &[
                Slot::new(caption, MARKED_EXT),
                Slot::new(posteriors, POSTERIOR_EXT),
            ],
            Some(out),
            workers,
            || commands::segment(posteriors, caption, out),
            |j| commands::segment(&j.inputs[1], &j.inputs[0], &out_file(out, j)),
        )?,
        Command::Project {
            caption,
            target,
            method,
            out,
        } => {
            let method = Method::from(*method);
            dispatch(
                &[Slot::new(target, MARKED_EXT), Slot::new(caption, SRT_EXT)],
                Some(out),
                workers,
                || commands::project(caption, target, method, out),
                |j| commands::project(&j.inputs[1], &j.inputs[0], method, &out_file(out, j)),
            )?
        }
        Command::Decode {
            posteriors,
            beam,
            n_best,
        } => {
            let (beam, n_best) = (*beam as usize, *n_best as usize);
            dispatch(
                &[Slot::new(posteriors, POSTERIOR_EXT)],
                None,
                workers,
                || commands::decode(posteriors, beam, n_best),
                |j| commands::decode(&j.inputs[0], beam, n_best),
            )?
        }
        Command::Conformity { srt, report } => {
            let (t, format) = (report.thresholds()?, report.format());
            dispatch(
                &[Slot::new(srt, SRT_EXT)],
                None,
                workers,
                || commands::conformity(srt, &t, format),
                |j| commands::conformity(&j.inputs[0], &t, format),
            )?
        }
        Command::Pipeline {
            posteriors,
            caption,
            target,
            method,
            out,
            report,
        } => {
            let (t, format) = (report.thresholds()?, report.format());
            let method = Method::from(*method);
            dispatch(
                &[
                    Slot::new(target, MARKED_EXT),
                    Slot::new(caption, MARKED_EXT),
                    Slot::new(posteriors, POSTERIOR_EXT),
                ],
                Some(out),
                workers,
                || {
                    let inputs = PipelineInputs {
                        posteriors,
                        caption,
                        target,
                    };
                    commands::pipeline(&inputs, method, out, &t, format)
                },
                |j| {
                    let inputs = PipelineInputs {
                        posteriors: &j.inputs[2],
                        caption: &j.inputs[1],
                        target: &j.inputs[0],
                    };
                    commands::pipeline(&inputs, method, &out_file(out, j), &t, format)
                },
            )?
        }
    };
    Ok(report(results))
}

/// Prints results in order and returns the most severe exit code.
fn report(results: Vec<Reported>) -> u8 {
    let stdout = std::io::stdout();
    let mut stdout = stdout.lock();
    let mut code = exit::OK;
    for (stem, result) in results {
        match result {
            Ok(outcome) => {
                if let Some(stem) = &stem {
                    let _ = writeln!(stdout, "==> {stem} <==");
                }
                let _ = stdout.write_all(outcome.stdout.as_bytes());
                code = code.max(outcome.code);
            }
            Err(e) => {
                log::error!("{e}");
                code = code.max(e.exit_code());
            }
        }
    }
    let _ = stdout.flush();
    code
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SUBTILE_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
