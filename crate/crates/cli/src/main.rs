//! `ie`: extract records from text, score them against gold, render them for a locale.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use ie_core::localize::localize_records;
use ie_core::pipeline::load_locale;
use ie_core::records::{emit_records, parse_records, OutputFormat, RecordSet};
use ie_core::text::Document;
use ie_core::{eval, Error, Pipeline, PipelineConfig};
use rayon::prelude::*;

const USAGE_ERROR: u8 = 1;
const INPUT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "ie", version, about = "Rule-based information extraction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline over text files and emit entity and event records.
    Extract {
        /// Pipeline configuration file.
        config: PathBuf,
        /// UTF-8 text files; each is one document.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Write one output file per input here instead of printing.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Score a system record file against a gold record file.
    Score { system: PathBuf, gold: PathBuf },
    /// Render a record file for another locale.
    Localize {
        records: PathBuf,
        locale: String,
        /// Directory holding `<locale>.lex` and `<locale>.fmt`.
        #[arg(long, default_value = "resources/locale")]
        resources: PathBuf,
    },
}

/// A failure and the exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn usage(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: USAGE_ERROR, error: error.into() }
}

fn input(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: INPUT_ERROR, error: error.into() }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(USAGE_ERROR) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Extract { config, inputs, out_dir } => extract(&config, &inputs, out_dir.as_deref()),
        Command::Score { system, gold } => score(&system, &gold),
        Command::Localize { records, locale, resources } => localize(&records, &locale, &resources),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ie: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn source_id(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn process(pipeline: &Pipeline, path: &Path, format: OutputFormat) -> Result<String> {
    let text = std::fs::read_to_string(path).with_context(|| format!("{}", path.display()))?;
    let result = pipeline.run(&Document::new(source_id(path), text))?;
    for p in &result.diagnostics.unresolved_pronouns {
        log::info!("{}: unresolved pronoun {p}", result.source_id);
    }
    Ok(emit_records(&result.records(), format))
}

fn extract(config_path: &Path, inputs: &[PathBuf], out_dir: Option<&Path>) -> Result<(), Failure> {
    let config = PipelineConfig::load(config_path).map_err(usage)?;
    let pipeline = Pipeline::load(&config).map_err(usage)?;
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("{}", dir.display())).map_err(usage)?;
    }

    let outputs: Vec<Result<String>> =
        inputs.par_iter().map(|path| process(&pipeline, path, config.output_format)).collect();

    let extension = match config.output_format {
        OutputFormat::Records => "records",
        OutputFormat::Tabular => "tsv",
    };
    let mut stdout = std::io::stdout().lock();
    let mut failed = 0;
    for (n, (path, output)) in inputs.iter().zip(outputs).enumerate() {
        let text = match output {
            Ok(text) => text,
            Err(e) => {
                log::error!("skipping {}: {e:#}", path.display());
                eprintln!("ie: skipping {}: {e:#}", path.display());
                failed += 1;
                continue;
            }
        };
        let written = match out_dir {
            Some(dir) => {
                let stem = path.file_stem().map_or_else(|| format!("doc{n}"), |s| s.to_string_lossy().into_owned());
                let target = dir.join(format!("{stem}.{extension}"));
                std::fs::write(&target, &text).with_context(|| format!("{}", target.display()))
            }
            None if inputs.len() == 1 => stdout.write_all(text.as_bytes()).map_err(Into::into),
            None => {
                let separator = if n == 0 { "" } else { "\n" };
                write!(stdout, "{separator}# source: {}\n{text}", source_id(path)).map_err(Into::into)
            }
        };
        written.map_err(usage)?;
    }
    if failed > 0 {
        return Err(input(anyhow!("{failed} of {} inputs could not be processed", inputs.len())));
    }
    Ok(())
}

fn read_records(path: &Path) -> Result<RecordSet, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|error| Error::Io { path: path.to_path_buf(), error })
        .map_err(input)?;
    parse_records(&text).map_err(|e| input(Error::parse(path, e)))
}

fn score(system: &Path, gold: &Path) -> Result<(), Failure> {
    let (system, gold) = (read_records(system)?, read_records(gold)?);
    let report = eval::score(&eval::align(&system, &gold));
    print!("{}", report.to_tsv());
    Ok(())
}

fn localize(records: &Path, locale: &str, resources: &Path) -> Result<(), Failure> {
    let set = read_records(records)?;
    let (lexicon, format) = load_locale(resources, locale).map_err(usage)?;
    let out = localize_records(&set, &lexicon, &format);
    print!("{}", out.text);
    let mut stderr = std::io::stderr().lock();
    for item in &out.untranslated {
        let _ = writeln!(stderr, "untranslated: {item}");
    }
    Ok(())
}
