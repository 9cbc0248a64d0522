//! Pipeline configuration: `key=value` lines, resource paths relative to the file.

use std::path::{Path, PathBuf};

use crate::coref::DEFAULT_WINDOW;
use crate::error::Error;
use crate::records::OutputFormat;
use crate::scenario::ScopeDial;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub gazetteer: PathBuf,
    pub ne_rules: PathBuf,
    pub nicknames: PathBuf,
    /// Replaces the built-in pronoun lexicon when set.
    pub pronouns: Option<PathBuf>,
    pub world_kb: PathBuf,
    pub scenario_rules: PathBuf,
    /// Directory holding `<locale>.lex` and `<locale>.fmt` files.
    pub lexicons: Option<PathBuf>,
    /// Sentences searched before the pronoun's own; at least 1.
    pub pronoun_window: usize,
    pub scenario_scope: ScopeDial,
    pub output_format: OutputFormat,
}

const REQUIRED: [&str; 5] = ["gazetteer", "ne_rules", "nicknames", "world_kb", "scenario_rules"];

impl PipelineConfig {
    /// Parses config text; relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, Error> {
        let mut paths: [Option<PathBuf>; 5] = Default::default();
        let (mut pronouns, mut lexicons) = (None, None);
        let mut pronoun_window = DEFAULT_WINDOW;
        let mut scenario_scope = ScopeDial::default();
        let mut output_format = OutputFormat::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: String| Error::Config(format!("line {}: {m}", n + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected key=value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            if value.is_empty() {
                return Err(err(format!("empty value for {key}")));
            }
            if let Some(i) = REQUIRED.iter().position(|k| *k == key) {
                paths[i] = Some(base.join(value));
                continue;
            }
            match key {
                "pronouns" => pronouns = Some(base.join(value)),
                "lexicons" => lexicons = Some(base.join(value)),
                "pronoun_window" => {
                    pronoun_window = value
                        .parse()
                        .ok()
                        .filter(|w: &usize| *w > 0)
                        .ok_or_else(|| err(format!("pronoun_window must be a positive integer, got {value:?}")))?
                }
                "scenario_scope" => scenario_scope = value.parse().map_err(err)?,
                "output_format" => output_format = value.parse().map_err(err)?,
                _ => return Err(err(format!("unknown key {key:?}"))),
            }
        }
        let [gazetteer, ne_rules, nicknames, world_kb, scenario_rules] = paths;
        let need = |p: Option<PathBuf>, key: &str| p.ok_or_else(|| Error::Config(format!("missing required key {key}")));
        Ok(PipelineConfig {
            gazetteer: need(gazetteer, "gazetteer")?,
            ne_rules: need(ne_rules, "ne_rules")?,
            nicknames: need(nicknames, "nicknames")?,
            world_kb: need(world_kb, "world_kb")?,
            scenario_rules: need(scenario_rules, "scenario_rules")?,
            pronouns,
            lexicons,
            pronoun_window,
            scenario_scope,
            output_format,
        })
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = read(path)?;
        Self::parse(&text, path.parent().unwrap_or(Path::new("")))
    }
}

pub(crate) fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|error| Error::Io { path: path.to_path_buf(), error })
}
