//! The extraction pipeline: tokenize, recognize, resolve coreference, build
//! template elements, extract scenario events.

use std::path::Path;

use crate::config::{read, PipelineConfig};
use crate::coref::{load_nicknames, load_pronouns, Coreference, Coreferencer, PronounLexicon};
use crate::error::Error;
use crate::localize::{load_lexicon, load_locale_format, Lexicon, LocaleFormat, IDENTITY_LOCALE};
use crate::ne::{load_gazetteer, load_rules, Mention, Recognizer};
use crate::records::{EntityRecord, EventRecord, RecordSet};
use crate::scenario::{extract_events, load_scenario_rules, ScenarioRule, ScopeDial};
use crate::template::{build_entities, load_world_kb, WorldKb};
use crate::text::{split_sentences, tokenize, Document, Sentence, Token};

/// Loaded, immutable resources; shareable across threads.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub recognizer: Recognizer,
    pub coreferencer: Coreferencer,
    pub world: WorldKb,
    pub scenarios: Vec<ScenarioRule>,
    pub scope: ScopeDial,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics {
    /// `surface@offset` of each pronoun left without an antecedent.
    pub unresolved_pronouns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionResult {
    pub source_id: String,
    pub tokens: Vec<Token>,
    pub sentences: Vec<Sentence>,
    pub mentions: Vec<Mention>,
    pub coreference: Coreference,
    pub entities: Vec<EntityRecord>,
    pub events: Vec<EventRecord>,
    pub diagnostics: Diagnostics,
}

impl ExtractionResult {
    pub fn records(&self) -> RecordSet {
        RecordSet { entities: self.entities.clone(), events: self.events.clone() }
    }
}

fn parse_file<T>(path: &Path, parse: impl FnOnce(&str) -> Result<T, crate::error::ParseError>) -> Result<T, Error> {
    parse(&read(path)?).map_err(|e| Error::parse(path, e))
}

impl Pipeline {
    /// Reads and validates every resource the config names.
    pub fn load(config: &PipelineConfig) -> Result<Self, Error> {
        let gazetteer = parse_file(&config.gazetteer, load_gazetteer)?;
        let rules = parse_file(&config.ne_rules, load_rules)?;
        let nicknames = parse_file(&config.nicknames, load_nicknames)?;
        let pronouns = match &config.pronouns {
            Some(p) => parse_file(p, load_pronouns)?,
            None => PronounLexicon::default(),
        };
        Ok(Pipeline {
            recognizer: Recognizer::new(gazetteer, rules),
            coreferencer: Coreferencer { nicknames, pronouns, window: config.pronoun_window },
            world: parse_file(&config.world_kb, load_world_kb)?,
            scenarios: parse_file(&config.scenario_rules, load_scenario_rules)?,
            scope: config.scenario_scope,
        })
    }

    pub fn with_scope(mut self, scope: ScopeDial) -> Self {
        self.scope = scope;
        self
    }

    pub fn run(&self, doc: &Document) -> Result<ExtractionResult, Error> {
        let tokens = tokenize(doc);
        let sentences = split_sentences(doc, &tokens);
        let mentions = self.recognizer.recognize(doc, &tokens);
        let coreference = self.coreferencer.resolve(&tokens, &sentences, &mentions);
        let elements = build_entities(&tokens, &sentences, &mentions, &coreference, &self.world)?;
        let events = extract_events(&tokens, &sentences, &elements, &self.scenarios, self.scope);
        let records = RecordSet { entities: elements.entities, events };
        records.validate().map_err(Error::Consistency)?;
        let unresolved_pronouns = coreference
            .unresolved
            .iter()
            .map(|&i| {
                let p = &coreference.pronouns[i];
                format!("{}@{}", p.surface, p.span.start())
            })
            .collect();
        Ok(ExtractionResult {
            source_id: doc.source_id().to_string(),
            tokens,
            sentences,
            mentions,
            coreference,
            entities: records.entities,
            events: records.events,
            diagnostics: Diagnostics { unresolved_pronouns },
        })
    }
}

/// Loads `<tag>.lex` and the optional `<tag>.fmt` from `dir`. The identity
/// locale needs no files.
pub fn load_locale(dir: &Path, tag: &str) -> Result<(Lexicon, LocaleFormat), Error> {
    let lex_path = dir.join(format!("{tag}.lex"));
    let lexicon = if tag == IDENTITY_LOCALE && !lex_path.exists() {
        Lexicon::identity()
    } else {
        parse_file(&lex_path, load_lexicon)?
    };
    if lexicon.locale() != tag {
        return Err(Error::Config(format!("{} declares locale {:?}, expected {tag:?}", lex_path.display(), lexicon.locale())));
    }
    let fmt_path = dir.join(format!("{tag}.fmt"));
    let format = if fmt_path.exists() { parse_file(&fmt_path, load_locale_format)? } else { LocaleFormat::default() };
    Ok((lexicon, format))
}
