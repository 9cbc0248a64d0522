use std::collections::{HashMap, HashSet};

use super::{parse_attributes, Attributes, EntityClass};
use crate::error::ParseError;
use crate::text::{tokenize, Document, Token};

const CASE_ATTR: &str = "case";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GazetteerEntry {
    pub surface: String,
    /// Surface split with the document tokenizer.
    pub tokens: Vec<String>,
    pub class: EntityClass,
    pub attributes: Attributes,
    pub case_sensitive: bool,
}

impl GazetteerEntry {
    /// Entries with an uppercase letter match case-sensitively unless
    /// `case=insensitive` is given; all-lowercase entries match any case.
    pub fn new(surface: &str, class: EntityClass, mut attributes: Attributes) -> Result<Self, String> {
        let surface = surface.trim();
        let tokens: Vec<String> = tokenize(&Document::new("", surface))
            .into_iter()
            .map(|t| t.surface)
            .collect();
        if tokens.is_empty() {
            return Err("empty surface".to_string());
        }
        let case_sensitive = match attributes.remove(CASE_ATTR).as_deref() {
            None => surface.chars().any(char::is_uppercase),
            Some("sensitive") => true,
            Some("insensitive") => false,
            Some(other) => return Err(format!("case must be sensitive or insensitive, got {other:?}")),
        };
        Ok(GazetteerEntry {
            surface: surface.to_string(),
            tokens,
            class,
            attributes,
            case_sensitive,
        })
    }

    fn matches(&self, tokens: &[Token]) -> bool {
        tokens.len() >= self.tokens.len()
            && self.tokens.iter().zip(tokens).all(|(want, got)| {
                if self.case_sensitive {
                    *want == got.surface
                } else {
                    want.to_lowercase() == got.surface.to_lowercase()
                }
            })
    }
}

/// Surface lists mapping token sequences to entity classes.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    entries: Vec<GazetteerEntry>,
    // lowercased first token -> entry indices
    index: HashMap<String, Vec<usize>>,
}

impl Gazetteer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[GazetteerEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds an entry, rejecting a repeated (surface, class) pair.
    pub fn insert(&mut self, entry: GazetteerEntry) -> Result<(), String> {
        if self
            .entries
            .iter()
            .any(|e| e.surface == entry.surface && e.class == entry.class)
        {
            return Err(format!(
                "duplicate entry {:?} for class {}",
                entry.surface, entry.class
            ));
        }
        self.index
            .entry(entry.tokens[0].to_lowercase())
            .or_default()
            .push(self.entries.len());
        self.entries.push(entry);
        Ok(())
    }

    /// Entries matching at token `start`, as (entry index, token count).
    pub fn matches_at(&self, tokens: &[Token], start: usize) -> Vec<(usize, usize)> {
        let Some(first) = tokens.get(start) else {
            return Vec::new();
        };
        let Some(candidates) = self.index.get(&first.surface.to_lowercase()) else {
            return Vec::new();
        };
        candidates
            .iter()
            .filter(|&&i| self.entries[i].matches(&tokens[start..]))
            .map(|&i| (i, self.entries[i].tokens.len()))
            .collect()
    }

    pub fn classes(&self) -> HashSet<EntityClass> {
        self.entries.iter().map(|e| e.class).collect()
    }
}

/// Parses the TAB-separated gazetteer format: `surface TAB class [TAB k=v,...]`.
pub fn load_gazetteer(source: &str) -> Result<Gazetteer, ParseError> {
    let mut gaz = Gazetteer::new();
    for (n, line) in source.lines().enumerate() {
        let line_no = n + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(ParseError::new(
                line_no,
                format!("expected 2 or 3 TAB-separated fields, found {}", fields.len()),
            ));
        }
        let class: EntityClass = fields[1]
            .trim()
            .parse()
            .map_err(|e: super::UnknownClass| ParseError::new(line_no, e.to_string()))?;
        let attributes = match fields.get(2) {
            Some(f) => parse_attributes(f).map_err(|e| ParseError::new(line_no, e))?,
            None => Attributes::new(),
        };
        let entry =
            GazetteerEntry::new(fields[0], class, attributes).map_err(|e| ParseError::new(line_no, e))?;
        gaz.insert(entry).map_err(|e| ParseError::new(line_no, e))?;
    }
    Ok(gaz)
}
