//! Named entity recognition: gazetteer lookup plus token-pattern rules.

mod date;
mod gazetteer;
mod normalize;
mod pattern;
mod recognizer;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

pub use date::{normalize_date, NormalizedDate};
pub use gazetteer::{load_gazetteer, Gazetteer, GazetteerEntry};
pub use normalize::{normalize_money, normalize_time, Money, TimeOfDay};
pub use pattern::{Atom, AtomKind, ClassSpans, NoSpans, Orthography, Pattern, PatternMatch, Repeat};
pub use recognizer::{load_rules, recognize, Candidate, CandidateSource, NeRule, Recognizer};

use crate::text::Span;

/// Key/value descriptors carried by gazetteer entries, rules and mentions.
pub type Attributes = BTreeMap<String, String>;

/// Attribute naming the record name to use instead of the mention surface.
pub const CANONICAL_ATTR: &str = "canonical";

/// The closed entity ontology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityClass {
    Person,
    Organisation,
    Company,
    Bank,
    Location,
    Date,
    Time,
    Money,
    Telephone,
    Drug,
    Legislation,
    Activity,
    Transport,
}

impl EntityClass {
    pub const ALL: [EntityClass; 13] = [
        EntityClass::Person,
        EntityClass::Organisation,
        EntityClass::Company,
        EntityClass::Bank,
        EntityClass::Location,
        EntityClass::Date,
        EntityClass::Time,
        EntityClass::Money,
        EntityClass::Telephone,
        EntityClass::Drug,
        EntityClass::Legislation,
        EntityClass::Activity,
        EntityClass::Transport,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EntityClass::Person => "person",
            EntityClass::Organisation => "organisation",
            EntityClass::Company => "company",
            EntityClass::Bank => "bank",
            EntityClass::Location => "location",
            EntityClass::Date => "date",
            EntityClass::Time => "time",
            EntityClass::Money => "money",
            EntityClass::Telephone => "telephone",
            EntityClass::Drug => "drug",
            EntityClass::Legislation => "legislation",
            EntityClass::Activity => "activity",
            EntityClass::Transport => "transport",
        }
    }

    /// Classes whose mentions carry a normalized value.
    pub fn is_normalized(&self) -> bool {
        matches!(self, EntityClass::Date | EntityClass::Time | EntityClass::Money)
    }

    /// Organisation-like classes, the ones corporate descriptors and "it" can refer to.
    pub fn is_organisation_like(&self) -> bool {
        matches!(
            self,
            EntityClass::Organisation | EntityClass::Company | EntityClass::Bank
        )
    }
}

impl fmt::Display for EntityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownClass(pub String);

impl fmt::Display for UnknownClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown entity class {:?}", self.0)
    }
}

impl std::error::Error for UnknownClass {}

impl FromStr for EntityClass {
    type Err = UnknownClass;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EntityClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| UnknownClass(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Normalized {
    Date(NormalizedDate),
    Time(TimeOfDay),
    Money(Money),
}

/// One recognized entity occurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct Mention {
    pub span: Span,
    /// Token index range the mention covers.
    pub tokens: Range<usize>,
    pub class: EntityClass,
    pub surface: String,
    pub attributes: Attributes,
    pub normalized: Option<Normalized>,
}

impl Mention {
    /// The name a record built from this mention should carry.
    pub fn display_name(&self) -> &str {
        self.attributes
            .get(CANONICAL_ATTR)
            .map(String::as_str)
            .unwrap_or(&self.surface)
    }
}

pub(crate) fn is_attribute_key(key: &str) -> bool {
    let mut chars = key.chars();
    chars.next().is_some_and(|c| c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

/// Parses `key=value[,key=value...]`.
pub(crate) fn parse_attributes(field: &str) -> Result<Attributes, String> {
    let mut attrs = Attributes::new();
    for pair in field.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| format!("attribute {pair:?} is not key=value"))?;
        let (key, value) = (key.trim(), value.trim());
        if !is_attribute_key(key) {
            return Err(format!("attribute key {key:?} is not a lowercase identifier"));
        }
        if attrs.insert(key.to_string(), value.to_string()).is_some() {
            return Err(format!("attribute {key:?} given twice"));
        }
    }
    Ok(attrs)
}
