//! Template elements: one entity record per coreference chain, with slots
//! filled from local textual evidence and a small world knowledge base.

use std::collections::{HashMap, HashSet};
use std::ops::Range;

use crate::coref::{ChainMember, Coreference};
use crate::error::{Error, ParseError};
use crate::ne::{EntityClass, Mention, Normalized};
use crate::records::{EntityId, EntityRecord, RecordSet, SlotValue, ALIASES_SLOT};
use crate::text::{sentence_of, Sentence, Span, Token};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Place {
    pub subtype: String,
    pub container: Option<String>,
}

/// Sectioned lookup tables: `[geography]`, `[roles]`, `[drugs]`,
/// `[business]`, `[dateline]` and `[dwellings]`.
#[derive(Debug, Clone, Default)]
pub struct WorldKb {
    /// Keyed by case-folded place name.
    geography: HashMap<String, Place>,
    /// (case-folded phrase words, profession)
    roles: Vec<(Vec<String>, String)>,
    drugs: HashMap<String, String>,
    /// (case-folded descriptor words, business)
    business: Vec<(Vec<String>, String)>,
    dateline: Vec<(String, String)>,
    dwellings: HashSet<String>,
}

fn phrase_words(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_lowercase).collect()
}

impl WorldKb {
    pub fn place(&self, name: &str) -> Option<&Place> {
        self.geography.get(&name.to_lowercase())
    }

    pub fn drug_class(&self, name: &str) -> Option<&str> {
        self.drugs.get(&name.to_lowercase()).map(String::as_str)
    }

    pub fn roles(&self) -> &[(Vec<String>, String)] {
        &self.roles
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Geography,
    Roles,
    Drugs,
    Business,
    Dateline,
    Dwellings,
}

/// Parses the knowledge base and rejects containment cycles.
pub fn load_world_kb(source: &str) -> Result<WorldKb, ParseError> {
    let mut kb = WorldKb::default();
    let mut section = None;
    let mut place_lines = HashMap::new();
    for (n, line) in source.lines().enumerate() {
        let line_no = n + 1;
        let line = line.trim_end_matches('\r');
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = Some(match name {
                "geography" => Section::Geography,
                "roles" => Section::Roles,
                "drugs" => Section::Drugs,
                "business" => Section::Business,
                "dateline" => Section::Dateline,
                "dwellings" => Section::Dwellings,
                other => return Err(ParseError::new(line_no, format!("unknown section [{other}]"))),
            });
            continue;
        }
        let Some(section) = section else {
            return Err(ParseError::new(line_no, "row before any section header"));
        };
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.iter().any(|f| f.is_empty()) {
            return Err(ParseError::new(line_no, "empty field"));
        }
        let bad_arity = || ParseError::new(line_no, format!("wrong number of fields ({})", fields.len()));
        match section {
            Section::Geography => {
                if !(2..=3).contains(&fields.len()) {
                    return Err(bad_arity());
                }
                let key = fields[0].to_lowercase();
                let place = Place { subtype: fields[1].to_string(), container: fields.get(2).map(|s| s.to_string()) };
                if kb.geography.insert(key.clone(), place).is_some() {
                    return Err(ParseError::new(line_no, format!("duplicate place {:?}", fields[0])));
                }
                place_lines.insert(key, line_no);
            }
            Section::Dwellings => {
                if fields.len() != 1 {
                    return Err(bad_arity());
                }
                kb.dwellings.insert(fields[0].to_lowercase());
            }
            _ => {
                let [key, value] = fields[..] else { return Err(bad_arity()) };
                match section {
                    Section::Roles => kb.roles.push((phrase_words(key), value.to_string())),
                    Section::Drugs => {
                        if kb.drugs.insert(key.to_lowercase(), value.to_string()).is_some() {
                            return Err(ParseError::new(line_no, format!("duplicate drug {key:?}")));
                        }
                    }
                    Section::Business => kb.business.push((phrase_words(key), value.to_string())),
                    _ => kb.dateline.push((key.to_string(), value.to_string())),
                }
            }
        }
    }

    let mut keys: Vec<&String> = kb.geography.keys().collect();
    keys.sort_by_key(|k| place_lines[*k]);
    for start in keys {
        let mut seen = HashSet::from([start.clone()]);
        let mut at = start.clone();
        while let Some(next) = kb.geography[&at].container.as_ref().map(|c| c.to_lowercase()) {
            if !seen.insert(next.clone()) {
                return Err(ParseError::new(place_lines[start], format!("containment cycle through {start:?}")));
            }
            if !kb.geography.contains_key(&next) {
                break;
            }
            at = next;
        }
    }
    Ok(kb)
}

/// A text region tied to an entity record: a name mention or a resolved pronoun.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Anchor {
    pub span: Span,
    pub tokens: Range<usize>,
    pub entity: EntityId,
    pub class: EntityClass,
    pub pronoun: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TemplateElements {
    pub entities: Vec<EntityRecord>,
    /// Sorted by token start.
    pub anchors: Vec<Anchor>,
}

pub fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

struct Evidence<'a> {
    tokens: &'a [Token],
    sentences: &'a [Sentence],
    anchors: &'a [Anchor],
}

impl Evidence<'_> {
    fn word(&self, i: usize) -> Option<String> {
        self.tokens.get(i).map(|t| t.surface.to_lowercase())
    }

    fn phrase_at(&self, i: usize, phrase: &[String]) -> bool {
        phrase.iter().enumerate().all(|(k, w)| self.word(i + k).as_deref() == Some(w.as_str()))
    }

    fn name_at(&self, i: usize) -> Option<&Anchor> {
        self.anchors.iter().find(|a| !a.pronoun && a.tokens.start == i)
    }

    fn last_org_before(&self, i: usize, sentence: Option<usize>) -> Option<&Anchor> {
        self.anchors
            .iter()
            .filter(|a| !a.pronoun && a.class.is_organisation_like() && a.tokens.end <= i)
            .filter(|a| sentence.is_none() || sentence_of(self.sentences, a.tokens.start) == sentence)
            .max_by_key(|a| a.tokens.end)
    }
}

/// Builds one record per chain, ids in first-mention order, then fills slots.
pub fn build_entities(
    tokens: &[Token],
    sentences: &[Sentence],
    mentions: &[Mention],
    coref: &Coreference,
    kb: &WorldKb,
) -> Result<TemplateElements, Error> {
    let mut chains: Vec<_> = coref.chains.iter().collect();
    chains.sort_by_key(|c| c.names().map(|i| mentions[i].span.start()).min());

    let mut entities = Vec::with_capacity(chains.len());
    let mut anchors = Vec::new();
    for (n, chain) in chains.iter().enumerate() {
        let id = EntityId(n as u32 + 1);
        let rep = &mentions[chain.representative];
        let mut record = EntityRecord::new(id, collapse_whitespace(rep.display_name()), chain.class);

        let rep_surface = collapse_whitespace(&rep.surface);
        let mut aliases: Vec<String> = Vec::new();
        for i in chain.names() {
            let s = collapse_whitespace(&mentions[i].surface);
            if s != rep_surface && s != record.name && !aliases.contains(&s) {
                aliases.push(s);
            }
        }
        if !aliases.is_empty() {
            record.set(ALIASES_SLOT, SlotValue::Names(aliases));
        }
        match &rep.normalized {
            Some(Normalized::Date(d)) => record.set("normalisation", SlotValue::Date(*d)),
            Some(Normalized::Time(t)) => record.set("normalisation", SlotValue::text(t.to_string())),
            Some(Normalized::Money(m)) => {
                record.set("amount", SlotValue::text(format!("{:.2}", m.amount)));
                record.set("currency", SlotValue::text(m.currency.clone()));
            }
            None => {}
        }
        if chain.class == EntityClass::Drug {
            let class = kb.drug_class(&record.name).or(rep.attributes.get("class").map(String::as_str));
            if let Some(class) = class {
                record.set("class", SlotValue::text(class));
            }
        }

        for member in &chain.members {
            let (span, range, pronoun) = match *member {
                ChainMember::Name(i) => (mentions[i].span, mentions[i].tokens.clone(), false),
                ChainMember::Pronoun(i) => {
                    let p = &coref.pronouns[i];
                    (p.span, p.token..p.token + 1, true)
                }
            };
            anchors.push(Anchor { span, tokens: range, entity: id, class: chain.class, pronoun });
        }
        entities.push(record);
    }
    anchors.sort_by_key(|a| (a.tokens.start, a.tokens.end));

    let ev = Evidence { tokens, sentences, anchors: &anchors };
    let mut fills: Vec<(EntityId, &str, SlotValue)> = Vec::new();
    role_slots(&ev, kb, &mut fills);
    domicile_slots(&ev, kb, &mut fills);
    organisation_location_slots(&ev, &entities, &mut fills);
    business_slots(&ev, kb, &mut fills);
    for (id, slot, value) in fills {
        let record = &mut entities[id.0 as usize - 1];
        if record.slot(slot).is_none() {
            record.set(slot, value);
        }
    }

    attach_geography(&mut entities, kb);
    for record in &mut entities {
        record.sort_slots();
    }
    RecordSet { entities: entities.clone(), events: Vec::new() }
        .validate()
        .map_err(Error::Consistency)?;
    Ok(TemplateElements { entities, anchors })
}

/// `<person> [,] <role phrase> <organisation>` gives profession and employer.
fn role_slots(ev: &Evidence, kb: &WorldKb, fills: &mut Vec<(EntityId, &'static str, SlotValue)>) {
    for person in ev.anchors.iter().filter(|a| !a.pronoun && a.class == EntityClass::Person) {
        let mut at = person.tokens.end;
        if ev.word(at).as_deref() == Some(",") {
            at += 1;
        }
        for (phrase, profession) in kb.roles() {
            if !ev.phrase_at(at, phrase) {
                continue;
            }
            if let Some(org) = ev.name_at(at + phrase.len()).filter(|a| a.class.is_organisation_like()) {
                fills.push((person.entity, "profession", SlotValue::text(profession.clone())));
                fills.push((person.entity, "employer", SlotValue::Refs(vec![org.entity])));
                break;
            }
        }
    }
}

/// `his|her <location> <dwelling>` gives the pronoun's entity a domicile.
fn domicile_slots(ev: &Evidence, kb: &WorldKb, fills: &mut Vec<(EntityId, &'static str, SlotValue)>) {
    for p in ev.anchors.iter().filter(|a| a.pronoun && a.class == EntityClass::Person) {
        if !matches!(ev.word(p.tokens.start).as_deref(), Some("his" | "her")) {
            continue;
        }
        let Some(place) = ev.name_at(p.tokens.end).filter(|a| a.class == EntityClass::Location) else {
            continue;
        };
        if ev.word(place.tokens.end).is_some_and(|w| kb.dwellings.contains(&w)) {
            fills.push((p.entity, "domicile", SlotValue::Refs(vec![place.entity])));
        }
    }
}

/// An organisation named `<location> <lowercase word>` is located there.
fn organisation_location_slots(ev: &Evidence, entities: &[EntityRecord], fills: &mut Vec<(EntityId, &'static str, SlotValue)>) {
    for org in ev.anchors.iter().filter(|a| !a.pronoun && a.class.is_organisation_like()) {
        let range = org.tokens.clone();
        if range.len() < 2 || !ev.tokens[range.end - 1].surface.chars().all(char::is_lowercase) {
            continue;
        }
        let prefix: Vec<&str> = ev.tokens[range.start..range.end - 1].iter().map(|t| t.surface.as_str()).collect();
        let prefix = prefix.join(" ").to_lowercase();
        let place = entities.iter().find(|e| {
            e.class == EntityClass::Location
                && (e.name.to_lowercase() == prefix || e.aliases().iter().any(|a| a.to_lowercase() == prefix))
        });
        if let Some(place) = place {
            fills.push((org.entity, "location", SlotValue::Refs(vec![place.id])));
        }
    }
}

const DEFINITE_HEADS: &[&str] = &["company", "firm", "concern"];

/// Business descriptors attach to the organisation they name or describe.
fn business_slots(ev: &Evidence, kb: &WorldKb, fills: &mut Vec<(EntityId, &'static str, SlotValue)>) {
    if let Some(first) = ev.name_at(0).filter(|a| a.class.is_organisation_like()) {
        let dash = |i| ev.word(i).as_deref() == Some("-");
        if dash(first.tokens.end) && dash(first.tokens.end + 1) {
            for (slot, value) in &kb.dateline {
                if slot == "business" {
                    fills.push((first.entity, "business", SlotValue::text(value.clone())));
                }
            }
        }
    }
    for i in 0..ev.tokens.len() {
        for (phrase, business) in &kb.business {
            if !ev.phrase_at(i, phrase) {
                continue;
            }
            let end = i + phrase.len();
            let sentence = sentence_of(ev.sentences, i);
            let target = ev
                .name_at(end)
                .filter(|a| a.class.is_organisation_like())
                .or_else(|| ev.last_org_before(i, sentence))
                .or_else(|| {
                    let start = sentence.map_or(0, |s| ev.sentences[s].tokens.start);
                    let np = (start..i).rev().find(|&k| {
                        ev.word(k).as_deref() == Some("the")
                            && ev.word(k + 1).is_some_and(|w| DEFINITE_HEADS.contains(&w.as_str()))
                    })?;
                    ev.last_org_before(np, None)
                });
            if let Some(org) = target {
                fills.push((org.entity, "business", SlotValue::text(business.clone())));
            }
        }
    }
}

/// Location records gain `subtype` and `is_in` from the geography table.
/// `is_in` refers to an earlier record naming the container, else holds the
/// container's name.
pub fn attach_geography(records: &mut [EntityRecord], kb: &WorldKb) {
    for i in 0..records.len() {
        if records[i].class != EntityClass::Location {
            continue;
        }
        let Some(place) = kb.place(&records[i].name) else {
            continue;
        };
        let container = place.container.as_ref().map(|c| {
            let key = c.to_lowercase();
            records[..i]
                .iter()
                .find(|r| {
                    r.class == EntityClass::Location
                        && (r.name.to_lowercase() == key || r.aliases().iter().any(|a| a.to_lowercase() == key))
                })
                .map_or_else(|| SlotValue::text(c.clone()), |r| SlotValue::Refs(vec![r.id]))
        });
        let record = &mut records[i];
        record.set("subtype", SlotValue::text(place.subtype.clone()));
        if let Some(c) = container {
            record.set("is_in", c);
        }
        record.sort_slots();
    }
}

/// (name, type) pairs covered by the records: each name plus its aliases.
pub fn project_records(records: &[EntityRecord]) -> HashSet<(String, EntityClass)> {
    records
        .iter()
        .flat_map(|r| std::iter::once(r.name.clone()).chain(r.aliases().iter().cloned()).map(move |n| (n, r.class)))
        .collect()
}

/// (name, class) pairs of the mentions, under the record naming convention.
pub fn project_mentions(mentions: &[Mention]) -> HashSet<(String, EntityClass)> {
    mentions.iter().map(|m| (collapse_whitespace(m.display_name()), m.class)).collect()
}
