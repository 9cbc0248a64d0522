//! Entity and event records with their text serializations.
//!
//! The record format puts the record name (or event type) on its own line,
//! followed by one `    slot: value` line per slot, `id` first. Records
//! are separated by blank lines and entities precede events. Reference
//! lists are joined by `", "` and alias lists by `"; "`. Lines starting with
//! `#` are comments.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::ParseError;
use crate::ne::{EntityClass, NormalizedDate};

pub const ENTITY_PREFIX: &str = "ENTITY";
pub const EVENT_PREFIX: &str = "EVENT";
pub const ALIASES_SLOT: &str = "aliases";
/// Value of a role no binding could fill.
pub const UNKNOWN: &str = "unknown";

const INDENT: &str = "    ";

/// Canonical order of descriptive entity slots; others follow alphabetically.
pub const ENTITY_SLOT_ORDER: &[&str] = &[
    "subtype",
    "is_in",
    "normalisation",
    "amount",
    "currency",
    "location",
    ALIASES_SLOT,
    "domicile",
    "profession",
    "employer",
    "business",
    "class",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub u32);

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{ENTITY_PREFIX}-{}", self.0)
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{EVENT_PREFIX}-{}", self.0)
    }
}

fn parse_id(s: &str, prefix: &str) -> Option<u32> {
    let n = s.strip_prefix(prefix)?.strip_prefix('-')?;
    if n.is_empty() || !n.bytes().all(|b| b.is_ascii_digit()) || n.starts_with('0') {
        return None;
    }
    n.parse().ok()
}

impl FromStr for EntityId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_id(s, ENTITY_PREFIX).map(EntityId).ok_or_else(|| format!("bad entity id {s:?}"))
    }
}

impl FromStr for EventId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_id(s, EVENT_PREFIX).map(EventId).ok_or_else(|| format!("bad event id {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SlotValue {
    Text(String),
    Date(NormalizedDate),
    /// Always rendered as a list, even with one element.
    Refs(Vec<EntityId>),
    /// Alias lists.
    Names(Vec<String>),
}

impl SlotValue {
    pub fn text(s: impl Into<String>) -> Self {
        SlotValue::Text(s.into())
    }

    pub fn refs(&self) -> &[EntityId] {
        match self {
            SlotValue::Refs(r) => r,
            _ => &[],
        }
    }

    /// Classifies a serialized value by its shape.
    pub fn parse(slot: &str, raw: &str) -> SlotValue {
        if slot == ALIASES_SLOT {
            return SlotValue::Names(raw.split(';').map(|s| s.trim().to_string()).collect());
        }
        let items: Vec<&str> = raw.split(',').map(str::trim).collect();
        if let Ok(ids) = items.iter().map(|s| s.parse::<EntityId>()).collect::<Result<Vec<_>, _>>() {
            return SlotValue::Refs(ids);
        }
        if let Ok(date) = raw.parse::<NormalizedDate>() {
            if date.to_string() == raw {
                return SlotValue::Date(date);
            }
        }
        SlotValue::Text(raw.to_string())
    }
}

impl fmt::Display for SlotValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlotValue::Text(s) => f.write_str(s),
            SlotValue::Date(d) => write!(f, "{d}"),
            SlotValue::Refs(ids) => {
                let parts: Vec<String> = ids.iter().map(ToString::to_string).collect();
                f.write_str(&parts.join(", "))
            }
            SlotValue::Names(names) => f.write_str(&names.join("; ")),
        }
    }
}

pub type Slots = Vec<(String, SlotValue)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityRecord {
    pub id: EntityId,
    pub name: String,
    pub class: EntityClass,
    /// Descriptive slots in emission order; never contains `id` or `type`.
    pub slots: Slots,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub id: EventId,
    pub event_type: String,
    /// Role slots in emission order; never contains `id`.
    pub slots: Slots,
}

pub fn get_slot<'a>(slots: &'a Slots, name: &str) -> Option<&'a SlotValue> {
    slots.iter().find(|(k, _)| k == name).map(|(_, v)| v)
}

impl EntityRecord {
    pub fn new(id: EntityId, name: impl Into<String>, class: EntityClass) -> Self {
        EntityRecord { id, name: name.into(), class, slots: Vec::new() }
    }

    pub fn slot(&self, name: &str) -> Option<&SlotValue> {
        get_slot(&self.slots, name)
    }

    /// Replaces an existing value or appends a new slot.
    pub fn set(&mut self, name: &str, value: SlotValue) {
        match self.slots.iter_mut().find(|(k, _)| k == name) {
            Some((_, v)) => *v = value,
            None => self.slots.push((name.to_string(), value)),
        }
    }

    pub fn aliases(&self) -> &[String] {
        match self.slot(ALIASES_SLOT) {
            Some(SlotValue::Names(n)) => n,
            _ => &[],
        }
    }

    /// Reorders slots into the canonical entity order.
    pub fn sort_slots(&mut self) {
        let rank = |k: &str| ENTITY_SLOT_ORDER.iter().position(|s| *s == k).unwrap_or(ENTITY_SLOT_ORDER.len());
        self.slots.sort_by(|(a, _), (b, _)| rank(a).cmp(&rank(b)).then_with(|| a.cmp(b)));
    }
}

impl EventRecord {
    pub fn slot(&self, name: &str) -> Option<&SlotValue> {
        get_slot(&self.slots, name)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RecordSet {
    pub entities: Vec<EntityRecord>,
    pub events: Vec<EventRecord>,
}

impl RecordSet {
    pub fn is_empty(&self) -> bool {
        self.entities.is_empty() && self.events.is_empty()
    }

    /// Every reference resolves and ids are unique.
    pub fn validate(&self) -> Result<(), String> {
        let mut ids = HashSet::new();
        for e in &self.entities {
            if !ids.insert(e.id) {
                return Err(format!("duplicate id {}", e.id));
            }
        }
        let mut event_ids = HashSet::new();
        for e in &self.events {
            if !event_ids.insert(e.id) {
                return Err(format!("duplicate id {}", e.id));
            }
        }
        let slots = self
            .entities
            .iter()
            .map(|e| (e.id.to_string(), &e.slots))
            .chain(self.events.iter().map(|e| (e.id.to_string(), &e.slots)));
        for (owner, slots) in slots {
            for (name, value) in slots {
                if let Some(r) = value.refs().iter().find(|r| !ids.contains(r)) {
                    return Err(format!("{owner} slot {name} refers to missing {r}"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Records,
    Tabular,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "records" => Ok(OutputFormat::Records),
            "tabular" => Ok(OutputFormat::Tabular),
            _ => Err(format!("unknown output format {s:?}")),
        }
    }
}

pub fn emit_records(set: &RecordSet, format: OutputFormat) -> String {
    match format {
        OutputFormat::Records => emit_block_format(set),
        OutputFormat::Tabular => emit_tabular(set),
    }
}

fn emit_block_format(set: &RecordSet) -> String {
    let mut blocks = Vec::new();
    for e in &set.entities {
        let mut b = format!("{}\n{INDENT}id: {}\n{INDENT}type: {}\n", e.name, e.id, e.class);
        for (k, v) in &e.slots {
            b.push_str(&format!("{INDENT}{k}: {v}\n"));
        }
        blocks.push(b);
    }
    for e in &set.events {
        let mut b = format!("{}\n{INDENT}id: {}\n", e.event_type, e.id);
        for (k, v) in &e.slots {
            b.push_str(&format!("{INDENT}{k}: {v}\n"));
        }
        blocks.push(b);
    }
    blocks.join("\n")
}

fn emit_tabular(set: &RecordSet) -> String {
    let mut out = String::new();
    for e in &set.entities {
        out.push_str(&format!("{}\t{}\tname\t{}\n", e.id, e.class, e.name));
        for (k, v) in &e.slots {
            out.push_str(&format!("{}\t{}\t{k}\t{v}\n", e.id, e.class));
        }
    }
    for e in &set.events {
        for (k, v) in &e.slots {
            out.push_str(&format!("{}\t{}\t{k}\t{v}\n", e.id, e.event_type));
        }
    }
    out
}

struct RawRecord {
    header: String,
    line: usize,
    slots: Vec<(String, String, usize)>,
}

/// Parses the block record format and checks ids and references.
pub fn parse_records(text: &str) -> Result<RecordSet, ParseError> {
    let mut raw: Vec<RawRecord> = Vec::new();
    let mut open = false;
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = line.trim_end_matches('\r');
        if line.starts_with('#') {
            continue;
        }
        if line.trim().is_empty() {
            open = false;
            continue;
        }
        if line.starts_with(' ') || line.starts_with('\t') {
            let current = match raw.last_mut() {
                Some(r) if open => r,
                _ => return Err(ParseError::new(line_no, "slot line outside a record")),
            };
            let (slot, value) = line
                .trim()
                .split_once(':')
                .ok_or_else(|| ParseError::new(line_no, "expected \"slot: value\""))?;
            let (slot, value) = (slot.trim(), value.trim());
            if slot.is_empty() || value.is_empty() {
                return Err(ParseError::new(line_no, "empty slot name or value"));
            }
            current.slots.push((slot.to_string(), value.to_string(), line_no));
        } else {
            if open {
                return Err(ParseError::new(line_no, "record header without preceding blank line"));
            }
            raw.push(RawRecord { header: line.trim_end().to_string(), line: line_no, slots: Vec::new() });
            open = true;
        }
    }

    let mut set = RecordSet::default();
    for r in raw {
        let mut slots = r.slots.into_iter();
        let (id, id_line) = match slots.next() {
            Some((k, v, l)) if k == "id" => (v, l),
            _ => return Err(ParseError::new(r.line, "record must start with an id slot")),
        };
        if let Ok(id) = id.parse::<EntityId>() {
            if !set.events.is_empty() {
                return Err(ParseError::new(id_line, "entity records must precede events"));
            }
            let class = match slots.next() {
                Some((k, v, l)) if k == "type" => v.parse::<EntityClass>().map_err(|e| ParseError::new(l, e.to_string()))?,
                _ => return Err(ParseError::new(id_line, "entity record needs a type slot after id")),
            };
            let mut rec = EntityRecord::new(id, r.header, class);
            for (k, v, l) in slots {
                if k == "id" || k == "type" || rec.slot(&k).is_some() {
                    return Err(ParseError::new(l, format!("repeated slot {k:?}")));
                }
                rec.slots.push((k.clone(), SlotValue::parse(&k, &v)));
            }
            set.entities.push(rec);
        } else if let Ok(id) = id.parse::<EventId>() {
            let mut rec = EventRecord { id, event_type: r.header, slots: Vec::new() };
            for (k, v, l) in slots {
                if k == "id" || rec.slot(&k).is_some() {
                    return Err(ParseError::new(l, format!("repeated slot {k:?}")));
                }
                rec.slots.push((k.clone(), SlotValue::parse(&k, &v)));
            }
            set.events.push(rec);
        } else {
            return Err(ParseError::new(id_line, format!("bad record id {id:?}")));
        }
    }
    set.validate().map_err(|e| ParseError::new(0, e))?;
    Ok(set)
}
