//! Rendering records for another locale through direct translation tables.
//!
//! Slot names, type names, event types and closed-class values are looked up
//! in a [`Lexicon`]; anything without an entry passes through unchanged and
//! is reported as untranslated. Dates follow the locale's date pattern and
//! `amount` values its number separators. The `en` lexicon is the identity.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::ParseError;
use crate::ne::NormalizedDate;
use crate::records::{EntityId, RecordSet, SlotValue, Slots, ENTITY_PREFIX, EVENT_PREFIX};

pub const IDENTITY_LOCALE: &str = "en";
const INDENT: &str = "    ";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    locale: String,
    entries: HashMap<String, String>,
}

impl Lexicon {
    pub fn identity() -> Self {
        Lexicon { locale: IDENTITY_LOCALE.to_string(), entries: HashMap::new() }
    }

    pub fn locale(&self) -> &str {
        &self.locale
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.locale == IDENTITY_LOCALE
    }

    pub fn lookup<'a>(&'a self, term: &'a str) -> Option<&'a str> {
        if self.is_identity() {
            return Some(self.entries.get(term).map_or(term, String::as_str));
        }
        self.entries.get(term).map(String::as_str)
    }
}

/// A `locale: <tag>` header, then `source TAB target` lines.
pub fn load_lexicon(source: &str) -> Result<Lexicon, ParseError> {
    let mut locale = None;
    let mut entries = HashMap::new();
    for (n, line) in source.lines().enumerate() {
        let line_no = n + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let Some(_) = locale else {
            let tag = line
                .strip_prefix("locale:")
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .ok_or_else(|| ParseError::new(line_no, "expected \"locale: <tag>\" header"))?;
            locale = Some(tag.to_string());
            continue;
        };
        let (src, dst) = line
            .split_once('\t')
            .map(|(a, b)| (a.trim(), b.trim()))
            .filter(|(a, b)| !a.is_empty() && !b.is_empty())
            .ok_or_else(|| ParseError::new(line_no, "expected \"source TAB target\""))?;
        if locale.as_deref() == Some(IDENTITY_LOCALE) && src != dst {
            return Err(ParseError::new(line_no, "the en lexicon must map terms to themselves"));
        }
        if entries.insert(src.to_string(), dst.to_string()).is_some() {
            return Err(ParseError::new(line_no, format!("duplicate source term {src:?}")));
        }
    }
    let locale = locale.ok_or_else(|| ParseError::new(1, "missing \"locale: <tag>\" header"))?;
    Ok(Lexicon { locale, entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Day { pad: bool },
    Month { pad: bool },
    Year,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Piece {
    Field(Field),
    Literal(String),
}

/// Day/month/year order and separators, e.g. `dd/mm/yyyy` or `m/d/y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatePattern {
    pieces: Vec<Piece>,
}

impl FromStr for DatePattern {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().collect();
        let mut pieces = Vec::new();
        let mut seen = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if matches!(c, 'd' | 'm' | 'y') {
                let run = chars[i..].iter().take_while(|&&x| x == c).count();
                let field = match (c, run) {
                    ('d', 1) => Field::Day { pad: false },
                    ('d', 2) => Field::Day { pad: true },
                    ('m', 1) => Field::Month { pad: false },
                    ('m', 2) => Field::Month { pad: true },
                    ('y', 1 | 4) => Field::Year,
                    _ => return Err(format!("bad field {:?} in date pattern", c.to_string().repeat(run))),
                };
                if seen.contains(&c) {
                    return Err(format!("date pattern names {c} twice"));
                }
                seen.push(c);
                pieces.push(Piece::Field(field));
                i += run;
            } else {
                match pieces.last_mut() {
                    Some(Piece::Literal(l)) => l.push(c),
                    _ => pieces.push(Piece::Literal(c.to_string())),
                }
                i += 1;
            }
        }
        if seen.is_empty() {
            return Err("date pattern has no fields".to_string());
        }
        Ok(DatePattern { pieces })
    }
}

impl DatePattern {
    /// Unknown components render as `?`.
    pub fn render(&self, date: &NormalizedDate) -> String {
        let mut out = String::new();
        for piece in &self.pieces {
            match piece {
                Piece::Literal(l) => out.push_str(l),
                Piece::Field(f) => {
                    let (value, pad) = match f {
                        Field::Day { pad } => (date.day.map(u16::from), *pad),
                        Field::Month { pad } => (date.month.map(u16::from), *pad),
                        Field::Year => (date.year, false),
                    };
                    match (value, pad) {
                        (Some(v), true) => write!(out, "{v:02}").unwrap(),
                        (Some(v), false) => write!(out, "{v}").unwrap(),
                        (None, _) => out.push('?'),
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocaleFormat {
    pub date_pattern: DatePattern,
    pub decimal: char,
    pub group: Option<char>,
}

impl Default for LocaleFormat {
    fn default() -> Self {
        LocaleFormat { date_pattern: "dd/mm/yyyy".parse().expect("valid pattern"), decimal: '.', group: None }
    }
}

fn separator(value: &str) -> Result<Option<char>, String> {
    match value {
        "none" => Ok(None),
        "space" => Ok(Some(' ')),
        v if v.chars().count() == 1 => Ok(v.chars().next()),
        v => Err(format!("separator must be one character, \"space\" or \"none\", got {v:?}")),
    }
}

/// `key=value` lines: `date_pattern`, `decimal`, `group`.
pub fn load_locale_format(source: &str) -> Result<LocaleFormat, ParseError> {
    let mut fmt = LocaleFormat::default();
    for (n, line) in source.lines().enumerate() {
        let line_no = n + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |m: String| ParseError::new(line_no, m);
        let (key, value) = line.split_once('=').ok_or_else(|| err("expected key=value".into()))?;
        let value = value.trim();
        match key.trim() {
            "date_pattern" => fmt.date_pattern = value.parse().map_err(err)?,
            "decimal" => fmt.decimal = separator(value).map_err(err)?.ok_or_else(|| err("decimal separator is required".into()))?,
            "group" => fmt.group = separator(value).map_err(err)?,
            other => return Err(err(format!("unknown key {other:?}"))),
        }
    }
    if fmt.group == Some(fmt.decimal) {
        return Err(ParseError::new(0, "decimal and group separators must differ"));
    }
    Ok(fmt)
}

impl LocaleFormat {
    /// Re-renders a plain decimal number; other text is returned unchanged.
    pub fn number(&self, value: &str) -> Option<String> {
        let (int, frac) = value.split_once('.').unwrap_or((value, ""));
        let (sign, digits) = int.strip_prefix('-').map_or(("", int), |d| ("-", d));
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let mut out = String::from(sign);
        for (i, c) in digits.chars().enumerate() {
            if i > 0 && (digits.len() - i) % 3 == 0 {
                if let Some(g) = self.group {
                    out.push(g);
                }
            }
            out.push(c);
        }
        if value.contains('.') {
            out.push(self.decimal);
            out.push_str(frac);
        }
        Some(out)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Localized {
    pub text: String,
    /// Distinct items passed through without translation, in first-seen order.
    pub untranslated: Vec<String>,
}

struct Localizer<'a> {
    lex: &'a Lexicon,
    fmt: &'a LocaleFormat,
    untranslated: Vec<String>,
}

impl Localizer<'_> {
    fn flag(&mut self, item: &str) {
        if !self.untranslated.iter().any(|u| u == item) {
            self.untranslated.push(item.to_string());
        }
    }

    fn term(&mut self, term: &str) -> String {
        match self.lex.lookup(term) {
            Some(t) => t.to_string(),
            None => {
                self.flag(term);
                term.to_string()
            }
        }
    }

    /// Proper names pass through and are always reported.
    fn free_text(&mut self, s: &str) -> String {
        match self.lex.entries.get(s) {
            Some(t) => t.clone(),
            None => {
                self.flag(s);
                s.to_string()
            }
        }
    }

    fn prefix(&self, prefix: &str) -> String {
        self.lex.lookup(&prefix.to_lowercase()).map_or(prefix.to_string(), str::to_uppercase)
    }

    fn entity_id(&self, id: EntityId) -> String {
        format!("{}-{}", self.prefix(ENTITY_PREFIX), id.0)
    }

    fn value(&mut self, slot: &str, v: &SlotValue) -> String {
        match v {
            SlotValue::Text(t) if slot == "amount" => self.fmt.number(t).unwrap_or_else(|| t.clone()),
            SlotValue::Text(t) => self.term(t),
            SlotValue::Date(d) => self.fmt.date_pattern.render(d),
            SlotValue::Refs(ids) => ids.iter().map(|id| self.entity_id(*id)).collect::<Vec<_>>().join(", "),
            SlotValue::Names(names) => names.iter().map(|n| self.free_text(n)).collect::<Vec<_>>().join("; "),
        }
    }

    fn slots(&mut self, out: &mut String, slots: &Slots) {
        for (k, v) in slots {
            let (k, v) = (self.term(k), self.value(k, v));
            writeln!(out, "{INDENT}{k}: {v}").unwrap();
        }
    }
}

/// Renders records in the block format of the target locale.
pub fn localize_records(set: &RecordSet, lex: &Lexicon, fmt: &LocaleFormat) -> Localized {
    let mut l = Localizer { lex, fmt, untranslated: Vec::new() };
    let mut blocks = Vec::new();
    for e in &set.entities {
        let mut b = String::new();
        let name = l.free_text(&e.name);
        let (id_slot, type_slot) = (l.term("id"), l.term("type"));
        let class = l.term(e.class.as_str());
        writeln!(b, "{name}\n{INDENT}{id_slot}: {}\n{INDENT}{type_slot}: {class}", l.entity_id(e.id)).unwrap();
        l.slots(&mut b, &e.slots);
        blocks.push(b);
    }
    for e in &set.events {
        let mut b = String::new();
        let header = l.term(&e.event_type);
        let id_slot = l.term("id");
        writeln!(b, "{header}\n{INDENT}{id_slot}: {}-{}", l.prefix(EVENT_PREFIX), e.id.0).unwrap();
        l.slots(&mut b, &e.slots);
        blocks.push(b);
    }
    Localized { text: blocks.join("\n"), untranslated: l.untranslated }
}
