//! Scenario templates: trigger patterns instantiate events whose roles are
//! bound to entity records found in a declared scope around the trigger.
//!
//! Rule file blocks:
//!
//! ```text
//! event <type>
//! trigger: <pattern>
//! role <name>: <class>[|<class>...][+] scope=<scope> [cue=<word>] [expand=<slot>]
//! role <name>: const <literal>
//! status: <cue words> => <value>
//! ```
//!
//! A blank line ends a block. `+` makes a list role; a list role may be
//! declared on several lines and collects one binding per line. Hits of one
//! rule merge into one event while their single-valued fills agree.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::ParseError;
use crate::ne::{ClassSpans, EntityClass, Pattern};
use crate::records::{get_slot, EntityId, EntityRecord, EventId, EventRecord, SlotValue, Slots, UNKNOWN};
use crate::template::{Anchor, TemplateElements};
use crate::text::{sentence_of, Sentence, Token};

const STATUS_SLOT: &str = "status";
const ARTICLES: &[&str] = &["the", "a", "an"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    SameSentence,
    SameDocument,
    NearestBefore,
    NearestAfter,
}

impl FromStr for Scope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "same-sentence" => Ok(Scope::SameSentence),
            "same-document" => Ok(Scope::SameDocument),
            "nearest-before" => Ok(Scope::NearestBefore),
            "nearest-after" => Ok(Scope::NearestAfter),
            _ => Err(format!("unknown scope {s:?}")),
        }
    }
}

/// Global precision/recall setting for role search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScopeDial {
    /// Every role is searched only inside the trigger sentence.
    SameSentence,
    /// Roles use their declared scopes.
    #[default]
    SameDocument,
}

impl FromStr for ScopeDial {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "same-sentence" => Ok(ScopeDial::SameSentence),
            "same-document" => Ok(ScopeDial::SameDocument),
            _ => Err(format!("scenario scope must be same-sentence or same-document, got {s:?}")),
        }
    }
}

impl fmt::Display for ScopeDial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScopeDial::SameSentence => "same-sentence",
            ScopeDial::SameDocument => "same-document",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityBinding {
    pub classes: Vec<EntityClass>,
    pub scope: Scope,
    /// Word that must precede the entity, optionally followed by one article.
    pub cue: Option<String>,
    /// Slot whose references are added to each bound entity.
    pub expand: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    Entity(EntityBinding),
    Const(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Role {
    pub name: String,
    pub list: bool,
    /// One or more bindings; list roles collect all, single roles take the first that fills.
    pub bindings: Vec<Binding>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatusRule {
    pub cue: Vec<String>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRule {
    pub id: String,
    pub event_type: String,
    pub triggers: Vec<Pattern>,
    pub roles: Vec<Role>,
    pub status_rules: Vec<StatusRule>,
}

fn parse_role(name: &str, body: &str) -> Result<(bool, Binding), String> {
    let mut words = body.split_whitespace();
    let head = words.next().ok_or("role without binding")?;
    if head == "const" {
        let literal = words.collect::<Vec<_>>().join(" ");
        if literal.is_empty() {
            return Err(format!("role {name:?} has an empty constant"));
        }
        return Ok((false, Binding::Const(literal)));
    }
    let (classes, list) = match head.strip_suffix('+') {
        Some(c) => (c, true),
        None => (head, false),
    };
    let classes = classes
        .split('|')
        .map(|c| c.parse::<EntityClass>().map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    let (mut scope, mut cue, mut expand) = (None, None, None);
    for opt in words {
        match opt.split_once('=') {
            Some(("scope", v)) => scope = Some(v.parse::<Scope>()?),
            Some(("cue", v)) if !v.is_empty() => cue = Some(v.to_lowercase()),
            Some(("expand", v)) if !v.is_empty() => expand = Some(v.to_string()),
            _ => return Err(format!("unknown role option {opt:?}")),
        }
    }
    let scope = scope.ok_or_else(|| format!("role {name:?} needs a scope"))?;
    Ok((list, Binding::Entity(EntityBinding { classes, scope, cue, expand })))
}

/// Parses the block rule format; rules keep file order.
pub fn load_scenario_rules(source: &str) -> Result<Vec<ScenarioRule>, ParseError> {
    let mut rules: Vec<(ScenarioRule, usize)> = Vec::new();
    let mut open = false;
    for (n, line) in source.lines().enumerate() {
        let line_no = n + 1;
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            open = false;
            continue;
        }
        let err = |m: String| ParseError::new(line_no, m);
        if let Some(event_type) = line.strip_prefix("event ") {
            let event_type = event_type.trim().to_string();
            if rules.iter().any(|(r, _)| r.event_type == event_type) {
                return Err(err(format!("event type {event_type:?} defined twice")));
            }
            rules.push((
                ScenarioRule { id: event_type.clone(), event_type, triggers: vec![], roles: vec![], status_rules: vec![] },
                line_no,
            ));
            open = true;
            continue;
        }
        let rule = match rules.last_mut() {
            Some((r, _)) if open => r,
            _ => return Err(err("line outside an event block".into())),
        };
        if let Some(pattern) = line.strip_prefix("trigger:") {
            rule.triggers.push(Pattern::parse(pattern.trim()).map_err(err)?);
        } else if let Some(rest) = line.strip_prefix("role ") {
            let (name, body) = rest.split_once(':').ok_or_else(|| err("expected \"role <name>: ...\"".into()))?;
            let name = name.trim();
            if name.is_empty() || name == "id" || name == STATUS_SLOT {
                return Err(err(format!("invalid role name {name:?}")));
            }
            let (list, binding) = parse_role(name, body).map_err(err)?;
            match rule.roles.iter_mut().find(|r| r.name == name) {
                Some(role) if role.list && list => role.bindings.push(binding),
                Some(_) => return Err(err(format!("role {name:?} repeated without being a list role"))),
                None => rule.roles.push(Role { name: name.to_string(), list, bindings: vec![binding] }),
            }
        } else if let Some(rest) = line.strip_prefix("status:") {
            let (cue, value) = rest.split_once("=>").ok_or_else(|| err("expected \"status: <cue> => <value>\"".into()))?;
            let cue: Vec<String> = cue.split_whitespace().map(str::to_lowercase).collect();
            let value = value.trim();
            if cue.is_empty() || value.is_empty() {
                return Err(err("empty status cue or value".into()));
            }
            rule.status_rules.push(StatusRule { cue, value: value.to_string() });
        } else {
            return Err(err(format!("unrecognized line {line:?}")));
        }
    }
    rules
        .into_iter()
        .map(|(rule, line)| {
            if rule.triggers.is_empty() {
                Err(ParseError::new(line, format!("event {:?} has no trigger", rule.event_type)))
            } else {
                Ok(rule)
            }
        })
        .collect()
}

struct NameSpans<'a>(&'a [Anchor]);

impl ClassSpans for NameSpans<'_> {
    fn class_ends(&self, class: EntityClass, filter: Option<(&str, &str)>, start: usize) -> Vec<usize> {
        if filter.is_some() {
            return Vec::new();
        }
        self.0
            .iter()
            .filter(|a| !a.pronoun && a.class == class && a.tokens.start == start)
            .map(|a| a.tokens.end)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Fill {
    Single(Option<SlotValue>),
    List(BTreeSet<EntityId>),
}

struct Instance {
    rule: usize,
    fills: Vec<Fill>,
    status: Option<String>,
}

impl Instance {
    fn consistent(&self, other: &Instance) -> bool {
        let single_ok = self.fills.iter().zip(&other.fills).all(|(a, b)| match (a, b) {
            (Fill::Single(Some(x)), Fill::Single(Some(y))) => x == y,
            _ => true,
        });
        let status_ok = match (&self.status, &other.status) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        };
        self.rule == other.rule && single_ok && status_ok
    }

    fn absorb(&mut self, other: Instance) {
        for (a, b) in self.fills.iter_mut().zip(other.fills) {
            match (a, b) {
                (Fill::Single(x @ None), Fill::Single(y)) => *x = y,
                (Fill::List(x), Fill::List(y)) => x.extend(y),
                _ => {}
            }
        }
        if self.status.is_none() {
            self.status = other.status;
        }
    }
}

struct Context<'a> {
    tokens: &'a [Token],
    sentences: &'a [Sentence],
    names: Vec<&'a Anchor>,
    entities: &'a [EntityRecord],
}

impl Context<'_> {
    fn word(&self, i: usize) -> Option<String> {
        self.tokens.get(i).map(|t| t.surface.to_lowercase())
    }

    fn sentence(&self, token: usize) -> Option<usize> {
        sentence_of(self.sentences, token)
    }

    fn cued(&self, anchor: &Anchor, cue: &str) -> bool {
        let mut i = anchor.tokens.start;
        if i > 0 && self.word(i - 1).is_some_and(|w| ARTICLES.contains(&w.as_str())) {
            if self.word(i - 1).as_deref() == Some(cue) {
                return true;
            }
            i -= 1;
        }
        i > 0 && self.word(i - 1).as_deref() == Some(cue)
    }

    /// Entities a binding selects for a trigger occupying `trigger` tokens.
    fn bind(&self, b: &EntityBinding, trigger: &std::ops::Range<usize>, dial: ScopeDial) -> Vec<EntityId> {
        let ts = self.sentence(trigger.start);
        let in_sentence = |a: &&&Anchor| self.sentence(a.tokens.start) == ts;
        let candidates: Vec<&Anchor> = self
            .names
            .iter()
            .filter(|a| b.classes.contains(&a.class))
            .filter(|a| b.cue.as_deref().is_none_or(|c| self.cued(a, c)))
            .filter(|a| dial == ScopeDial::SameDocument || in_sentence(a))
            .copied()
            .collect();
        let distance = |a: &Anchor| {
            if a.tokens.end <= trigger.start {
                trigger.start - a.tokens.end
            } else {
                a.tokens.start.saturating_sub(trigger.end)
            }
        };
        let chosen: Vec<&Anchor> = match b.scope {
            Scope::NearestBefore => candidates.iter().filter(|a| a.tokens.end <= trigger.start).max_by_key(|a| a.tokens.end).into_iter().copied().collect(),
            Scope::NearestAfter => candidates.iter().filter(|a| a.tokens.start >= trigger.end).min_by_key(|a| a.tokens.start).into_iter().copied().collect(),
            Scope::SameSentence => candidates.into_iter().filter(|a| self.sentence(a.tokens.start) == ts).collect(),
            Scope::SameDocument => candidates,
        };
        let mut chosen = chosen;
        chosen.sort_by_key(|a| (distance(a), a.tokens.start));
        let mut ids: Vec<EntityId> = Vec::new();
        for a in chosen {
            if !ids.contains(&a.entity) {
                ids.push(a.entity);
            }
            if let Some(slot) = &b.expand {
                let record = &self.entities[a.entity.0 as usize - 1];
                for r in get_slot(&record.slots, slot).map(SlotValue::refs).unwrap_or(&[]) {
                    if !ids.contains(r) {
                        ids.push(*r);
                    }
                }
            }
        }
        ids
    }

    fn status(&self, rule: &ScenarioRule, trigger_start: usize) -> Option<String> {
        let range = self.sentences.get(self.sentence(trigger_start)?)?.tokens.clone();
        rule.status_rules
            .iter()
            .find(|s| range.clone().any(|i| s.cue.iter().enumerate().all(|(k, w)| range.contains(&(i + k)) && self.word(i + k).as_deref() == Some(w))))
            .map(|s| s.value.clone())
    }
}

/// Runs every rule over the document and numbers events by first trigger position.
pub fn extract_events(
    tokens: &[Token],
    sentences: &[Sentence],
    elements: &TemplateElements,
    rules: &[ScenarioRule],
    dial: ScopeDial,
) -> Vec<EventRecord> {
    let names: Vec<&Anchor> = elements.anchors.iter().filter(|a| !a.pronoun).collect();
    let ctx = Context { tokens, sentences, names, entities: &elements.entities };
    let spans = NameSpans(&elements.anchors);

    let mut hits: Vec<(usize, usize, std::ops::Range<usize>)> = Vec::new();
    for (ri, rule) in rules.iter().enumerate() {
        let mut starts = BTreeSet::new();
        for trigger in &rule.triggers {
            for m in trigger.find_all(tokens, &spans) {
                if starts.insert(m.matched.start) {
                    hits.push((m.matched.start, ri, m.matched));
                }
            }
        }
    }
    hits.sort_by_key(|(start, ri, _)| (*start, *ri));

    let mut instances: Vec<Instance> = Vec::new();
    for (_, ri, trigger) in hits {
        let rule = &rules[ri];
        let fills = rule
            .roles
            .iter()
            .map(|role| {
                let mut list = BTreeSet::new();
                let mut single = None;
                for binding in &role.bindings {
                    match binding {
                        Binding::Const(v) => single = single.or_else(|| Some(SlotValue::text(v.clone()))),
                        Binding::Entity(b) => {
                            let ids = ctx.bind(b, &trigger, dial);
                            if role.list {
                                list.extend(ids);
                            } else if single.is_none() {
                                single = ids.first().map(|id| SlotValue::Refs(vec![*id]));
                            }
                        }
                    }
                }
                if role.list {
                    Fill::List(list)
                } else {
                    Fill::Single(single)
                }
            })
            .collect();
        let inst = Instance { rule: ri, fills, status: ctx.status(rule, trigger.start) };
        match instances.iter_mut().find(|e| e.consistent(&inst)) {
            Some(existing) => existing.absorb(inst),
            None => instances.push(inst),
        }
    }

    instances
        .into_iter()
        .enumerate()
        .map(|(n, inst)| {
            let rule = &rules[inst.rule];
            let mut slots: Slots = rule
                .roles
                .iter()
                .zip(inst.fills)
                .map(|(role, fill)| {
                    let value = match fill {
                        Fill::Single(Some(v)) => v,
                        Fill::List(ids) if !ids.is_empty() => SlotValue::Refs(ids.into_iter().collect()),
                        _ => SlotValue::text(UNKNOWN),
                    };
                    (role.name.clone(), value)
                })
                .collect();
            if let Some(status) = inst.status {
                slots.push((STATUS_SLOT.to_string(), SlotValue::text(status)));
            }
            EventRecord { id: EventId(n as u32 + 1), event_type: rule.event_type.clone(), slots }
        })
        .collect()
}

fn value_covered(narrow: &SlotValue, wide: Option<&SlotValue>) -> bool {
    if *narrow == SlotValue::text(UNKNOWN) {
        return true;
    }
    match (narrow, wide) {
        (SlotValue::Refs(a), Some(SlotValue::Refs(b))) => a.iter().all(|x| b.contains(x)),
        (a, Some(b)) => a == b,
        (_, None) => false,
    }
}

/// True when `wide` carries everything `narrow` asserts: same type, and each
/// filled slot of `narrow` equal to (or, for references, contained in) the
/// corresponding slot of `wide`.
pub fn subsumes(wide: &EventRecord, narrow: &EventRecord) -> bool {
    wide.event_type == narrow.event_type && narrow.slots.iter().all(|(k, v)| value_covered(v, wide.slot(k)))
}

/// Every event of `narrow` is subsumed by some event of `wide`.
pub fn events_subsumed(narrow: &[EventRecord], wide: &[EventRecord]) -> bool {
    narrow.iter().all(|n| wide.iter().any(|w| subsumes(w, n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const RULES: &str = "event narcotics-smuggling\ntrigger: drug smuggling\ntrigger: importing <drug>\nrole destination: location scope=nearest-after cue=into\nrole perpetrators: person+ scope=same-sentence expand=employer\nstatus: charges of => on-trial\n\nevent joint-venture\ntrigger: transport venture\nrole type: const transport\nrole companies: organisation|company+ scope=nearest-before\nrole companies: organisation|company+ scope=nearest-after\n";

    #[test]
    fn rules_load_in_file_order() {
        let rules = load_scenario_rules(RULES).unwrap();
        assert_eq!(rules.len(), 2);
        assert_eq!(rules[0].event_type, "narcotics-smuggling");
        assert_eq!(rules[0].triggers.len(), 2);
        assert_eq!(rules[1].roles[1].bindings.len(), 2);
        assert!(rules[0].roles[1].list);
        assert!(load_scenario_rules("").unwrap().is_empty());
    }

    #[test]
    fn rule_errors_carry_lines() {
        assert_eq!(load_scenario_rules("event x\nrole a: person scope=same-sentence\n").unwrap_err().line, 1);
        assert_eq!(load_scenario_rules("event x\ntrigger: a\nrole a: person scope=somewhere\n").unwrap_err().line, 3);
        assert_eq!(load_scenario_rules("event x\ntrigger: a\nrole a: narcotics scope=same-sentence\n").unwrap_err().line, 3);
        assert_eq!(load_scenario_rules("event x\ntrigger: a\nrole a: person\n").unwrap_err().line, 3);
        assert_eq!(load_scenario_rules("trigger: a\n").unwrap_err().line, 1);
        assert_eq!(load_scenario_rules("event x\ntrigger: a\n\nevent x\ntrigger: b\n").unwrap_err().line, 4);
        assert_eq!(
            load_scenario_rules("event x\ntrigger: a\nrole a: person scope=same-sentence\nrole a: person scope=same-sentence\n").unwrap_err().line,
            4
        );
    }

    fn ev(slots: &[(&str, SlotValue)]) -> EventRecord {
        EventRecord {
            id: EventId(1),
            event_type: "t".into(),
            slots: slots.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        }
    }

    #[test]
    fn subsumption() {
        let wide = ev(&[("a", SlotValue::Refs(vec![EntityId(1), EntityId(2)])), ("s", SlotValue::text("past"))]);
        assert!(subsumes(&wide, &ev(&[("a", SlotValue::Refs(vec![EntityId(2)])), ("s", SlotValue::text("past"))])));
        assert!(subsumes(&wide, &ev(&[("a", SlotValue::text(UNKNOWN))])));
        assert!(!subsumes(&wide, &ev(&[("a", SlotValue::Refs(vec![EntityId(3)]))])));
        assert!(!subsumes(&wide, &ev(&[("s", SlotValue::text("planned"))])));
        assert!(events_subsumed(&[], &[wide]));
    }
}
