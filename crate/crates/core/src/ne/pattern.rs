//! Token patterns shared by NE rules and scenario triggers.
//!
//! Atoms are whitespace-separated:
//!
//! * `"Inc."` exact literal, `"Inc."|"Ltd."` alternatives
//! * `police` bare literal, matched case-insensitively
//! * `<location>` a span of that class, `<date:kind=month>` with an attribute filter
//! * `{capitalized}` an orthographic test on one token
//! * `[` and `]` delimit the part of the match that becomes the mention
//!
//! Any atom but a bracket may end in `?`, `+` or `*`.

use std::ops::Range;

use super::EntityClass;
use crate::text::{Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orthography {
    Capitalized,
    AllCaps,
    Lower,
    Number,
    Initial,
    Year,
    Word,
    Punct,
    Any,
}

impl Orthography {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "capitalized" => Orthography::Capitalized,
            "allcaps" => Orthography::AllCaps,
            "lower" => Orthography::Lower,
            "number" | "digits" => Orthography::Number,
            "initial" => Orthography::Initial,
            "year" => Orthography::Year,
            "word" => Orthography::Word,
            "punct" => Orthography::Punct,
            "any" => Orthography::Any,
            _ => return None,
        })
    }

    fn test(&self, t: &Token) -> bool {
        match self {
            Orthography::Capitalized => t.is_capitalized() && !t.is_initial(),
            Orthography::AllCaps => {
                t.kind == TokenKind::Word
                    && t.surface.chars().filter(|c| c.is_alphabetic()).count() >= 2
                    && !t.surface.chars().any(char::is_lowercase)
            }
            Orthography::Lower => {
                t.kind == TokenKind::Word && t.surface.chars().next().is_some_and(char::is_lowercase)
            }
            Orthography::Number => t.kind == TokenKind::Number,
            Orthography::Initial => t.is_initial(),
            Orthography::Year => {
                t.kind == TokenKind::Number
                    && t.surface.len() == 4
                    && t.surface.chars().all(|c| c.is_ascii_digit())
                    && matches!(t.surface.as_bytes()[0], b'1' | b'2')
            }
            Orthography::Word => t.kind == TokenKind::Word,
            Orthography::Punct => t.kind == TokenKind::Punctuation,
            Orthography::Any => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AtomKind {
    Literal {
        alternatives: Vec<String>,
        case_sensitive: bool,
    },
    Class {
        class: EntityClass,
        filter: Option<(String, String)>,
    },
    Orth(Orthography),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Repeat {
    One,
    Optional,
    OneOrMore,
    ZeroOrMore,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub kind: AtomKind,
    pub repeat: Repeat,
}

/// Supplies multi-token spans for `<class>` atoms.
pub trait ClassSpans {
    /// Exclusive token ends of every span of `class` starting at `start`
    /// whose attributes pass `filter`.
    fn class_ends(&self, class: EntityClass, filter: Option<(&str, &str)>, start: usize) -> Vec<usize>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub atoms: Vec<Atom>,
    /// Atom index range whose tokens form the mention.
    pub mark: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternMatch {
    /// Tokens consumed by the whole pattern.
    pub matched: Range<usize>,
    /// Tokens inside the mention brackets.
    pub mention: Range<usize>,
}

fn split_atoms(src: &str) -> Result<Vec<String>, String> {
    let mut atoms = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    for c in src.chars() {
        match c {
            '"' => {
                quoted = !quoted;
                cur.push(c);
            }
            c if c.is_whitespace() && !quoted => {
                if !cur.is_empty() {
                    atoms.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if quoted {
        return Err("unterminated quote".to_string());
    }
    if !cur.is_empty() {
        atoms.push(cur);
    }
    Ok(atoms)
}

fn parse_literal_alternatives(body: &str) -> Result<(Vec<String>, bool), String> {
    let quoted = body.starts_with('"');
    let mut alternatives = Vec::new();
    if quoted {
        let mut rest = body;
        loop {
            let inner = rest
                .strip_prefix('"')
                .ok_or_else(|| format!("malformed literal {body:?}"))?;
            let close = inner
                .find('"')
                .ok_or_else(|| format!("malformed literal {body:?}"))?;
            if close == 0 {
                return Err("empty literal".to_string());
            }
            alternatives.push(inner[..close].to_string());
            rest = &inner[close + 1..];
            if rest.is_empty() {
                break;
            }
            rest = rest
                .strip_prefix('|')
                .ok_or_else(|| format!("malformed literal {body:?}"))?;
        }
    } else {
        for alt in body.split('|') {
            if alt.is_empty() || alt.contains(['<', '>', '{', '}', '"']) {
                return Err(format!("malformed atom {body:?}"));
            }
            alternatives.push(alt.to_lowercase());
        }
    }
    Ok((alternatives, quoted))
}

impl Pattern {
    pub fn parse(src: &str) -> Result<Self, String> {
        let mut atoms = Vec::new();
        let (mut open, mut close) = (None, None);
        for raw in split_atoms(src)? {
            match raw.as_str() {
                "[" if open.is_none() => {
                    open = Some(atoms.len());
                    continue;
                }
                "]" if open.is_some() && close.is_none() => {
                    close = Some(atoms.len());
                    continue;
                }
                "[" | "]" => return Err("mention brackets must appear once, in order".to_string()),
                _ => {}
            }
            let (body, repeat) = match raw.chars().last() {
                Some('?') if raw.len() > 1 && !raw.ends_with("\"?\"") => (&raw[..raw.len() - 1], Repeat::Optional),
                Some('+') if raw.len() > 1 && !raw.ends_with("\"+\"") => (&raw[..raw.len() - 1], Repeat::OneOrMore),
                Some('*') if raw.len() > 1 && !raw.ends_with("\"*\"") => (&raw[..raw.len() - 1], Repeat::ZeroOrMore),
                _ => (raw.as_str(), Repeat::One),
            };
            let kind = if let Some(inner) = body.strip_prefix('<').and_then(|b| b.strip_suffix('>')) {
                let (class, filter) = match inner.split_once(':') {
                    Some((c, f)) => {
                        let (k, v) = f
                            .split_once('=')
                            .ok_or_else(|| format!("class filter {f:?} is not key=value"))?;
                        (c, Some((k.to_string(), v.to_string())))
                    }
                    None => (inner, None),
                };
                let class = class.parse::<EntityClass>().map_err(|e| e.to_string())?;
                AtomKind::Class { class, filter }
            } else if let Some(inner) = body.strip_prefix('{').and_then(|b| b.strip_suffix('}')) {
                AtomKind::Orth(
                    Orthography::parse(inner).ok_or_else(|| format!("unknown orthography test {{{inner}}}"))?,
                )
            } else {
                let (alternatives, case_sensitive) = parse_literal_alternatives(body)?;
                AtomKind::Literal {
                    alternatives,
                    case_sensitive,
                }
            };
            atoms.push(Atom { kind, repeat });
        }
        if atoms.is_empty() {
            return Err("empty pattern".to_string());
        }
        let mark = match (open, close) {
            (None, None) => 0..atoms.len(),
            (Some(o), Some(c)) if o < c => o..c,
            _ => return Err("mention brackets must enclose at least one atom".to_string()),
        };
        Ok(Pattern { atoms, mark })
    }

    /// The longest match starting at `start`: widest mention first, then longest overall.
    pub fn match_at(&self, tokens: &[Token], spans: &dyn ClassSpans, start: usize) -> Option<PatternMatch> {
        let mut out = Vec::new();
        let mut m = Matcher {
            pattern: self,
            tokens,
            spans,
            out: &mut out,
            start,
            budget: 10_000,
        };
        m.enter(0, start, start, start);
        out.into_iter()
            .filter(|pm| !pm.mention.is_empty())
            .max_by_key(|pm| (pm.mention.len(), pm.matched.end, std::cmp::Reverse(pm.mention.start)))
    }

    /// Every match in the token list, taking the longest at each start.
    pub fn find_all(&self, tokens: &[Token], spans: &dyn ClassSpans) -> Vec<PatternMatch> {
        (0..tokens.len())
            .filter_map(|i| self.match_at(tokens, spans, i))
            .collect()
    }
}

struct Matcher<'a> {
    pattern: &'a Pattern,
    tokens: &'a [Token],
    spans: &'a dyn ClassSpans,
    out: &'a mut Vec<PatternMatch>,
    start: usize,
    // caps backtracking on pathological patterns
    budget: usize,
}

impl Matcher<'_> {
    fn step(&self, atom: &Atom, at: usize) -> Vec<usize> {
        let Some(token) = self.tokens.get(at) else {
            return Vec::new();
        };
        match &atom.kind {
            AtomKind::Literal {
                alternatives,
                case_sensitive,
            } => {
                let hit = if *case_sensitive {
                    alternatives.iter().any(|a| *a == token.surface)
                } else {
                    let lower = token.surface.to_lowercase();
                    alternatives.iter().any(|a| *a == lower)
                };
                if hit {
                    vec![at + 1]
                } else {
                    Vec::new()
                }
            }
            AtomKind::Orth(o) => {
                if o.test(token) {
                    vec![at + 1]
                } else {
                    Vec::new()
                }
            }
            AtomKind::Class { class, filter } => self.spans.class_ends(
                *class,
                filter.as_ref().map(|(k, v)| (k.as_str(), v.as_str())),
                at,
            ),
        }
    }

    fn enter(&mut self, ai: usize, at: usize, mut ms: usize, mut me: usize) {
        if self.budget == 0 {
            return;
        }
        self.budget -= 1;
        if ai == self.pattern.mark.start {
            ms = at;
        }
        if ai == self.pattern.mark.end {
            me = at;
        }
        let Some(atom) = self.pattern.atoms.get(ai) else {
            self.out.push(PatternMatch {
                matched: self.start..at,
                mention: ms..me,
            });
            return;
        };
        match atom.repeat {
            Repeat::One => {
                for next in self.step(atom, at) {
                    self.enter(ai + 1, next, ms, me);
                }
            }
            Repeat::Optional => {
                self.enter(ai + 1, at, ms, me);
                for next in self.step(atom, at) {
                    self.enter(ai + 1, next, ms, me);
                }
            }
            Repeat::OneOrMore => {
                for next in self.step(atom, at) {
                    self.repeat(ai, next, ms, me);
                }
            }
            Repeat::ZeroOrMore => self.repeat(ai, at, ms, me),
        }
    }

    fn repeat(&mut self, ai: usize, at: usize, ms: usize, me: usize) {
        self.enter(ai + 1, at, ms, me);
        let atom = &self.pattern.atoms[ai];
        for next in self.step(atom, at) {
            if next > at {
                self.repeat(ai, next, ms, me);
            }
        }
    }
}

/// A [`ClassSpans`] with no spans, for patterns without class atoms.
pub struct NoSpans;

impl ClassSpans for NoSpans {
    fn class_ends(&self, _: EntityClass, _: Option<(&str, &str)>, _: usize) -> Vec<usize> {
        Vec::new()
    }
}
