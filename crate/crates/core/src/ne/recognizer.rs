use std::cmp::Reverse;
use std::collections::{BTreeMap, HashSet};
use std::ops::Range;

use super::pattern::{ClassSpans, Pattern};
use super::{
    normalize_date, normalize_money, normalize_time, parse_attributes, Attributes, EntityClass,
    Gazetteer, Mention, Normalized, NormalizedDate,
};
use crate::error::ParseError;
use crate::text::{Document, Span, Token};

/// Trailing tokens dropped from organisation names before deriving short forms.
pub const CORPORATE_SUFFIXES: &[&str] = &["Inc.", "Ltd.", "Corp.", "Co.", "plc", "PLC", "LLC"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeRule {
    pub id: String,
    pub pattern: Pattern,
    pub class: EntityClass,
    pub attributes: Attributes,
}

/// Parses rule lines: `id TAB pattern TAB class [TAB k=v,...]`. File order is priority order.
pub fn load_rules(source: &str) -> Result<Vec<NeRule>, ParseError> {
    let mut rules: Vec<NeRule> = Vec::new();
    for (n, line) in source.lines().enumerate() {
        let line_no = n + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(ParseError::new(
                line_no,
                format!("expected 3 or 4 TAB-separated fields, found {}", fields.len()),
            ));
        }
        let id = fields[0].trim();
        if id.is_empty() {
            return Err(ParseError::new(line_no, "empty rule id"));
        }
        if rules.iter().any(|r| r.id == id) {
            return Err(ParseError::new(line_no, format!("duplicate rule id {id:?}")));
        }
        let pattern = Pattern::parse(fields[1]).map_err(|e| ParseError::new(line_no, e))?;
        let class = fields[2]
            .trim()
            .parse()
            .map_err(|e: super::UnknownClass| ParseError::new(line_no, e.to_string()))?;
        let attributes = match fields.get(3) {
            Some(f) => parse_attributes(f).map_err(|e| ParseError::new(line_no, e))?,
            None => Attributes::new(),
        };
        rules.push(NeRule {
            id: id.to_string(),
            pattern,
            class,
            attributes,
        });
    }
    Ok(rules)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CandidateSource {
    Gazetteer(usize),
    Rule(usize),
    /// A name variant found in a gap left by the first pass.
    Derived,
}

impl CandidateSource {
    fn priority(&self) -> usize {
        match self {
            CandidateSource::Gazetteer(_) => 0,
            CandidateSource::Rule(i) => i + 1,
            CandidateSource::Derived => usize::MAX,
        }
    }
}

/// A possible mention before overlap resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub tokens: Range<usize>,
    pub class: EntityClass,
    pub attributes: Attributes,
    pub source: CandidateSource,
}

impl Candidate {
    fn rank(&self) -> (Reverse<usize>, usize, usize, EntityClass, CandidateSource) {
        (
            Reverse(self.tokens.len()),
            self.source.priority(),
            self.tokens.start,
            self.class,
            self.source,
        )
    }

    fn overlaps(&self, other: &Candidate) -> bool {
        self.tokens.start < other.tokens.end && other.tokens.start < self.tokens.end
    }
}

/// Keeps each candidate that no overlapping candidate outranks. Ranks are a
/// total order, so the survivors never overlap; a candidate can only be
/// displaced by something that touches it.
fn local_maxima(cands: &[Candidate]) -> Vec<usize> {
    (0..cands.len())
        .filter(|&i| {
            let mine = cands[i].rank();
            !cands
                .iter()
                .enumerate()
                .any(|(j, other)| j != i && other.overlaps(&cands[i]) && other.rank() < mine)
        })
        .collect()
}

struct GazetteerSpans<'a> {
    gazetteer: &'a Gazetteer,
    // token start -> (entry index, token count)
    at: Vec<Vec<(usize, usize)>>,
}

impl ClassSpans for GazetteerSpans<'_> {
    fn class_ends(&self, class: EntityClass, filter: Option<(&str, &str)>, start: usize) -> Vec<usize> {
        let Some(hits) = self.at.get(start) else {
            return Vec::new();
        };
        hits.iter()
            .filter(|(e, _)| {
                let entry = &self.gazetteer.entries()[*e];
                entry.class == class
                    && filter.is_none_or(|(k, v)| entry.attributes.get(k).is_some_and(|x| x == v))
            })
            .map(|(_, len)| start + len)
            .collect()
    }
}

/// Gazetteer and rules, immutable once built and shareable across threads.
#[derive(Debug, Clone, Default)]
pub struct Recognizer {
    gazetteer: Gazetteer,
    rules: Vec<NeRule>,
}

impl Recognizer {
    pub fn new(gazetteer: Gazetteer, rules: Vec<NeRule>) -> Self {
        Recognizer { gazetteer, rules }
    }

    pub fn gazetteer(&self) -> &Gazetteer {
        &self.gazetteer
    }

    pub fn rules(&self) -> &[NeRule] {
        &self.rules
    }

    /// First-pass candidates from the gazetteer and every rule.
    pub fn candidates(&self, tokens: &[Token]) -> Vec<Candidate> {
        let spans = GazetteerSpans {
            gazetteer: &self.gazetteer,
            at: (0..tokens.len())
                .map(|i| self.gazetteer.matches_at(tokens, i))
                .collect(),
        };
        let mut out = Vec::new();
        for (start, hits) in spans.at.iter().enumerate() {
            for &(entry, len) in hits {
                let e = &self.gazetteer.entries()[entry];
                out.push(Candidate {
                    tokens: start..start + len,
                    class: e.class,
                    attributes: e.attributes.clone(),
                    source: CandidateSource::Gazetteer(entry),
                });
            }
        }
        for (ri, rule) in self.rules.iter().enumerate() {
            for m in rule.pattern.find_all(tokens, &spans) {
                out.push(Candidate {
                    tokens: m.mention,
                    class: rule.class,
                    attributes: rule.attributes.clone(),
                    source: CandidateSource::Rule(ri),
                });
            }
        }
        // the same mention range can be produced from several starts of a context rule
        let mut seen = HashSet::new();
        out.retain(|c| seen.insert((c.tokens.clone(), c.class, c.source)));
        out
    }

    pub fn recognize(&self, doc: &Document, tokens: &[Token]) -> Vec<Mention> {
        let first = self.candidates(tokens);
        let mut chosen: Vec<Candidate> = local_maxima(&first)
            .into_iter()
            .map(|i| first[i].clone())
            .collect();

        let mut claimed = vec![false; tokens.len()];
        for c in &chosen {
            claimed[c.tokens.clone()].iter_mut().for_each(|x| *x = true);
        }
        let variants = name_variants(&first, tokens);
        let mut second = Vec::new();
        for start in 0..tokens.len() {
            for (words, class) in &variants {
                let end = start + words.len();
                if end <= tokens.len()
                    && !claimed[start..end].iter().any(|x| *x)
                    && words.iter().zip(&tokens[start..end]).all(|(w, t)| *w == t.surface)
                {
                    second.push(Candidate {
                        tokens: start..end,
                        class: *class,
                        attributes: Attributes::new(),
                        source: CandidateSource::Derived,
                    });
                }
            }
        }
        chosen.extend(local_maxima(&second).into_iter().map(|i| second[i].clone()));
        chosen.sort_by_key(|c| c.tokens.start);
        chosen
            .into_iter()
            .filter_map(|c| to_mention(doc, tokens, c))
            .collect()
    }
}

fn is_name_word(t: &Token) -> bool {
    t.is_capitalized() && !t.is_initial()
}

/// Surnames of multi-token person candidates and short forms of
/// organisation candidates ("Jay Street" from "Jay Street Imports Inc.").
fn name_variants(cands: &[Candidate], tokens: &[Token]) -> BTreeMap<Vec<String>, EntityClass> {
    let mut out = BTreeMap::new();
    for c in cands {
        let words = &tokens[c.tokens.clone()];
        if words.len() < 2 {
            continue;
        }
        if c.class == EntityClass::Person {
            let last = &words[words.len() - 1];
            if is_name_word(last) && last.surface.chars().count() > 1 {
                out.entry(vec![last.surface.clone()]).or_insert(c.class);
            }
        } else if c.class.is_organisation_like() {
            let core = match words.last() {
                Some(t) if CORPORATE_SUFFIXES.contains(&t.surface.as_str()) => &words[..words.len() - 1],
                _ => words,
            };
            if core.len() < 2 || !core.iter().all(is_name_word) {
                continue;
            }
            for len in 2..=core.len() {
                if len == words.len() {
                    break;
                }
                let key = core[..len].iter().map(|t| t.surface.clone()).collect();
                out.entry(key).or_insert(c.class);
            }
        }
    }
    out
}

fn to_mention(doc: &Document, tokens: &[Token], c: Candidate) -> Option<Mention> {
    let span = Span::new(
        tokens[c.tokens.start].span.start(),
        tokens[c.tokens.end - 1].span.end(),
    )
    .ok()?;
    let surface = doc.span_text(span).ok()?.to_string();
    let normalized = match c.class {
        EntityClass::Date => Some(Normalized::Date(
            normalize_date(&surface).unwrap_or_else(|_| NormalizedDate::unknown()),
        )),
        EntityClass::Time => Some(Normalized::Time(normalize_time(&surface).ok()?)),
        EntityClass::Money => Some(Normalized::Money(normalize_money(&surface).ok()?)),
        _ => None,
    };
    Some(Mention {
        span,
        tokens: c.tokens,
        class: c.class,
        surface,
        attributes: c.attributes,
        normalized,
    })
}

/// Finds entity mentions: non-overlapping, sorted by start, longest match
/// preferred, gazetteer ahead of rules, rules in file order.
pub fn recognize(doc: &Document, tokens: &[Token], gazetteer: &Gazetteer, rules: &[NeRule]) -> Vec<Mention> {
    Recognizer::new(gazetteer.clone(), rules.to_vec()).recognize(doc, tokens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ne::load_gazetteer;
    use crate::text::tokenize;

    fn run(gaz: &str, rules: &str, text: &str) -> Vec<(String, EntityClass)> {
        let doc = Document::new("t", text);
        let toks = tokenize(&doc);
        let r = Recognizer::new(load_gazetteer(gaz).unwrap(), load_rules(rules).unwrap());
        r.recognize(&doc, &toks)
            .into_iter()
            .map(|m| (m.surface, m.class))
            .collect()
    }

    #[test]
    fn corporate_suffix_rule() {
        let got = run(
            "",
            "org-suffix\t{capitalized}+ \"Inc.\"|\"Ltd.\"\torganisation\n",
            "They bought International Business Machines Ltd. last year.",
        );
        assert_eq!(
            got,
            [("International Business Machines Ltd.".to_string(), EntityClass::Organisation)]
        );
    }

    #[test]
    fn nothing_to_find() {
        assert!(run("Reuter\tcompany\n", "y\t{year}\tdate\n", "the cat sat on the mat").is_empty());
    }

    #[test]
    fn longer_rule_match_beats_gazetteer() {
        let got = run(
            "New York\tlocation\n",
            "police\t<location>+ \"police\"\torganisation\n",
            "New York police met New York mayors.",
        );
        assert_eq!(
            got,
            [
                ("New York police".to_string(), EntityClass::Organisation),
                ("New York".to_string(), EntityClass::Location),
            ]
        );
    }

    #[test]
    fn equal_length_prefers_gazetteer() {
        let got = run("Jordan\tlocation\n", "cap\t{capitalized}\tperson\n", "Visit Jordan now");
        assert!(got.contains(&("Jordan".to_string(), EntityClass::Location)));
    }

    #[test]
    fn dates_and_money_are_normalized() {
        let doc = Document::new("t", "On Wednesday 12 July 1996 they paid $1.5 million.");
        let toks = tokenize(&doc);
        let gaz = load_gazetteer("Wednesday\tdate\tkind=weekday\nJuly\tdate\tkind=month\n").unwrap();
        let rules = load_rules(
            "date-dmy\t<date:kind=weekday>? {number} <date:kind=month> {year}\tdate\n\
             money\t\"$\" {number} \"million\"?\tmoney\n",
        )
        .unwrap();
        let ms = recognize(&doc, &toks, &gaz, &rules);
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[0].surface, "Wednesday 12 July 1996");
        match &ms[0].normalized {
            Some(Normalized::Date(d)) => assert_eq!(d.to_string(), "12/07/1996"),
            other => panic!("{other:?}"),
        }
        match &ms[1].normalized {
            Some(Normalized::Money(m)) => assert_eq!(m.amount, 1_500_000.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn surnames_and_short_forms_fill_gaps() {
        let got = run(
            "Frederick\tperson\n",
            "full-name\t<person> {initial}? {capitalized}\tperson\n\
             org-suffix\t{capitalized}+ \"Inc.\"\torganisation\n",
            "Frederick J. Thompson of Jay Street Imports Inc. left. Thompson and Jay Street agreed.",
        );
        let surfaces: Vec<&str> = got.iter().map(|(s, _)| s.as_str()).collect();
        assert_eq!(
            surfaces,
            ["Frederick J. Thompson", "Jay Street Imports Inc.", "Thompson", "Jay Street"]
        );
        assert_eq!(got[3].1, EntityClass::Organisation);
    }

    #[test]
    fn rule_file_errors() {
        assert_eq!(load_rules("a\t{year}\tdate\na\t{year}\tdate\n").unwrap_err().line, 2);
        assert_eq!(load_rules("a\t{year}\n").unwrap_err().line, 1);
        assert_eq!(load_rules("a\t{year}\tnarcotics\n").unwrap_err().line, 1);
        assert_eq!(load_rules("# c\n\na\t<bogus>\tdate\n").unwrap_err().line, 3);
        assert!(load_rules("").unwrap().is_empty());
    }
}
