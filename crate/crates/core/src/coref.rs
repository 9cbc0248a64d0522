//! Coreference: proper-name alias clustering and window-based pronoun resolution.
//!
//! Two proper names of the same class end up in one chain when any alias
//! test links them (exact match, token prefix/suffix after dropping a
//! corporate suffix, person surname within one edit, nickname of the first
//! name). Chains are the transitive closure of that symmetric relation.
//! Pronouns then attach to the nearest preceding compatible chain inside a
//! window of sentences; anything without a candidate stays unresolved.

use std::collections::{HashMap, HashSet};

use crate::error::ParseError;
use crate::ne::{EntityClass, Mention};
use crate::text::{sentence_of, tokenize, Document, Sentence, Span, Token, TokenKind};

const CORPORATE_SUFFIXES: &[&str] = &["inc.", "ltd.", "corp.", "co.", "plc", "llc"];

/// Shortest surname length for which a one-character spelling difference is tolerated.
const FUZZY_MIN_CHARS: usize = 5;

pub const DEFAULT_WINDOW: usize = 2;

/// Nickname → full first name pairs, case-folded.
#[derive(Debug, Clone, Default)]
pub struct NicknameTable {
    pairs: HashSet<(String, String)>,
    names: HashSet<String>,
}

impl NicknameTable {
    pub fn insert(&mut self, short: &str, full: &str) {
        let (short, full) = (short.to_lowercase(), full.to_lowercase());
        self.names.insert(short.clone());
        self.names.insert(full.clone());
        self.pairs.insert((short, full));
    }

    /// True when one name is a listed nickname of the other.
    pub fn related(&self, a: &str, b: &str) -> bool {
        let (a, b) = (a.to_lowercase(), b.to_lowercase());
        self.pairs.contains(&(a.clone(), b.clone())) || self.pairs.contains(&(b, a))
    }

    pub fn is_first_name(&self, name: &str) -> bool {
        self.names.contains(&name.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// `short TAB full` lines.
pub fn load_nicknames(source: &str) -> Result<NicknameTable, ParseError> {
    let mut table = NicknameTable::default();
    for (n, line) in source.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        match line.split('\t').map(str::trim).collect::<Vec<_>>()[..] {
            [short, full] if !short.is_empty() && !full.is_empty() => table.insert(short, full),
            _ => return Err(ParseError::new(n + 1, "expected \"short TAB full\"")),
        }
    }
    Ok(table)
}

/// Pronoun surfaces and the classes each may refer to.
#[derive(Debug, Clone)]
pub struct PronounLexicon {
    entries: HashMap<String, Vec<EntityClass>>,
}

impl Default for PronounLexicon {
    fn default() -> Self {
        use EntityClass::*;
        let mut entries = HashMap::new();
        for p in ["he", "him", "his", "himself", "she", "her", "hers", "herself"] {
            entries.insert(p.to_string(), vec![Person]);
        }
        for p in ["it", "its", "itself"] {
            entries.insert(p.to_string(), vec![Organisation, Company, Bank, Location]);
        }
        PronounLexicon { entries }
    }
}

impl PronounLexicon {
    pub fn compatible(&self, surface: &str) -> Option<&[EntityClass]> {
        self.entries.get(&surface.to_lowercase()).map(Vec::as_slice)
    }
}

/// `surface TAB class[,class...]` lines; replaces the built-in lexicon.
pub fn load_pronouns(source: &str) -> Result<PronounLexicon, ParseError> {
    let mut entries = HashMap::new();
    for (n, line) in source.lines().enumerate() {
        let line_no = n + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let Some((surface, classes)) = line.split_once('\t') else {
            return Err(ParseError::new(line_no, "expected \"surface TAB classes\""));
        };
        let classes = classes
            .split(',')
            .map(|c| c.trim().parse::<EntityClass>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ParseError::new(line_no, e.to_string()))?;
        let surface = surface.trim().to_lowercase();
        if surface.is_empty() || entries.insert(surface, classes).is_some() {
            return Err(ParseError::new(line_no, "empty or duplicate pronoun"));
        }
    }
    Ok(PronounLexicon { entries })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PronounMention {
    pub span: Span,
    /// Token index of the pronoun.
    pub token: usize,
    pub surface: String,
    pub compatible: Vec<EntityClass>,
}

/// Pronoun tokens outside any entity mention.
pub fn find_pronouns(tokens: &[Token], mentions: &[Mention], lexicon: &PronounLexicon) -> Vec<PronounMention> {
    let mut covered = vec![false; tokens.len()];
    for m in mentions {
        covered[m.tokens.clone()].iter_mut().for_each(|c| *c = true);
    }
    tokens
        .iter()
        .enumerate()
        .filter(|(i, t)| t.kind == TokenKind::Word && !covered[*i])
        .filter_map(|(i, t)| {
            lexicon.compatible(&t.surface).map(|classes| PronounMention {
                span: t.span,
                token: i,
                surface: t.surface.clone(),
                compatible: classes.to_vec(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChainMember {
    /// Index into the mention list.
    Name(usize),
    /// Index into the pronoun list.
    Pronoun(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorefChain {
    pub id: usize,
    /// Members in document order.
    pub members: Vec<ChainMember>,
    /// Mention index of the longest proper name.
    pub representative: usize,
    pub class: EntityClass,
}

impl CorefChain {
    pub fn names(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().filter_map(|m| match m {
            ChainMember::Name(i) => Some(*i),
            ChainMember::Pronoun(_) => None,
        })
    }

    pub fn pronouns(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().filter_map(|m| match m {
            ChainMember::Pronoun(i) => Some(*i),
            ChainMember::Name(_) => None,
        })
    }
}

/// Which alias test linked two names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AliasTest {
    Exact,
    PrefixSuffix,
    Surname,
    FirstName,
}

fn words(surface: &str) -> Vec<String> {
    tokenize(&Document::new("", surface))
        .into_iter()
        .map(|t| t.surface.to_lowercase())
        .collect()
}

fn is_name_class(class: EntityClass) -> bool {
    !matches!(
        class,
        EntityClass::Date | EntityClass::Time | EntityClass::Money | EntityClass::Telephone
    )
}

fn close_spelling(a: &str, b: &str) -> bool {
    a == b
        || (a.chars().count() >= FUZZY_MIN_CHARS
            && b.chars().count() >= FUZZY_MIN_CHARS
            && strsim::levenshtein(a, b) <= 1)
}

fn is_initial_of(initial: &str, name: &str) -> bool {
    let mut chars = initial.chars();
    matches!((chars.next(), chars.next(), chars.next()), (Some(c), Some('.'), None) if name.starts_with(c))
}

fn first_names_compatible(a: &str, b: &str, nicknames: &NicknameTable) -> bool {
    a == b || nicknames.related(a, b) || is_initial_of(a, b) || is_initial_of(b, a)
}

/// Symmetric alias relation between two proper-name mentions.
pub fn alias_test(a: &Mention, b: &Mention, nicknames: &NicknameTable) -> Option<AliasTest> {
    if a.class != b.class {
        return None;
    }
    let (wa, wb) = (words(&a.surface), words(&b.surface));
    if wa == wb {
        return Some(AliasTest::Exact);
    }
    if !is_name_class(a.class) {
        return None;
    }

    let strip = |w: &[String]| -> Vec<String> {
        match w.last() {
            Some(last) if w.len() > 1 && CORPORATE_SUFFIXES.contains(&last.as_str()) => w[..w.len() - 1].to_vec(),
            _ => w.to_vec(),
        }
    };
    let (sa, sb) = (strip(&wa), strip(&wb));
    let (short, long) = if sa.len() <= sb.len() { (&sa, &sb) } else { (&sb, &sa) };
    if sa == sb || (!short.is_empty() && short.len() < long.len() && (long.starts_with(short) || long.ends_with(short))) {
        return Some(AliasTest::PrefixSuffix);
    }

    if a.class != EntityClass::Person {
        return None;
    }
    let (short, long) = if wa.len() <= wb.len() { (&wa, &wb) } else { (&wb, &wa) };
    let (surname_s, surname_l) = (short.last()?, long.last()?);
    if short.len() == 1 {
        if long.len() > 1 {
            if close_spelling(surname_s, surname_l) {
                return Some(AliasTest::Surname);
            }
            let first = &long[0];
            if nicknames.related(surname_s, first) || (surname_s == first && nicknames.is_first_name(first)) {
                return Some(AliasTest::FirstName);
            }
        } else if close_spelling(surname_s, surname_l) {
            return Some(AliasTest::Surname);
        }
        return None;
    }
    if close_spelling(surname_s, surname_l) && first_names_compatible(&short[0], &long[0], nicknames) {
        return Some(AliasTest::Surname);
    }
    None
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Partitions proper-name mentions into chains.
pub fn cluster_proper_names(mentions: &[Mention], nicknames: &NicknameTable) -> Vec<CorefChain> {
    let n = mentions.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if alias_test(&mentions[i], &mentions[j], nicknames).is_some() {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        let g = *slot.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    groups.sort_by_key(|g| mentions[g[0]].span.start());
    groups
        .into_iter()
        .enumerate()
        .map(|(id, g)| {
            let representative = *g
                .iter()
                .max_by_key(|&&i| (mentions[i].surface.chars().count(), std::cmp::Reverse(i)))
                .expect("groups are non-empty");
            CorefChain {
                id,
                class: mentions[representative].class,
                members: g.into_iter().map(ChainMember::Name).collect(),
                representative,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PronounResolution {
    pub chains: Vec<CorefChain>,
    /// Pronoun indices with no compatible antecedent in the window.
    pub unresolved: Vec<usize>,
}

/// Attaches each pronoun to the nearest preceding chain member of a
/// compatible class within the current sentence and `window` previous ones.
pub fn resolve_pronouns(
    sentences: &[Sentence],
    mut chains: Vec<CorefChain>,
    mentions: &[Mention],
    pronouns: &[PronounMention],
    window: usize,
) -> PronounResolution {
    let mut unresolved = Vec::new();
    let member_pos = |m: &ChainMember| -> (usize, usize) {
        match *m {
            ChainMember::Name(i) => (mentions[i].tokens.start, mentions[i].span.end()),
            ChainMember::Pronoun(i) => (pronouns[i].token, pronouns[i].span.end()),
        }
    };
    for (pi, p) in pronouns.iter().enumerate() {
        let Some(ps) = sentence_of(sentences, p.token) else {
            unresolved.push(pi);
            continue;
        };
        let lowest = ps.saturating_sub(window);
        let best = chains
            .iter()
            .enumerate()
            .filter(|(_, c)| p.compatible.contains(&c.class))
            .flat_map(|(ci, c)| c.members.iter().map(move |m| (ci, m)))
            .filter_map(|(ci, m)| {
                let (tok, end) = member_pos(m);
                let s = sentence_of(sentences, tok)?;
                (end <= p.span.start() && s >= lowest && s <= ps).then_some((end, ci))
            })
            .max_by_key(|&(end, ci)| (end, std::cmp::Reverse(ci)));
        match best {
            Some((_, ci)) => {
                let chain = &mut chains[ci];
                chain.members.push(ChainMember::Pronoun(pi));
                chain.members.sort_by_key(|m| member_pos(m).1);
            }
            None => unresolved.push(pi),
        }
    }
    PronounResolution { chains, unresolved }
}

/// Coreference settings: lexicons plus the pronoun window.
#[derive(Debug, Clone)]
pub struct Coreferencer {
    pub nicknames: NicknameTable,
    pub pronouns: PronounLexicon,
    pub window: usize,
}

impl Default for Coreferencer {
    fn default() -> Self {
        Coreferencer {
            nicknames: NicknameTable::default(),
            pronouns: PronounLexicon::default(),
            window: DEFAULT_WINDOW,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coreference {
    pub chains: Vec<CorefChain>,
    pub pronouns: Vec<PronounMention>,
    pub unresolved: Vec<usize>,
}

impl Coreferencer {
    pub fn resolve(&self, tokens: &[Token], sentences: &[Sentence], mentions: &[Mention]) -> Coreference {
        let chains = cluster_proper_names(mentions, &self.nicknames);
        let pronouns = find_pronouns(tokens, mentions, &self.pronouns);
        let resolution = resolve_pronouns(sentences, chains, mentions, &pronouns, self.window);
        Coreference {
            chains: resolution.chains,
            pronouns,
            unresolved: resolution.unresolved,
        }
    }
}
