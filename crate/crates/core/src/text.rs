//! Documents, character spans, tokens and sentences.
//!
//! Offsets count Unicode scalar values, never bytes, so a span means the same
//! thing whatever encoding the text was read from.

use std::fmt;
use std::ops::Range;

use crate::error::SpanError;

/// Word forms whose trailing period belongs to the word rather than ending a
/// sentence. Single capital letters followed by a period (initials) are
/// treated the same way without being listed.
pub const ABBREVIATIONS: &[&str] = &[
    "Inc.", "Ltd.", "J.", "Mr.", "Dr.", "St.", "Corp.", "Co.", "Mrs.", "Ms.", "Jr.", "Sr.",
];

/// A half-open `[start, end)` range of character offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    start: usize,
    end: usize,
}

impl Span {
    /// Builds a non-empty span. Empty or inverted ranges are rejected.
    pub fn new(start: usize, end: usize) -> Result<Self, SpanError> {
        if start >= end {
            return Err(SpanError::Empty { start, end });
        }
        Ok(Span { start, end })
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    /// Smallest span covering both.
    pub fn cover(&self, other: &Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

/// An immutable input text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    source_id: String,
    text: String,
    // byte offset of every char, plus one trailing entry for text.len()
    char_bytes: Vec<usize>,
}

impl Document {
    pub fn new(source_id: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        let mut char_bytes: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        char_bytes.push(text.len());
        Document {
            source_id: source_id.into(),
            text,
            char_bytes,
        }
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Length in characters.
    pub fn char_len(&self) -> usize {
        self.char_bytes.len() - 1
    }

    pub fn span_text(&self, span: Span) -> Result<&str, SpanError> {
        let len = self.char_len();
        if span.end > len {
            return Err(SpanError::OutOfBounds {
                start: span.start,
                end: span.end,
                len,
            });
        }
        Ok(&self.text[self.char_bytes[span.start]..self.char_bytes[span.end]])
    }

    /// Text between two character offsets; used for inter-token gaps which may be empty.
    pub fn slice(&self, start: usize, end: usize) -> &str {
        &self.text[self.char_bytes[start]..self.char_bytes[end]]
    }

    /// Character offset of the first occurrence of `needle` at or after char `from`.
    pub fn find(&self, needle: &str, from: usize) -> Option<usize> {
        let byte_from = *self.char_bytes.get(from)?;
        let byte = self.text[byte_from..].find(needle)? + byte_from;
        self.char_bytes.binary_search(&byte).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Word,
    Number,
    Punctuation,
    Symbol,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub span: Span,
    pub kind: TokenKind,
    pub surface: String,
}

impl Token {
    pub fn is_capitalized(&self) -> bool {
        self.kind == TokenKind::Word && self.surface.chars().next().is_some_and(char::is_uppercase)
    }

    /// A single capital letter with its period, as in "J.".
    pub fn is_initial(&self) -> bool {
        let mut chars = self.surface.chars();
        matches!(
            (chars.next(), chars.next(), chars.next()),
            (Some(c), Some('.'), None) if c.is_uppercase()
        )
    }

    pub fn is_terminator(&self) -> bool {
        self.kind == TokenKind::Punctuation && matches!(self.surface.as_str(), "." | "!" | "?")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub span: Span,
    pub tokens: Range<usize>,
}

impl Sentence {
    pub fn contains_token(&self, index: usize) -> bool {
        self.tokens.contains(&index)
    }
}

fn is_punctuation(c: char) -> bool {
    if c.is_ascii() {
        return c.is_ascii_punctuation() && !"$%&*+<=>@^`|~#/\\".contains(c);
    }
    matches!(
        c,
        '\u{2018}'..='\u{201F}' | '\u{2010}'..='\u{2015}' | '\u{2026}' | '«' | '»' | '¡' | '¿' | '·'
    )
}

/// Splits a document into word, number, punctuation and symbol tokens.
pub fn tokenize(doc: &Document) -> Vec<Token> {
    let chars: Vec<char> = doc.text().chars().collect();
    let n = chars.len();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < n {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if !c.is_alphanumeric() {
            let kind = if is_punctuation(c) {
                TokenKind::Punctuation
            } else {
                TokenKind::Symbol
            };
            tokens.push(Token {
                span: Span { start: i, end: i + 1 },
                kind,
                surface: c.to_string(),
            });
            i += 1;
            continue;
        }

        let start = i;
        let mut numeric = c.is_ascii_digit();
        let mut j = i;
        loop {
            while j < n && chars[j].is_alphanumeric() {
                numeric &= chars[j].is_ascii_digit();
                j += 1;
            }
            if j + 1 >= n || !chars[j + 1].is_alphanumeric() {
                break;
            }
            let (prev, sep, next) = (chars[j - 1], chars[j], chars[j + 1]);
            let joins = match sep {
                '-' | '\'' | '\u{2019}' => prev.is_alphabetic() && next.is_alphabetic(),
                '.' | ',' => numeric && next.is_ascii_digit(),
                _ => false,
            };
            if !joins {
                break;
            }
            j += 1;
        }
        let mut surface: String = chars[start..j].iter().collect();
        if j < n && chars[j] == '.' && !numeric {
            let mut dotted = surface.clone();
            dotted.push('.');
            let initial = surface.chars().count() == 1 && c.is_uppercase();
            if initial || ABBREVIATIONS.contains(&dotted.as_str()) {
                surface = dotted;
                j += 1;
            }
        }
        tokens.push(Token {
            span: Span { start, end: j },
            kind: if numeric {
                TokenKind::Number
            } else {
                TokenKind::Word
            },
            surface,
        });
        i = j;
    }
    tokens
}

fn is_closer(t: &Token) -> bool {
    matches!(
        t.surface.as_str(),
        "\"" | "'" | ")" | "]" | "}" | "\u{201D}" | "\u{2019}" | "»"
    )
}

/// Groups tokens into sentences. A sentence ends after a `.`, `!` or `?`
/// token (plus any closing quotes glued to it) and at blank lines.
pub fn split_sentences(doc: &Document, tokens: &[Token]) -> Vec<Sentence> {
    let mut sentences = Vec::new();
    let mut first = 0;
    let mut i = 0;
    while i < tokens.len() {
        let mut boundary = false;
        if tokens[i].is_terminator() {
            while i + 1 < tokens.len()
                && (tokens[i + 1].is_terminator() || is_closer(&tokens[i + 1]))
                && tokens[i + 1].span.start == tokens[i].span.end
            {
                i += 1;
            }
            boundary = true;
        } else if let Some(next) = tokens.get(i + 1) {
            let gap = doc.slice(tokens[i].span.end, next.span.start);
            boundary = gap.matches('\n').count() >= 2 && gap.trim().is_empty();
        }
        if boundary || i + 1 == tokens.len() {
            sentences.push(Sentence {
                span: tokens[first].span.cover(&tokens[i].span),
                tokens: first..i + 1,
            });
            first = i + 1;
        }
        i += 1;
    }
    sentences
}

/// Index of the sentence holding token `index`.
pub fn sentence_of(sentences: &[Sentence], index: usize) -> Option<usize> {
    sentences
        .binary_search_by(|s| {
            if index < s.tokens.start {
                std::cmp::Ordering::Greater
            } else if index >= s.tokens.end {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Equal
            }
        })
        .ok()
}
