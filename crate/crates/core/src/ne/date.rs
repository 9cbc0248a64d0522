use std::fmt;
use std::str::FromStr;

use crate::error::NormalizeError;

const MONTHS: [&str; 12] = [
    "january",
    "february",
    "march",
    "april",
    "may",
    "june",
    "july",
    "august",
    "september",
    "october",
    "november",
    "december",
];

const WEEKDAYS: [&str; 7] = [
    "monday",
    "tuesday",
    "wednesday",
    "thursday",
    "friday",
    "saturday",
    "sunday",
];

/// Expressions that name a day relative to the document date. They are not
/// resolved, so every component stays unknown.
const RELATIVE: [&str; 5] = ["today", "yesterday", "tomorrow", "tonight", "now"];

/// A possibly partial calendar date. Renders as `dd/mm/yyyy` with `?` for
/// unknown components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct NormalizedDate {
    pub day: Option<u8>,
    pub month: Option<u8>,
    pub year: Option<u16>,
}

impl NormalizedDate {
    /// Checks component ranges, including the day against the month length
    /// when the month is known.
    pub fn new(day: Option<u8>, month: Option<u8>, year: Option<u16>) -> Option<Self> {
        if let Some(m) = month {
            if !(1..=12).contains(&m) {
                return None;
            }
        }
        if let Some(d) = day {
            let max = match month {
                Some(m) => days_in_month(m, year),
                None => 31,
            };
            if d == 0 || d > max {
                return None;
            }
        }
        if year.is_some_and(|y| y > 9999) {
            return None;
        }
        Some(NormalizedDate { day, month, year })
    }

    pub fn unknown() -> Self {
        NormalizedDate::default()
    }

    pub fn is_unknown(&self) -> bool {
        self.day.is_none() && self.month.is_none() && self.year.is_none()
    }
}

fn days_in_month(month: u8, year: Option<u16>) -> u8 {
    match month {
        4 | 6 | 9 | 11 => 30,
        2 => match year {
            Some(y) if !(y % 4 == 0 && (y % 100 != 0 || y % 400 == 0)) => 28,
            _ => 29,
        },
        _ => 31,
    }
}

impl fmt::Display for NormalizedDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.day {
            Some(d) => write!(f, "{d:02}/")?,
            None => f.write_str("?/")?,
        }
        match self.month {
            Some(m) => write!(f, "{m:02}/")?,
            None => f.write_str("?/")?,
        }
        match self.year {
            Some(y) => write!(f, "{y}"),
            None => f.write_str("?"),
        }
    }
}

impl FromStr for NormalizedDate {
    type Err = NormalizeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        normalize_date(s)
    }
}

fn month_number(word: &str) -> Option<u8> {
    let word = word.trim_end_matches('.');
    if word.len() < 3 {
        return None;
    }
    MONTHS
        .iter()
        .position(|m| *m == word || (word.len() <= 4 && m.starts_with(word)))
        .map(|i| i as u8 + 1)
}

fn is_weekday(word: &str) -> bool {
    let word = word.trim_end_matches('.');
    word.len() >= 3 && WEEKDAYS.iter().any(|d| *d == word || d.starts_with(word) && word.len() <= 4)
}

/// Reads the `d/m/y` numeric shape (also with `.` or `-`), where any
/// component may be `?`.
fn numeric_date(s: &str) -> Option<Result<NormalizedDate, ()>> {
    let sep = ['/', '.', '-'].into_iter().find(|c| s.contains(*c))?;
    let parts: Vec<&str> = s.split(sep).collect();
    if parts.len() != 3 {
        return None;
    }
    let shaped = parts
        .iter()
        .all(|p| *p == "?" || (!p.is_empty() && p.chars().all(|c| c.is_ascii_digit())));
    if !shaped {
        return None;
    }
    let component = |p: &str, max_len: usize| -> Result<Option<u32>, ()> {
        if p == "?" {
            Ok(None)
        } else if p.len() > max_len {
            Err(())
        } else {
            p.parse().map(Some).map_err(|_| ())
        }
    };
    let result = (|| {
        let day = component(parts[0], 2)?;
        let month = component(parts[1], 2)?;
        let year = component(parts[2], 4)?;
        NormalizedDate::new(
            day.map(|d| d as u8),
            month.map(|m| m as u8),
            year.map(|y| y as u16),
        )
        .ok_or(())
    })();
    Some(result)
}

/// Normalizes a date expression. Weekday names are dropped, month names
/// become numbers and missing components stay unknown. Relative expressions
/// ("today", "yesterday") normalize to the all-unknown date.
pub fn normalize_date(surface: &str) -> Result<NormalizedDate, NormalizeError> {
    let fail = || NormalizeError::Date(surface.to_string());
    let trimmed = surface.trim();
    if let Some(numeric) = numeric_date(trimmed) {
        return numeric.map_err(|_| fail());
    }

    let lower = trimmed.to_lowercase();
    let words: Vec<&str> = lower
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|w| !w.is_empty())
        .collect();
    if words.is_empty() {
        return Err(fail());
    }

    let (mut day, mut month, mut year) = (None, None, None);
    for word in words {
        if RELATIVE.contains(&word) || is_weekday(word) || word == "of" || word == "the" {
            continue;
        }
        if let Some(m) = month_number(word) {
            if month.replace(m).is_some() {
                return Err(fail());
            }
            continue;
        }
        let digits = word.trim_end_matches(|c: char| c.is_ascii_alphabetic());
        let suffix = &word[digits.len()..];
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(fail());
        }
        if !suffix.is_empty() && !matches!(suffix, "st" | "nd" | "rd" | "th") {
            return Err(fail());
        }
        let value: u32 = digits.parse().map_err(|_| fail())?;
        if digits.len() == 4 && suffix.is_empty() {
            if year.replace(value as u16).is_some() {
                return Err(fail());
            }
        } else if digits.len() <= 2 {
            if day.replace(value as u8).is_some() {
                return Err(fail());
            }
        } else {
            return Err(fail());
        }
    }
    NormalizedDate::new(day, month, year).ok_or_else(fail)
}
