use std::fmt;

use crate::error::NormalizeError;

#[derive(Debug, Clone, PartialEq)]
pub struct Money {
    pub amount: f64,
    /// ISO 4217 code.
    pub currency: String,
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2} {}", self.amount, self.currency)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeOfDay {
    pub hour: u8,
    pub minute: u8,
}

impl fmt::Display for TimeOfDay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}:{:02}", self.hour, self.minute)
    }
}

fn currency(word: &str) -> Option<&'static str> {
    Some(match word {
        "$" | "dollar" | "dollars" | "usd" => "USD",
        "£" | "pound" | "pounds" | "sterling" | "gbp" => "GBP",
        "€" | "euro" | "euros" | "eur" => "EUR",
        "¥" | "yen" | "jpy" => "JPY",
        _ => return None,
    })
}

fn multiplier(word: &str) -> Option<f64> {
    Some(match word {
        "thousand" => 1e3,
        "million" | "m" => 1e6,
        "billion" | "bn" => 1e9,
        _ => return None,
    })
}

/// Reads amounts such as "$1,000", "$1.5 million" or "500 pounds".
pub fn normalize_money(surface: &str) -> Result<Money, NormalizeError> {
    let fail = || NormalizeError::Money(surface.to_string());
    let lower = surface.to_lowercase();
    let mut pieces: Vec<String> = Vec::new();
    for word in lower.split_whitespace() {
        // split a leading currency sign off the number
        let mut rest = word;
        if let Some(c) = rest.chars().next() {
            if !c.is_alphanumeric() && currency(&c.to_string()).is_some() {
                pieces.push(c.to_string());
                rest = &rest[c.len_utf8()..];
            }
        }
        if !rest.is_empty() {
            pieces.push(rest.to_string());
        }
    }

    let (mut code, mut amount, mut scale) = (None, None, 1.0);
    for piece in &pieces {
        if let Some(c) = currency(piece) {
            if code.replace(c).is_some() {
                return Err(fail());
            }
        } else if let Some(m) = multiplier(piece) {
            scale *= m;
        } else if piece.starts_with(|c: char| c.is_ascii_digit()) {
            let digits: String = piece.chars().filter(|c| *c != ',').collect();
            let value: f64 = digits.parse().map_err(|_| fail())?;
            if amount.replace(value).is_some() {
                return Err(fail());
            }
        } else {
            return Err(fail());
        }
    }
    match (code, amount) {
        (Some(code), Some(amount)) => Ok(Money {
            amount: amount * scale,
            currency: code.to_string(),
        }),
        _ => Err(fail()),
    }
}

/// Reads clock times such as "10:30", "10:30 pm" or "9 am".
pub fn normalize_time(surface: &str) -> Result<TimeOfDay, NormalizeError> {
    let fail = || NormalizeError::Time(surface.to_string());
    let lower = surface.to_lowercase().replace('.', "");
    let mut words = lower.split_whitespace();
    let clock = words.next().ok_or_else(fail)?;
    let meridiem = words.next();
    if words.next().is_some() {
        return Err(fail());
    }
    let (h, m) = match clock.split_once(':') {
        Some((h, m)) => (h, m),
        None => (clock, "0"),
    };
    let mut hour: u8 = h.parse().map_err(|_| fail())?;
    let minute: u8 = m.parse().map_err(|_| fail())?;
    if minute > 59 {
        return Err(fail());
    }
    match meridiem {
        None if clock.contains(':') && hour <= 23 => {}
        Some("am") if (1..=12).contains(&hour) => hour %= 12,
        Some("pm") if (1..=12).contains(&hour) => hour = hour % 12 + 12,
        _ => return Err(fail()),
    }
    Ok(TimeOfDay { hour, minute })
}
