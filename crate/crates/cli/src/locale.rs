//! Locale-aware decimal parsing and formatting.
//!
//! Source tables format numbers Russian-style ("89 330,76": spaces group
//! thousands, the comma is the decimal mark), which is ambiguous against
//! dot-decimal data ("122,000" reads as 122.0 or 122000 depending on
//! locale). A mis-parse by a factor of 1000 is the worst failure mode this
//! tool can have, so the locale is always declared by the caller — never
//! sniffed from the text — and every emitted number is dot-decimal.

use crate::error::{CliError, Result};
use serde::{Deserialize, Serialize};

/// Declared number format of an input file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Locale {
    /// Comma decimal mark; plain, no-break or narrow no-break spaces group
    /// thousands.
    RuDecimalComma,
    /// Dot decimal mark, no grouping.
    DotDecimal,
}

impl Locale {
    pub fn name(self) -> &'static str {
        match self {
            Locale::RuDecimalComma => "ru-decimal-comma",
            Locale::DotDecimal => "dot-decimal",
        }
    }
}

impl std::str::FromStr for Locale {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "ru-decimal-comma" | "ru" => Ok(Locale::RuDecimalComma),
            "dot-decimal" | "dot" => Ok(Locale::DotDecimal),
            other => Err(format!(
                "unknown locale '{other}' (expected ru-decimal-comma or dot-decimal)"
            )),
        }
    }
}

const GROUPING_SPACES: [char; 4] = [' ', '\u{00A0}', '\u{202F}', '\u{2009}'];

/// Parses one number under the declared locale.
pub fn parse_number(text: &str, locale: Locale) -> Result<f64> {
    let malformed = || CliError::MalformedNumber {
        text: text.to_string(),
        locale: locale.name(),
    };
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(malformed());
    }
    let has_dot = trimmed.contains('.');
    let has_comma = trimmed.contains(',');
    if has_dot && has_comma {
        return Err(CliError::MixedSeparators {
            text: text.to_string(),
        });
    }

    let mut normalized = String::with_capacity(trimmed.len());
    for (i, ch) in trimmed.chars().enumerate() {
        match ch {
            '0'..='9' => normalized.push(ch),
            '-' | '\u{2212}' if i == 0 => normalized.push('-'),
            '+' if i == 0 => {}
            ',' if locale == Locale::RuDecimalComma => normalized.push('.'),
            '.' if locale == Locale::DotDecimal => normalized.push('.'),
            c if locale == Locale::RuDecimalComma && GROUPING_SPACES.contains(&c) => {}
            _ => return Err(malformed()),
        }
    }
    if normalized.matches('.').count() > 1 {
        return Err(malformed());
    }
    normalized.parse::<f64>().map_err(|_| malformed())
}

/// Formats a number with two fractional digits under the locale's decimal
/// mark, without grouping. Reports always use `Locale::DotDecimal`.
pub fn format_number(x: f64, locale: Locale) -> String {
    let dot = format!("{x:.2}");
    match locale {
        Locale::DotDecimal => dot,
        Locale::RuDecimalComma => dot.replace('.', ","),
    }
}
